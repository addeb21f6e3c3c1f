// SPDX-License-Identifier: Apache-2.0
//
// isacsim - deterministic link-level simulator for sensing-assisted distributed MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Geometric MIMO channel construction. Each AP->UE link is a sum of rank-one
// terms: a direct path (when not shadowed by the target) and up to four
// single-bounce reflections off the target surfaces. The same ray tracer is
// fed either the true target pose or the sensed one; a pilot-based
// least-squares baseline perturbs the true channel with white noise.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "isacsim/rng.hpp"
#include "isacsim/scene.hpp"

namespace isacsim {

enum class PathKind { LoS, Reflection };

// One propagation path. Angles are global; gains already account for the
// array orientations at both ends.
struct PathDescriptor {
    PathKind kind = PathKind::LoS;
    int surface_id = 0; // 0 for LoS
    double aod = 0.0;   // rad at the AP, global frame
    double aoa = 0.0;   // rad at the UE, global frame
    std::complex<double> gain;
    double dist_total = 0.0;             // m, full path length
    std::optional<Point2D> bounce_point; // set for reflections
};

// Stacked channel of the whole network: UEs stack as block rows (n_ue_ant
// each), APs as block columns (n_tx each).
struct NetworkChannel {
    Eigen::MatrixXcd stacked;
    int n_ues = 0;
    int n_aps = 0;
    int n_ue_ant = 0;
    int n_tx = 0;

    NetworkChannel() = default;
    NetworkChannel(int ues, int aps, int ue_ant, int tx)
        : stacked(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ues) * ue_ant,
                                         static_cast<Eigen::Index>(aps) * tx)),
          n_ues(ues), n_aps(aps), n_ue_ant(ue_ant), n_tx(tx) {}

    Eigen::Block<Eigen::MatrixXcd> block(int u, int m) {
        return stacked.block(static_cast<Eigen::Index>(u) * n_ue_ant,
                             static_cast<Eigen::Index>(m) * n_tx, n_ue_ant, n_tx);
    }
    Eigen::Block<const Eigen::MatrixXcd> block(int u, int m) const {
        return stacked.block(static_cast<Eigen::Index>(u) * n_ue_ant,
                             static_cast<Eigen::Index>(m) * n_tx, n_ue_ant, n_tx);
    }
    // Block row of one UE across every AP.
    Eigen::Block<const Eigen::MatrixXcd> user_row(int u) const {
        return stacked.block(static_cast<Eigen::Index>(u) * n_ue_ant, 0, n_ue_ant,
                             stacked.cols());
    }
};

// Unit-norm ULA steering vector: entry i = (1/sqrt(n)) exp(-j pi i cos theta),
// theta relative to the array axis.
Eigen::VectorXcd steering(double theta, int n);

// Effective receive aperture of an n_ue-element ULA seen from angle theta_aoa
// (relative to the array axis): lambda * (1 + (n_ue - 1)|sin theta|).
double effective_aperture(double theta_aoa, int n_ue, double wavelength);

// Transmit beam footprint in radians: half-power beamwidth of an n-element
// ULA, 2 / (n |sin theta|), floored away from endfire at |sin theta| = 0.05.
double beam_footprint(double theta, int n);

// Direct-path gain: phase advances with the path length, magnitude is the
// captured fraction of the beam footprint at the UE, clamped at 1.
// aod_rel/aoa_rel are angles relative to the respective array axes.
std::complex<double> los_gain(double dist, double aod_rel, double aoa_rel, double wavelength,
                              int n_tx, int n_ue);

// Reflected-path gain: specular fraction (footprint capture over the full
// unfolded length, clamped, times specular reflectance) plus diffuse fraction
// (incidence-angle weighted), scaled by surface efficiency. incidence_sin is
// the sine of the angle between the incident ray and the surface.
std::complex<double> nlos_gain(double d1, double d2, const SurfaceReflectionProps& props,
                               double incidence_sin, double aod_rel, double aoa_rel,
                               double wavelength, int n_tx, int n_ue);

// All propagation paths between one AP and one UE for the given target pose:
// at most one direct path plus one reflection per target surface.
std::vector<PathDescriptor> trace_paths(const AccessPoint& ap, const UserEquipment& ue,
                                        const TargetState& t, double wavelength,
                                        const SurfaceReflectionProps& props);

// Sum of rank-one path terms: sqrt(n_tx n_ue) * gain * c(aoa) a(aod)^H.
Eigen::MatrixXcd build_channel(const std::vector<PathDescriptor>& paths, int n_ue, int n_tx,
                               double ue_axis, double ap_axis);

// Channel of every (UE, AP) pair for the true target pose.
NetworkChannel true_network_channel(const Scene& scene, const TargetState& true_target,
                                    double wavelength);

// Channel reconstructed by the sensing side: same ray tracer, target pose
// taken from the fused centroid (dimensions and heading are known priors
// copied from shape_prior).
NetworkChannel estimated_network_channel_sensing(const Scene& scene, Point2D centroid_hat,
                                                 const TargetState& shape_prior,
                                                 double wavelength);

// Pilot-based baseline: true channel plus i.i.d. complex Gaussian error of
// per-entry variance noise_power / (pilot_power * pilot_len). Error entries
// are drawn row-major from the given stream (real part first).
NetworkChannel estimated_network_channel_ls(const NetworkChannel& true_channel,
                                            double pilot_power, double pilot_len,
                                            double noise_power, Rng& rng);

} // namespace isacsim
