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

#include "isacsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace isacsim {

Eigen::VectorXcd steering(double theta, int n) {
    if (n < 1)
        throw std::domain_error("steering: need at least one element");
    Eigen::VectorXcd v(n);
    const double c = std::cos(theta);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i)
        v(i) = std::polar(scale, -kPi * i * c);
    return v;
}

double effective_aperture(double theta_aoa, int n_ue, double wavelength) {
    return wavelength * (1.0 + (n_ue - 1) * std::abs(std::sin(theta_aoa)));
}

double beam_footprint(double theta, int n) {
    const double s = std::max(std::abs(std::sin(theta)), 0.05);
    return 2.0 / (n * s);
}

std::complex<double> los_gain(double dist, double aod_rel, double aoa_rel, double wavelength,
                              int n_tx, int n_ue) {
    if (dist <= 0.0)
        throw std::domain_error("los_gain: nonpositive distance");
    const double aperture = effective_aperture(aoa_rel, n_ue, wavelength);
    const double footprint = beam_footprint(aod_rel, n_tx);
    const double captured = std::min(aperture / (footprint * dist), 1.0);
    return std::polar(std::sqrt(captured), 2.0 * kPi * dist / wavelength);
}

std::complex<double> nlos_gain(double d1, double d2, const SurfaceReflectionProps& props,
                               double incidence_sin, double aod_rel, double aoa_rel,
                               double wavelength, int n_tx, int n_ue) {
    if (d1 <= 0.0 || d2 <= 0.0)
        throw std::domain_error("nlos_gain: degenerate path leg");
    const double aperture = effective_aperture(aoa_rel, n_ue, wavelength);
    const double footprint = beam_footprint(aod_rel, n_tx);
    const double total = d1 + d2;
    const double specular = std::min(aperture / (footprint * total), 1.0) * props.specular;
    const double diffuse = incidence_sin * incidence_sin * aperture /
                           std::sqrt(4.0 * d2 * d2 + aperture * aperture) * props.diffuse;
    const double mag = std::sqrt(props.efficiency * (specular + diffuse));
    // Phase: surface shift minus the accumulated propagation phase.
    return std::polar(mag, 2.0 * kPi * total / wavelength - props.phase_shift);
}

std::vector<PathDescriptor> trace_paths(const AccessPoint& ap, const UserEquipment& ue,
                                        const TargetState& t, double wavelength,
                                        const SurfaceReflectionProps& props) {
    std::vector<PathDescriptor> paths;

    if (los_exists(ap, ue, t)) {
        PathDescriptor p;
        p.kind = PathKind::LoS;
        p.aod = angle_of(ap.position, ue.position);
        p.aoa = angle_of(ue.position, ap.position);
        p.dist_total = distance(ap.position, ue.position);
        p.gain = los_gain(p.dist_total, p.aod - ap.array_axis, p.aoa - ue.array_axis,
                          wavelength, ap.n_tx, ue.n_ant);
        paths.push_back(p);
    }

    if (!(t.length > 0.0) || !(t.width > 0.0))
        return paths; // a point target reflects nothing

    for (const Surface& s : target_surfaces(t)) {
        const auto bounce = reflection_point(ap.position, ue.position, s, t);
        if (!bounce)
            continue;
        PathDescriptor p;
        p.kind = PathKind::Reflection;
        p.surface_id = s.id;
        p.bounce_point = *bounce;
        p.aod = angle_of(ap.position, *bounce);
        p.aoa = angle_of(ue.position, *bounce);
        const double d1 = distance(ap.position, *bounce);
        const double d2 = distance(*bounce, ue.position);
        p.dist_total = d1 + d2;
        // Sine of the grazing angle between the incident ray and the surface.
        const Point2D eh = (1.0 / distance(s.p_start, s.p_end)) * (s.p_end - s.p_start);
        const Point2D inc = (1.0 / d1) * (*bounce - ap.position);
        const double inc_sin = std::abs(cross(inc, eh));
        p.gain = nlos_gain(d1, d2, props, inc_sin, p.aod - ap.array_axis,
                           p.aoa - ue.array_axis, wavelength, ap.n_tx, ue.n_ant);
        paths.push_back(p);
    }
    return paths;
}

Eigen::MatrixXcd build_channel(const std::vector<PathDescriptor>& paths, int n_ue, int n_tx,
                               double ue_axis, double ap_axis) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n_ue, n_tx);
    const double amp = std::sqrt(static_cast<double>(n_tx) * n_ue);
    for (const PathDescriptor& p : paths) {
        const Eigen::VectorXcd rx = steering(p.aoa - ue_axis, n_ue);
        const Eigen::VectorXcd tx = steering(p.aod - ap_axis, n_tx);
        h.noalias() += (amp * p.gain) * (rx * tx.adjoint());
    }
    return h;
}

NetworkChannel true_network_channel(const Scene& scene, const TargetState& true_target,
                                    double wavelength) {
    const int ues = static_cast<int>(scene.ues.size());
    const int aps = static_cast<int>(scene.aps.size());
    if (ues == 0 || aps == 0)
        throw std::domain_error("true_network_channel: empty roster");
    const int n_ue_ant = scene.ues.front().n_ant;
    const int n_tx = scene.aps.front().n_tx;
    NetworkChannel nc(ues, aps, n_ue_ant, n_tx);
    for (int u = 0; u < ues; ++u) {
        for (int m = 0; m < aps; ++m) {
            const auto paths =
                trace_paths(scene.aps[static_cast<std::size_t>(m)],
                            scene.ues[static_cast<std::size_t>(u)], true_target, wavelength,
                            scene.surface);
            nc.block(u, m) = build_channel(paths, n_ue_ant, n_tx,
                                           scene.ues[static_cast<std::size_t>(u)].array_axis,
                                           scene.aps[static_cast<std::size_t>(m)].array_axis);
        }
    }
    return nc;
}

NetworkChannel estimated_network_channel_sensing(const Scene& scene, Point2D centroid_hat,
                                                 const TargetState& shape_prior,
                                                 double wavelength) {
    TargetState est = shape_prior;
    est.centroid = centroid_hat;
    return true_network_channel(scene, est, wavelength);
}

NetworkChannel estimated_network_channel_ls(const NetworkChannel& true_channel,
                                            double pilot_power, double pilot_len,
                                            double noise_power, Rng& rng) {
    if (!(pilot_power > 0.0) || !(pilot_len > 0.0))
        throw std::domain_error("estimated_network_channel_ls: nonpositive pilot energy");
    NetworkChannel est = true_channel;
    const double sigma = std::sqrt(noise_power / (pilot_power * pilot_len));
    for (Eigen::Index i = 0; i < est.stacked.rows(); ++i)
        for (Eigen::Index j = 0; j < est.stacked.cols(); ++j)
            est.stacked(i, j) += sigma * rng.cgauss_unit();
    return est;
}

} // namespace isacsim
