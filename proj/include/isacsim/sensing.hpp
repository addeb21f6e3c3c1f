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

// Monostatic sensing at the measurement level: each AP observes every target
// scatterer as a noisy (round-trip delay, Doppler, azimuth) triple whose
// noise variance follows the radar link budget, and the per-AP measurements
// are fused into a centroid/speed estimate plus a beam prediction for the
// next frame.

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "isacsim/rng.hpp"
#include "isacsim/scene.hpp"

namespace isacsim {

// Noise-free observables of one scatterer as seen from one AP. azimuth is
// the global polar angle AP -> scatterer; radial_speed is the projection of
// the target velocity onto that direction (positive when receding).
struct ScattererTruth {
    double distance = 0.0;     // m
    double azimuth = 0.0;      // rad, global frame
    double radial_speed = 0.0; // m/s
    std::complex<double> rcs;  // per-look complex reflectivity
};

// Constants of the measurement-noise budget. Noise variance of quantity i is
// a_i^2 * noise_power / (tx_power * mf_gain * |array_gain * beta|^2 * |rho|^2).
struct NoiseModel {
    double a_tau = 6.7e-7;  // s
    double a_mu = 2.0e4;    // Hz
    double a_theta = 1.0;   // rad
    double mf_gain = 1.0e4; // waveform processing gain
    double array_gain = 1.0;
    double noise_power = 1.0; // W
};

struct Measurement {
    int ap_index = 0;
    int scatterer_index = 0;
    double delay_hat = 0.0;   // s
    double doppler_hat = 0.0; // Hz
    double angle_hat = 0.0;   // rad, global frame, [0, 2*pi)
    double var_delay = 0.0;
    double var_doppler = 0.0;
    double var_angle = 0.0;
};

struct MeasurementBatch {
    std::vector<Measurement> items;
    int n_aps = 0; // number of APs that contributed
};

struct FusedEstimate {
    double x_hat = 0.0;
    double y_hat = 0.0;
    double v_hat = 0.0;
};

// Geometry handed to the next frame's sensing slot: where each AP should
// point its sensing beam.
struct TrackState {
    Point2D predicted_centroid;
    std::vector<double> predicted_angle_per_ap; // rad, global frame, [0, 2*pi)
};

// Raised when no AP yields a usable velocity equation (or a batch is empty);
// the caller decides how to coast the track.
struct EstimationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One retained scatterer going into measurement synthesis, tagged with its
// stable index so noise streams stay aligned when scatterers are dropped.
struct SensedScatterer {
    int k = 0;
    ScattererTruth truth;
    double var_delay = 0.0;
    double var_doppler = 0.0;
    double var_angle = 0.0;
};

// Noise-free observables for every scatterer seen from one AP. rcs_rng must
// be a per-(frame, AP) stream; one complex draw is consumed per scatterer in
// order. Throws std::domain_error if a scatterer coincides with the AP.
std::vector<ScattererTruth> ground_truth_observables(const AccessPoint& ap,
                                                     const std::vector<Point2D>& scatterers,
                                                     const TargetState& t, double carrier_hz,
                                                     Rng& rcs_rng);

// Round-trip amplitude of one scatterer: rcs / (2 d)^2.
std::complex<double> reflection_gain(double d, std::complex<double> rcs);

// Inner product a(theta)^H a(phi) of two unit ULA steering vectors with n
// elements and half-wavelength spacing. Both angles must be expressed
// relative to the same array axis. |result| <= 1.
std::complex<double> steering_inner_product(double theta_true, double phi_pred, int n);

struct MeasurementVariances {
    double delay, doppler, angle;
};

// Per-scatterer noise variances given the link budget. Throws
// std::domain_error when beta or rho vanish (no echo power at all).
MeasurementVariances measurement_variances(const NoiseModel& nm, double tx_power,
                                           std::complex<double> beta, std::complex<double> rho);

// Truth + independent zero-mean Gaussian noise. Delay truth is 2 d / c,
// Doppler truth 2 v_r f_c / c. Noise streams are keyed by (seed, frame, ap,
// scatterer); per scatterer the draws are delay, Doppler, angle in that order.
std::vector<Measurement> synthesize_measurements(const std::vector<SensedScatterer>& in,
                                                 double carrier_hz, std::uint64_t seed,
                                                 std::uint64_t frame, int ap_index);

// Centroid estimate: every (AP, scatterer) delay/angle pair is converted to a
// global position (AP position plus the measured range vector at half the
// round-trip distance) and all positions are averaged. Throws
// std::domain_error on an empty batch.
FusedEstimate fuse_position(const MeasurementBatch& batch, const std::vector<AccessPoint>& aps);

// Scalar speed along the known heading via per-AP weighted least squares
// over the Doppler equations, averaged across APs. APs whose regressors all
// vanish are excluded; if every AP is excluded, throws EstimationFailure.
double fuse_velocity(const MeasurementBatch& batch, double heading_angle, double carrier_hz);

// Dead-reckons the fused estimate one frame ahead along the heading and
// recomputes the beam-pointing angle for every AP. Throws std::domain_error
// if the predicted centroid lands on an AP.
TrackState predict_track(const FusedEstimate& fused, const Point2D& heading,
                         double frame_duration, const std::vector<AccessPoint>& aps);

// Retention threshold on |rho|^2 below which a scatterer is treated as
// unmeasurable (deep beam null) and excluded from the frame's batch.
constexpr double kMinBeamGainSq = 1e-6;

} // namespace isacsim
