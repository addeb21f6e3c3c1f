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

#include "isacsim/sensing.hpp"

#include <cmath>

namespace isacsim {

std::vector<ScattererTruth> ground_truth_observables(const AccessPoint& ap,
                                                     const std::vector<Point2D>& scatterers,
                                                     const TargetState& t, double carrier_hz,
                                                     Rng& rcs_rng) {
    (void)carrier_hz; // Doppler is stored as radial speed; the frequency scaling happens later
    const double psi = std::atan2(t.heading.y, t.heading.x);
    std::vector<ScattererTruth> out;
    out.reserve(scatterers.size());
    for (const Point2D& p : scatterers) {
        ScattererTruth s;
        s.distance = distance(ap.position, p);
        if (s.distance <= 0.0)
            throw std::domain_error("ground_truth_observables: scatterer at AP position");
        s.azimuth = angle_of(ap.position, p);
        // All scatterers ride the rigid target: the radial rate is the speed
        // projected onto the line of sight.
        s.radial_speed = t.speed * std::cos(s.azimuth - psi);
        s.rcs = rcs_rng.cgauss_unit();
        out.push_back(s);
    }
    return out;
}

std::complex<double> reflection_gain(double d, std::complex<double> rcs) {
    if (d <= 0.0)
        throw std::domain_error("reflection_gain: nonpositive distance");
    return rcs / (4.0 * d * d);
}

std::complex<double> steering_inner_product(double theta_true, double phi_pred, int n) {
    // a(theta)^H a(phi) = (1/n) sum_i exp(-j pi i (cos phi - cos theta)),
    // a geometric series with the closed form below. Near the series'
    // removable singularities the direct sum is exact and cheap.
    const double delta = std::cos(phi_pred) - std::cos(theta_true);
    const double half = 0.5 * kPi * delta;
    const double den = std::sin(half);
    if (std::abs(den) < 1e-9) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += std::polar(1.0, -kPi * i * delta);
        return acc / static_cast<double>(n);
    }
    const double mag = std::sin(n * half) / (n * den);
    return std::polar(1.0, -half * (n - 1)) * mag;
}

MeasurementVariances measurement_variances(const NoiseModel& nm, double tx_power,
                                           std::complex<double> beta,
                                           std::complex<double> rho) {
    const double b2 = std::norm(beta);
    const double r2 = std::norm(rho);
    if (b2 <= 0.0 || r2 <= 0.0)
        throw std::domain_error("measurement_variances: scatterer returns no echo power");
    const double denom =
        tx_power * nm.mf_gain * nm.array_gain * nm.array_gain * b2 * r2;
    const double base = nm.noise_power / denom;
    return {nm.a_tau * nm.a_tau * base, nm.a_mu * nm.a_mu * base,
            nm.a_theta * nm.a_theta * base};
}

std::vector<Measurement> synthesize_measurements(const std::vector<SensedScatterer>& in,
                                                 double carrier_hz, std::uint64_t seed,
                                                 std::uint64_t frame, int ap_index) {
    std::vector<Measurement> out;
    out.reserve(in.size());
    for (const SensedScatterer& s : in) {
        Rng rng = make_stream({seed, frame, static_cast<std::uint64_t>(ap_index),
                               static_cast<std::uint64_t>(s.k), kStreamMeasNoise});
        Measurement m;
        m.ap_index = ap_index;
        m.scatterer_index = s.k;
        m.delay_hat = 2.0 * s.truth.distance / kSpeedOfLight +
                      std::sqrt(s.var_delay) * rng.gauss();
        m.doppler_hat = 2.0 * s.truth.radial_speed * carrier_hz / kSpeedOfLight +
                        std::sqrt(s.var_doppler) * rng.gauss();
        m.angle_hat = wrap_angle(s.truth.azimuth + std::sqrt(s.var_angle) * rng.gauss());
        m.var_delay = s.var_delay;
        m.var_doppler = s.var_doppler;
        m.var_angle = s.var_angle;
        out.push_back(m);
    }
    return out;
}

FusedEstimate fuse_position(const MeasurementBatch& batch, const std::vector<AccessPoint>& aps) {
    if (batch.items.empty())
        throw std::domain_error("fuse_position: empty measurement batch");
    double sx = 0.0, sy = 0.0;
    for (const Measurement& m : batch.items) {
        const Point2D ap = aps.at(static_cast<std::size_t>(m.ap_index)).position;
        const double range = kSpeedOfLight * m.delay_hat / 2.0;
        sx += ap.x + range * std::cos(m.angle_hat);
        sy += ap.y + range * std::sin(m.angle_hat);
    }
    FusedEstimate f;
    f.x_hat = sx / static_cast<double>(batch.items.size());
    f.y_hat = sy / static_cast<double>(batch.items.size());
    return f;
}

double fuse_velocity(const MeasurementBatch& batch, double heading_angle, double carrier_hz) {
    if (batch.items.empty())
        throw EstimationFailure("fuse_velocity: empty measurement batch");
    // Per AP, WLS on doppler = (2 f_c / c) * v * cos(angle - heading):
    // v_m = sum(mu * g / var) / sum(g^2 / var), then plain average over APs.
    struct Acc {
        double num = 0.0, den = 0.0;
        bool seen = false;
    };
    std::vector<Acc> acc;
    for (const Measurement& m : batch.items) {
        const auto idx = static_cast<std::size_t>(m.ap_index);
        if (idx >= acc.size())
            acc.resize(idx + 1);
        const double g = std::cos(m.angle_hat - heading_angle);
        acc[idx].num += m.doppler_hat * g / m.var_doppler;
        acc[idx].den += g * g / m.var_doppler;
        acc[idx].seen = true;
    }
    double sum = 0.0;
    int used = 0;
    for (const Acc& a : acc) {
        if (!a.seen)
            continue;
        if (!(a.den > 1e-18) || !std::isfinite(a.den) || !std::isfinite(a.num))
            continue; // every regressor at broadside: this AP carries no speed information
        sum += a.num / a.den;
        ++used;
    }
    if (used == 0)
        throw EstimationFailure("fuse_velocity: no AP provides a usable Doppler equation");
    return kSpeedOfLight / (2.0 * carrier_hz) * (sum / used);
}

TrackState predict_track(const FusedEstimate& fused, const Point2D& heading,
                         double frame_duration, const std::vector<AccessPoint>& aps) {
    TrackState ts;
    ts.predicted_centroid = Point2D{fused.x_hat, fused.y_hat} +
                            (fused.v_hat * frame_duration) * heading;
    ts.predicted_angle_per_ap.reserve(aps.size());
    for (const AccessPoint& ap : aps)
        ts.predicted_angle_per_ap.push_back(angle_of(ap.position, ts.predicted_centroid));
    return ts;
}

} // namespace isacsim
