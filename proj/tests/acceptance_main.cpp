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

// End-to-end acceptance gate. Five criteria, one [PASS]/[FAIL] line each:
//   1. reference configuration reaches the expected sensing accuracy in time
//   2. channel fidelity: sensing correlation high, pilot baseline in band
//      and degrading with network size
//   3. throughput ordering across AP-count and power sweeps, with
//      confidence-interval separation between the estimators
//   4. analytic property suites plus byte-level run determinism
//   5. a miniature instance agrees with an independent straight-line
//      re-implementation of the whole pipeline to 1e-9
//
// Usage: acceptance <source-dir> <cli-binary>

#include "isacsim/channel.hpp"
#include "isacsim/comm.hpp"
#include "isacsim/config.hpp"
#include "isacsim/engine.hpp"
#include "isacsim/rng.hpp"
#include "isacsim/scene.hpp"
#include "isacsim/sensing.hpp"
#include "mini_oracle.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace isacsim;

namespace {

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

void run_cmd(const std::string& cmd, const fs::path& log) {
    const std::string full = cmd + " > " + q(log) + " 2>&1";
    const int rc = std::system(full.c_str());
    if (rc != 0)
        throw std::runtime_error("command failed (status " + std::to_string(rc) +
                                 "): " + cmd + " [log: " + log.string() + "]");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot open " + p.string());
    json j;
    in >> j;
    return j;
}

struct SweepPoint {
    double tput = 0, tput_ci = 0, corr = 0, corr_ci = 0;
};

// value -> estimator -> aggregated metrics, "ok" rows only.
using SweepTable = std::map<double, std::map<std::string, SweepPoint>>;

SweepTable parse_sweep(const fs::path& csv) {
    std::ifstream in(csv);
    if (!in)
        throw std::runtime_error("cannot open " + csv.string());
    std::string line;
    std::getline(in, line); // header
    SweepTable t;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (f.size() < 10 || f[9] != "ok")
            continue;
        SweepPoint p;
        p.tput = std::stod(f[3]);
        p.tput_ci = std::stod(f[4]);
        p.corr = std::stod(f[5]);
        p.corr_ci = std::stod(f[6]);
        t[std::stod(f[1])][f[2]] = p;
    }
    return t;
}

// ------------------------------------------------------------------ shared
// deterministic randomness for the property suites

TargetState random_target(Rng& r) {
    TargetState t;
    t.centroid = {60.0 + 80.0 * r.uniform(), 60.0 + 80.0 * r.uniform()};
    const double psi = 2.0 * kPi * r.uniform();
    t.heading = {std::cos(psi), std::sin(psi)};
    t.speed = 0.5 + 3.0 * r.uniform();
    t.length = 1.0 + 9.0 * r.uniform();
    t.width = 0.5 + 4.5 * r.uniform();
    return t;
}

NetworkChannel random_channel(int ues, int aps, int ant, int tx, Rng& r) {
    NetworkChannel nc(ues, aps, ant, tx);
    for (Eigen::Index i = 0; i < nc.stacked.rows(); ++i)
        for (Eigen::Index j = 0; j < nc.stacked.cols(); ++j)
            nc.stacked(i, j) = r.cgauss_unit();
    return nc;
}

// ----------------------------------------------------------- property suites

// Sight blockage re-derived as brute-force segment/segment intersection.
bool suite_los_oracle() {
    Rng r = make_stream({401, 0, 0, 0, 91});
    for (int i = 0; i < 10000; ++i) {
        const TargetState t = random_target(r);
        AccessPoint ap;
        ap.position = {20.0 * r.uniform(), 200.0 * r.uniform()};
        UserEquipment ue;
        ue.position = {180.0 + 20.0 * r.uniform(), 200.0 * r.uniform()};

        bool blocked = false;
        for (const Surface& s : target_surfaces(t)) {
            const Point2D d = ue.position - ap.position;
            const Point2D e = s.p_end - s.p_start;
            const Point2D w = s.p_start - ap.position;
            const double den = cross(d, e);
            if (std::abs(den) < 1e-15)
                continue;
            const double tt = cross(w, e) / den;
            const double sv = cross(w, d) / den;
            if (tt > 0.0 && tt < 1.0 && sv >= 0.0 && sv <= 1.0) {
                blocked = true;
                break;
            }
        }
        if (los_exists(ap, ue, t) != !blocked)
            return false;
    }
    return true;
}

// Mirroring twice is the identity; a found bounce obeys the reflection law.
bool suite_mirror_and_reflection_law() {
    Rng r = make_stream({402, 0, 0, 0, 92});
    int found = 0;
    double worst_inv = 0.0, worst_law = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const TargetState t = random_target(r);
        const auto surfs = target_surfaces(t);
        const Point2D p{200.0 * r.uniform(), 200.0 * r.uniform()};
        const Surface& s = surfs[static_cast<std::size_t>(i % 4)];
        const Point2D mm = mirror_point(mirror_point(p, s), s);
        worst_inv = std::max(worst_inv, distance(mm, p));

        const Point2D ap{200.0 * r.uniform(), 200.0 * r.uniform()};
        const Point2D ue{200.0 * r.uniform(), 200.0 * r.uniform()};
        for (const Surface& sf : surfs) {
            const auto b = reflection_point(ap, ue, sf, t);
            if (!b)
                continue;
            ++found;
            const Point2D inc = (1.0 / distance(ap, *b)) * (*b - ap);
            const Point2D out = (1.0 / distance(*b, ue)) * (ue - *b);
            const Point2D eh =
                (1.0 / distance(sf.p_start, sf.p_end)) * (sf.p_end - sf.p_start);
            const Point2D refl = 2.0 * dot(inc, eh) * eh - inc;
            worst_law = std::max(worst_law, norm(out - refl));
        }
    }
    return worst_inv < 1e-9 && worst_law < 1e-9 && found > 100;
}

// Noise-free measurements fuse back to the exact scatterer mean and speed.
bool suite_zero_noise_fusion() {
    SimConfig c;
    c.n_aps = 3;
    c.n_ues = 1;
    c.target_heading_deg = 25.0;
    c.target_speed = 1.7;
    c.target_start = {100.0, 80.0};
    const Scene sc = c.make_scene();
    const TargetState t = c.initial_target();
    const double psi = c.heading_rad();
    const auto pts = scatterer_grid(t, 4);

    MeasurementBatch batch;
    batch.n_aps = c.n_aps;
    Point2D mean{0, 0};
    for (int m = 0; m < c.n_aps; ++m) {
        const Point2D ap = sc.aps[static_cast<std::size_t>(m)].position;
        for (int k = 0; k < static_cast<int>(pts.size()); ++k) {
            const Point2D& p = pts[static_cast<std::size_t>(k)];
            const double d = distance(ap, p);
            const double az = angle_of(ap, p);
            Measurement ms;
            ms.ap_index = m;
            ms.scatterer_index = k;
            ms.delay_hat = 2.0 * d / kSpeedOfLight;
            ms.doppler_hat = 2.0 * t.speed * std::cos(az - psi) * c.carrier_hz / kSpeedOfLight;
            ms.angle_hat = az;
            ms.var_delay = ms.var_doppler = ms.var_angle = 1.0;
            batch.items.push_back(ms);
            mean = mean + (1.0 / static_cast<double>(c.n_aps * pts.size())) * p;
        }
    }
    const FusedEstimate f = fuse_position(batch, sc.aps);
    const double v = fuse_velocity(batch, psi, c.carrier_hz);
    return std::abs(f.x_hat - mean.x) < 1e-9 && std::abs(f.y_hat - mean.y) < 1e-9 &&
           std::abs(f.x_hat - t.centroid.x) < 1e-9 &&
           std::abs(f.y_hat - t.centroid.y) < 1e-9 && std::abs(v - t.speed) < 1e-9;
}

// Measurement variance scales exactly as 1/power.
bool suite_variance_scaling() {
    Rng r = make_stream({404, 0, 0, 0, 94});
    const NoiseModel nm = SimConfig{}.noise_model();
    for (int i = 0; i < 1000; ++i) {
        const double p1 = 0.01 + 2.0 * r.uniform();
        const double p2 = 0.01 + 2.0 * r.uniform();
        const auto beta = r.cgauss_unit();
        const auto rho = r.cgauss_unit();
        const auto v1 = measurement_variances(nm, p1, beta, rho);
        const auto v2 = measurement_variances(nm, p2, beta, rho);
        if (std::abs(v1.delay * p1 / (v2.delay * p2) - 1.0) > 1e-12 ||
            std::abs(v1.doppler * p1 / (v2.doppler * p2) - 1.0) > 1e-12 ||
            std::abs(v1.angle * p1 / (v2.angle * p2) - 1.0) > 1e-12)
            return false;
    }
    return true;
}

// Synthesized measurement noise has the advertised first two moments.
bool suite_noise_moments() {
    ScattererTruth st;
    st.distance = 80.0;
    st.azimuth = 0.7;
    st.radial_speed = 1.2;
    const SensedScatterer in{0, st, 4e-16, 900.0, 1e-4};
    const double carrier = 60e9;
    const double truth[3] = {2.0 * st.distance / kSpeedOfLight,
                             2.0 * st.radial_speed * carrier / kSpeedOfLight, st.azimuth};
    const double sd[3] = {std::sqrt(in.var_delay), std::sqrt(in.var_doppler),
                          std::sqrt(in.var_angle)};
    const int n = 100000;
    double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const auto ms =
            synthesize_measurements({in}, carrier, 7, static_cast<std::uint64_t>(i), 0);
        const double z[3] = {(ms[0].delay_hat - truth[0]) / sd[0],
                             (ms[0].doppler_hat - truth[1]) / sd[1],
                             (ms[0].angle_hat - truth[2]) / sd[2]};
        for (int c = 0; c < 3; ++c) {
            sum[c] += z[c];
            sq[c] += z[c] * z[c];
        }
    }
    for (int c = 0; c < 3; ++c) {
        const double mean = sum[c] / n;
        const double var = sq[c] / n - mean * mean;
        if (std::abs(mean) > 0.05 || std::abs(var - 1.0) > 0.05)
            return false;
    }
    return true;
}

bool suite_steering_norm() {
    Rng r = make_stream({406, 0, 0, 0, 96});
    for (int n = 1; n <= 64; ++n) {
        const double theta = 2.0 * kPi * r.uniform();
        if (std::abs(steering(theta, n).squaredNorm() - 1.0) > 1e-12)
            return false;
    }
    return true;
}

// A k-path block has rank at most k and Frobenius norm within the triangle
// bound sqrt(n_tx n_ue) * sum |gain|.
bool suite_channel_rank_norm() {
    Rng r = make_stream({407, 0, 0, 0, 97});
    const double lambda = kSpeedOfLight / 60e9;
    SurfaceReflectionProps props;
    int nonempty = 0;
    for (int i = 0; i < 500; ++i) {
        const TargetState t = random_target(r);
        AccessPoint ap;
        ap.position = {200.0 * r.uniform(), 200.0 * r.uniform()};
        ap.n_tx = 8;
        ap.n_rx = 8;
        ap.array_axis = 2.0 * kPi * r.uniform();
        UserEquipment ue;
        ue.position = {200.0 * r.uniform(), 200.0 * r.uniform()};
        ue.n_ant = 4;
        ue.array_axis = 2.0 * kPi * r.uniform();
        if (distance(ap.position, ue.position) < 1.0)
            continue;

        std::vector<PathDescriptor> paths;
        try {
            paths = trace_paths(ap, ue, t, lambda, props);
        } catch (const std::domain_error&) {
            continue; // node degenerately close to the target surface
        }
        const Eigen::MatrixXcd h =
            build_channel(paths, ue.n_ant, ap.n_tx, ue.array_axis, ap.array_axis);
        if (paths.empty()) {
            if (h.norm() != 0.0)
                return false;
            continue;
        }
        ++nonempty;
        const double amp = std::sqrt(8.0 * 4.0);
        double bound = 0.0;
        for (const auto& p : paths)
            bound += amp * std::abs(p.gain);
        if (h.norm() > bound * (1.0 + 1e-9) + 1e-12)
            return false;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
        const auto& sv = svd.singularValues();
        for (Eigen::Index k = static_cast<Eigen::Index>(paths.size()); k < sv.size(); ++k)
            if (sv(k) > 1e-9 * sv(0) + 1e-15)
                return false;
    }
    return nonempty > 100;
}

// An exact estimate correlates perfectly, in both trace conventions.
bool suite_self_correlation() {
    Rng r = make_stream({408, 0, 0, 0, 98});
    for (int i = 0; i < 200; ++i) {
        const NetworkChannel nc = random_channel(2, 2, 2, 4, r);
        if (std::abs(channel_correlation(nc, nc, false) - 1.0) > 1e-12 ||
            std::abs(channel_correlation(nc, nc, true) - 1.0) > 1e-12)
            return false;
    }
    return true;
}

// Zero-forcing weights invert a full-rank channel without regularization.
bool suite_zf_identity() {
    Rng r = make_stream({409, 0, 0, 0, 99});
    for (int i = 0; i < 100; ++i) {
        const NetworkChannel nc = random_channel(2, 2, 2, 4, r);
        const BeamformerSet bf = zf_weights(nc);
        const Eigen::MatrixXcd e = nc.stacked * bf.full;
        const Eigen::Index n = e.rows();
        if (bf.regularized ||
            (e - Eigen::MatrixXcd::Identity(n, n)).norm() > 1e-9)
            return false;
    }
    return true;
}

// The slot throughput equals an eigenvalue-based recomputation.
bool suite_logdet_oracle() {
    Rng r = make_stream({410, 0, 0, 0, 100});
    const double p_m = 0.2, noise = 1e-3;
    const int n_aps = 2, ues = 2, na = 2;
    for (int i = 0; i < 100; ++i) {
        const NetworkChannel h = random_channel(ues, n_aps, na, 4, r);
        const NetworkChannel g = random_channel(ues, n_aps, na, 4, r);
        const BeamformerSet bf = zf_weights(g);
        const double got = slot_throughput(h, bf, p_m, n_aps, noise).total;

        const double p_u = n_aps * p_m;
        const Eigen::MatrixXcd e = h.stacked * bf.full;
        double want = 0.0;
        for (int u = 0; u < ues; ++u) {
            Eigen::MatrixXcd r_i = noise * Eigen::MatrixXcd::Identity(na, na);
            Eigen::MatrixXcd r_s = Eigen::MatrixXcd::Zero(na, na);
            for (int v = 0; v < ues; ++v) {
                const double wn =
                    bf.full.block(0, static_cast<Eigen::Index>(v) * na, bf.full.rows(), na)
                        .squaredNorm();
                const Eigen::MatrixXcd blk =
                    e.block(static_cast<Eigen::Index>(u) * na,
                            static_cast<Eigen::Index>(v) * na, na, na);
                const Eigen::MatrixXcd cov = (p_u / wn) * (blk * blk.adjoint());
                if (v == u)
                    r_s = cov;
                else
                    r_i += cov;
            }
            auto log2det = [](const Eigen::MatrixXcd& a) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
                double acc = 0.0;
                for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
                    acc += std::log2(es.eigenvalues()(k));
                return acc;
            };
            want += std::max(0.0, log2det(r_s + r_i) - log2det(r_i));
        }
        if (std::abs(got - want) > 1e-9 * std::max(1.0, std::abs(want)))
            return false;
    }
    return true;
}

// Weights from the true channel beat weights from a noisy estimate on
// average.
bool suite_degradation() {
    Rng r = make_stream({411, 0, 0, 0, 101});
    double perfect = 0.0, degraded = 0.0;
    const int trials = 300;
    for (int i = 0; i < trials; ++i) {
        const NetworkChannel h = random_channel(2, 2, 2, 4, r);
        NetworkChannel est = h;
        const double sigma =
            0.35 * h.stacked.norm() / std::sqrt(static_cast<double>(h.stacked.size()));
        for (Eigen::Index a = 0; a < est.stacked.rows(); ++a)
            for (Eigen::Index b = 0; b < est.stacked.cols(); ++b)
                est.stacked(a, b) += sigma * r.cgauss_unit();
        perfect += slot_throughput(h, zf_weights(h), 0.2, 2, 1e-3).total;
        degraded += slot_throughput(h, zf_weights(est), 0.2, 2, 1e-3).total;
    }
    return perfect / trials >= degraded / trials;
}

// ------------------------------------------------------------ mini instance

constexpr const char* kMiniConfig = R"(# miniature end-to-end instance
room_size_m: 200
ap_positions: 0,0; 200,0
ue_positions: 100,40
n_aps: 2
n_ues: 1
n_tx: 4
n_rx: 4
n_ue_ant: 2
carrier_ghz: 60
bandwidth_mhz: 500
slot_ms: 50
frame_ms: 500
tx_power_dbm: 23
ue_power_dbm: 23
noise_power_dbm: -87
a_tau: 6.7e-07
a_mu: 20000
a_theta: 1
mf_gain: 6.2
scatterers_k: 2
scatterer_layout: uniform
target_speed_mps: 2
target_length_m: 5
target_width_m: 2
target_start_x: 75
target_start_y: 60
target_heading_deg: 0
ls_pilot_budget: 5.35e-07
frames: 3
seeds: 11
estimators: ls,perfect,sensing
record_trace: true
)";

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <source-dir> <cli-binary>\n";
        return 2;
    }
    const fs::path src = argv[1];
    const fs::path cli = argv[2];
    const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path work =
        fs::temp_directory_path() / ("isacsim-acceptance-" + std::to_string(tick));
    fs::create_directories(work);

    bool all_pass = true;
    const auto report = [&](int n, bool ok, const std::string& detail) {
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << detail
                  << std::endl;
        if (!ok)
            all_pass = false;
    };

    const fs::path golden_cfg = src / "configs" / "golden.cfg";
    const fs::path golden_out = work / "golden";

    // Criterion 1: reference accuracy and runtime.
    {
        bool ok = false;
        std::string detail;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            run_cmd(q(cli) + " run " + q(golden_cfg) + " --out " + q(golden_out),
                    work / "golden.log");
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const json j = load_json(golden_out / "summary.json");
            const double pos = j["results"]["mean_pos_error_m"];
            const int seeds = j["results"]["n_seeds"];
            ok = pos >= 0.17 && pos <= 0.57 && secs < 120.0 && seeds >= 20;
            detail = "reference config, " + std::to_string(seeds) +
                     " seeds x 100 frames: mean centroid error " + fmt(pos) +
                     " m (required [0.17, 0.57]) in " + fmt(secs, 3) + " s (limit 120)";
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        report(1, ok, detail);
    }

    // Criterion 2: channel estimate fidelity.
    SweepTable aps_rows;
    {
        bool ok = false;
        std::string detail;
        try {
            const json j = load_json(golden_out / "summary.json");
            const double sens_corr =
                j["results"]["estimators"]["sensing"]["mean_correlation"];
            const double ls_corr = j["results"]["estimators"]["ls"]["mean_correlation"];

            run_cmd(q(cli) + " sweep " + q(golden_cfg) +
                        " --param aps --values 2,3,4,5 --out " + q(work / "aps"),
                    work / "aps.log");
            aps_rows = parse_sweep(work / "aps" / "sweep.csv");

            bool mono = true;
            std::string seq;
            double prev = 2.0;
            for (const double m : {2.0, 3.0, 4.0, 5.0}) {
                const double c = aps_rows.at(m).at("ls").corr;
                mono = mono && c <= prev;
                prev = c;
                seq += (seq.empty() ? "" : "/") + fmt(c, 3);
            }
            ok = sens_corr > 0.99 && ls_corr >= 0.45 && ls_corr <= 0.75 && mono;
            detail = "sensing correlation " + fmt(sens_corr) +
                     " (> 0.99 required), pilot baseline " + fmt(ls_corr) +
                     " (in [0.45, 0.75]), baseline over 2/3/4/5 APs " + seq +
                     (mono ? " non-increasing" : " NOT non-increasing");
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        report(2, ok, detail);
    }

    // Criterion 3: throughput ordering with CI separation.
    {
        bool ok = false;
        std::string detail;
        try {
            if (aps_rows.empty())
                throw std::runtime_error("AP sweep unavailable (criterion 2 failed earlier)");

            bool strict = true, sep = true;
            std::string ap_seq;
            double prev = -1.0;
            for (const double m : {2.0, 3.0, 4.0, 5.0}) {
                const SweepPoint& s = aps_rows.at(m).at("sensing");
                const SweepPoint& l = aps_rows.at(m).at("ls");
                strict = strict && s.tput > prev;
                sep = sep && (s.tput - s.tput_ci) > (l.tput + l.tput_ci);
                prev = s.tput;
                ap_seq += (ap_seq.empty() ? "" : "/") + fmt(s.tput, 4);
            }

            run_cmd(q(cli) + " sweep " + q(golden_cfg) +
                        " --param power --values 10,17,23,30 --out " + q(work / "power"),
                    work / "power.log");
            const SweepTable pow_rows = parse_sweep(work / "power" / "sweep.csv");
            bool nondec = true;
            std::string pw_seq;
            double prev_s = -1.0, prev_l = -1.0;
            for (const double p : {10.0, 17.0, 23.0, 30.0}) {
                const SweepPoint& s = pow_rows.at(p).at("sensing");
                const SweepPoint& l = pow_rows.at(p).at("ls");
                nondec = nondec && s.tput >= prev_s && l.tput >= prev_l;
                sep = sep && (s.tput - s.tput_ci) > (l.tput + l.tput_ci);
                prev_s = s.tput;
                prev_l = l.tput;
                pw_seq += (pw_seq.empty() ? "" : "/") + fmt(s.tput, 4);
            }
            ok = strict && nondec && sep;
            detail = "sensing throughput over 2/3/4/5 APs " + ap_seq + " bits/s/Hz " +
                     (strict ? "strictly increasing" : "NOT strictly increasing") +
                     "; over 10/17/23/30 dBm " + pw_seq +
                     (nondec ? " non-decreasing (pilot baseline too)"
                             : " NOT non-decreasing") +
                     (sep ? "; sensing above baseline with CI separation at all 8 points"
                          : "; CI separation VIOLATED");
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        report(3, ok, detail);
    }

    // Criterion 4: analytic property suites and run determinism.
    {
        bool ok = false;
        std::string detail;
        try {
            const std::vector<std::pair<std::string, std::function<bool()>>> suites = {
                {"sight-blockage oracle", suite_los_oracle},
                {"mirror/reflection law", suite_mirror_and_reflection_law},
                {"zero-noise fusion", suite_zero_noise_fusion},
                {"variance scaling", suite_variance_scaling},
                {"noise moments", suite_noise_moments},
                {"steering norm", suite_steering_norm},
                {"channel rank/norm", suite_channel_rank_norm},
                {"self correlation", suite_self_correlation},
                {"zero-forcing identity", suite_zf_identity},
                {"log-det oracle", suite_logdet_oracle},
                {"estimate degradation", suite_degradation},
            };
            std::vector<std::string> failed;
            for (const auto& [name, fn] : suites) {
                bool pass = false;
                try {
                    pass = fn();
                } catch (const std::exception&) {
                    pass = false;
                }
                if (!pass)
                    failed.push_back(name);
            }

            // Determinism: identical bytes for any worker count.
            const std::string reduced = " --seeds 1..4 --frames 25 --out ";
            run_cmd("ISACSIM_THREADS=1 " + q(cli) + " run " + q(golden_cfg) + reduced +
                        q(work / "det1"),
                    work / "det1.log");
            run_cmd("ISACSIM_THREADS=4 " + q(cli) + " run " + q(golden_cfg) + reduced +
                        q(work / "det2"),
                    work / "det2.log");
            const bool deterministic =
                slurp(work / "det1" / "metrics.csv") == slurp(work / "det2" / "metrics.csv");
            if (!deterministic)
                failed.push_back("thread-count determinism");

            ok = failed.empty();
            if (ok)
                detail = std::to_string(suites.size()) +
                         " analytic property suites passed and metrics.csv is "
                         "byte-identical for 1 vs 4 worker threads";
            else {
                detail = "failed suites:";
                for (const auto& f : failed)
                    detail += " [" + f + "]";
            }
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        report(4, ok, detail);
    }

    // Criterion 5: miniature instance vs straight-line re-implementation.
    {
        bool ok = false;
        std::string detail;
        try {
            ParsedConfig pc = parse_config_text(kMiniConfig, "mini");
            const RunResult rr = run_simulation(pc.sim);
            const OracleReport rep = run_mini_oracle(pc.sim, rr.trace);
            ok = rep.failures == 0 && rep.checks > 1000 && rep.reflection_paths > 0;
            if (ok) {
                detail = "miniature instance (2 APs, 1 user, 2 scatterers, 3 frames): " +
                         std::to_string(rep.checks) +
                         " pipeline quantities re-derived independently, worst relative "
                         "error " +
                         fmt(rep.worst, 3) + " (tolerance 1e-9, at " + rep.worst_what +
                         "), " + std::to_string(rep.reflection_paths) +
                         " reflection paths exercised";
            } else {
                detail = std::to_string(rep.failures) + " of " +
                         std::to_string(rep.checks) + " checks failed";
                int shown = 0;
                for (const auto& m : rep.messages) {
                    if (++shown > 3)
                        break;
                    detail += "; " + m;
                }
            }
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        report(5, ok, detail);
    }

    return all_pass ? 0 : 1;
}
