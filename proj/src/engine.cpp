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

#include "isacsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

namespace isacsim {

const char* estimator_name(Estimator e) {
    switch (e) {
    case Estimator::Ls:
        return "ls";
    case Estimator::Perfect:
        return "perfect";
    case Estimator::Sensing:
        return "sensing";
    }
    return "?";
}

TargetState SimConfig::initial_target() const {
    TargetState t;
    t.centroid = target_start;
    const double psi = heading_rad();
    t.heading = {std::cos(psi), std::sin(psi)};
    t.speed = target_speed;
    t.length = target_length;
    t.width = target_width;
    return t;
}

namespace {

double auto_axis(const Point2D& pos, const Point2D& center) {
    if (pos.x == center.x && pos.y == center.y)
        return 0.0;
    // Broadside toward the room center: the array axis is 90 degrees off the
    // boresight direction.
    return wrap_angle(angle_of(pos, center) - kPi / 2.0);
}

} // namespace

Scene SimConfig::make_scene() const {
    Scene sc;
    sc.room_size = room_size;
    sc.surface = surface;
    const Point2D center{room_size / 2.0, room_size / 2.0};
    for (int i = 0; i < n_aps; ++i) {
        AccessPoint a;
        a.position = ap_positions.at(static_cast<std::size_t>(i));
        a.n_tx = n_tx;
        a.n_rx = n_rx;
        a.tx_power = tx_power_w;
        a.array_axis = static_cast<std::size_t>(i) < ap_axes_deg.size()
                           ? wrap_angle(ap_axes_deg[static_cast<std::size_t>(i)] * kPi / 180.0)
                           : auto_axis(a.position, center);
        sc.aps.push_back(a);
    }
    for (int i = 0; i < n_ues; ++i) {
        UserEquipment u;
        u.position = ue_positions.at(static_cast<std::size_t>(i));
        u.n_ant = n_ue_ant;
        u.array_axis = static_cast<std::size_t>(i) < ue_axes_deg.size()
                           ? wrap_angle(ue_axes_deg[static_cast<std::size_t>(i)] * kPi / 180.0)
                           : auto_axis(u.position, center);
        sc.ues.push_back(u);
    }
    return sc;
}

NoiseModel SimConfig::noise_model() const {
    NoiseModel nm;
    nm.a_tau = a_tau;
    nm.a_mu = a_mu;
    nm.a_theta = a_theta;
    nm.mf_gain = mf_gain;
    nm.array_gain = std::sqrt(static_cast<double>(n_tx) * n_rx);
    nm.noise_power = noise_power_w;
    return nm;
}

std::vector<Estimator> SimConfig::selected_estimators() const {
    std::vector<Estimator> v;
    if (est_ls)
        v.push_back(Estimator::Ls);
    if (est_perfect)
        v.push_back(Estimator::Perfect);
    if (est_sensing)
        v.push_back(Estimator::Sensing);
    return v;
}

TargetState advance_target(const TargetState& t, double dt) {
    if (dt < 0.0)
        throw std::domain_error("advance_target: negative time step");
    TargetState out = t;
    out.centroid = t.centroid + (t.speed * dt) * t.heading;
    return out;
}

FrameOutput run_frame(const Scene& scene, const SimConfig& cfg, const TargetState& t0,
                      const TrackState& track, std::uint64_t seed, int frame) {
    const double lambda = cfg.wavelength();
    const double psi = cfg.heading_rad();
    const int n_aps = static_cast<int>(scene.aps.size());
    const double dt_frame = cfg.slot_s * cfg.slots_per_frame;
    const auto ufr = static_cast<std::uint64_t>(frame);

    // Sensing slot: one shared scatterer cloud, observed by every AP.
    std::vector<Point2D> scatterers;
    if (cfg.layout == ScattererLayout::Uniform) {
        Rng sc = make_stream({seed, ufr, 0, 0, kStreamScatterer});
        scatterers = scatterer_positions(t0, cfg.scatterers_k, sc);
    } else {
        scatterers = scatterer_grid(t0, cfg.scatterers_k);
    }

    const NoiseModel nm = cfg.noise_model();
    MeasurementBatch batch;
    batch.n_aps = n_aps;
    for (int m = 0; m < n_aps; ++m) {
        const AccessPoint& ap = scene.aps[static_cast<std::size_t>(m)];
        Rng rcs = make_stream({seed, ufr, static_cast<std::uint64_t>(m), 0, kStreamRcs});
        const auto truth = ground_truth_observables(ap, scatterers, t0, cfg.carrier_hz, rcs);
        std::vector<SensedScatterer> retained;
        for (int k = 0; k < static_cast<int>(truth.size()); ++k) {
            const ScattererTruth& st = truth[static_cast<std::size_t>(k)];
            const auto rho = steering_inner_product(
                st.azimuth - ap.array_axis,
                track.predicted_angle_per_ap[static_cast<std::size_t>(m)] - ap.array_axis,
                ap.n_tx);
            if (std::norm(rho) < kMinBeamGainSq)
                continue; // beam null: no usable echo from this scatterer
            const auto beta = reflection_gain(st.distance, st.rcs);
            if (std::norm(beta) == 0.0)
                continue;
            const auto v = measurement_variances(nm, cfg.tx_power_w, beta, rho);
            retained.push_back({k, st, v.delay, v.doppler, v.angle});
        }
        auto ms = synthesize_measurements(retained, cfg.carrier_hz, seed, ufr, m);
        batch.items.insert(batch.items.end(), ms.begin(), ms.end());
    }

    FusedEstimate fused;
    bool fallback = false;
    if (batch.items.empty()) {
        fallback = true;
    } else {
        fused = fuse_position(batch, scene.aps);
        try {
            fused.v_hat = fuse_velocity(batch, psi, cfg.carrier_hz);
        } catch (const EstimationFailure&) {
            fallback = true;
        }
    }
    if (fallback) {
        // Coast: reuse the prediction made from the previous frame.
        fused.x_hat = track.predicted_centroid.x;
        fused.y_hat = track.predicted_centroid.y;
        fused.v_hat = 0.0;
    }

    const double pos_error =
        distance({fused.x_hat, fused.y_hat}, t0.centroid);
    TrackState track_out = predict_track(fused, t0.heading, dt_frame, scene.aps);

    // Frozen per-frame estimates.
    const NetworkChannel h_true0 = true_network_channel(scene, t0, lambda);
    const auto selected = cfg.selected_estimators();
    std::optional<NetworkChannel> h_sens, h_ls;
    std::optional<BeamformerSet> w_sens, w_ls;
    bool regularized = false;
    if (cfg.est_sensing) {
        h_sens = estimated_network_channel_sensing(scene, {fused.x_hat, fused.y_hat}, t0, lambda);
        w_sens = zf_weights(*h_sens);
        regularized |= w_sens->regularized;
    }
    if (cfg.est_ls) {
        const double pilot_len =
            cfg.ls_pilot_budget / (static_cast<double>(n_aps) * cfg.n_tx);
        Rng ls = make_stream({seed, ufr, 0, 0, kStreamLsError});
        h_ls = estimated_network_channel_ls(h_true0, cfg.ue_power_w, pilot_len,
                                            cfg.noise_power_w, ls);
        w_ls = zf_weights(*h_ls);
        regularized |= w_ls->regularized;
    }

    FrameOutput out;
    out.track_out = track_out;
    out.frame = {seed,         frame,        t0.centroid.x, t0.centroid.y, fused.x_hat,
                 fused.y_hat,  fused.v_hat,  pos_error,     fallback};
    if (cfg.record_trace) {
        FrameTraceEntry te;
        te.frame = frame;
        te.scatterers = scatterers;
        te.measurements = batch.items;
        te.fused = fused;
        te.track_in = track;
        te.track_out = track_out;
        te.fallback = fallback;
        te.h_true_slot0 = h_true0;
        if (h_sens) {
            te.h_est["sensing"] = *h_sens;
            te.weights["sensing"] = w_sens->full;
        }
        if (h_ls) {
            te.h_est["ls"] = *h_ls;
            te.weights["ls"] = w_ls->full;
        }
        out.trace = std::move(te);
    }

    // Communication slots: the truth moves, the estimates stay frozen.
    for (int s = 1; s < cfg.slots_per_frame; ++s) {
        const TargetState ts = advance_target(t0, s * cfg.slot_s);
        const NetworkChannel h_s = true_network_channel(scene, ts, lambda);
        if (out.trace)
            out.trace->h_true_comm.push_back(h_s);
        for (Estimator est : selected) {
            double tput = 0.0, corr = 0.0;
            switch (est) {
            case Estimator::Ls:
                tput = slot_throughput(h_s, *w_ls, cfg.tx_power_w, n_aps, cfg.noise_power_w)
                           .total;
                corr = channel_correlation(h_s, *h_ls, cfg.corr_real_part);
                break;
            case Estimator::Perfect: {
                BeamformerSet w_p = zf_weights(h_s);
                regularized |= w_p.regularized;
                tput =
                    slot_throughput(h_s, w_p, cfg.tx_power_w, n_aps, cfg.noise_power_w).total;
                corr = channel_correlation(h_s, h_s, cfg.corr_real_part);
                break;
            }
            case Estimator::Sensing:
                tput = slot_throughput(h_s, *w_sens, cfg.tx_power_w, n_aps, cfg.noise_power_w)
                           .total;
                corr = channel_correlation(h_s, *h_sens, cfg.corr_real_part);
                break;
            }
            out.slots.push_back({seed, frame, s, est, tput, corr, pos_error});
            if (out.trace) {
                out.trace->slot_tput[estimator_name(est)].push_back(tput);
                out.trace->slot_corr[estimator_name(est)].push_back(corr);
            }
        }
    }
    out.regularized = regularized;
    return out;
}

namespace {

struct SeedResult {
    std::vector<SlotRecord> slots;
    std::vector<FrameRecord> frames;
    int fallback_count = 0;
    int regularized_count = 0;
    std::vector<FrameTraceEntry> trace;
};

SeedResult run_one_seed(const SimConfig& cfg, const Scene& scene, std::uint64_t seed) {
    SeedResult r;
    TargetState target = cfg.initial_target();
    // Perfect acquisition: the track starts on the true centroid.
    TrackState track;
    track.predicted_centroid = target.centroid;
    for (const AccessPoint& ap : scene.aps)
        track.predicted_angle_per_ap.push_back(angle_of(ap.position, target.centroid));

    const double dt_frame = cfg.slot_s * cfg.slots_per_frame;
    for (int f = 0; f < cfg.frames; ++f) {
        const Point2D c = target.centroid;
        if (c.x < 0.0 || c.x > cfg.room_size || c.y < 0.0 || c.y > cfg.room_size)
            break; // target left the room
        FrameOutput fo = run_frame(scene, cfg, target, track, seed, f);
        r.slots.insert(r.slots.end(), fo.slots.begin(), fo.slots.end());
        r.frames.push_back(fo.frame);
        r.fallback_count += fo.frame.fallback ? 1 : 0;
        r.regularized_count += fo.regularized ? 1 : 0;
        if (fo.trace)
            r.trace.push_back(std::move(*fo.trace));
        track = fo.track_out;
        target = advance_target(target, dt_frame);
    }
    return r;
}

int thread_cap() {
    if (const char* env = std::getenv("ISACSIM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

} // namespace

RunResult run_simulation(const SimConfig& cfg) {
    const Scene scene = cfg.make_scene();
    const std::size_t n = cfg.seeds.size();
    std::vector<SeedResult> per_seed(n);
    std::vector<std::exception_ptr> errors(n);

    const int workers = std::min<int>(thread_cap(), static_cast<int>(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            per_seed[i] = run_one_seed(cfg, scene, cfg.seeds[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto body = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    per_seed[i] = run_one_seed(cfg, scene, cfg.seeds[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto& t : pool)
            t.join();
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    // Deterministic reduction: seed list order, then the generation order
    // inside each seed (already frame/slot/estimator sorted).
    RunResult out;
    for (std::size_t i = 0; i < n; ++i) {
        SeedResult& s = per_seed[i];
        out.slots.insert(out.slots.end(), s.slots.begin(), s.slots.end());
        out.frames.insert(out.frames.end(), s.frames.begin(), s.frames.end());
        out.fallback_count += s.fallback_count;
        out.regularized_count += s.regularized_count;
        for (auto& t : s.trace)
            out.trace.push_back(std::move(t));
    }
    auto slot_key = [](const SlotRecord& r) {
        return std::tuple<std::uint64_t, int, int, int>(r.seed, r.frame, r.slot,
                                                        static_cast<int>(r.estimator));
    };
    std::stable_sort(out.slots.begin(), out.slots.end(),
                     [&](const SlotRecord& a, const SlotRecord& b) {
                         return slot_key(a) < slot_key(b);
                     });
    std::stable_sort(out.frames.begin(), out.frames.end(),
                     [](const FrameRecord& a, const FrameRecord& b) {
                         return std::tie(a.seed, a.frame) < std::tie(b.seed, b.frame);
                     });
    return out;
}

namespace {

struct MeanCi {
    double mean = 0, ci = 0;
};

// Mean of per-seed means with a 95% normal-approximation half-width.
MeanCi mean_ci(const std::vector<double>& seed_means) {
    MeanCi r;
    const std::size_t s = seed_means.size();
    if (s == 0)
        return r;
    double sum = 0;
    for (double v : seed_means)
        sum += v;
    r.mean = sum / static_cast<double>(s);
    if (s < 2)
        return r;
    double acc = 0;
    for (double v : seed_means)
        acc += (v - r.mean) * (v - r.mean);
    const double sd = std::sqrt(acc / static_cast<double>(s - 1));
    r.ci = 1.96 * sd / std::sqrt(static_cast<double>(s));
    return r;
}

} // namespace

Summary summarize(const RunResult& r) {
    Summary s;
    s.fallback_count = r.fallback_count;
    s.regularized_count = r.regularized_count;

    std::vector<std::uint64_t> seeds;
    for (const FrameRecord& f : r.frames)
        if (seeds.empty() || seeds.back() != f.seed)
            seeds.push_back(f.seed);
    s.n_seeds = static_cast<int>(seeds.size());
    s.n_frames = seeds.empty() ? 0 : static_cast<int>(r.frames.size() / seeds.size());

    auto seed_pos = [&](std::uint64_t seed) {
        return static_cast<std::size_t>(
            std::find(seeds.begin(), seeds.end(), seed) - seeds.begin());
    };

    // Position error: per-seed mean over frames.
    {
        std::vector<double> acc(seeds.size(), 0.0);
        std::vector<int> cnt(seeds.size(), 0);
        for (const FrameRecord& f : r.frames) {
            const auto i = seed_pos(f.seed);
            acc[i] += f.pos_error;
            cnt[i] += 1;
        }
        std::vector<double> means;
        for (std::size_t i = 0; i < seeds.size(); ++i)
            if (cnt[i] > 0)
                means.push_back(acc[i] / cnt[i]);
        const MeanCi mc = mean_ci(means);
        s.mean_pos_error = mc.mean;
        s.ci_pos_error = mc.ci;
    }

    // Throughput / correlation: per-seed mean over every comm slot.
    for (const Estimator est : {Estimator::Ls, Estimator::Perfect, Estimator::Sensing}) {
        std::vector<double> tp(seeds.size(), 0.0), co(seeds.size(), 0.0);
        std::vector<int> cnt(seeds.size(), 0);
        for (const SlotRecord& sr : r.slots) {
            if (sr.estimator != est)
                continue;
            const auto i = seed_pos(sr.seed);
            tp[i] += sr.throughput;
            co[i] += sr.correlation;
            cnt[i] += 1;
        }
        std::vector<double> tpm, com;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            if (cnt[i] == 0)
                continue;
            tpm.push_back(tp[i] / cnt[i]);
            com.push_back(co[i] / cnt[i]);
        }
        if (tpm.empty())
            continue;
        EstimatorAggregate ea;
        const MeanCi t = mean_ci(tpm);
        const MeanCi c = mean_ci(com);
        ea.mean_throughput = t.mean;
        ea.ci_throughput = t.ci;
        ea.mean_correlation = c.mean;
        ea.ci_correlation = c.ci;
        s.by_estimator[estimator_name(est)] = ea;
    }
    return s;
}

std::vector<SweepRow> run_sweep(const SimConfig& cfg, SweepParameter param,
                                const std::vector<double>& values) {
    if (values.empty())
        throw std::domain_error("run_sweep: empty value list");
    std::vector<SweepRow> rows;
    for (const double v : values) {
        SimConfig c = cfg;
        bool feasible = true;
        if (param == SweepParameter::ApCount) {
            const int m = static_cast<int>(std::llround(v));
            if (m < 1 || m > static_cast<int>(c.ap_positions.size()))
                feasible = false;
            else
                c.n_aps = m;
        } else {
            c.tx_power_dbm = v;
            c.tx_power_w = std::pow(10.0, (v - 30.0) / 10.0);
        }
        if (feasible && c.n_ues * c.n_ue_ant > c.n_aps * c.n_tx)
            feasible = false; // ZF cannot null more streams than antennas
        if (!feasible) {
            for (Estimator est : cfg.selected_estimators()) {
                SweepRow r;
                r.value = v;
                r.estimator = est;
                r.feasible = false;
                rows.push_back(r);
            }
            continue;
        }
        const Summary s = summarize(run_simulation(c));
        for (Estimator est : c.selected_estimators()) {
            const auto it = s.by_estimator.find(estimator_name(est));
            if (it == s.by_estimator.end())
                continue;
            SweepRow r;
            r.value = v;
            r.estimator = est;
            r.mean_throughput = it->second.mean_throughput;
            r.ci_throughput = it->second.ci_throughput;
            r.mean_correlation = it->second.mean_correlation;
            r.ci_correlation = it->second.ci_correlation;
            r.mean_pos_error = s.mean_pos_error;
            r.ci_pos_error = s.ci_pos_error;
            rows.push_back(r);
        }
    }
    return rows;
}

} // namespace isacsim
