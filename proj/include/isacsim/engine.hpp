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

// Frame-level simulation loop. Slot 0 of each frame senses the target and
// freezes the channel estimates; the remaining slots move the target, rebuild
// the true channel, and score the frozen estimates against it. Seeds are
// independent streams and may run concurrently; output order never depends on
// scheduling.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isacsim/channel.hpp"
#include "isacsim/comm.hpp"
#include "isacsim/scene.hpp"
#include "isacsim/sensing.hpp"

namespace isacsim {

enum class ScattererLayout { Uniform, Grid };

// Names are ordered alphabetically so the enum order equals the CSV sort
// order of the estimator column.
enum class Estimator { Ls = 0, Perfect = 1, Sensing = 2 };
const char* estimator_name(Estimator e);

struct SimConfig {
    // Scene rosters. n_aps/n_ues select a prefix of the rosters.
    double room_size = 200.0;
    std::vector<Point2D> ap_positions{{0, 0}, {200, 200}, {0, 200}, {200, 0}, {100, 200}};
    std::vector<Point2D> ue_positions{{50, 150}, {150, 150}, {150, 100}};
    // Optional explicit array axes (degrees, as configured); empty means
    // broadside toward the room center.
    std::vector<double> ap_axes_deg;
    std::vector<double> ue_axes_deg;
    int n_aps = 5;
    int n_ues = 3;
    int n_tx = 32;
    int n_rx = 32;
    int n_ue_ant = 4;

    // Radio parameters (watts/Hz/seconds; dBm originals kept for echo).
    double carrier_hz = 60e9;
    double bandwidth_hz = 500e6;
    double slot_s = 0.05;
    double frame_s = 0.5;
    int slots_per_frame = 10;
    double tx_power_dbm = 23.0;
    double ue_power_dbm = 23.0;
    double noise_power_dbm = -87.0;
    double tx_power_w = 0.199526231496888;
    double ue_power_w = 0.199526231496888;
    double noise_power_w = 1.99526231496888e-12;

    // Sensing noise budget.
    double a_tau = 6.7e-7;
    double a_mu = 2.0e4;
    double a_theta = 1.0;
    double mf_gain = 1.0e4;
    int scatterers_k = 8;
    ScattererLayout layout = ScattererLayout::Uniform;

    // Target.
    double target_speed = 2.0;
    double target_length = 5.0;
    double target_width = 2.0;
    Point2D target_start{0, 50};
    double target_heading_deg = 0.0;

    SurfaceReflectionProps surface;

    // Pilot resource shared by the whole network: the per-dimension pilot
    // length is ls_pilot_budget / (n_aps * n_tx).
    double ls_pilot_budget = 1.0;

    // Run control.
    int frames = 100;
    std::vector<std::uint64_t> seeds{1};
    bool est_sensing = true;
    bool est_ls = true;
    bool est_perfect = true;
    bool corr_real_part = false;
    bool record_trace = false;

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    double heading_rad() const { return wrap_angle(target_heading_deg * kPi / 180.0); }
    TargetState initial_target() const;
    Scene make_scene() const; // first n_aps APs / n_ues UEs, axes resolved
    NoiseModel noise_model() const;
    std::vector<Estimator> selected_estimators() const;
};

// One metrics row: throughput and correlation of one estimator in one comm
// slot, plus the frame's sensing position error.
struct SlotRecord {
    std::uint64_t seed = 0;
    int frame = 0;
    int slot = 0;
    Estimator estimator = Estimator::Sensing;
    double throughput = 0.0;  // bits/s/Hz, summed over users
    double correlation = 0.0;
    double pos_error = 0.0;   // m
};

// One trajectory row per frame.
struct FrameRecord {
    std::uint64_t seed = 0;
    int frame = 0;
    double true_x = 0, true_y = 0;
    double est_x = 0, est_y = 0;
    double v_hat = 0;
    double pos_error = 0;
    bool fallback = false;
};

// Everything the mini-instance oracle needs to recompute a frame end to end.
struct FrameTraceEntry {
    int frame = 0;
    std::vector<Point2D> scatterers;
    std::vector<Measurement> measurements; // ordered by (ap, scatterer)
    FusedEstimate fused;
    TrackState track_in;
    TrackState track_out;
    bool fallback = false;
    NetworkChannel h_true_slot0;
    std::map<std::string, NetworkChannel> h_est;       // frozen estimates
    std::map<std::string, Eigen::MatrixXcd> weights;   // frozen ZF weights
    std::vector<NetworkChannel> h_true_comm;           // slots 1..N-1
    std::map<std::string, std::vector<double>> slot_tput;
    std::map<std::string, std::vector<double>> slot_corr;
};

struct RunResult {
    std::vector<SlotRecord> slots;   // sorted by (seed, frame, slot, estimator)
    std::vector<FrameRecord> frames; // sorted by (seed, frame)
    int fallback_count = 0;
    int regularized_count = 0;
    std::vector<FrameTraceEntry> trace; // only when record_trace is set
};

// Rigid translation along the heading; everything else unchanged.
TargetState advance_target(const TargetState& t, double dt);

struct FrameOutput {
    std::vector<SlotRecord> slots;
    FrameRecord frame;
    TrackState track_out;
    bool regularized = false;
    std::optional<FrameTraceEntry> trace;
};

// One frame: sense at the frame-start pose, freeze estimates, then score
// slots 1..N-1 against the moving truth. A fusion failure coasts the track
// (previous prediction, zero speed) and flags the frame.
FrameOutput run_frame(const Scene& scene, const SimConfig& cfg, const TargetState& t0,
                      const TrackState& track, std::uint64_t seed, int frame);

// All configured seeds, frames until the budget or the room boundary.
// Honors ISACSIM_THREADS (default: hardware concurrency) for seed-level
// parallelism; the result is identical for any thread count.
RunResult run_simulation(const SimConfig& cfg);

enum class SweepParameter { ApCount, TxPower };

struct SweepRow {
    double value = 0.0; // AP count or tx power (dBm)
    Estimator estimator = Estimator::Sensing;
    double mean_throughput = 0, ci_throughput = 0;
    double mean_correlation = 0, ci_correlation = 0;
    double mean_pos_error = 0, ci_pos_error = 0;
    bool feasible = true; // infeasible values produce a warning row
};

// Re-runs the simulation for every parameter value (same seeds, common random
// numbers) and aggregates per estimator: mean and half-width of the 95%
// normal confidence interval across seeds.
std::vector<SweepRow> run_sweep(const SimConfig& cfg, SweepParameter param,
                                const std::vector<double>& values);

struct EstimatorAggregate {
    double mean_throughput = 0, ci_throughput = 0;
    double mean_correlation = 0, ci_correlation = 0;
};

struct Summary {
    double mean_pos_error = 0, ci_pos_error = 0;
    std::map<std::string, EstimatorAggregate> by_estimator;
    int fallback_count = 0;
    int regularized_count = 0;
    int n_seeds = 0;
    int n_frames = 0; // per seed
};

// Seed-level aggregation of one run (CI across seeds, normal approximation).
Summary summarize(const RunResult& r);

} // namespace isacsim
