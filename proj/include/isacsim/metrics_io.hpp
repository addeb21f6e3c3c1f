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

// Result serialization: CSV tables, the JSON run summary, golden-fixture
// comparison, and an SVG chart renderer for sweeps. All numeric output uses
// shortest round-trip formatting ('.' decimal separator), so files are
// bit-stable for identical inputs.

#pragma once

#include <string>
#include <vector>

#include "isacsim/engine.hpp"

namespace isacsim {

// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);

// Rows must already be sorted by (seed, frame, slot, estimator).
void write_metrics_csv(const std::string& path, const std::vector<SlotRecord>& rows);

// One row per frame: true vs estimated centroid and the fused speed.
void write_trajectory_csv(const std::string& path, const std::vector<FrameRecord>& rows);

// param_name labels the swept parameter column ("aps" or "power_dbm").
// Infeasible rows carry status `skipped_infeasible` and empty metric cells.
void write_sweep_csv(const std::string& path, const std::string& param_name,
                     const std::vector<SweepRow>& rows);

// {"config": {key: value, ...}, "results": {...}} with the full resolved
// config echoed so a run is reproducible from its summary alone.
std::string summary_json_text(const SimConfig& cfg, const Summary& s);
void write_summary_json(const std::string& path, const SimConfig& cfg, const Summary& s);

struct FieldCheck {
    std::string field; // dotted path under "results"
    double produced = 0;
    double golden = 0;
    double rel_tol = 0;
    double abs_tol = 0;
    bool pass = false;
};

struct VerifyReport {
    bool passed = false;
    std::vector<FieldCheck> checks;
    std::vector<std::string> notes; // applied defaults, missing files, ...
};

// Compares <out_dir>/summary.json against <golden_dir>/summary.json over
// every numeric leaf under "results" of the golden file. Tolerances come
// from <golden_dir>/tolerances.json (default rel 1e-6 / abs 1e-12 when the
// file or a field entry is absent; the fallback is noted). A missing
// summary file or a field absent from the produced summary is a failure
// naming the file or field.
VerifyReport verify_summary(const std::string& out_dir, const std::string& golden_dir);

// Fixed-width pass/fail table of a verify report.
std::string format_verify_table(const VerifyReport& r);

// Renders one line chart per metric (throughput, correlation, position
// error) from an already-written sweep.csv. Returns the paths written.
// Rows with status `skipped_infeasible` are left out of the curves.
std::vector<std::string> render_sweep_charts(const std::string& sweep_csv_path,
                                             const std::string& out_dir);

} // namespace isacsim
