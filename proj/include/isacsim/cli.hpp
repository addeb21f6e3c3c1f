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

// Command implementations behind the `isacsim` executable. Kept separate
// from argument parsing so tests can drive them directly. Exit codes:
// 0 success, 1 validation/usage error, 2 runtime or numeric error. A failed
// command removes every output file it started writing.

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace isacsim {

struct RunOptions {
    std::string config_path;          // empty: built-in defaults
    std::string out_dir = ".";
    std::optional<std::string> seeds; // overrides the config seed list
    std::optional<int> frames;        // overrides the config frame budget
};

struct SweepOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::string param; // "aps" or "power"
    std::vector<double> values;
    std::optional<std::string> seeds;
    std::optional<int> frames;
    bool plot = false;
};

struct VerifyOptions {
    std::string out_dir;
    std::string golden_dir;
};

// Writes metrics.csv, trajectory.csv and summary.json into out_dir.
int cmd_run(const RunOptions& opt, std::ostream& log);

// Writes sweep.csv; with plot set, also one SVG chart per metric.
int cmd_sweep(const SweepOptions& opt, std::ostream& log);

// Compares out_dir/summary.json against the golden fixtures and prints a
// pass/fail table.
int cmd_verify(const VerifyOptions& opt, std::ostream& log);

} // namespace isacsim
