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

// Configuration files are flat `key: value` lines with `#` comments. Units
// are encoded in the key names and converted at parse time (dBm to watts,
// GHz/MHz to Hz, ms to s, degrees to radians). Unknown or duplicate keys are
// rejected with the offending line number.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "isacsim/engine.hpp"

namespace isacsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParsedConfig {
    SimConfig sim;
    // One "key = value" note per key that fell back to its default.
    std::vector<std::string> applied_defaults;
    std::vector<std::string> warnings;
};

double dbm_to_watt(double dbm);

// "a..b" inclusive range or comma-separated list. Throws ConfigError on
// anything else (including an empty spec).
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);

ParsedConfig parse_config_text(const std::string& text, const std::string& origin);
ParsedConfig parse_config(const std::string& path);

// Canonical text form: every key, fixed order, round-trip-exact numbers.
// parse(serialize(c)) reproduces c.
std::string serialize_config(const SimConfig& c);

} // namespace isacsim
