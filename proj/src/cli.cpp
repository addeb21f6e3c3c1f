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

#include "isacsim/cli.hpp"

#include <filesystem>

#include "isacsim/comm.hpp"
#include "isacsim/config.hpp"
#include "isacsim/metrics_io.hpp"

namespace isacsim {

namespace {

namespace fs = std::filesystem;

// Removes outputs a failed command had started writing; never touches files
// from earlier runs.
struct OutputGuard {
    std::vector<std::string> written;
    bool commit = false;
    ~OutputGuard() {
        if (commit)
            return;
        for (const std::string& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

ParsedConfig load_config(const std::string& path, std::ostream& log) {
    ParsedConfig pc = path.empty() ? parse_config_text("", "<defaults>") : parse_config(path);
    for (const std::string& d : pc.applied_defaults)
        log << "default: " << d << "\n";
    for (const std::string& w : pc.warnings)
        log << "warning: " << w << "\n";
    return pc;
}

void apply_overrides(SimConfig& c, const std::optional<std::string>& seeds,
                     const std::optional<int>& frames) {
    if (seeds) {
        if (seeds->empty())
            throw ConfigError("--seeds given with an empty list");
        c.seeds = parse_seed_spec(*seeds);
    }
    if (frames) {
        if (*frames < 1)
            throw ConfigError("--frames must be at least 1");
        c.frames = *frames;
    }
}

// Maps the shared failure modes onto the exit-code contract.
template <typename Fn> int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        log << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int cmd_run(const RunOptions& opt, std::ostream& log) {
    return guarded(log, [&]() -> int {
        ParsedConfig pc = load_config(opt.config_path, log);
        apply_overrides(pc.sim, opt.seeds, opt.frames);

        fs::create_directories(opt.out_dir);
        const RunResult res = run_simulation(pc.sim);
        const Summary sum = summarize(res);

        OutputGuard guard;
        const std::string metrics = opt.out_dir + "/metrics.csv";
        const std::string traj = opt.out_dir + "/trajectory.csv";
        const std::string summary = opt.out_dir + "/summary.json";
        guard.written.push_back(metrics);
        write_metrics_csv(metrics, res.slots);
        guard.written.push_back(traj);
        write_trajectory_csv(traj, res.frames);
        guard.written.push_back(summary);
        write_summary_json(summary, pc.sim, sum);
        guard.commit = true;

        log << "run: " << sum.n_seeds << " seed(s) x " << sum.n_frames
            << " frame(s), mean position error " << format_double(sum.mean_pos_error) << " m";
        if (sum.fallback_count > 0)
            log << ", " << sum.fallback_count << " fallback frame(s)";
        log << "\n";
        for (const auto& [name, agg] : sum.by_estimator)
            log << "  " << name << ": throughput " << format_double(agg.mean_throughput)
                << " bits/s/Hz, correlation " << format_double(agg.mean_correlation) << "\n";
        log << "wrote " << metrics << ", " << traj << ", " << summary << "\n";
        return 0;
    });
}

int cmd_sweep(const SweepOptions& opt, std::ostream& log) {
    return guarded(log, [&]() -> int {
        if (opt.param != "aps" && opt.param != "power")
            throw ConfigError("--param must be 'aps' or 'power', got '" + opt.param + "'");
        if (opt.values.empty())
            throw ConfigError("--values must list at least one value");

        ParsedConfig pc = load_config(opt.config_path, log);
        apply_overrides(pc.sim, opt.seeds, opt.frames);

        const SweepParameter param =
            opt.param == "aps" ? SweepParameter::ApCount : SweepParameter::TxPower;
        const std::string param_name = opt.param == "aps" ? "aps" : "power_dbm";

        fs::create_directories(opt.out_dir);
        const std::vector<SweepRow> rows = run_sweep(pc.sim, param, opt.values);
        for (const SweepRow& r : rows)
            if (!r.feasible)
                log << "warning: skipped infeasible " << param_name << "="
                    << format_double(r.value) << "\n";

        OutputGuard guard;
        const std::string sweep = opt.out_dir + "/sweep.csv";
        guard.written.push_back(sweep);
        write_sweep_csv(sweep, param_name, rows);
        std::vector<std::string> charts;
        if (opt.plot) {
            // Charts render strictly from the file just written.
            for (const std::string& p :
                 {std::string("sweep_throughput.svg"), std::string("sweep_correlation.svg"),
                  std::string("sweep_pos_error.svg")})
                guard.written.push_back(opt.out_dir + "/" + p);
            charts = render_sweep_charts(sweep, opt.out_dir);
        }
        guard.commit = true;

        log << "wrote " << sweep << "\n";
        for (const std::string& p : charts)
            log << "wrote " << p << "\n";
        return 0;
    });
}

int cmd_verify(const VerifyOptions& opt, std::ostream& log) {
    return guarded(log, [&]() -> int {
        const VerifyReport rep = verify_summary(opt.out_dir, opt.golden_dir);
        log << format_verify_table(rep);
        return rep.passed ? 0 : 1;
    });
}

} // namespace isacsim
