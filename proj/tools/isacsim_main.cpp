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

#include <clocale>
#include <iostream>

#include <CLI11.hpp>

#include "isacsim/cli.hpp"

int main(int argc, char** argv) {
    // Numeric output must use '.' regardless of the host locale.
    std::setlocale(LC_NUMERIC, "C");

    CLI::App app{"isacsim: link-level simulator for sensing-assisted distributed MIMO"};
    app.require_subcommand(1);

    isacsim::RunOptions run;
    std::string run_seeds;
    int run_frames = 0;
    CLI::App* cmd_run = app.add_subcommand("run", "simulate one configuration");
    cmd_run->add_option("config", run.config_path, "configuration file")->required();
    cmd_run->add_option("--out", run.out_dir, "output directory (default: .)");
    CLI::Option* run_seeds_opt =
        cmd_run->add_option("--seeds", run_seeds, "seed list, e.g. 1..20 or 1,5,9");
    CLI::Option* run_frames_opt =
        cmd_run->add_option("--frames", run_frames, "frames per seed override");

    isacsim::SweepOptions sweep;
    std::string sweep_seeds;
    int sweep_frames = 0;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "sweep AP count or transmit power");
    cmd_sweep->add_option("config", sweep.config_path, "configuration file")->required();
    cmd_sweep->add_option("--param", sweep.param, "swept parameter: aps or power")->required();
    cmd_sweep->add_option("--values", sweep.values, "comma-separated parameter values")
        ->required()
        ->delimiter(',');
    cmd_sweep->add_option("--out", sweep.out_dir, "output directory (default: .)");
    CLI::Option* sweep_seeds_opt = cmd_sweep->add_option("--seeds", sweep_seeds, "seed list");
    CLI::Option* sweep_frames_opt =
        cmd_sweep->add_option("--frames", sweep_frames, "frames per seed override");
    cmd_sweep->add_flag("--plot", sweep.plot, "render SVG charts from sweep.csv");

    isacsim::VerifyOptions verify;
    CLI::App* cmd_verify = app.add_subcommand("verify", "compare a run against golden fixtures");
    cmd_verify->add_option("--out", verify.out_dir, "directory holding summary.json")->required();
    cmd_verify->add_option("--golden", verify.golden_dir, "golden fixture directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // help text, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage errors map onto the validation exit code
    }

    if (run_seeds_opt->count() > 0)
        run.seeds = run_seeds;
    if (run_frames_opt->count() > 0)
        run.frames = run_frames;
    if (sweep_seeds_opt->count() > 0)
        sweep.seeds = sweep_seeds;
    if (sweep_frames_opt->count() > 0)
        sweep.frames = sweep_frames;

    if (cmd_run->parsed())
        return isacsim::cmd_run(run, std::cout);
    if (cmd_sweep->parsed())
        return isacsim::cmd_sweep(sweep, std::cout);
    return isacsim::cmd_verify(verify, std::cout);
}
