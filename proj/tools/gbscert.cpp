/*
 * Copyright 2026 The gbscert Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end for the staged certification pipeline.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "gbscert/error.hpp"
#include "gbscert/pipeline.hpp"

namespace {

struct Options {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::int64_t stage_seed_offset = 0;
};

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", opt.out_dir, "override the config output directory");
    cmd->add_option("--seed", opt.seed, "override the config master seed");
    cmd->add_option("--stage-seed-offset", opt.stage_seed_offset, "offset mixed into the stage seed");
}

gbscert::StageContext context(const Options& opt) {
    gbscert::StageContext ctx;
    ctx.config = gbscert::load_config(opt.config);
    if (!opt.out_dir.empty()) ctx.config.output_dir = opt.out_dir;
    if (opt.seed) ctx.config.seed = *opt.seed;
    ctx.stage_seed_offset = opt.stage_seed_offset;
    return ctx;
}

void print(const gbscert::StageResult& r) {
    gbscert::Json j = {{"stage", std::string(gbscert::to_string(r.stage))},
                       {"skipped", r.skipped},
                       {"outputs", r.outputs.size()}};
    std::cout << j.dump() << "\n";
}

void report_error(std::string_view kind, const std::string& message) {
    gbscert::Json j = {{"error", std::string(kind)}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gbscert: certify Gaussian boson samplers from orbit-probability features"};
    app.require_subcommand(1);
    Options opt;

    std::vector<std::pair<CLI::App*, gbscert::Stage>> stages;
    for (gbscert::Stage s : gbscert::kAllStages) {
        auto* cmd = app.add_subcommand(std::string(gbscert::to_string(s)), "run the " + std::string(gbscert::to_string(s)) + " stage");
        add_common(cmd, opt);
        stages.emplace_back(cmd, s);
    }
    auto* run = app.add_subcommand("run", "run every stage in order, skipping those already up to date");
    add_common(run, opt);

    std::string init_path;
    auto* init = app.add_subcommand("init-config", "write the default desk-scale config");
    init->add_option("path", init_path, "destination file")->required();
    std::uint64_t init_seed = 0;
    init->add_option("--seed", init_seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*init) {
            gbscert::ExperimentConfig c;
            c.seed = init_seed;
            gbscert::write_file_atomic(init_path, gbscert::config_to_json(c).dump(2) + "\n");
            return 0;
        }
        if (*run) {
            for (const auto& r : gbscert::run_pipeline(context(opt))) print(r);
            return 0;
        }
        for (const auto& [cmd, stage] : stages)
            if (*cmd) print(gbscert::run_stage(stage, context(opt)));
        return 0;
    } catch (const gbscert::Error& e) {
        report_error(gbscert::to_string(e.kind()), e.what());
        return 2;
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return 3;
    }
}
