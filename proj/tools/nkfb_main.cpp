// Copyright 2026 The nkfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nkfb/presets.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;
constexpr int kCheckFailed = 3;

int report(const nkfb::ExperimentReport &r) {
    for (const auto &path : r.files) {
        std::cout << "wrote " << path.string() << '\n';
    }
    for (const auto &c : r.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    return r.all_passed() ? kOk : kCheckFailed;
}

template <typename F>
int guarded(F &&body) {
    try {
        return body();
    } catch (const nkfb::ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception &e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kRuntime;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Delayed no-knowledge feedback trajectory simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", nkfb::build_id());

    std::string config_path;
    std::vector<std::string> overrides;
    std::string preset_name;
    std::string out_dir;
    bool quiet = false;

    CLI::App *run = app.add_subcommand("run", "Run one ensemble described by a config file");
    run->add_option("--config", config_path, "Configuration file")->required();
    run->add_option("--override", overrides, "section.key=value, repeatable")->take_all();
    run->add_flag("--quiet", quiet, "Suppress progress output");

    CLI::App *preset = app.add_subcommand("preset", "Run a figure preset");
    preset->add_option("name", preset_name, "Preset name")->required();
    preset->add_option("--out", out_dir, "Output directory")->required();
    preset->add_option("--override", overrides, "section.key=value, repeatable")->take_all();
    preset->add_flag("--quiet", quiet, "Suppress progress output");

    CLI::App *validate = app.add_subcommand("validate", "Check a config file and exit");
    validate->add_option("--config", config_path, "Configuration file")->required();
    validate->add_option("--override", overrides, "section.key=value, repeatable")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    std::ostream *log = quiet ? nullptr : &std::cerr;

    if (*run) {
        return guarded([&] {
            const nkfb::ExperimentConfig cfg = nkfb::load_config(config_path, overrides);
            return report(nkfb::run_experiment(cfg, log));
        });
    }
    if (*preset) {
        return guarded([&] { return report(nkfb::run_preset(preset_name, out_dir, overrides, log)); });
    }
    return guarded([&] {
        const nkfb::ExperimentConfig cfg = nkfb::load_config(config_path, overrides);
        std::cout << "ok: " << cfg.to_json().dump() << '\n';
        return kOk;
    });
}
