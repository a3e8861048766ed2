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

#ifndef NKFB_PRESETS_HPP
#define NKFB_PRESETS_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nkfb/emit.hpp"
#include "nkfb/experiment_config.hpp"

namespace nkfb {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    std::vector<std::filesystem::path> files;
    std::vector<CheckResult> checks;
    nlohmann::json manifest;

    bool all_passed() const;
};

/// Reference average for a configuration, with the time up to which it is
/// exact (infinity when it covers the whole run).
struct ReferenceCurve {
    OracleCurve curve;
    double valid_until = 0.0;
};

/// Best available closed-form average: Lindblad without feedback, the
/// commuting formula when [H, L] = 0, otherwise Lindblad up to tau.
ReferenceCurve reference_curve(const ExperimentConfig &cfg, std::span<const double> times);

std::vector<std::string> preset_names();

/// Base configuration of a preset with the overrides applied. Throws
/// ValidationError for unknown names.
ExperimentConfig preset_config(const std::string &name, std::span<const std::string> overrides = {});

/// Runs one preset into `out_dir`. `log`, when given, receives progress lines.
ExperimentReport run_preset(const std::string &name, const std::filesystem::path &out_dir,
                            std::span<const std::string> overrides = {}, std::ostream *log = nullptr);

/// Runs a single configured ensemble into cfg.output.dir and checks it against
/// reference_curve.
ExperimentReport run_experiment(const ExperimentConfig &cfg, std::ostream *log = nullptr);

}  // namespace nkfb

#endif  // NKFB_PRESETS_HPP
