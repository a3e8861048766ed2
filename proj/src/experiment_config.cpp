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

#include "nkfb/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace nkfb {

namespace {

const std::vector<std::pair<std::string, std::set<std::string>>> &schema() {
    static const std::vector<std::pair<std::string, std::set<std::string>>> s{
        {"system", {"omega", "rabi_axis", "gamma"}},
        {"sim", {"dt", "t_final", "tau", "method", "feedback"}},
        {"ensemble", {"n_traj", "master_seed", "workers"}},
        {"initial_state", {"bloch"}},
        {"output", {"dir", "format", "record_every"}},
    };
    return s;
}

const std::set<std::string> *section_keys(const std::string &section) {
    for (const auto &[name, keys] : schema()) {
        if (name == section) {
            return &keys;
        }
    }
    return nullptr;
}

std::string join(const std::vector<std::string> &parts, const char *sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i == 0 ? "" : sep) + parts[i];
    }
    return out;
}

/// section.key without inserting anything into `root`.
std::optional<YAML::Node> lookup(const YAML::Node &root, const char *section, const char *key) {
    if (!root.IsMap()) {
        return std::nullopt;
    }
    const YAML::Node sec = root[section];
    if (!sec.IsDefined() || !sec.IsMap()) {
        return std::nullopt;
    }
    const YAML::Node value = sec[key];
    if (!value.IsDefined()) {
        return std::nullopt;
    }
    return value;
}

/// Collects field errors while reading typed values out of the YAML tree.
class Reader {
   public:
    explicit Reader(const YAML::Node &root) : root_(root) {}

    std::vector<std::string> &errors() { return errors_; }

    void fail(const std::string &path, const std::string &message) { errors_.push_back(path + ": " + message); }

    template <typename T>
    void read(const char *section, const char *key, T &out, const char *expected) {
        const auto node = lookup(root_, section, key);
        if (!node) {
            return;
        }
        const std::string path = std::string(section) + "." + key;
        try {
            if (!node->IsScalar()) {
                throw YAML::Exception(YAML::Mark::null_mark(), "not a scalar");
            }
            out = node->as<T>();
        } catch (const YAML::Exception &) {
            fail(path, std::string("expected ") + expected);
        }
    }

    std::optional<std::string> text(const char *section, const char *key) {
        std::string value;
        if (!lookup(root_, section, key)) {
            return std::nullopt;
        }
        const std::size_t before = errors_.size();
        read(section, key, value, "a string");
        if (errors_.size() != before) {
            return std::nullopt;
        }
        return value;
    }

    void read_unsigned(const char *section, const char *key, std::uint64_t &out) {
        const auto node = lookup(root_, section, key);
        if (!node) {
            return;
        }
        const std::string path = std::string(section) + "." + key;
        std::string raw;
        try {
            if (!node->IsScalar()) {
                throw YAML::Exception(YAML::Mark::null_mark(), "not a scalar");
            }
            raw = node->as<std::string>();
        } catch (const YAML::Exception &) {
            fail(path, "expected a non-negative integer");
            return;
        }
        std::size_t used = 0;
        try {
            if (raw.empty() || raw[0] == '-' || raw[0] == '+') {
                throw std::invalid_argument(raw);
            }
            out = std::stoull(raw, &used, 0);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != raw.size()) {
            fail(path, "expected a non-negative integer, got '" + raw + "'");
        }
    }

    void check_unknown() {
        if (!root_ || root_.IsNull()) {
            return;
        }
        if (!root_.IsMap()) {
            fail("<root>", "expected a mapping of sections");
            return;
        }
        for (const auto &entry : root_) {
            const std::string section = entry.first.as<std::string>();
            const std::set<std::string> *keys = section_keys(section);
            if (keys == nullptr) {
                fail(section, "unknown section");
                continue;
            }
            if (entry.second.IsNull()) {
                continue;
            }
            if (!entry.second.IsMap()) {
                fail(section, "expected a mapping");
                continue;
            }
            for (const auto &field : entry.second) {
                const std::string key = field.first.as<std::string>();
                if (keys->count(key) == 0) {
                    fail(section + "." + key, "unknown key");
                }
            }
        }
    }

   private:
    // Lookups go through a const node: the mutable operator[] inserts keys.
    const YAML::Node root_;
    std::vector<std::string> errors_;
};

void apply_override(YAML::Node &root, const std::string &assignment, std::vector<std::string> &errors) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        errors.push_back("override '" + assignment + "': expected key=value");
        return;
    }
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    const auto dot = key.find('.');
    if (dot == std::string::npos || key.find('.', dot + 1) != std::string::npos) {
        errors.push_back("override '" + assignment + "': key must be section.field");
        return;
    }
    const std::string section = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    const std::set<std::string> *keys = section_keys(section);
    if (keys == nullptr || keys->count(field) == 0) {
        errors.push_back(key + ": unknown key");
        return;
    }
    YAML::Node parsed;
    try {
        parsed = YAML::Load(value);
    } catch (const YAML::Exception &e) {
        errors.push_back(key + ": unparsable override value '" + value + "'");
        return;
    }
    const YAML::Node &croot = root;
    if (!croot[section].IsDefined() || !croot[section].IsMap()) {
        root[section] = YAML::Node(YAML::NodeType::Map);
    }
    root[section][field] = parsed.IsNull() ? YAML::Node(value) : parsed;
}

bool integral_ratio(double num, double den) {
    const double r = num / den;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : ValidationError("invalid configuration:\n  " + join(errors, "\n  ")), errors_(std::move(errors)) {}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

double ExperimentConfig::rabi_period() const {
    return system.omega > 0.0 ? 2.0 * std::numbers::pi / system.omega : std::numeric_limits<double>::infinity();
}

double ExperimentConfig::dephasing_time() const {
    return system.gamma > 0.0 ? 1.0 / system.gamma : std::numeric_limits<double>::infinity();
}

std::size_t ExperimentConfig::kappa() const { return delay_steps(sim.tau, sim.dt); }

std::size_t ExperimentConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(sim.t_final / sim.dt));
}

std::array<double, 3> ExperimentConfig::axis() const {
    switch (system.rabi_axis) {
        case 'y':
            return {0.0, 1.0, 0.0};
        case 'z':
            return {0.0, 0.0, 1.0};
        default:
            return {1.0, 0.0, 0.0};
    }
}

HermitianOperator ExperimentConfig::hamiltonian() const { return rabi_hamiltonian(system.omega, axis()); }

HermitianOperator ExperimentConfig::coupling() const { return dephasing_coupling(system.gamma); }

DensityMatrix ExperimentConfig::initial_density() const {
    const auto &b = initial_state.bloch;
    return bloch_to_density(BlochVector{b[0], b[1], b[2]});
}

StepConfig ExperimentConfig::step_config() const {
    StepConfig cfg = StepConfig::with_delay(hamiltonian(), coupling(), sim.dt, sim.tau, sim.feedback, sim.method);
    return cfg;
}

EnsembleSpec ExperimentConfig::ensemble_spec() const {
    return EnsembleSpec{step_config(), initial_density(), n_steps(), output.record_every};
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["omega"] = system.omega;
    j["rabi_axis"] = std::string(1, system.rabi_axis);
    j["gamma"] = system.gamma;
    j["T_Omega"] = system.omega > 0.0 ? nlohmann::json(rabi_period()) : nlohmann::json(nullptr);
    j["T_gamma"] = system.gamma > 0.0 ? nlohmann::json(dephasing_time()) : nlohmann::json(nullptr);
    j["dt"] = sim.dt;
    j["t_final"] = sim.t_final;
    j["n_steps"] = n_steps();
    j["tau"] = sim.tau;
    j["kappa"] = kappa();
    j["method"] = std::string(to_string(sim.method));
    j["feedback"] = sim.feedback;
    j["initial_bloch"] = initial_state.bloch;
    j["record_every"] = output.record_every;
    j["format"] = std::string(to_string(output.format));
    return j;
}

ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception &e) {
        throw ConfigError({std::string("<root>: YAML parse error: ") + e.what()});
    }
    if (!root || root.IsNull()) {
        root = YAML::Node(YAML::NodeType::Map);
    }

    std::vector<std::string> override_errors;
    if (root.IsMap()) {
        for (const std::string &o : overrides) {
            apply_override(root, o, override_errors);
        }
    }

    const YAML::Node &croot = root;
    Reader in(croot);
    in.errors() = override_errors;
    in.check_unknown();
    if (!in.errors().empty()) {
        throw ConfigError(in.errors());
    }

    ExperimentConfig cfg;
    in.read("system", "omega", cfg.system.omega, "a number");
    in.read("system", "gamma", cfg.system.gamma, "a number");
    if (auto axis = in.text("system", "rabi_axis")) {
        if (*axis == "x" || *axis == "y" || *axis == "z") {
            cfg.system.rabi_axis = (*axis)[0];
        } else {
            in.fail("system.rabi_axis", "expected one of x, y, z, got '" + *axis + "'");
        }
    }

    bool dt_given = false;
    bool t_final_given = false;
    if (lookup(croot, "sim", "dt")) {
        dt_given = true;
        in.read("sim", "dt", cfg.sim.dt, "a number");
    }
    if (lookup(croot, "sim", "t_final")) {
        t_final_given = true;
        in.read("sim", "t_final", cfg.sim.t_final, "a number");
    }
    in.read("sim", "tau", cfg.sim.tau, "a number");
    in.read("sim", "feedback", cfg.sim.feedback, "a boolean");
    if (auto method = in.text("sim", "method")) {
        try {
            cfg.sim.method = method_from_string(*method);
        } catch (const ValidationError &) {
            in.fail("sim.method", "expected one of operational, ito, stratonovich, got '" + *method + "'");
        }
    }

    std::uint64_t n_traj = cfg.ensemble.n_traj;
    std::uint64_t workers = cfg.ensemble.workers;
    std::uint64_t record_every = cfg.output.record_every;
    in.read_unsigned("ensemble", "n_traj", n_traj);
    in.read_unsigned("ensemble", "master_seed", cfg.ensemble.master_seed);
    in.read_unsigned("ensemble", "workers", workers);
    in.read_unsigned("output", "record_every", record_every);
    cfg.ensemble.n_traj = n_traj;
    cfg.ensemble.workers = workers;
    cfg.output.record_every = record_every;

    if (auto dir = in.text("output", "dir")) {
        cfg.output.dir = *dir;
    }
    if (auto format = in.text("output", "format")) {
        if (*format == "csv") {
            cfg.output.format = OutputFormat::csv;
        } else if (*format == "json") {
            cfg.output.format = OutputFormat::json;
        } else {
            in.fail("output.format", "expected csv or json, got '" + *format + "'");
        }
    }

    if (const auto bloch = lookup(croot, "initial_state", "bloch")) {
        const YAML::Node &b = *bloch;
        try {
            if (!b.IsSequence() || b.size() != 3) {
                throw YAML::Exception(YAML::Mark::null_mark(), "shape");
            }
            for (std::size_t i = 0; i < 3; ++i) {
                cfg.initial_state.bloch[i] = b[i].as<double>();
            }
        } catch (const YAML::Exception &) {
            in.fail("initial_state.bloch", "expected a list of three numbers");
        }
    }

    auto &errors = in.errors();
    auto finite = [](double v) { return std::isfinite(v); };

    if (!finite(cfg.system.omega) || cfg.system.omega < 0.0) {
        errors.push_back("system.omega: must be a finite non-negative angular frequency");
    }
    if (!finite(cfg.system.gamma) || cfg.system.gamma < 0.0) {
        errors.push_back("system.gamma: must be finite and non-negative");
    }
    const bool rates_ok = finite(cfg.system.omega) && cfg.system.omega >= 0.0 && finite(cfg.system.gamma) &&
                          cfg.system.gamma >= 0.0;

    if (!dt_given && rates_ok) {
        if (cfg.system.omega > 0.0) {
            cfg.sim.dt = 1e-3 * cfg.rabi_period();
        } else if (cfg.system.gamma > 0.0) {
            cfg.sim.dt = 1e-3 * cfg.dephasing_time();
        } else {
            errors.push_back("sim.dt: required when omega and gamma are both zero");
        }
    }
    if (!t_final_given && rates_ok) {
        if (cfg.system.omega > 0.0) {
            cfg.sim.t_final = 5.0 * cfg.rabi_period();
        } else if (cfg.system.gamma > 0.0) {
            cfg.sim.t_final = 3.0 * cfg.dephasing_time();
        } else {
            errors.push_back("sim.t_final: required when omega and gamma are both zero");
        }
    }

    const bool dt_ok = finite(cfg.sim.dt) && cfg.sim.dt > 0.0;
    if (dt_given && !dt_ok) {
        errors.push_back("sim.dt: must be positive and finite");
    }
    if (!finite(cfg.sim.t_final) || cfg.sim.t_final <= 0.0) {
        if (t_final_given) {
            errors.push_back("sim.t_final: must be positive and finite");
        }
    } else if (dt_ok && !integral_ratio(cfg.sim.t_final, cfg.sim.dt)) {
        errors.push_back("sim.t_final: not an integer multiple of dt");
    }
    if (!finite(cfg.sim.tau) || cfg.sim.tau < 0.0) {
        errors.push_back("sim.tau: must be non-negative and finite");
    } else if (dt_ok && !integral_ratio(cfg.sim.tau, cfg.sim.dt)) {
        errors.push_back("sim.tau: tau not an integer multiple of dt");
    }
    if (cfg.sim.method == Method::ito && cfg.sim.tau == 0.0 && cfg.sim.feedback) {
        errors.push_back(
            "sim.method: the delayed Ito form is singular at tau = 0; use method=operational for zero delay");
    }
    if (cfg.ensemble.n_traj == 0) {
        errors.push_back("ensemble.n_traj: must be at least 1");
    }
    if (cfg.output.record_every == 0) {
        errors.push_back("output.record_every: must be at least 1");
    }
    const auto &b = cfg.initial_state.bloch;
    if (!(finite(b[0]) && finite(b[1]) && finite(b[2]))) {
        errors.push_back("initial_state.bloch: components must be finite");
    } else if (std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) > 1.0 + tolerance::bloch) {
        errors.push_back("initial_state.bloch: norm exceeds 1");
    }

    if (!errors.empty()) {
        throw ConfigError(errors);
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path, std::span<const std::string> overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"<file>: cannot read '" + path.string() + "'"});
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), overrides);
}

}  // namespace nkfb
