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

#include "nkfb/emit.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef NKFB_BUILD_ID
#define NKFB_BUILD_ID "unknown"
#endif

namespace nkfb {

namespace {

std::ofstream open_for_write(const std::filesystem::path &path) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
}

void close_checked(std::ofstream &out, const std::filesystem::path &path) {
    out.close();
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

double rounded(double v) { return std::stod(format_float(v)); }

}  // namespace

BlochTable BlochTable::from(const EnsembleResult &result) {
    BlochTable table;
    table.t = result.times;
    table.sem = result.sem_bloch;
    table.mean.reserve(result.size());
    for (const BlochVector &b : result.mean_bloch) {
        table.mean.push_back(b.as_array());
    }
    return table;
}

BlochTable BlochTable::from(const OracleCurve &curve) {
    BlochTable table;
    table.t = curve.times;
    table.mean.reserve(curve.states.size());
    for (const BlochVector &b : curve.states) {
        table.mean.push_back(b.as_array());
    }
    table.sem.assign(curve.states.size(), {0.0, 0.0, 0.0});
    return table;
}

std::string format_float(double value) {
    if (value == 0.0) {
        return "0";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_csv(std::ostream &out, const BlochTable &table) {
    out << kCsvHeader << '\n';
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << format_float(table.t[i]);
        for (double v : table.mean[i]) {
            out << ',' << format_float(v);
        }
        for (double v : table.sem[i]) {
            out << ',' << format_float(v);
        }
        out << '\n';
    }
}

nlohmann::json to_json(const BlochTable &table) {
    nlohmann::json j;
    std::vector<double> t;
    std::array<std::vector<double>, 3> mean;
    std::array<std::vector<double>, 3> sem;
    for (std::size_t i = 0; i < table.size(); ++i) {
        t.push_back(rounded(table.t[i]));
        for (int k = 0; k < 3; ++k) {
            mean[k].push_back(rounded(table.mean[i][k]));
            sem[k].push_back(rounded(table.sem[i][k]));
        }
    }
    j["t"] = t;
    j["Sx"] = mean[0];
    j["Sy"] = mean[1];
    j["Sz"] = mean[2];
    j["Sx_sem"] = sem[0];
    j["Sy_sem"] = sem[1];
    j["Sz_sem"] = sem[2];
    return j;
}

BlochTable read_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw ValidationError("read_csv: unexpected header");
    }
    BlochTable table;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        std::array<double, 7> v{};
        std::stringstream ss(line);
        std::string cell;
        std::size_t k = 0;
        while (std::getline(ss, cell, ',')) {
            if (k >= v.size()) {
                throw ValidationError("read_csv: too many columns on row " + std::to_string(row));
            }
            try {
                v[k++] = std::stod(cell);
            } catch (const std::exception &) {
                throw ValidationError("read_csv: bad number on row " + std::to_string(row));
            }
        }
        if (k != v.size()) {
            throw ValidationError("read_csv: too few columns on row " + std::to_string(row));
        }
        table.t.push_back(v[0]);
        table.mean.push_back({v[1], v[2], v[3]});
        table.sem.push_back({v[4], v[5], v[6]});
    }
    return table;
}

std::filesystem::path write_table(const BlochTable &table, const std::filesystem::path &dir, const std::string &stem,
                                  OutputFormat format, const nlohmann::json *manifest) {
    const std::filesystem::path path = dir / (stem + (format == OutputFormat::csv ? ".csv" : ".json"));
    std::ofstream out = open_for_write(path);
    if (format == OutputFormat::csv) {
        write_csv(out, table);
    } else {
        nlohmann::json j = to_json(table);
        if (manifest != nullptr) {
            j["manifest"] = *manifest;
        }
        out << j.dump(1) << '\n';
    }
    close_checked(out, path);
    return path;
}

void write_rows(const std::filesystem::path &path, const std::vector<std::string> &header,
                const std::vector<std::vector<double>> &rows) {
    std::ofstream out = open_for_write(path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i == 0 ? "" : ",") << header[i];
    }
    out << '\n';
    for (const auto &row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i == 0 ? "" : ",") << format_float(row[i]);
        }
        out << '\n';
    }
    close_checked(out, path);
}

nlohmann::json make_manifest(const std::string &preset, nlohmann::json params, std::uint64_t seed,
                             std::size_t n_traj, std::size_t workers, double elapsed_s) {
    nlohmann::json m;
    m["preset"] = preset;
    m["params"] = std::move(params);
    m["seed"] = seed;
    m["n_traj"] = n_traj;
    m["workers"] = workers;
    m["build_id"] = build_id();
    m["elapsed_s"] = elapsed_s;
    return m;
}

void write_manifest(const std::filesystem::path &dir, const nlohmann::json &manifest) {
    const std::filesystem::path path = dir / "manifest.json";
    std::ofstream out = open_for_write(path);
    out << manifest.dump(2) << '\n';
    close_checked(out, path);
}

std::string build_id() { return NKFB_BUILD_ID; }

}  // namespace nkfb
