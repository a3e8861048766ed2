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

#ifndef NKFB_EMIT_HPP
#define NKFB_EMIT_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nkfb/ensemble_runner.hpp"
#include "nkfb/experiment_config.hpp"

namespace nkfb {

inline constexpr const char *kCsvHeader = "t,Sx,Sy,Sz,Sx_sem,Sy_sem,Sz_sem";

/// One curve in output form: oracle curves carry zero SEM.
struct BlochTable {
    std::vector<double> t;
    std::vector<std::array<double, 3>> mean;
    std::vector<std::array<double, 3>> sem;

    static BlochTable from(const EnsembleResult &result);
    static BlochTable from(const OracleCurve &curve);
    std::size_t size() const noexcept { return t.size(); }
};

/// %.9g with negative zero printed as 0.
std::string format_float(double value);

void write_csv(std::ostream &out, const BlochTable &table);
/// Same columns as the CSV, as arrays keyed by column name.
nlohmann::json to_json(const BlochTable &table);
/// Reads back a file written by write_csv; throws ValidationError on a bad header.
BlochTable read_csv(std::istream &in);

/// Writes `table` to dir/stem.csv or dir/stem.json and returns the path.
/// JSON output embeds `manifest` when given.
std::filesystem::path write_table(const BlochTable &table, const std::filesystem::path &dir, const std::string &stem,
                                  OutputFormat format, const nlohmann::json *manifest = nullptr);

/// Writes arbitrary rows with the same float formatting.
void write_rows(const std::filesystem::path &path, const std::vector<std::string> &header,
                const std::vector<std::vector<double>> &rows);

/// Manifest with preset, params, seed, n_traj, workers, build_id, elapsed_s.
nlohmann::json make_manifest(const std::string &preset, nlohmann::json params, std::uint64_t seed,
                             std::size_t n_traj, std::size_t workers, double elapsed_s);
void write_manifest(const std::filesystem::path &dir, const nlohmann::json &manifest);

/// Identifier of this build (version plus source revision when known).
std::string build_id();

}  // namespace nkfb

#endif  // NKFB_EMIT_HPP
