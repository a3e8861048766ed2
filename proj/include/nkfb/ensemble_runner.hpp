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

#ifndef NKFB_ENSEMBLE_RUNNER_HPP
#define NKFB_ENSEMBLE_RUNNER_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nkfb/analytic_oracles.hpp"
#include "nkfb/trajectory_engine.hpp"

namespace nkfb {

/// Everything needed to run one ensemble apart from its size and seed.
struct EnsembleSpec {
    StepConfig step;
    DensityMatrix rho0;
    std::size_t n_steps = 0;
    std::size_t record_every = 1;
};

/// Per-time ensemble statistics of the Bloch vector.
///
/// `covariance` holds the sample covariance of one trajectory's Bloch vector
/// in the order xx, yy, zz, xy, xz, yz; it gives the standard error of any
/// linear functional w . S through `sem_of`.
struct EnsembleResult {
    std::vector<double> times;
    std::vector<BlochVector> mean_bloch;
    std::vector<std::array<double, 3>> sem_bloch;
    std::vector<std::array<double, 6>> covariance;
    std::size_t n_traj = 0;
    std::uint64_t master_seed = 0;
    std::string config_digest;

    std::size_t size() const noexcept { return times.size(); }
    /// Index of the recorded time closest to t.
    std::size_t index_of(double t) const;
    /// Standard error of the mean of w . S at time index i.
    double sem_of(std::size_t i, const std::array<double, 3> &w) const;
};

/// A trajectory failed; carries the offending stream index.
class TrajectoryError : public std::runtime_error {
   public:
    TrajectoryError(std::uint64_t stream_index, const std::string &what);
    std::uint64_t stream_index() const noexcept { return stream_index_; }

   private:
    std::uint64_t stream_index_;
};

/// Worker count from the NKFB_WORKERS environment variable, falling back to
/// the hardware concurrency.
std::size_t default_workers();

/// Runs n_traj independent trajectories; trajectory i draws its noise from
/// NoiseStream(master_seed, i). The result is bitwise identical for any
/// worker count (0 selects default_workers()).
EnsembleResult run_ensemble(const EnsembleSpec &spec, std::size_t n_traj, std::uint64_t master_seed,
                            std::size_t workers = 0);

/// Short stable hex digest of the full ensemble description.
std::string config_digest(const EnsembleSpec &spec, std::size_t n_traj, std::uint64_t master_seed);

struct ValidationOptions {
    double k_sigma = 3.0;
    /// Pass when at least this fraction of checked points lie within k_sigma.
    double required_fraction = 0.99;
    std::array<bool, 3> components{true, true, true};
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
    /// Deviations below this are treated as exact agreement (covers SEM = 0).
    double absolute_floor = 1e-12;
};

struct ValidationReport {
    /// Largest |mean - oracle| / SEM per component.
    std::array<double, 3> max_z{};
    std::array<double, 3> max_abs_deviation{};
    std::size_t points_checked = 0;
    std::size_t points_within = 0;
    double fraction_within = 0.0;
    bool pass = false;

    std::string summary() const;
};

/// Compares an ensemble against an oracle on the same time grid. Throws
/// ValidationError when the grids differ.
ValidationReport validate_against_oracle(const EnsembleResult &result, const OracleCurve &oracle,
                                         const ValidationOptions &options);
ValidationReport validate_against_oracle(const EnsembleResult &result, const OracleCurve &oracle, double k_sigma);

}  // namespace nkfb

#endif  // NKFB_ENSEMBLE_RUNNER_HPP
