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

#include "nkfb/ensemble_runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "nkfb/detail/qubit_trajectory.hpp"

namespace nkfb {

namespace {

// Running mean and co-moment sums for one time point (Welford / Chan et al.).
struct Moments {
    double count = 0.0;
    std::array<double, 3> mean{};
    std::array<double, 6> comoment{};  // xx, yy, zz, xy, xz, yz

    void add(const BlochVector &b) {
        count += 1.0;
        const std::array<double, 3> x = b.as_array();
        std::array<double, 3> before{};
        for (int k = 0; k < 3; ++k) {
            before[k] = x[k] - mean[k];
            mean[k] += before[k] / count;
        }
        std::array<double, 3> after{};
        for (int k = 0; k < 3; ++k) {
            after[k] = x[k] - mean[k];
        }
        comoment[0] += before[0] * after[0];
        comoment[1] += before[1] * after[1];
        comoment[2] += before[2] * after[2];
        comoment[3] += before[0] * after[1];
        comoment[4] += before[0] * after[2];
        comoment[5] += before[1] * after[2];
    }

    void merge(const Moments &other) {
        if (other.count == 0.0) {
            return;
        }
        if (count == 0.0) {
            *this = other;
            return;
        }
        const double n = count + other.count;
        std::array<double, 3> delta{};
        for (int k = 0; k < 3; ++k) {
            delta[k] = other.mean[k] - mean[k];
        }
        const double weight = count * other.count / n;
        comoment[0] += other.comoment[0] + delta[0] * delta[0] * weight;
        comoment[1] += other.comoment[1] + delta[1] * delta[1] * weight;
        comoment[2] += other.comoment[2] + delta[2] * delta[2] * weight;
        comoment[3] += other.comoment[3] + delta[0] * delta[1] * weight;
        comoment[4] += other.comoment[4] + delta[0] * delta[2] * weight;
        comoment[5] += other.comoment[5] + delta[1] * delta[2] * weight;
        for (int k = 0; k < 3; ++k) {
            mean[k] += delta[k] * other.count / n;
        }
        count = n;
    }
};

using BlockStats = std::vector<Moments>;

// Pairwise (tree) reduction in block order; independent of scheduling.
BlockStats reduce_pairwise(std::vector<BlockStats> &blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        return std::move(blocks[lo]);
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    BlockStats left = reduce_pairwise(blocks, lo, mid);
    const BlockStats right = reduce_pairwise(blocks, mid, hi);
    for (std::size_t i = 0; i < left.size(); ++i) {
        left[i].merge(right[i]);
    }
    return left;
}

std::size_t block_size_for(std::size_t n_traj) {
    // Depends on n_traj only, never on the worker count.
    constexpr std::size_t kMaxBlocks = 64;
    return std::max<std::size_t>(32, (n_traj + kMaxBlocks - 1) / kMaxBlocks);
}

void append_matrix(std::ostringstream &out, const Matrix &m) {
    out << m.rows() << ':';
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            out << m(i, j).real() << ',' << m(i, j).imag() << ';';
        }
    }
}

}  // namespace

TrajectoryError::TrajectoryError(std::uint64_t stream_index, const std::string &what)
    : std::runtime_error("trajectory " + std::to_string(stream_index) + " failed: " + what),
      stream_index_(stream_index) {}

std::size_t EnsembleResult::index_of(double t) const {
    if (times.empty()) {
        throw ValidationError("EnsembleResult::index_of: empty result");
    }
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) {
        return 0;
    }
    if (it == times.end()) {
        return times.size() - 1;
    }
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    return (t - times[hi - 1] <= *it - t) ? hi - 1 : hi;
}

double EnsembleResult::sem_of(std::size_t i, const std::array<double, 3> &w) const {
    const auto &c = covariance.at(i);
    const double var = w[0] * w[0] * c[0] + w[1] * w[1] * c[1] + w[2] * w[2] * c[2] +
                       2.0 * (w[0] * w[1] * c[3] + w[0] * w[2] * c[4] + w[1] * w[2] * c[5]);
    if (n_traj < 2 || !(var > 0.0)) {
        return 0.0;
    }
    return std::sqrt(var / static_cast<double>(n_traj));
}

std::size_t default_workers() {
    if (const char *env = std::getenv("NKFB_WORKERS")) {
        char *end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) {
            return static_cast<std::size_t>(value);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string config_digest(const EnsembleSpec &spec, std::size_t n_traj, std::uint64_t master_seed) {
    std::ostringstream text;
    text.precision(17);
    text << "H=";
    append_matrix(text, spec.step.H.matrix());
    text << "|L=";
    append_matrix(text, spec.step.L.matrix());
    text << "|dt=" << spec.step.dt << "|kappa=" << spec.step.kappa << "|feedback=" << spec.step.feedback_enabled
         << "|method=" << to_string(spec.step.method) << "|repair=" << spec.step.repair.min_eigenvalue << "|rho0=";
    append_matrix(text, spec.rho0.matrix());
    text << "|n_steps=" << spec.n_steps << "|record_every=" << spec.record_every << "|n_traj=" << n_traj
         << "|seed=" << master_seed;
    // FNV-1a, 64 bit
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text.str()) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

EnsembleResult run_ensemble(const EnsembleSpec &spec, std::size_t n_traj, std::uint64_t master_seed,
                            std::size_t workers) {
    spec.step.validate();
    if (n_traj < 1) {
        throw ValidationError("run_ensemble: n_traj must be at least 1");
    }
    if (spec.step.dim() != 2 || spec.rho0.dim() != 2) {
        throw ValidationError("run_ensemble: qubit configuration required");
    }
    if (spec.n_steps < 1 || spec.record_every < 1) {
        throw ValidationError("run_ensemble: n_steps and record_every must be at least 1");
    }
    (void)DensityMatrix(spec.rho0.matrix());

    const std::size_t n_records = spec.n_steps / spec.record_every + 1;
    const std::size_t block = block_size_for(n_traj);
    const std::size_t n_blocks = (n_traj + block - 1) / block;
    if (workers == 0) {
        workers = default_workers();
    }
    workers = std::min(workers, n_blocks);

    const detail::QubitStepper stepper(spec.step);
    const Eigen::Matrix2cd rho0 = spec.rho0.matrix();
    const double dt = spec.step.dt;

    std::vector<BlockStats> blocks(n_blocks);
    std::vector<std::exception_ptr> failures(n_blocks);
    std::atomic<std::size_t> next_block{0};

    auto work = [&] {
        for (;;) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= n_blocks) {
                return;
            }
            BlockStats stats(n_records);
            const std::size_t first = b * block;
            const std::size_t last = std::min(n_traj, first + block);
            try {
                for (std::size_t traj = first; traj < last; ++traj) {
                    NoiseStream stream(master_seed, traj);
                    try {
                        detail::drive_qubit(
                            stepper, rho0, spec.n_steps, spec.record_every, [&] { return stream.sample(dt); },
                            [&](std::size_t j, const Eigen::Matrix2cd &rho) {
                                stats[j / spec.record_every].add(detail::bloch_of(rho));
                            });
                    } catch (const std::exception &e) {
                        throw TrajectoryError(traj, e.what());
                    }
                }
            } catch (...) {
                failures[b] = std::current_exception();
                continue;
            }
            blocks[b] = std::move(stats);
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    for (const auto &failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    const BlockStats total = reduce_pairwise(blocks, 0, n_blocks);

    EnsembleResult result;
    result.n_traj = n_traj;
    result.master_seed = master_seed;
    result.config_digest = config_digest(spec, n_traj, master_seed);
    result.times.reserve(n_records);
    result.mean_bloch.reserve(n_records);
    result.sem_bloch.reserve(n_records);
    result.covariance.reserve(n_records);
    const double n = static_cast<double>(n_traj);
    for (std::size_t i = 0; i < n_records; ++i) {
        const Moments &m = total[i];
        result.times.push_back(static_cast<double>(i * spec.record_every) * dt);
        result.mean_bloch.push_back({m.mean[0], m.mean[1], m.mean[2]});
        std::array<double, 6> cov{};
        std::array<double, 3> sem{};
        if (n_traj > 1) {
            for (int k = 0; k < 6; ++k) {
                cov[k] = m.comoment[k] / (n - 1.0);
            }
            for (int k = 0; k < 3; ++k) {
                cov[k] = std::max(cov[k], 0.0);
                sem[k] = std::sqrt(cov[k] / n);
            }
        }
        result.covariance.push_back(cov);
        result.sem_bloch.push_back(sem);
    }
    return result;
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    out.precision(4);
    out << (pass ? "PASS" : "FAIL") << " within=" << points_within << "/" << points_checked << " ("
        << fraction_within * 100.0 << "%) max_z=(" << max_z[0] << ", " << max_z[1] << ", " << max_z[2]
        << ") max_dev=(" << max_abs_deviation[0] << ", " << max_abs_deviation[1] << ", " << max_abs_deviation[2]
        << ")";
    return out.str();
}

ValidationReport validate_against_oracle(const EnsembleResult &result, const OracleCurve &oracle,
                                         const ValidationOptions &options) {
    if (result.times.size() != oracle.times.size() || oracle.states.size() != oracle.times.size()) {
        throw ValidationError("validate_against_oracle: time grids have different lengths");
    }
    const double spacing = result.times.size() > 1 ? result.times[1] - result.times[0] : 1.0;
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        if (std::abs(result.times[i] - oracle.times[i]) > 1e-9 * std::max(spacing, std::abs(result.times[i]))) {
            throw ValidationError("validate_against_oracle: time grids differ at index " + std::to_string(i));
        }
    }

    ValidationReport report;
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        const double t = result.times[i];
        if (t < options.t_min || t > options.t_max) {
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            if (!options.components[k]) {
                continue;
            }
            const double dev = std::abs(result.mean_bloch[i][k] - oracle.states[i][k]);
            const double sem = result.sem_bloch[i][k];
            double z = 0.0;
            if (dev > options.absolute_floor) {
                z = sem > 0.0 ? dev / sem : std::numeric_limits<double>::infinity();
            }
            report.max_z[k] = std::max(report.max_z[k], z);
            report.max_abs_deviation[k] = std::max(report.max_abs_deviation[k], dev);
            ++report.points_checked;
            if (z <= options.k_sigma) {
                ++report.points_within;
            }
        }
    }
    report.fraction_within = report.points_checked == 0
                                 ? 1.0
                                 : static_cast<double>(report.points_within) / static_cast<double>(report.points_checked);
    report.pass = report.points_checked > 0 && report.fraction_within >= options.required_fraction;
    return report;
}

ValidationReport validate_against_oracle(const EnsembleResult &result, const OracleCurve &oracle, double k_sigma) {
    ValidationOptions options;
    options.k_sigma = k_sigma;
    return validate_against_oracle(result, oracle, options);
}

}  // namespace nkfb
