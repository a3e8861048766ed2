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

#include "nkfb/noise_stream.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nkfb/quantum_core.hpp"

namespace nkfb {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi, std::uint32_t &lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

// Open interval (0, 1) with 53 random bits.
inline double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
    : master_seed_(master_seed), stream_index_(stream_index) {}

void NoiseStream::refill() noexcept {
    const Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_index_),
        static_cast<std::uint32_t>(stream_index_ >> 32),
    };
    const Philox4x32::Key key = {
        static_cast<std::uint32_t>(master_seed_),
        static_cast<std::uint32_t>(master_seed_ >> 32),
    };
    const auto r = Philox4x32::generate(ctr, key);
    ++block_;
    const double u1 = to_open_unit((static_cast<std::uint64_t>(r[1]) << 32) | r[0]);
    const double u2 = to_open_unit((static_cast<std::uint64_t>(r[3]) << 32) | r[2]);
    // Box-Muller
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cache_[0] = radius * std::cos(angle);
    cache_[1] = radius * std::sin(angle);
    cached_ = 2;
}

double NoiseStream::standard_normal() noexcept {
    if (cached_ == 0) {
        refill();
    }
    ++drawn_;
    return cache_[2 - cached_--];
}

double NoiseStream::sample(double dt) {
    if (!(dt > 0.0)) {
        throw ValidationError("NoiseStream::sample: dt must be positive");
    }
    return standard_normal() / std::sqrt(dt);
}

DelayBuffer::DelayBuffer(std::size_t kappa) : kappa_(kappa), ring_(kappa, 0.0) {}

std::optional<double> DelayBuffer::push_pop(double xi) {
    ++pushes_;
    if (kappa_ == 0) {
        return xi;
    }
    const double oldest = ring_[head_];
    ring_[head_] = xi;
    head_ = (head_ + 1) % kappa_;
    if (pushes_ <= kappa_) {
        return std::nullopt;
    }
    return oldest;
}

void DelayBuffer::clear() noexcept {
    head_ = 0;
    pushes_ = 0;
    std::fill(ring_.begin(), ring_.end(), 0.0);
}

}  // namespace nkfb
