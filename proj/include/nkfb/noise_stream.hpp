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

#ifndef NKFB_NOISE_STREAM_HPP
#define NKFB_NOISE_STREAM_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace nkfb {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key) noexcept;
};

/// Gaussian white noise xi(t) for one trajectory.
///
/// The stream is a pure function of (master_seed, stream_index): the Philox key
/// is the master seed and the stream index occupies the upper half of the
/// counter, so any number of streams can be drawn independently and in any
/// order. Copies continue the same sequence.
class NoiseStream {
   public:
    NoiseStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept;

    /// One draw from Normal(0, variance = 1 / dt). Throws ValidationError when dt <= 0.
    double sample(double dt);

    /// One draw from Normal(0, 1).
    double standard_normal() noexcept;

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }
    /// Number of standard normals drawn so far.
    std::uint64_t position() const noexcept { return drawn_; }

   private:
    void refill() noexcept;

    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t block_ = 0;
    std::uint64_t drawn_ = 0;
    std::array<double, 2> cache_{};
    int cached_ = 0;
};

/// FIFO of kappa noise samples realizing xi(t - tau) with tau = kappa * dt.
class DelayBuffer {
   public:
    explicit DelayBuffer(std::size_t kappa);

    /// Pushes xi and returns the sample pushed kappa calls earlier, or nothing
    /// while the buffer is still filling. kappa = 0 returns xi itself.
    std::optional<double> push_pop(double xi);

    std::size_t capacity() const noexcept { return kappa_; }
    std::size_t pushes() const noexcept { return pushes_; }
    void clear() noexcept;

   private:
    std::size_t kappa_;
    std::vector<double> ring_;
    std::size_t head_ = 0;
    std::size_t pushes_ = 0;
};

}  // namespace nkfb

#endif  // NKFB_NOISE_STREAM_HPP
