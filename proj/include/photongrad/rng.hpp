/*
 * Copyright 2026 The photongrad authors
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

#ifndef PHOTONGRAD_RNG_HPP
#define PHOTONGRAD_RNG_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace photongrad {

/// Counter-based generator (Philox4x32-10) with explicit seeding and cheap
/// derivation of statistically independent sub-streams. Derived streams make
/// sampling reproducible regardless of evaluation order or thread count:
/// every estimation owns a stream keyed by its position in the run.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    /// Independent child stream; (a, b) label the position in the run
    /// (e.g. evaluation index, term index).
    RngStream derive(std::uint64_t a, std::uint64_t b = 0) const;

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform01();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Index drawn from the categorical distribution with the given
    /// inclusive prefix sums (cdf.back() must be ~1).
    std::size_t categorical(const std::vector<double>& cdf);

    /// Rademacher sign: +1 or -1 with equal probability.
    int rademacher();

    /// Standard normal via Box-Muller.
    double normal();

  private:
    std::uint64_t seed_;    // retained for derivation
    std::uint64_t stream_;
    std::array<std::uint32_t, 2> key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int block_pos_ = 2;  // consumed 64-bit lanes in block_ (2 per block)

    void refill();
};

}  // namespace photongrad

#endif
