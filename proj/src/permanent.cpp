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

#include "photongrad/permanent.hpp"

#include <bit>
#include <stdexcept>
#include <vector>

namespace photongrad {

std::complex<double> permanent(const Eigen::MatrixXcd& a, const DeskCaps& caps) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("permanent: matrix must be square");
    const int d = static_cast<int>(a.rows());
    if (d > caps.max_permanent_dim)
        throw std::invalid_argument("permanent: dimension exceeds desk-scale cap");
    if (d == 0) return {1.0, 0.0};
    if (d == 1) return a(0, 0);

    // perm(A) = 2^{1-d} Σ_δ (Π_j δ_j) Π_i Σ_j δ_j a_{ij}, δ_1 fixed to +1.
    // Gray code flips one δ per step so row sums update in O(d).
    std::vector<std::complex<double>> rowsum(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) rowsum[static_cast<std::size_t>(i)] = a.row(i).sum();

    auto product = [&]() {
        std::complex<double> p = rowsum[0];
        for (int i = 1; i < d; ++i) p *= rowsum[static_cast<std::size_t>(i)];
        return p;
    };

    std::complex<double> total = product();
    std::vector<double> delta(static_cast<std::size_t>(d), 1.0);
    double sign = 1.0;
    const std::uint64_t loops = 1ull << (d - 1);
    for (std::uint64_t k = 1; k < loops; ++k) {
        const int j = std::countr_zero(k) + 1;  // δ_0 never flips
        delta[static_cast<std::size_t>(j)] = -delta[static_cast<std::size_t>(j)];
        const double f = 2.0 * delta[static_cast<std::size_t>(j)];
        for (int i = 0; i < d; ++i) rowsum[static_cast<std::size_t>(i)] += f * a(i, j);
        sign = -sign;
        total += sign * product();
    }
    return total / static_cast<double>(loops);
}

}  // namespace photongrad
