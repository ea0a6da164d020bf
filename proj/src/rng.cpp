// SPDX-License-Identifier: Apache-2.0
//
// skybeam: beamforming simulator for two-layer airborne massive-MIMO networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "skybeam/rng.hpp"

#include <cmath>

namespace skybeam {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t fnv1a64(std::string_view s) {
    return fnv1a64_bytes(s.data(), s.size());
}

std::uint64_t fnv1a64_bytes(const void *data, std::size_t n, std::uint64_t h) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i)
    {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

Rng::Rng(std::uint64_t master_seed, std::string_view label)
    : eng_(splitmix64(splitmix64(master_seed) ^ fnv1a64(label))) {}

std::uint64_t Rng::next_u64() {
    return eng_();
}

double Rng::uniform() {
    // 53 random bits -> [0, 1)
    return double(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    if (has_cached_)
    {
        has_cached_ = false;
        return cached_;
    }
    double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

std::complex<double> Rng::cnormal() {
    constexpr double inv_sqrt2 = 0.7071067811865476;
    double re = normal() * inv_sqrt2;
    double im = normal() * inv_sqrt2;
    return {re, im};
}

} // namespace skybeam
