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

#include <doctest.h>

#include <cmath>

#include "skybeam/rng.hpp"

using namespace skybeam;

TEST_CASE("labeled streams are reproducible and independent") {
    Rng a(42, "mobility");
    Rng b(42, "mobility");
    Rng c(42, "shadowing");
    bool all_equal = true, all_equal_cross = true;
    for (int i = 0; i < 100; ++i)
    {
        const std::uint64_t va = a.next_u64();
        all_equal &= (va == b.next_u64());
        all_equal_cross &= (va == c.next_u64());
    }
    CHECK(all_equal);
    CHECK_FALSE(all_equal_cross);
}

TEST_CASE("consuming one stream never shifts another") {
    RngSet s1(7), s2(7);
    for (int i = 0; i < 1000; ++i)
        (void)s1.policy.normal();
    for (int i = 0; i < 50; ++i)
        CHECK(s1.mobility.next_u64() == s2.mobility.next_u64());
}

TEST_CASE("normal draws have standard moments") {
    Rng rng(1, "test-normal");
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double x = rng.normal();
        sum += x;
        sumsq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("complex normal has unit power split across parts") {
    Rng rng(1, "test-cnormal");
    const int n = 100000;
    double p = 0.0, pre = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto z = rng.cnormal();
        p += std::norm(z);
        pre += z.real() * z.real();
    }
    CHECK(p / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(pre / n == doctest::Approx(0.5).epsilon(0.03));
}
