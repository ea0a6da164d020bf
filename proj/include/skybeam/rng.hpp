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

#ifndef SKYBEAM_RNG_HPP
#define SKYBEAM_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace skybeam {

/// One labeled random stream. A master seed plus a stable string label fully
/// determine the stream, so adding a new consumer elsewhere never shifts the
/// draws of an existing one.
class Rng {
  public:
    Rng(std::uint64_t master_seed, std::string_view label);

    std::uint64_t next_u64();

    /// Uniform on [0, 1).
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal, Box-Muller (pairs cached).
    double normal();

    /// Circularly-symmetric complex normal with E|z|^2 = 1.
    std::complex<double> cnormal();

  private:
    std::mt19937_64 eng_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// The fixed set of labeled streams used by a run. Labels are part of the
/// reproducibility contract; do not rename them.
struct RngSet {
    Rng mobility;
    Rng shadowing;
    Rng nlos;
    Rng csi_noise;
    Rng policy;
    Rng init;

    explicit RngSet(std::uint64_t master_seed)
        : mobility(master_seed, "mobility"),
          shadowing(master_seed, "shadowing"),
          nlos(master_seed, "nlos"),
          csi_noise(master_seed, "csi-noise"),
          policy(master_seed, "policy"),
          init(master_seed, "init") {}
};

/// FNV-1a over a byte string; used for stream labels and output hashing.
std::uint64_t fnv1a64(std::string_view s);

/// FNV-1a accumulation over raw bytes, for hashing draw streams.
std::uint64_t fnv1a64_bytes(const void *data, std::size_t n, std::uint64_t h = 14695981039346656037ull);

} // namespace skybeam

#endif
