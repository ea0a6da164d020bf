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

#ifndef SKYBEAM_CONFIG_HPP
#define SKYBEAM_CONFIG_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "skybeam/channel.hpp"
#include "skybeam/radio.hpp"
#include "skybeam/scenario.hpp"

namespace skybeam {

struct Hyperparams {
    double gamma = 0.4;        // HAB entropy coefficient
    double gamma_prime = 0.4;  // HAPS entropy coefficient
    int eta = 2;               // slots between update steps
    int eta_prime = 10;        // episodes between checkpoints
    int batch_size = 32;
    std::size_t buffer_capacity = 100000;
    int episodes = 200;        // I_episode
    double learning_rate = 0.001;
    int eval_episodes = 500;
    bool reward_baseline = true;   // subtract the batch-mean reward
    bool eval_mean_action = false; // mean-mode actions during evaluation

    void validate() const;
};

/// One run: every knob of every module plus seed and output routing.
/// Defaults reproduce the standard simulation parameter set.
struct RunConfig {
    ScenarioConfig scenario;
    ChannelParams channel;
    RadioParams radio;
    Hyperparams hyper;
    std::string mode = "eval"; // train | eval | sweep | selftest
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    std::string checkpoint;

    void validate() const;

    /// Accepts "rho": "auto" (resolved from mobility and carrier at parse
    /// time) and "noise_dbm" as an alternative to "noise_w". Serialization
    /// always emits resolved linear-scale values.
    static RunConfig from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;

    static RunConfig load_file(const std::string &path);
    void save_file(const std::string &path) const;

    /// Canonical serialized form; byte-stable for a given configuration.
    std::string canonical_text() const;
    std::uint64_t hash() const;
};

double dbm_to_watts(double dbm);

} // namespace skybeam

#endif
