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

#ifndef SKYBEAM_AGENTS_HPP
#define SKYBEAM_AGENTS_HPP

#include <armadillo>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skybeam/config.hpp"
#include "skybeam/neural.hpp"
#include "skybeam/radio.hpp"

namespace skybeam {

/// Checkpoint/config disagreement on network dimensions.
class DimensionMismatchError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ActorKind {
    kHab,
    kHaps,
};

const char *actor_kind_name(ActorKind kind);

/// Spatial dims of an actor's state: served users x serving antennas.
struct ActorDims {
    int rows = 0;
    int cols = 0;

    int action_per_head() const { return rows * cols; }
    int action_total() const { return 2 * rows * cols; } // re ++ im
    bool operator==(const ActorDims &) const = default;
};

ActorDims actor_dims(ActorKind kind, const ScenarioConfig &cfg);

/// Stochastic actor: conv(4->16) -> conv(16->16) -> dense(512) -> four
/// linear heads (mean/log-std for the real and imaginary beam parts). All B
/// HAB agents share one instance; the HAPS has its own.
class ActorNet {
  public:
    ActorNet(ActorKind kind, ActorDims dims); // zero weights (checkpoint load)
    ActorNet(ActorKind kind, ActorDims dims, Rng &init_rng);

    ActorKind kind() const { return kind_; }
    const ActorDims &dims() const { return dims_; }

    struct Heads {
        neural::Var mu;     // [N, 2A]
        neural::Var logsig; // [N, 2A]
    };
    Heads forward(neural::Graph &g, const neural::Var &state) const;

    std::vector<std::pair<std::string, neural::Param *>> named_params();
    std::vector<std::pair<std::string, const neural::Param *>> named_params() const;
    void zero_grads();

    static constexpr int kConvChannels = 16;
    static constexpr int kKernel = 3;
    static constexpr int kDenseUnits = 512;

  private:
    ActorKind kind_;
    ActorDims dims_;
    mutable neural::Param conv1_w_, conv1_b_, conv2_w_, conv2_b_;
    mutable neural::Param fc_w_, fc_b_;
    mutable neural::Param mu_re_w_, mu_re_b_, logsig_re_w_, logsig_re_b_;
    mutable neural::Param mu_im_w_, mu_im_b_, logsig_im_w_, logsig_im_b_;
};

/// Four-channel state tensor [4, rows, cols]:
/// [Re(h_tilde), Im(h_tilde), Re(W_prev), Im(W_prev)]. `csi_rows` holds one
/// served user's corrupted channel per row; `prev_beams` is the previously
/// executed beam matrix (antennas x served users), empty at the first slot.
neural::Tensor encode_state(const ActorDims &dims, const arma::cx_mat &csi_rows,
                            const arma::cx_mat &prev_beams);

struct ActionResult {
    arma::cx_mat raw_beams;          // antennas x served users, pre-projection
    std::vector<double> action_flat; // the sampled vector, re ++ im
    double logp = 0.0;
};

/// Forward pass plus head sampling (or the head mean). Throws on non-finite
/// network output.
ActionResult act(const ActorNet &net, const neural::Tensor &state, Rng &policy_rng,
                 neural::SampleMode mode);

/// Raw flat action vector (re ++ im, user-major) back to a complex matrix.
arma::cx_mat action_to_beams(const std::vector<double> &action, const ActorDims &dims);

struct Transition {
    neural::Tensor state;       // [4, rows, cols]
    std::vector<double> action; // raw, pre-projection, length 2A
    double reward = 0.0;
    int episode = 0;
    int slot = 0;
};

/// FIFO ring of transitions with uniform without-replacement sampling.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition &at(std::size_t i) const { return data_[i]; }

    std::vector<const Transition *> sample(std::size_t n, Rng &rng) const;

  private:
    std::size_t capacity_;
    std::size_t next_ = 0; // eviction cursor once full
    std::vector<Transition> data_;
};

/// Score-function surrogate for the entropy-regularized objective
/// E[gamma*logpi - r]: mean over the batch of
///   logpi * detach(gamma*logpi - (r - rbar)) + gamma*logpi
/// with rbar the batch-mean reward when `baseline` is on.
neural::Var surrogate_loss(neural::Graph &g, const neural::Var &logp,
                           const std::vector<double> &rewards, double gamma,
                           bool baseline);

struct LossInfo {
    neural::Var loss;
    double mean_entropy = 0.0; // nats, mean over the batch
};

/// Recomputes log-densities of the stored actions under the current network
/// and assembles the surrogate. Throws on an empty batch.
LossInfo actor_loss(neural::Graph &g, const ActorNet &net,
                    const std::vector<const Transition *> &batch, double gamma,
                    bool baseline);

struct EpisodeLog {
    int episode = 0;
    double mean_reward = 0.0;
    double loss_hab = 0.0;
    double loss_haps = 0.0;
    double entropy_hab = 0.0;
    double entropy_haps = 0.0;
};

struct ActorPair {
    std::shared_ptr<ActorNet> hab;
    std::shared_ptr<ActorNet> haps;
};

struct TrainResult {
    ActorPair nets;
    std::vector<EpisodeLog> log;
};

/// Episodic training loop; writes a checkpoint into cfg.output_dir every
/// eta_prime episodes plus a final one. Aborts with a diagnostic on a
/// non-finite loss.
TrainResult train(const RunConfig &cfg);

struct SeriesStats {
    std::vector<double> mean_per_slot; // sum-rate, bps/Hz
    std::vector<double> std_per_slot;  // across episodes
    double time_avg_mean = 0.0;
    int episodes = 0;
};

struct EvalResult {
    std::optional<SeriesStats> drl;
    SeriesStats zf;
    SeriesStats mrt;
    std::uint64_t channel_hash_drl = 0; // equal across methods by pairing
    std::uint64_t channel_hash_zf = 0;
    std::uint64_t channel_hash_mrt = 0;
};

/// Frozen-weight execution over `episodes` episodes; ZF and MRT run on the
/// identical channel draws (baselines always use the true channel). Pass
/// empty nets to evaluate baselines only. Throws DimensionMismatchError when
/// the nets do not fit the scenario dims.
EvalResult evaluate(const RunConfig &cfg, const ActorPair *nets, int episodes,
                    bool mean_mode);

struct Checkpoint {
    ActorPair nets;
    std::uint64_t config_hash = 0;
    int episodes_trained = 0;
};

void save_checkpoint(const std::string &path, const ActorPair &nets,
                     const RunConfig &cfg, int episodes_trained);
Checkpoint load_checkpoint(const std::string &path);

} // namespace skybeam

#endif
