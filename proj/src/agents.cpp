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

#include "skybeam/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace skybeam {

using neural::Graph;
using neural::Param;
using neural::Shape;
using neural::Tensor;
using neural::Var;

const char *actor_kind_name(ActorKind kind) {
    return kind == ActorKind::kHab ? "hab" : "haps";
}

ActorDims actor_dims(ActorKind kind, const ScenarioConfig &cfg) {
    if (kind == ActorKind::kHab)
        return {cfg.users_per_cluster, cfg.hab_antennas};
    return {cfg.total_users(), cfg.haps_antennas};
}

namespace {

Param zero_param(Shape s) {
    return Param(Tensor::zeros(s));
}

Param gaussian_param(Shape s, Rng &rng, long fan_in) {
    return Param(neural::init_gaussian(s, rng, 1.0 / std::sqrt(double(fan_in))));
}

} // namespace

ActorNet::ActorNet(ActorKind kind, ActorDims dims) : kind_(kind), dims_(dims) {
    const long c = kConvChannels, k = kKernel;
    const long flat = c * dims.rows * dims.cols;
    const long a = dims.action_per_head();
    conv1_w_ = zero_param(Shape::of({c, 4, k, k}));
    conv1_b_ = zero_param(Shape::of({c}));
    conv2_w_ = zero_param(Shape::of({c, c, k, k}));
    conv2_b_ = zero_param(Shape::of({c}));
    fc_w_ = zero_param(Shape::of({kDenseUnits, flat}));
    fc_b_ = zero_param(Shape::of({kDenseUnits}));
    mu_re_w_ = zero_param(Shape::of({a, kDenseUnits}));
    mu_re_b_ = zero_param(Shape::of({a}));
    logsig_re_w_ = zero_param(Shape::of({a, kDenseUnits}));
    logsig_re_b_ = zero_param(Shape::of({a}));
    mu_im_w_ = zero_param(Shape::of({a, kDenseUnits}));
    mu_im_b_ = zero_param(Shape::of({a}));
    logsig_im_w_ = zero_param(Shape::of({a, kDenseUnits}));
    logsig_im_b_ = zero_param(Shape::of({a}));
}

ActorNet::ActorNet(ActorKind kind, ActorDims dims, Rng &init_rng)
    : ActorNet(kind, dims) {
    const long c = kConvChannels, k = kKernel;
    const long flat = c * dims.rows * dims.cols;
    const long a = dims.action_per_head();
    // Gaussian weights scaled by 1/sqrt(fan_in); biases stay zero. Draw
    // order is part of the reproducibility contract.
    conv1_w_ = gaussian_param(Shape::of({c, 4, k, k}), init_rng, 4 * k * k);
    conv2_w_ = gaussian_param(Shape::of({c, c, k, k}), init_rng, c * k * k);
    fc_w_ = gaussian_param(Shape::of({kDenseUnits, flat}), init_rng, flat);
    mu_re_w_ = gaussian_param(Shape::of({a, kDenseUnits}), init_rng, kDenseUnits);
    logsig_re_w_ = gaussian_param(Shape::of({a, kDenseUnits}), init_rng, kDenseUnits);
    mu_im_w_ = gaussian_param(Shape::of({a, kDenseUnits}), init_rng, kDenseUnits);
    logsig_im_w_ = gaussian_param(Shape::of({a, kDenseUnits}), init_rng, kDenseUnits);
}

ActorNet::Heads ActorNet::forward(Graph &g, const Var &state) const {
    Var h1 = g.relu(g.conv2d(state, conv1_w_.node, conv1_b_.node));
    Var h2 = g.relu(g.conv2d(h1, conv2_w_.node, conv2_b_.node));
    Var feat = g.relu(g.dense(g.flatten(h2), fc_w_.node, fc_b_.node));
    Var mu_re = g.dense(feat, mu_re_w_.node, mu_re_b_.node);
    Var ls_re = g.dense(feat, logsig_re_w_.node, logsig_re_b_.node);
    Var mu_im = g.dense(feat, mu_im_w_.node, mu_im_b_.node);
    Var ls_im = g.dense(feat, logsig_im_w_.node, logsig_im_b_.node);
    return {g.concat_cols(mu_re, mu_im), g.concat_cols(ls_re, ls_im)};
}

std::vector<std::pair<std::string, Param *>> ActorNet::named_params() {
    return {
        {"conv1.w", &conv1_w_},       {"conv1.b", &conv1_b_},
        {"conv2.w", &conv2_w_},       {"conv2.b", &conv2_b_},
        {"fc.w", &fc_w_},             {"fc.b", &fc_b_},
        {"mu_re.w", &mu_re_w_},       {"mu_re.b", &mu_re_b_},
        {"logsig_re.w", &logsig_re_w_}, {"logsig_re.b", &logsig_re_b_},
        {"mu_im.w", &mu_im_w_},       {"mu_im.b", &mu_im_b_},
        {"logsig_im.w", &logsig_im_w_}, {"logsig_im.b", &logsig_im_b_},
    };
}

std::vector<std::pair<std::string, const Param *>> ActorNet::named_params() const {
    auto mut = const_cast<ActorNet *>(this)->named_params();
    std::vector<std::pair<std::string, const Param *>> out;
    out.reserve(mut.size());
    for (auto &[name, p] : mut)
        out.emplace_back(name, p);
    return out;
}

void ActorNet::zero_grads() {
    for (auto &[name, p] : named_params())
        p->zero_grad();
}

neural::Tensor encode_state(const ActorDims &dims, const arma::cx_mat &csi_rows,
                            const arma::cx_mat &prev_beams) {
    const long r = dims.rows, c = dims.cols;
    if (long(csi_rows.n_rows) != r || long(csi_rows.n_cols) != c)
        throw std::invalid_argument("encode_state: CSI rows do not match the served user set");
    const bool has_prev = prev_beams.n_elem > 0;
    if (has_prev && (long(prev_beams.n_rows) != c || long(prev_beams.n_cols) != r))
        throw std::invalid_argument("encode_state: previous beams have the wrong shape");

    Tensor out(Shape::of({4, r, c}));
    const long plane = r * c;
    for (long u = 0; u < r; ++u)
        for (long n = 0; n < c; ++n)
        {
            const std::size_t at = std::size_t(u * c + n);
            const std::complex<double> h = csi_rows(arma::uword(u), arma::uword(n));
            out.v[at] = h.real();
            out.v[at + std::size_t(plane)] = h.imag();
            if (has_prev)
            {
                const std::complex<double> w = prev_beams(arma::uword(n), arma::uword(u));
                out.v[at + std::size_t(2 * plane)] = w.real();
                out.v[at + std::size_t(3 * plane)] = w.imag();
            }
        }
    return out;
}

ActionResult act(const ActorNet &net, const neural::Tensor &state, Rng &policy_rng,
                 neural::SampleMode mode) {
    const ActorDims &dims = net.dims();
    if (state.shape != Shape::of({4, dims.rows, dims.cols}))
        throw std::invalid_argument("act: state shape does not match the actor");

    Graph g(false);
    Tensor batched = state;
    batched.shape = Shape::of({1, 4, dims.rows, dims.cols});
    Var s = g.leaf(std::move(batched));
    ActorNet::Heads heads = net.forward(g, s);
    if (!heads.mu->val.is_finite() || !heads.logsig->val.is_finite())
        throw std::runtime_error("act: non-finite network output");
    auto [action, logp] = g.gaussian_sample(heads.mu, heads.logsig, policy_rng, mode);

    ActionResult out;
    out.action_flat = action->val.v;
    out.raw_beams = action_to_beams(out.action_flat, dims);
    out.logp = logp->val.v[0];
    return out;
}

arma::cx_mat action_to_beams(const std::vector<double> &action, const ActorDims &dims) {
    const long a = dims.action_per_head();
    if (long(action.size()) != 2 * a)
        throw std::invalid_argument("action_to_beams: wrong action length");
    arma::cx_mat w(arma::uword(dims.cols), arma::uword(dims.rows));
    for (long u = 0; u < dims.rows; ++u)
        for (long n = 0; n < dims.cols; ++n)
        {
            const std::size_t at = std::size_t(u * dims.cols + n);
            w(arma::uword(n), arma::uword(u)) = {action[at], action[at + std::size_t(a)]};
        }
    return w;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity < 1)
        throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
    data_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_)
    {
        data_.push_back(std::move(t));
        return;
    }
    data_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition *> ReplayBuffer::sample(std::size_t n, Rng &rng) const {
    if (n > data_.size())
        throw std::logic_error("ReplayBuffer::sample: batch larger than buffer");
    std::vector<std::size_t> idx(data_.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::vector<const Transition *> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t j = i + std::size_t(rng.next_u64() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
        out.push_back(&data_[idx[i]]);
    }
    return out;
}

neural::Var surrogate_loss(Graph &g, const Var &logp,
                           const std::vector<double> &rewards, double gamma,
                           bool baseline) {
    const long m = logp->val.numel();
    if (m == 0 || std::size_t(m) != rewards.size())
        throw std::invalid_argument("surrogate_loss: batch size mismatch");
    double rbar = 0.0;
    if (baseline)
    {
        for (double r : rewards)
            rbar += r;
        rbar /= double(m);
    }
    Tensor coef(Shape::of({m}));
    for (long i = 0; i < m; ++i)
    {
        const double lp = logp->val.v[std::size_t(i)];
        coef.v[std::size_t(i)] = gamma * lp - (rewards[std::size_t(i)] - rbar) + gamma;
    }
    return g.weighted_mean(logp, coef);
}

LossInfo actor_loss(Graph &g, const ActorNet &net,
                    const std::vector<const Transition *> &batch, double gamma,
                    bool baseline) {
    if (batch.empty())
        throw std::invalid_argument("actor_loss: empty batch");
    const ActorDims &dims = net.dims();
    const long m = long(batch.size());
    const long a2 = dims.action_total();
    const Shape state_shape = Shape::of({4, dims.rows, dims.cols});
    const long state_len = state_shape.numel();

    Tensor states(Shape::of({m, 4, dims.rows, dims.cols}));
    Tensor actions(Shape::of({m, a2}));
    std::vector<double> rewards(static_cast<std::size_t>(m), 0.0);
    for (long i = 0; i < m; ++i)
    {
        const Transition &t = *batch[std::size_t(i)];
        if (!(t.state.shape == state_shape) || long(t.action.size()) != a2)
            throw std::invalid_argument("actor_loss: transition does not fit this actor");
        std::copy(t.state.v.begin(), t.state.v.end(),
                  states.v.begin() + i * state_len);
        std::copy(t.action.begin(), t.action.end(), actions.v.begin() + i * a2);
        rewards[std::size_t(i)] = t.reward;
    }

    Var s = g.leaf(std::move(states));
    ActorNet::Heads heads = net.forward(g, s);
    Var lp = g.gaussian_logp(heads.mu, heads.logsig, actions);

    // Differential entropy of the diagonal Gaussian policy at the batch
    // states, for logging.
    constexpr double kHalfLog2PiE = 1.4189385332046727; // 0.5*(1 + log(2*pi))
    double entropy = 0.0;
    for (long i = 0; i < m; ++i)
        for (long jx = 0; jx < a2; ++jx)
        {
            double ls = heads.logsig->val.v[std::size_t(i * a2 + jx)];
            ls = std::min(neural::kLogStdMax, std::max(neural::kLogStdMin, ls));
            entropy += kHalfLog2PiE + ls;
        }
    entropy /= double(m);

    return {surrogate_loss(g, lp, rewards, gamma, baseline), entropy};
}

} // namespace skybeam
