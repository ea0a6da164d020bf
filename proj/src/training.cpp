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
//
// Episodic training (Algorithm-style loop: act, project, observe shared
// reward, replay updates every eta slots) and the frozen-weight evaluation
// loop with paired ZF/MRT baselines.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "skybeam/agents.hpp"

namespace skybeam {

namespace {

using neural::Graph;
using neural::SampleMode;
using neural::Tensor;

/// Shared per-slot machinery of the train and eval loops.
struct SlotContext {
    const RunConfig &cfg;
    ScenarioState scen;
    ChannelGrid grid;
    int num_habs;
    int users_per_cluster;
    int total_users;

    explicit SlotContext(const RunConfig &c)
        : cfg(c), scen(c.scenario),
          grid(c.scenario.num_habs + 1, c.scenario.total_users()),
          num_habs(c.scenario.num_habs),
          users_per_cluster(c.scenario.users_per_cluster),
          total_users(c.scenario.total_users()) {}

    void reset_episode(Rng &mobility) {
        scen.reset(mobility);
        grid.reset();
    }

    void realize(RngSet &rngs) {
        grid.realize_slot(scen, cfg.channel, rngs.shadowing, rngs.nlos, rngs.csi_noise);
    }

    arma::cx_mat hab_csi(int cluster) const {
        arma::cx_mat rows(arma::uword(users_per_cluster),
                          arma::uword(cfg.scenario.hab_antennas));
        for (int k = 0; k < users_per_cluster; ++k)
            rows.row(arma::uword(k)) =
                grid.at(cluster + 1, cluster * users_per_cluster + k).h_tilde;
        return rows;
    }

    arma::cx_mat haps_csi() const {
        arma::cx_mat rows(arma::uword(total_users),
                          arma::uword(cfg.scenario.haps_antennas));
        for (int u = 0; u < total_users; ++u)
            rows.row(arma::uword(u)) = grid.at(0, u).h_tilde;
        return rows;
    }

    arma::cx_mat hab_true(int cluster) const {
        arma::cx_mat rows(arma::uword(users_per_cluster),
                          arma::uword(cfg.scenario.hab_antennas));
        for (int k = 0; k < users_per_cluster; ++k)
            rows.row(arma::uword(k)) =
                grid.at(cluster + 1, cluster * users_per_cluster + k).h;
        return rows;
    }

    arma::cx_mat haps_true() const {
        arma::cx_mat rows(arma::uword(total_users),
                          arma::uword(cfg.scenario.haps_antennas));
        for (int u = 0; u < total_users; ++u)
            rows.row(arma::uword(u)) = grid.at(0, u).h;
        return rows;
    }
};

struct SlotActions {
    std::vector<BeamformingMatrix> hab_exec;
    BeamformingMatrix haps_exec;
    std::vector<Tensor> hab_states;
    Tensor haps_state;
    std::vector<std::vector<double>> hab_actions;
    std::vector<double> haps_action;
};

/// Encode states, run both actors, project onto the power constraints.
SlotActions act_all(const SlotContext &ctx, const ActorPair &nets,
                    const std::vector<arma::cx_mat> &prev_hab,
                    const arma::cx_mat &prev_haps, Rng &policy_rng,
                    SampleMode mode) {
    const ActorDims hab_dims = nets.hab->dims();
    const ActorDims haps_dims = nets.haps->dims();
    const RadioParams &radio = ctx.cfg.radio;

    SlotActions out;
    out.hab_exec.resize(std::size_t(ctx.num_habs));
    out.hab_states.resize(std::size_t(ctx.num_habs));
    out.hab_actions.resize(std::size_t(ctx.num_habs));
    for (int c = 0; c < ctx.num_habs; ++c)
    {
        out.hab_states[std::size_t(c)] =
            encode_state(hab_dims, ctx.hab_csi(c), prev_hab[std::size_t(c)]);
        ActionResult ar = act(*nets.hab, out.hab_states[std::size_t(c)], policy_rng, mode);
        out.hab_actions[std::size_t(c)] = std::move(ar.action_flat);
        BeamformingMatrix raw{c + 1, std::move(ar.raw_beams), radio.p_max_hab_w,
                              PowerConstraint::kTotalPower};
        out.hab_exec[std::size_t(c)] = project_power(raw);
    }

    out.haps_state = encode_state(haps_dims, ctx.haps_csi(), prev_haps);
    ActionResult ar0 = act(*nets.haps, out.haps_state, policy_rng, mode);
    out.haps_action = std::move(ar0.action_flat);
    BeamformingMatrix raw0{0, std::move(ar0.raw_beams), radio.p_max_haps_w,
                           radio.haps_constraint()};
    out.haps_exec = project_power(raw0);
    return out;
}

std::string checkpoint_path(const std::string &dir, int episode) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "checkpoint_ep%06d.skb", episode);
    return dir + "/" + buf;
}

struct Accumulator {
    std::vector<double> sum, sumsq;

    explicit Accumulator(int slots) : sum(std::size_t(slots), 0.0), sumsq(std::size_t(slots), 0.0) {}

    void add(int slot, double x) {
        sum[std::size_t(slot)] += x;
        sumsq[std::size_t(slot)] += x * x;
    }

    SeriesStats finish(int episodes) const {
        SeriesStats s;
        s.episodes = episodes;
        s.mean_per_slot.resize(sum.size());
        s.std_per_slot.resize(sum.size());
        double total = 0.0;
        for (std::size_t t = 0; t < sum.size(); ++t)
        {
            const double m = sum[t] / double(episodes);
            s.mean_per_slot[t] = m;
            s.std_per_slot[t] = std::sqrt(std::max(0.0, sumsq[t] / double(episodes) - m * m));
            total += m;
        }
        s.time_avg_mean = total / double(sum.size());
        return s;
    }
};

} // namespace

TrainResult train(const RunConfig &cfg) {
    cfg.validate();
    const ScenarioConfig &sc = cfg.scenario;
    const Hyperparams &hp = cfg.hyper;

    RngSet rngs(cfg.master_seed);
    ActorPair nets;
    nets.hab = std::make_shared<ActorNet>(ActorKind::kHab, actor_dims(ActorKind::kHab, sc),
                                          rngs.init);
    nets.haps = std::make_shared<ActorNet>(ActorKind::kHaps, actor_dims(ActorKind::kHaps, sc),
                                           rngs.init);
    ReplayBuffer buf_hab(hp.buffer_capacity);
    ReplayBuffer buf_haps(hp.buffer_capacity);

    SlotContext ctx(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    TrainResult result;
    result.nets = nets;

    for (int ep = 1; ep <= hp.episodes; ++ep)
    {
        ctx.reset_episode(rngs.mobility);
        std::vector<arma::cx_mat> prev_hab(std::size_t(ctx.num_habs));
        arma::cx_mat prev_haps;

        double reward_acc = 0.0;
        double loss_hab_acc = 0.0, loss_haps_acc = 0.0;
        double ent_hab_acc = 0.0, ent_haps_acc = 0.0;
        int updates = 0;

        for (int t = 1; t <= sc.slots_per_episode; ++t)
        {
            ctx.realize(rngs);
            SlotActions acts = act_all(ctx, nets, prev_hab, prev_haps, rngs.policy,
                                       SampleMode::kSample);

            const RateReport report = compute_rates(ctx.grid, acts.hab_exec, acts.haps_exec,
                                                    sc, cfg.channel.noise_w);
            const double r = report.mean_reward;
            reward_acc += r;

            for (int c = 0; c < ctx.num_habs; ++c)
                buf_hab.push({std::move(acts.hab_states[std::size_t(c)]),
                              std::move(acts.hab_actions[std::size_t(c)]), r, ep, t});
            buf_haps.push({std::move(acts.haps_state), std::move(acts.haps_action), r, ep, t});

            for (int c = 0; c < ctx.num_habs; ++c)
                prev_hab[std::size_t(c)] = acts.hab_exec[std::size_t(c)].w;
            prev_haps = acts.haps_exec.w;

            if (t % hp.eta == 0)
            {
                auto update = [&](ActorNet &net, const ReplayBuffer &buf, double gamma,
                                  double &loss_acc, double &ent_acc) {
                    if (buf.size() < std::size_t(hp.batch_size))
                        return false;
                    auto batch = buf.sample(std::size_t(hp.batch_size), rngs.policy);
                    Graph g(true);
                    LossInfo li = actor_loss(g, net, batch, gamma, hp.reward_baseline);
                    const double lval = li.loss->val.v[0];
                    if (!std::isfinite(lval))
                        throw std::runtime_error(
                            "train: non-finite loss for " +
                            std::string(actor_kind_name(net.kind())) + " actor at episode " +
                            std::to_string(ep) + " slot " + std::to_string(t));
                    net.zero_grads();
                    g.backward(li.loss);
                    for (auto &[name, p] : net.named_params())
                        neural::adam_step(*p, hp.learning_rate);
                    loss_acc += lval;
                    ent_acc += li.mean_entropy;
                    return true;
                };
                const bool did_hab = update(*nets.hab, buf_hab, hp.gamma, loss_hab_acc, ent_hab_acc);
                const bool did_haps =
                    update(*nets.haps, buf_haps, hp.gamma_prime, loss_haps_acc, ent_haps_acc);
                if (did_hab || did_haps)
                    ++updates;
            }

            if (t < sc.slots_per_episode)
                ctx.scen.step(rngs.mobility);
        }

        EpisodeLog log;
        log.episode = ep;
        log.mean_reward = reward_acc / double(sc.slots_per_episode);
        if (updates > 0)
        {
            log.loss_hab = loss_hab_acc / double(updates);
            log.loss_haps = loss_haps_acc / double(updates);
            log.entropy_hab = ent_hab_acc / double(updates);
            log.entropy_haps = ent_haps_acc / double(updates);
        }
        result.log.push_back(log);

        if (ep % hp.eta_prime == 0)
            save_checkpoint(checkpoint_path(cfg.output_dir, ep), nets, cfg, ep);
    }

    save_checkpoint(cfg.output_dir + "/checkpoint.skb", nets, cfg, hp.episodes);
    return result;
}

EvalResult evaluate(const RunConfig &cfg, const ActorPair *nets, int episodes,
                    bool mean_mode) {
    cfg.validate();
    const ScenarioConfig &sc = cfg.scenario;
    const bool with_drl = nets != nullptr && nets->hab && nets->haps;
    if (with_drl)
    {
        if (!(nets->hab->dims() == actor_dims(ActorKind::kHab, sc)) ||
            !(nets->haps->dims() == actor_dims(ActorKind::kHaps, sc)))
            throw DimensionMismatchError(
                "evaluate: checkpoint network dimensions do not match the scenario");
    }

    RngSet rngs(cfg.master_seed);
    SlotContext ctx(cfg);
    const int slots = sc.slots_per_episode;
    Accumulator acc_drl(slots), acc_zf(slots), acc_mrt(slots);
    std::uint64_t hash_drl = 14695981039346656037ull;
    std::uint64_t hash_zf = hash_drl, hash_mrt = hash_drl;

    const RadioParams &radio = cfg.radio;
    const SampleMode mode = mean_mode ? SampleMode::kMean : SampleMode::kSample;

    for (int ep = 1; ep <= episodes; ++ep)
    {
        ctx.reset_episode(rngs.mobility);
        std::vector<arma::cx_mat> prev_hab(std::size_t(ctx.num_habs));
        arma::cx_mat prev_haps;

        for (int t = 1; t <= slots; ++t)
        {
            ctx.realize(rngs);
            const std::uint64_t slot_hash = ctx.grid.true_channel_hash();

            if (with_drl)
            {
                hash_drl = fnv1a64_bytes(&slot_hash, sizeof(slot_hash), hash_drl);
                SlotActions acts =
                    act_all(ctx, *nets, prev_hab, prev_haps, rngs.policy, mode);
                const RateReport rep = compute_rates(ctx.grid, acts.hab_exec, acts.haps_exec,
                                                     sc, cfg.channel.noise_w);
                acc_drl.add(t - 1, rep.sum_rate);
                for (int c = 0; c < ctx.num_habs; ++c)
                    prev_hab[std::size_t(c)] = acts.hab_exec[std::size_t(c)].w;
                prev_haps = acts.haps_exec.w;
            }

            // Baselines see the same realization and use the true channel.
            hash_zf = fnv1a64_bytes(&slot_hash, sizeof(slot_hash), hash_zf);
            hash_mrt = fnv1a64_bytes(&slot_hash, sizeof(slot_hash), hash_mrt);

            std::vector<BeamformingMatrix> zf_habs(std::size_t(ctx.num_habs));
            std::vector<BeamformingMatrix> mrt_habs(std::size_t(ctx.num_habs));
            for (int c = 0; c < ctx.num_habs; ++c)
            {
                const arma::cx_mat rows = ctx.hab_true(c);
                zf_habs[std::size_t(c)] = zf_precoder(rows, c + 1, radio.p_max_hab_w,
                                                      PowerConstraint::kTotalPower);
                mrt_habs[std::size_t(c)] = mrt_precoder(rows, c + 1, radio.p_max_hab_w,
                                                        PowerConstraint::kTotalPower);
            }
            const arma::cx_mat rows0 = ctx.haps_true();
            const BeamformingMatrix zf_haps =
                zf_precoder(rows0, 0, radio.p_max_haps_w, radio.haps_constraint());
            const BeamformingMatrix mrt_haps =
                mrt_precoder(rows0, 0, radio.p_max_haps_w, radio.haps_constraint());

            acc_zf.add(t - 1,
                       compute_rates(ctx.grid, zf_habs, zf_haps, sc, cfg.channel.noise_w).sum_rate);
            acc_mrt.add(t - 1, compute_rates(ctx.grid, mrt_habs, mrt_haps, sc,
                                             cfg.channel.noise_w)
                                   .sum_rate);

            if (t < slots)
                ctx.scen.step(rngs.mobility);
        }
    }

    if (with_drl && (hash_drl != hash_zf || hash_zf != hash_mrt))
        throw std::logic_error("evaluate: paired methods saw different channel draws");
    if (hash_zf != hash_mrt)
        throw std::logic_error("evaluate: paired baselines saw different channel draws");

    EvalResult out;
    if (with_drl)
        out.drl = acc_drl.finish(episodes);
    out.zf = acc_zf.finish(episodes);
    out.mrt = acc_mrt.finish(episodes);
    out.channel_hash_drl = with_drl ? hash_drl : 0;
    out.channel_hash_zf = hash_zf;
    out.channel_hash_mrt = hash_mrt;
    return out;
}

} // namespace skybeam
