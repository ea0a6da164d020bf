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

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "skybeam/harness.hpp"

namespace skybeam {

namespace {

bool report(const char *name, bool ok) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
    return ok;
}

bool selftest_steering() {
    ChannelParams p;
    Rng rng(7, "selftest-steering");
    for (int i = 0; i < 200; ++i)
    {
        const double th = rng.uniform(0.0, M_PI / 2);
        const double ph = rng.uniform(-M_PI, M_PI);
        const arma::cx_rowvec s = steering_vector(th, ph, 36, p);
        for (const auto &z : s)
            if (std::abs(std::abs(z) - 1.0) > 1e-12)
                return false;
        if (std::abs(arma::accu(arma::square(arma::abs(s))) - 36.0) > 1e-9)
            return false;
    }
    return true;
}

bool selftest_ar1() {
    Rng rng(7, "selftest-ar1");
    arma::cx_rowvec prev(8);
    for (auto &z : prev)
        z = rng.cnormal();
    const arma::cx_rowvec same = advance_nlos(prev, 1.0, rng);
    if (arma::norm(same - prev, 2) != 0.0)
        return false;
    // rho = 0: stationary unit variance.
    double acc = 0.0;
    arma::cx_rowvec state = prev;
    const int steps = 2000;
    for (int i = 0; i < steps; ++i)
    {
        state = advance_nlos(state, 0.0, rng);
        acc += arma::accu(arma::square(arma::abs(state))) / double(state.n_elem);
    }
    return std::abs(acc / steps - 1.0) < 0.1;
}

bool selftest_projection() {
    Rng rng(7, "selftest-proj");
    for (int i = 0; i < 100; ++i)
    {
        arma::cx_mat w(8, 4);
        for (auto &z : w)
            z = 4.0 * rng.cnormal();
        BeamformingMatrix m{1, w, 10.0, PowerConstraint::kTotalPower};
        const BeamformingMatrix p1 = project_power(m);
        const BeamformingMatrix p2 = project_power(p1);
        if (!p1.feasible())
            return false;
        if (arma::any(arma::vectorise(p1.w != p2.w)))
            return false;
    }
    return true;
}

bool selftest_csi_identity() {
    Rng rng(7, "selftest-csi");
    arma::cx_rowvec h(16);
    for (auto &z : h)
        z = rng.cnormal();
    const arma::cx_rowvec same = corrupt_csi(h, 1.0, rng);
    return arma::norm(same - h, 2) == 0.0;
}

bool selftest_config_roundtrip() {
    RunConfig cfg;
    cfg.channel.doppler_rho = jakes_rho(cfg.scenario.user_speed_mps, cfg.channel.carrier_hz,
                                        cfg.channel.light_speed_mps,
                                        cfg.scenario.slot_duration_s);
    const std::string text1 = cfg.canonical_text();
    const RunConfig back = RunConfig::from_json(nlohmann::json::parse(text1));
    return back.canonical_text() == text1;
}

bool selftest_determinism() {
    RunConfig cfg;
    cfg.scenario.num_habs = 1;
    cfg.scenario.users_per_cluster = 1;
    cfg.scenario.hab_antennas = 4;
    cfg.scenario.haps_antennas = 4;
    cfg.scenario.slots_per_episode = 2;
    cfg.hyper.episodes = 2;
    cfg.hyper.batch_size = 2;
    cfg.hyper.eta_prime = 100; // no periodic checkpoints
    cfg.output_dir = std::filesystem::temp_directory_path() / "skybeam-selftest";
    cfg.mode = "train";
    const TrainResult a = train(cfg);
    const TrainResult b = train(cfg);
    if (a.log.size() != b.log.size())
        return false;
    for (std::size_t i = 0; i < a.log.size(); ++i)
        if (a.log[i].mean_reward != b.log[i].mean_reward ||
            a.log[i].loss_hab != b.log[i].loss_hab)
            return false;
    return true;
}

struct CliOptions {
    std::string config_path;
    std::string checkpoint;
    std::string checkpoints_by_k;
    std::string param;
    std::string values_csv;
    bool mean_action = false;
    std::string output_dir_override;
};

std::vector<double> parse_values(const std::string &csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (item.empty())
            continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::map<int, std::string> parse_k_checkpoints(const std::string &spec) {
    std::map<int, std::string> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected K=path pairs in --checkpoints");
        out[std::stoi(item.substr(0, eq))] = item.substr(eq + 1);
    }
    return out;
}

RunConfig load_config_or_exit(const std::string &path, int &code) {
    try
    {
        RunConfig cfg = RunConfig::load_file(path);
        code = kOk;
        return cfg;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        code = kBadConfig;
        return {};
    }
}

int run_train(const CliOptions &opt) {
    int code = kOk;
    RunConfig cfg = load_config_or_exit(opt.config_path, code);
    if (code != kOk)
        return code;
    if (!opt.output_dir_override.empty())
        cfg.output_dir = opt.output_dir_override;
    try
    {
        const TrainResult result = train(cfg);
        write_training_log(result.log, cfg.output_dir + "/training_log.csv");
        const double first = result.log.front().mean_reward;
        const double last = result.log.back().mean_reward;
        std::fprintf(stderr, "trained %d episodes: reward %.4f -> %.4f, checkpoint %s\n",
                     cfg.hyper.episodes, first, last,
                     (cfg.output_dir + "/checkpoint.skb").c_str());
        return kOk;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}

int run_eval(const CliOptions &opt) {
    int code = kOk;
    RunConfig cfg = load_config_or_exit(opt.config_path, code);
    if (code != kOk)
        return code;
    if (!opt.checkpoint.empty())
        cfg.checkpoint = opt.checkpoint;
    if (!opt.output_dir_override.empty())
        cfg.output_dir = opt.output_dir_override;
    if (opt.mean_action)
        cfg.hyper.eval_mean_action = true;
    try
    {
        ActorPair nets;
        const ActorPair *nets_ptr = nullptr;
        if (!cfg.checkpoint.empty())
        {
            nets = load_checkpoint(cfg.checkpoint).nets;
            nets_ptr = &nets;
        }
        auto rows = run_eval_point(cfg, nets_ptr, "none", 0.0);
        emit_results(std::move(rows), cfg.output_dir);
        return kOk;
    }
    catch (const DimensionMismatchError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kDimMismatch;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}

int run_sweep_cmd(const CliOptions &opt) {
    int code = kOk;
    RunConfig cfg = load_config_or_exit(opt.config_path, code);
    if (code != kOk)
        return code;
    if (!opt.checkpoint.empty())
        cfg.checkpoint = opt.checkpoint;
    if (!opt.output_dir_override.empty())
        cfg.output_dir = opt.output_dir_override;
    if (opt.mean_action)
        cfg.hyper.eval_mean_action = true;
    try
    {
        const std::vector<double> values = parse_values(opt.values_csv);
        std::map<int, std::string> by_k;
        if (!opt.checkpoints_by_k.empty())
            by_k = parse_k_checkpoints(opt.checkpoints_by_k);
        auto rows = run_sweep(cfg, opt.param, values, by_k);
        emit_results(std::move(rows), cfg.output_dir);
        return kOk;
    }
    catch (const MissingCheckpointError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kMissingCheckpoint;
    }
    catch (const DimensionMismatchError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kDimMismatch;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}

} // namespace

int selftest() {
    bool ok = true;
    ok &= report("steering identities", selftest_steering());
    ok &= report("jakes ar1", selftest_ar1());
    ok &= report("power projection", selftest_projection());
    ok &= report("csi identity at xi=1", selftest_csi_identity());
    ok &= report("config round-trip", selftest_config_roundtrip());
    ok &= report("training determinism", selftest_determinism());
    return ok ? kOk : kFailure;
}

int cli_main(int argc, char **argv) {
    CLI::App app{"skybeam: beamforming simulator for two-layer airborne massive-MIMO networks"};
    app.require_subcommand(1);

    CliOptions opt;

    CLI::App *cmd_train = app.add_subcommand("train", "Train the actor networks");
    cmd_train->add_option("--config", opt.config_path, "Run-config JSON file")->required();
    cmd_train->add_option("--output-dir", opt.output_dir_override, "Override output directory");

    CLI::App *cmd_eval = app.add_subcommand("eval", "Evaluate a checkpoint with paired baselines");
    cmd_eval->add_option("--config", opt.config_path, "Run-config JSON file")->required();
    cmd_eval->add_option("--checkpoint", opt.checkpoint, "Checkpoint file (omit for baselines only)");
    cmd_eval->add_flag("--mean-action", opt.mean_action, "Use head means instead of sampling");
    cmd_eval->add_option("--output-dir", opt.output_dir_override, "Override output directory");

    CLI::App *cmd_sweep = app.add_subcommand("sweep", "Sweep xi, l, or K");
    cmd_sweep->add_option("--config", opt.config_path, "Run-config JSON file")->required();
    cmd_sweep->add_option("--param", opt.param, "Sweep parameter: xi, l, or K")->required();
    cmd_sweep->add_option("--values", opt.values_csv, "Comma-separated values")->required();
    cmd_sweep->add_option("--checkpoint", opt.checkpoint, "Checkpoint for xi/l sweeps");
    cmd_sweep->add_option("--checkpoints", opt.checkpoints_by_k,
                          "Per-K checkpoints for K sweeps, e.g. 4=a.skb,8=b.skb");
    cmd_sweep->add_flag("--mean-action", opt.mean_action, "Use head means instead of sampling");
    cmd_sweep->add_option("--output-dir", opt.output_dir_override, "Override output directory");

    CLI::App *cmd_selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kUsage;
    }

    if (cmd_train->parsed())
        return run_train(opt);
    if (cmd_eval->parsed())
        return run_eval(opt);
    if (cmd_sweep->parsed())
        return run_sweep_cmd(opt);
    if (cmd_selftest->parsed())
        return selftest();
    return kUsage;
}

} // namespace skybeam
