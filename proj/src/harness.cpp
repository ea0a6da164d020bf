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

#include "skybeam/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace skybeam {

namespace {

using nlohmann::json;

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

RunConfig apply_sweep_value(RunConfig cfg, const std::string &param, double value) {
    if (param == "xi")
        cfg.channel.csi_xi = value;
    else if (param == "l")
        cfg.scenario.cluster_spacing_m = value;
    else if (param == "K")
    {
        const int k = int(std::lround(value));
        if (std::abs(value - double(k)) > 1e-9 || k < 1)
            throw std::invalid_argument("sweep: K values must be positive integers");
        cfg.scenario.users_per_cluster = k;
    }
    else
        throw std::invalid_argument("sweep: unknown parameter '" + param + "'");
    cfg.validate();
    return cfg;
}

void append_series_rows(std::vector<ResultRow> &rows, const SeriesStats &series,
                        const std::string &method, const std::string &param,
                        double value, std::uint64_t seed) {
    for (std::size_t t = 0; t < series.mean_per_slot.size(); ++t)
    {
        ResultRow row;
        row.method = method;
        row.param = param;
        row.value = value;
        row.slot = int(t) + 1;
        row.mean_sumrate_bpshz = series.mean_per_slot[t];
        row.std_sumrate = series.std_per_slot[t];
        row.episodes = series.episodes;
        row.seed = seed;
        rows.push_back(std::move(row));
    }
}

} // namespace

std::vector<ResultRow> run_eval_point(const RunConfig &cfg, const ActorPair *nets,
                                      const std::string &param, double value) {
    const EvalResult res =
        evaluate(cfg, nets, cfg.hyper.eval_episodes, cfg.hyper.eval_mean_action);
    std::vector<ResultRow> rows;
    if (res.drl.has_value())
        append_series_rows(rows, *res.drl, "drl", param, value, cfg.master_seed);
    append_series_rows(rows, res.zf, "zf", param, value, cfg.master_seed);
    append_series_rows(rows, res.mrt, "mrt", param, value, cfg.master_seed);
    return rows;
}

std::vector<ResultRow> run_sweep(const RunConfig &cfg, const std::string &param,
                                 const std::vector<double> &values,
                                 const std::map<int, std::string> &k_checkpoints) {
    if (values.empty())
        throw std::invalid_argument("sweep: empty value list");

    std::vector<ResultRow> rows;
    if (param == "K" && !k_checkpoints.empty())
    {
        // Head sizes depend on K, so every point needs its own weights.
        std::string missing;
        for (double v : values)
        {
            const int k = int(std::lround(v));
            if (!k_checkpoints.count(k))
                missing += (missing.empty() ? "" : ", ") + std::to_string(k);
        }
        if (!missing.empty())
            throw MissingCheckpointError("sweep: no checkpoint for K = " + missing);
    }

    ActorPair shared_nets;
    const bool has_shared = param != "K" && !cfg.checkpoint.empty();
    if (has_shared)
        shared_nets = load_checkpoint(cfg.checkpoint).nets;

    for (double v : values)
    {
        RunConfig point = apply_sweep_value(cfg, param, v);
        const ActorPair *nets = nullptr;
        ActorPair point_nets;
        if (param == "K" && !k_checkpoints.empty())
        {
            point_nets = load_checkpoint(k_checkpoints.at(int(std::lround(v)))).nets;
            nets = &point_nets;
        }
        else if (has_shared)
        {
            nets = &shared_nets;
        }
        auto point_rows = run_eval_point(point, nets, param, v);
        rows.insert(rows.end(), point_rows.begin(), point_rows.end());
    }
    return rows;
}

void emit_results(std::vector<ResultRow> rows, const std::string &dir) {
    std::filesystem::create_directories(dir);
    std::sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
        if (a.method != b.method)
            return a.method < b.method;
        if (a.value != b.value)
            return a.value < b.value;
        return a.slot < b.slot;
    });

    const std::string csv_path = dir + "/results.csv";
    std::ofstream csv(csv_path);
    if (!csv)
        throw std::runtime_error("emit_results: cannot write '" + csv_path + "'");
    csv << "method,param,value,slot,mean_sumrate_bpshz,std_sumrate,episodes,seed\n";
    for (const ResultRow &r : rows)
        csv << r.method << ',' << r.param << ',' << fmt_double(r.value) << ',' << r.slot
            << ',' << fmt_double(r.mean_sumrate_bpshz) << ',' << fmt_double(r.std_sumrate)
            << ',' << r.episodes << ',' << r.seed << '\n';
    csv.close();

    // Per-series time averages plus the drl-vs-zf gap per sweep point.
    struct Key {
        std::string method;
        std::string param;
        double value;
        bool operator<(const Key &o) const {
            if (method != o.method)
                return method < o.method;
            if (param != o.param)
                return param < o.param;
            return value < o.value;
        }
    };
    std::map<Key, std::pair<double, int>> totals;
    std::map<Key, std::pair<int, std::uint64_t>> meta; // episodes, seed
    for (const ResultRow &r : rows)
    {
        Key k{r.method, r.param, r.value};
        totals[k].first += r.mean_sumrate_bpshz;
        totals[k].second += 1;
        meta[k] = {r.episodes, r.seed};
    }

    json series = json::array();
    std::map<std::pair<std::string, double>, std::map<std::string, double>> by_point;
    for (const auto &[k, acc] : totals)
    {
        const double avg = acc.first / double(acc.second);
        series.push_back({{"method", k.method},
                          {"param", k.param},
                          {"value", k.value},
                          {"episodes", meta[k].first},
                          {"seed", meta[k].second},
                          {"time_avg_sumrate_bpshz", avg}});
        by_point[{k.param, k.value}][k.method] = avg;
    }

    json gaps = json::array();
    for (const auto &[pv, methods] : by_point)
    {
        if (methods.count("drl") && methods.count("zf"))
            gaps.push_back({{"param", pv.first},
                            {"value", pv.second},
                            {"drl_minus_zf_bpshz", methods.at("drl") - methods.at("zf")}});
    }

    json summary = {{"series", series}, {"gaps", gaps}};
    const std::string json_path = dir + "/summary.json";
    std::ofstream js(json_path);
    if (!js)
        throw std::runtime_error("emit_results: cannot write '" + json_path + "'");
    js << summary.dump(2) << '\n';
}

void write_training_log(const std::vector<EpisodeLog> &log, const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_training_log: cannot write '" + path + "'");
    out << "episode,mean_reward,loss_hab,loss_haps,entropy_hab,entropy_haps\n";
    for (const EpisodeLog &e : log)
        out << e.episode << ',' << fmt_double(e.mean_reward) << ',' << fmt_double(e.loss_hab)
            << ',' << fmt_double(e.loss_haps) << ',' << fmt_double(e.entropy_hab) << ','
            << fmt_double(e.entropy_haps) << '\n';
}

} // namespace skybeam
