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

#include "skybeam/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace skybeam {

namespace {

using nlohmann::json;

template <typename T>
void read_into(const json &j, const char *key, T &out) {
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

double dbm_to_watts(double dbm) {
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

void Hyperparams::validate() const {
    if (gamma < 0.0 || gamma_prime < 0.0)
        throw std::invalid_argument("hyperparams: entropy coefficients must be >= 0");
    if (eta < 1 || eta_prime < 1)
        throw std::invalid_argument("hyperparams: eta and eta' must be >= 1");
    if (batch_size < 1)
        throw std::invalid_argument("hyperparams: batch size must be >= 1");
    if (buffer_capacity < std::size_t(batch_size))
        throw std::invalid_argument("hyperparams: buffer capacity must be >= batch size");
    if (episodes < 1)
        throw std::invalid_argument("hyperparams: episode count must be >= 1");
    if (learning_rate <= 0.0)
        throw std::invalid_argument("hyperparams: learning rate must be > 0");
    if (eval_episodes < 1)
        throw std::invalid_argument("hyperparams: eval episode count must be >= 1");
}

void RunConfig::validate() const {
    scenario.validate();
    channel.validate();
    radio.validate();
    hyper.validate();
    if (mode != "train" && mode != "eval" && mode != "sweep" && mode != "selftest")
        throw std::invalid_argument("config: unknown mode '" + mode + "'");
    if (output_dir.empty())
        throw std::invalid_argument("config: output_dir must be set");
}

RunConfig RunConfig::from_json(const json &j) {
    RunConfig c;
    if (j.contains("scenario"))
    {
        const json &s = j.at("scenario");
        read_into(s, "B", c.scenario.num_habs);
        read_into(s, "K", c.scenario.users_per_cluster);
        read_into(s, "q_m", c.scenario.cluster_radius_m);
        read_into(s, "l_m", c.scenario.cluster_spacing_m);
        read_into(s, "hab_alt_m", c.scenario.hab_altitude_m);
        read_into(s, "haps_alt_m", c.scenario.haps_altitude_m);
        read_into(s, "v_mps", c.scenario.user_speed_mps);
        read_into(s, "T_c_s", c.scenario.slot_duration_s);
        read_into(s, "T", c.scenario.slots_per_episode);
        read_into(s, "n_b", c.scenario.hab_antennas);
        read_into(s, "n_b0", c.scenario.haps_antennas);
    }
    if (j.contains("channel"))
    {
        const json &ch = j.at("channel");
        read_into(ch, "f_c_hz", c.channel.carrier_hz);
        read_into(ch, "c_mps", c.channel.light_speed_mps);
        read_into(ch, "rician_X", c.channel.rician_x);
        read_into(ch, "shadow_var_db_hab", c.channel.shadow_var_db_hab);
        read_into(ch, "shadow_var_db_haps", c.channel.shadow_var_db_haps);
        read_into(ch, "xi", c.channel.csi_xi);
        read_into(ch, "freeze_shadowing", c.channel.freeze_shadowing);
        if (ch.contains("noise_dbm"))
            c.channel.noise_w = dbm_to_watts(ch.at("noise_dbm").get<double>());
        read_into(ch, "noise_w", c.channel.noise_w);
        if (ch.contains("rho") && ch.at("rho").is_string())
        {
            if (ch.at("rho").get<std::string>() != "auto")
                throw std::invalid_argument("config: rho must be a number or \"auto\"");
            c.channel.doppler_rho =
                jakes_rho(c.scenario.user_speed_mps, c.channel.carrier_hz,
                          c.channel.light_speed_mps, c.scenario.slot_duration_s);
        }
        else if (ch.contains("rho"))
        {
            c.channel.doppler_rho = ch.at("rho").get<double>();
        }
        else
        {
            c.channel.doppler_rho =
                jakes_rho(c.scenario.user_speed_mps, c.channel.carrier_hz,
                          c.channel.light_speed_mps, c.scenario.slot_duration_s);
        }
    }
    else
    {
        c.channel.doppler_rho =
            jakes_rho(c.scenario.user_speed_mps, c.channel.carrier_hz,
                      c.channel.light_speed_mps, c.scenario.slot_duration_s);
    }
    if (j.contains("radio"))
    {
        const json &r = j.at("radio");
        read_into(r, "p_max_hab_w", c.radio.p_max_hab_w);
        read_into(r, "p_max_haps_w", c.radio.p_max_haps_w);
        if (r.contains("haps_power_mode"))
        {
            const std::string m = r.at("haps_power_mode").get<std::string>();
            if (m == "per_beam")
                c.radio.haps_per_beam = true;
            else if (m == "total")
                c.radio.haps_per_beam = false;
            else
                throw std::invalid_argument("config: haps_power_mode must be per_beam or total");
        }
    }
    if (j.contains("hyperparams"))
    {
        const json &h = j.at("hyperparams");
        read_into(h, "gamma", c.hyper.gamma);
        read_into(h, "gamma_prime", c.hyper.gamma_prime);
        read_into(h, "eta", c.hyper.eta);
        read_into(h, "eta_prime", c.hyper.eta_prime);
        read_into(h, "batch_size", c.hyper.batch_size);
        read_into(h, "buffer_capacity", c.hyper.buffer_capacity);
        read_into(h, "episodes", c.hyper.episodes);
        read_into(h, "learning_rate", c.hyper.learning_rate);
        read_into(h, "eval_episodes", c.hyper.eval_episodes);
        read_into(h, "reward_baseline", c.hyper.reward_baseline);
        read_into(h, "eval_mean_action", c.hyper.eval_mean_action);
    }
    read_into(j, "mode", c.mode);
    read_into(j, "master_seed", c.master_seed);
    read_into(j, "output_dir", c.output_dir);
    read_into(j, "checkpoint", c.checkpoint);
    c.validate();
    return c;
}

json RunConfig::to_json() const {
    json j;
    j["scenario"] = {
        {"B", scenario.num_habs},
        {"K", scenario.users_per_cluster},
        {"q_m", scenario.cluster_radius_m},
        {"l_m", scenario.cluster_spacing_m},
        {"hab_alt_m", scenario.hab_altitude_m},
        {"haps_alt_m", scenario.haps_altitude_m},
        {"v_mps", scenario.user_speed_mps},
        {"T_c_s", scenario.slot_duration_s},
        {"T", scenario.slots_per_episode},
        {"n_b", scenario.hab_antennas},
        {"n_b0", scenario.haps_antennas},
    };
    j["channel"] = {
        {"f_c_hz", channel.carrier_hz},
        {"c_mps", channel.light_speed_mps},
        {"rician_X", channel.rician_x},
        {"rho", channel.doppler_rho},
        {"shadow_var_db_hab", channel.shadow_var_db_hab},
        {"shadow_var_db_haps", channel.shadow_var_db_haps},
        {"xi", channel.csi_xi},
        {"noise_w", channel.noise_w},
        {"freeze_shadowing", channel.freeze_shadowing},
    };
    j["radio"] = {
        {"p_max_hab_w", radio.p_max_hab_w},
        {"p_max_haps_w", radio.p_max_haps_w},
        {"haps_power_mode", radio.haps_per_beam ? "per_beam" : "total"},
    };
    j["hyperparams"] = {
        {"gamma", hyper.gamma},
        {"gamma_prime", hyper.gamma_prime},
        {"eta", hyper.eta},
        {"eta_prime", hyper.eta_prime},
        {"batch_size", hyper.batch_size},
        {"buffer_capacity", hyper.buffer_capacity},
        {"episodes", hyper.episodes},
        {"learning_rate", hyper.learning_rate},
        {"eval_episodes", hyper.eval_episodes},
        {"reward_baseline", hyper.reward_baseline},
        {"eval_mean_action", hyper.eval_mean_action},
    };
    j["mode"] = mode;
    j["master_seed"] = master_seed;
    j["output_dir"] = output_dir;
    j["checkpoint"] = checkpoint;
    return j;
}

RunConfig RunConfig::load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("config: cannot read '" + path + "'");
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error &e)
    {
        throw std::runtime_error("config: parse error in '" + path + "': " + e.what());
    }
    return from_json(j);
}

void RunConfig::save_file(const std::string &path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("config: cannot write '" + path + "'");
    out << canonical_text();
}

std::string RunConfig::canonical_text() const {
    return to_json().dump(2) + "\n";
}

std::uint64_t RunConfig::hash() const {
    return fnv1a64(canonical_text());
}

} // namespace skybeam
