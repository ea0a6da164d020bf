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

#include "skybeam/radio.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skybeam {

namespace {

constexpr double kPowerTol = 1e-9;
constexpr double kMaxCondition = 1e12;

double beam_gain(const arma::cx_rowvec &h, const arma::cx_mat &w, arma::uword col) {
    if (h.n_elem != w.n_rows)
        throw std::invalid_argument("sinr: channel/beam dimension mismatch");
    const std::complex<double> s = arma::as_scalar(h * w.col(col));
    return std::norm(s);
}

} // namespace

void RadioParams::validate() const {
    if (p_max_hab_w <= 0.0 || p_max_haps_w <= 0.0)
        throw std::invalid_argument("radio: power budgets must be > 0");
}

bool BeamformingMatrix::feasible(double tol) const {
    if (constraint == PowerConstraint::kTotalPower)
        return total_power() <= p_max_w + tol;
    for (arma::uword j = 0; j < w.n_cols; ++j)
        if (column_power(j) > p_max_w + tol)
            return false;
    return true;
}

double sinr_hab(int user, const ChannelGrid &channels,
                const std::vector<BeamformingMatrix> &hab_beams,
                const ScenarioConfig &cfg, double noise_w) {
    const int k = cfg.users_per_cluster;
    const int own_cluster = user / k;
    const int own_station = own_cluster + 1;
    const int own_col = user % k;

    const double signal =
        beam_gain(channels.at(own_station, user).h, hab_beams[std::size_t(own_cluster)].w,
                  arma::uword(own_col));

    double interference = 0.0;
    for (int c = 0; c < cfg.num_habs; ++c)
    {
        const arma::cx_rowvec &h = channels.at(c + 1, user).h;
        const arma::cx_mat &w = hab_beams[std::size_t(c)].w;
        for (arma::uword j = 0; j < w.n_cols; ++j)
        {
            const int target = c * k + int(j);
            if (target == user)
                continue;
            interference += beam_gain(h, w, j);
        }
    }
    return signal / (interference + noise_w);
}

double sinr_haps(int user, const ChannelGrid &channels,
                 const BeamformingMatrix &haps_beam, double noise_w) {
    const arma::cx_rowvec &h = channels.at(0, user).h;
    const double signal = beam_gain(h, haps_beam.w, arma::uword(user));
    double interference = 0.0;
    for (arma::uword j = 0; j < haps_beam.w.n_cols; ++j)
    {
        if (int(j) == user)
            continue;
        interference += beam_gain(h, haps_beam.w, j);
    }
    return signal / (interference + noise_w);
}

double user_rate(int user, const ChannelGrid &channels,
                 const std::vector<BeamformingMatrix> &hab_beams,
                 const BeamformingMatrix &haps_beam, const ScenarioConfig &cfg,
                 double noise_w) {
    const double s1 = sinr_hab(user, channels, hab_beams, cfg, noise_w);
    const double s2 = sinr_haps(user, channels, haps_beam, noise_w);
    return std::log2(1.0 + s1) + std::log2(1.0 + s2);
}

RateReport compute_rates(const ChannelGrid &channels,
                         const std::vector<BeamformingMatrix> &hab_beams,
                         const BeamformingMatrix &haps_beam,
                         const ScenarioConfig &cfg, double noise_w) {
    const int u_total = cfg.total_users();
    RateReport rep;
    rep.sinr_hab.resize(std::size_t(u_total));
    rep.sinr_haps.resize(std::size_t(u_total));
    rep.rate.resize(std::size_t(u_total));
    for (int u = 0; u < u_total; ++u)
    {
        const double s1 = sinr_hab(u, channels, hab_beams, cfg, noise_w);
        const double s2 = sinr_haps(u, channels, haps_beam, noise_w);
        rep.sinr_hab[std::size_t(u)] = s1;
        rep.sinr_haps[std::size_t(u)] = s2;
        rep.rate[std::size_t(u)] = std::log2(1.0 + s1) + std::log2(1.0 + s2);
        rep.sum_rate += rep.rate[std::size_t(u)];
    }
    rep.mean_reward = rep.sum_rate / double(u_total);
    return rep;
}

double reward(const RateReport &report) {
    return report.mean_reward;
}

BeamformingMatrix project_power(const BeamformingMatrix &beams) {
    if (!beams.w.is_finite())
        throw std::domain_error("project_power: non-finite beam entries");

    BeamformingMatrix out = beams;
    if (beams.constraint == PowerConstraint::kTotalPower)
    {
        const double total = beams.total_power();
        if (total > beams.p_max_w + kPowerTol)
            out.w *= std::sqrt(beams.p_max_w / total);
        return out;
    }
    for (arma::uword j = 0; j < out.w.n_cols; ++j)
    {
        const double pj = out.column_power(j);
        if (pj > out.p_max_w + kPowerTol)
            out.w.col(j) *= std::sqrt(out.p_max_w / pj);
    }
    return out;
}

namespace {

double per_beam_power(double p_max_w, arma::uword n_cols, PowerConstraint constraint) {
    return constraint == PowerConstraint::kPerBeam ? p_max_w
                                                   : p_max_w / double(n_cols);
}

} // namespace

BeamformingMatrix mrt_precoder(const arma::cx_mat &rows, int bs_id, double p_max_w,
                               PowerConstraint constraint) {
    const arma::uword served = rows.n_rows;
    const double p_u = per_beam_power(p_max_w, served, constraint);

    BeamformingMatrix out;
    out.bs_id = bs_id;
    out.p_max_w = p_max_w;
    out.constraint = constraint;
    out.w.set_size(rows.n_cols, served);
    for (arma::uword u = 0; u < served; ++u)
    {
        const double nrm = arma::norm(rows.row(u), 2);
        if (nrm <= 0.0)
            throw std::domain_error("mrt_precoder: zero channel row for user " + std::to_string(u));
        out.w.col(u) = std::sqrt(p_u) * rows.row(u).t() / nrm;
    }
    return out;
}

BeamformingMatrix zf_precoder(const arma::cx_mat &rows, int bs_id, double p_max_w,
                              PowerConstraint constraint) {
    const arma::uword served = rows.n_rows;
    if (served > rows.n_cols)
        throw std::invalid_argument("zf_precoder: more users than antennas at BS " +
                                    std::to_string(bs_id));
    const double cond = arma::cond(rows);
    if (!std::isfinite(cond) || cond > kMaxCondition)
        throw std::domain_error("zf_precoder: ill-conditioned channel matrix at BS " +
                                std::to_string(bs_id));

    // Right pseudo-inverse H^H (H H^H)^-1; column u is nulled at every other
    // user's row.
    const arma::cx_mat gram = rows * rows.t();
    const arma::cx_mat directions = rows.t() * arma::inv(gram);

    const double p_u = per_beam_power(p_max_w, served, constraint);
    BeamformingMatrix out;
    out.bs_id = bs_id;
    out.p_max_w = p_max_w;
    out.constraint = constraint;
    out.w.set_size(rows.n_cols, served);
    for (arma::uword u = 0; u < served; ++u)
    {
        const double nrm = arma::norm(directions.col(u), 2);
        out.w.col(u) = std::sqrt(p_u) * directions.col(u) / nrm;
    }
    return out;
}

} // namespace skybeam
