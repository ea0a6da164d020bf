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

#ifndef SKYBEAM_RADIO_HPP
#define SKYBEAM_RADIO_HPP

#include <armadillo>
#include <vector>

#include "skybeam/channel.hpp"
#include "skybeam/scenario.hpp"

namespace skybeam {

/// How a station's power budget binds: HABs cap the sum over columns, the
/// HAPS caps each column (switchable to a sum cap via config).
enum class PowerConstraint {
    kTotalPower,
    kPerBeam,
};

struct RadioParams {
    double p_max_hab_w = 40.0;
    double p_max_haps_w = 100.0;
    bool haps_per_beam = true; // per-beam cap (default) vs total power

    PowerConstraint haps_constraint() const {
        return haps_per_beam ? PowerConstraint::kPerBeam : PowerConstraint::kTotalPower;
    }
    void validate() const;
};

/// Complex precoding matrix of one station; column j is the beam toward the
/// j-th served user.
struct BeamformingMatrix {
    int bs_id = 0;
    arma::cx_mat w; // antennas x served users
    double p_max_w = 0.0;
    PowerConstraint constraint = PowerConstraint::kTotalPower;

    double total_power() const { return arma::accu(arma::square(arma::abs(w))); }
    double column_power(arma::uword j) const {
        return arma::accu(arma::square(arma::abs(w.col(j))));
    }
    bool feasible(double tol = 1e-9) const;
};

struct RateReport {
    std::vector<double> sinr_hab;  // per user, linear
    std::vector<double> sinr_haps; // per user, linear
    std::vector<double> rate;      // per user, bps/Hz, both layers
    double sum_rate = 0.0;
    double mean_reward = 0.0; // sum_rate / U
};

/// SINR of user u on the HAB layer: own-cluster beam over every other HAB
/// beam in the network plus noise. `hab_beams[c]` is the beam matrix of the
/// HAB serving cluster c (station c+1).
double sinr_hab(int user, const ChannelGrid &channels,
                const std::vector<BeamformingMatrix> &hab_beams,
                const ScenarioConfig &cfg, double noise_w);

/// SINR of user u on the HAPS layer: interference only from HAPS beams
/// toward other users.
double sinr_haps(int user, const ChannelGrid &channels,
                 const BeamformingMatrix &haps_beam, double noise_w);

double user_rate(int user, const ChannelGrid &channels,
                 const std::vector<BeamformingMatrix> &hab_beams,
                 const BeamformingMatrix &haps_beam, const ScenarioConfig &cfg,
                 double noise_w);

RateReport compute_rates(const ChannelGrid &channels,
                         const std::vector<BeamformingMatrix> &hab_beams,
                         const BeamformingMatrix &haps_beam,
                         const ScenarioConfig &cfg, double noise_w);

/// Mean of the per-user rates (the shared reward).
double reward(const RateReport &report);

/// Scales beams down onto the power constraint; a no-op on feasible input.
/// Throws on non-finite entries.
BeamformingMatrix project_power(const BeamformingMatrix &beams);

/// Matched-filter beams: column u proportional to h_u^H, each scaled to its
/// power share (equal split under a total-power cap, full budget per beam
/// under a per-beam cap). `rows` holds one served user's channel per row.
BeamformingMatrix mrt_precoder(const arma::cx_mat &rows, int bs_id, double p_max_w,
                               PowerConstraint constraint);

/// Pseudo-inverse beams H^H (H H^H)^-1, columns normalized then scaled with
/// the same power policy as MRT. Throws when the stacked channel matrix is
/// ill-conditioned (condition number > 1e12) or has more rows than columns.
BeamformingMatrix zf_precoder(const arma::cx_mat &rows, int bs_id, double p_max_w,
                              PowerConstraint constraint);

} // namespace skybeam

#endif
