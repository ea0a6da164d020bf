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

#include "skybeam/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace skybeam {

void ChannelParams::validate() const {
    if (carrier_hz <= 0.0)
        throw std::invalid_argument("channel: f_c must be > 0");
    if (light_speed_mps <= 0.0)
        throw std::invalid_argument("channel: c must be > 0");
    if (rician_x < 0.0)
        throw std::invalid_argument("channel: Rician X must be >= 0");
    if (doppler_rho < 0.0 || doppler_rho > 1.0)
        throw std::invalid_argument("channel: rho must be in [0, 1]");
    if (csi_xi < 0.0 || csi_xi > 1.0)
        throw std::invalid_argument("channel: xi must be in [0, 1]");
    if (shadow_var_db_hab < 0.0 || shadow_var_db_haps < 0.0)
        throw std::invalid_argument("channel: shadowing variance must be >= 0");
    if (noise_w <= 0.0)
        throw std::invalid_argument("channel: noise power must be > 0");
}

double jakes_rho(double speed_mps, double carrier_hz, double light_speed_mps,
                 double slot_duration_s) {
    const double fd = speed_mps * carrier_hz / light_speed_mps;
    return std::cyl_bessel_j(0.0, 2.0 * M_PI * fd * slot_duration_s);
}

double large_scale_gain_db(double distance_m, const ChannelParams &p) {
    if (distance_m <= 0.0)
        throw std::domain_error("large_scale_gain: d must be > 0");
    return 20.0 * std::log10(p.light_speed_mps /
                             (4.0 * M_PI * p.carrier_hz * distance_m));
}

double large_scale_gain(double distance_m, double shadow_var_db,
                        const ChannelParams &p, Rng &shadow_rng) {
    double l_db = large_scale_gain_db(distance_m, p);
    if (!p.freeze_shadowing && shadow_var_db > 0.0)
        l_db -= std::sqrt(shadow_var_db) * shadow_rng.normal();
    return std::pow(10.0, l_db / 10.0);
}

arma::cx_rowvec steering_vector(double elevation_rad, double azimuth_rad,
                                int n_antennas, const ChannelParams &) {
    const int side = int(std::lround(std::sqrt(double(n_antennas))));
    if (side * side != n_antennas || n_antennas < 1)
        throw std::invalid_argument("steering_vector: antenna count must be a perfect square");

    // d_x = d_y = lambda/2 cancels lambda: phase steps are cos(theta)/2 times
    // sin(phi) (horizontal) and cos(phi) (vertical). cos(pi/2) rounds to
    // ~6e-17 in double; snap it so the nadir response is the exact all-ones
    // vector.
    double ct = std::cos(elevation_rad);
    if (std::abs(ct) < 1e-15)
        ct = 0.0;
    const double dh = 0.5 * ct * std::sin(azimuth_rad);
    const double dv = 0.5 * ct * std::cos(azimuth_rad);

    arma::cx_rowvec out;
    out.set_size(arma::uword(n_antennas));
    for (int m = 0; m < side; ++m)
    {
        const std::complex<double> am = std::polar(1.0, 2.0 * M_PI * double(m) * dh);
        for (int n = 0; n < side; ++n)
        {
            const std::complex<double> bn = std::polar(1.0, 2.0 * M_PI * double(n) * dv);
            out(arma::uword(m * side + n)) = am * bn;
        }
    }
    return out;
}

arma::cx_rowvec advance_nlos(const arma::cx_rowvec &prev, double rho, Rng &rng) {
    const double mix = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    arma::cx_rowvec out(prev.n_elem);
    for (arma::uword i = 0; i < prev.n_elem; ++i)
        out(i) = rho * prev(i) + mix * rng.cnormal();
    return out;
}

arma::cx_rowvec compose_small_scale(const arma::cx_rowvec &los,
                                    const arma::cx_rowvec &nlos, double x) {
    if (los.n_elem != nlos.n_elem)
        throw std::invalid_argument("compose_small_scale: length mismatch");
    const double w_los = std::sqrt(x / (1.0 + x));
    const double w_nlos = std::sqrt(1.0 / (1.0 + x));
    return w_los * los + w_nlos * nlos;
}

arma::cx_rowvec corrupt_csi(const arma::cx_rowvec &h, double xi, Rng &rng) {
    arma::cx_rowvec e(h.n_elem);
    for (arma::uword i = 0; i < h.n_elem; ++i)
        e(i) = rng.cnormal();
    if (xi >= 1.0)
        return h;
    return xi * h + std::sqrt(1.0 - xi * xi) * e;
}

void realize_channel(const BsPose &bs, const UserState &user,
                     ChannelRealization &state, const ChannelParams &p,
                     bool initial, Rng &shadow_rng, Rng &nlos_rng, Rng &csi_rng) {
    const Geometry g = geometry(bs, user);
    const double var_db = (bs.bs_id == 0) ? p.shadow_var_db_haps : p.shadow_var_db_hab;
    state.large_scale = large_scale_gain(g.distance_m, var_db, p, shadow_rng);
    state.los = steering_vector(g.elevation_rad, g.azimuth_rad, bs.antenna_count, p);

    if (initial)
    {
        state.nlos.set_size(arma::uword(bs.antenna_count));
        for (arma::uword i = 0; i < state.nlos.n_elem; ++i)
            state.nlos(i) = nlos_rng.cnormal();
    }
    else
    {
        state.nlos = advance_nlos(state.nlos, p.doppler_rho, nlos_rng);
    }

    const arma::cx_rowvec hhat = compose_small_scale(state.los, state.nlos, p.rician_x);
    state.h = std::sqrt(state.large_scale) * hhat;
    state.h_tilde = corrupt_csi(state.h, p.csi_xi, csi_rng);
}

ChannelGrid::ChannelGrid(int num_stations, int num_users)
    : num_stations_(num_stations), num_users_(num_users),
      cells_(std::size_t(num_stations) * std::size_t(num_users)) {}

ChannelRealization &ChannelGrid::at(int station, int user) {
    return cells_[std::size_t(station) * std::size_t(num_users_) + std::size_t(user)];
}

const ChannelRealization &ChannelGrid::at(int station, int user) const {
    return cells_[std::size_t(station) * std::size_t(num_users_) + std::size_t(user)];
}

void ChannelGrid::reset() {
    initial_ = true;
}

void ChannelGrid::realize_slot(const ScenarioState &scen, const ChannelParams &p,
                               Rng &shadow_rng, Rng &nlos_rng, Rng &csi_rng) {
    const auto &stations = scen.stations();
    const auto &users = scen.users();
    for (int b = 0; b < num_stations_; ++b)
        for (int u = 0; u < num_users_; ++u)
            realize_channel(stations[std::size_t(b)], users[std::size_t(u)], at(b, u), p,
                            initial_, shadow_rng, nlos_rng, csi_rng);
    initial_ = false;
}

std::uint64_t ChannelGrid::true_channel_hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto &cell : cells_)
        h = fnv1a64_bytes(cell.h.memptr(), cell.h.n_elem * sizeof(std::complex<double>), h);
    return h;
}

} // namespace skybeam
