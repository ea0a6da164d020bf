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

#ifndef SKYBEAM_CHANNEL_HPP
#define SKYBEAM_CHANNEL_HPP

#include <armadillo>
#include <vector>

#include "skybeam/rng.hpp"
#include "skybeam/scenario.hpp"

namespace skybeam {

struct ChannelParams {
    double carrier_hz = 2.0e9;     // f_c
    double light_speed_mps = 3.0e8;
    double rician_x = 10.0;        // X, linear
    double doppler_rho = 1.0;      // AR(1) correlation, in [0, 1]
    double shadow_var_db_hab = 3.0;  // sigma_psi^2, dB^2, HAB layer
    double shadow_var_db_haps = 3.0; // HAPS layer
    double csi_xi = 1.0;           // estimation reliability, in [0, 1]
    double noise_w = 1e-13;        // sigma^2, watts
    bool freeze_shadowing = false; // test hook: psi = 0

    double wavelength_m() const { return light_speed_mps / carrier_hz; }
    // Antenna spacing d_x = d_y = lambda/2 throughout.

    void validate() const;
};

/// Doppler correlation for a user at speed v: J0(2*pi*f_d*T_c) with
/// f_d = v*f_c/c.
double jakes_rho(double speed_mps, double carrier_hz, double light_speed_mps,
                 double slot_duration_s);

/// Free-space gain at distance d in dB, shadowing excluded:
/// 20*log10(c / (4*pi*f_c*d)).
double large_scale_gain_db(double distance_m, const ChannelParams &p);

/// Linear large-scale gain including log-normal shadowing with the given
/// variance (dB^2). Throws on d <= 0.
double large_scale_gain(double distance_m, double shadow_var_db,
                        const ChannelParams &p, Rng &shadow_rng);

/// UPA response a(theta,phi) kron b(theta,phi) for a sqrt(N) x sqrt(N) array
/// with half-wavelength spacing. Throws if n_antennas is not a perfect square.
arma::cx_rowvec steering_vector(double elevation_rad, double azimuth_rad,
                                int n_antennas, const ChannelParams &p);

/// AR(1) update: rho*prev + sqrt(1 - rho^2)*z with z ~ CN(0, I).
arma::cx_rowvec advance_nlos(const arma::cx_rowvec &prev, double rho, Rng &rng);

/// Rician mixture sqrt(X/(1+X))*los + sqrt(1/(1+X))*nlos.
/// Throws on length mismatch.
arma::cx_rowvec compose_small_scale(const arma::cx_rowvec &los,
                                    const arma::cx_rowvec &nlos, double x);

/// Imperfect-CSI view xi*h + sqrt(1 - xi^2)*e with e ~ CN(0, I). At xi = 1
/// the input is returned bit-identically (the error draw is still consumed,
/// keeping streams aligned across xi values).
arma::cx_rowvec corrupt_csi(const arma::cx_rowvec &h, double xi, Rng &rng);

/// Per (station, user) channel state for one slot.
struct ChannelRealization {
    arma::cx_rowvec h;       // true channel, small-scale * sqrt(L)
    arma::cx_rowvec nlos;    // persistent AR(1) memory
    arma::cx_rowvec los;     // unit-modulus steering component
    double large_scale = 0.0; // L, linear
    arma::cx_rowvec h_tilde; // imperfect view fed to agents
};

/// Updates one (station, user) pair for the current slot. `initial` draws the
/// NLoS memory fresh from CN(0, I) instead of advancing it.
void realize_channel(const BsPose &bs, const UserState &user,
                     ChannelRealization &state, const ChannelParams &p,
                     bool initial, Rng &shadow_rng, Rng &nlos_rng, Rng &csi_rng);

/// All (B+1) x U realizations for the current slot, updated in station-major
/// order so draw streams are reproducible.
class ChannelGrid {
  public:
    ChannelGrid(int num_stations, int num_users);

    ChannelRealization &at(int station, int user);
    const ChannelRealization &at(int station, int user) const;
    int stations() const { return num_stations_; }
    int users() const { return num_users_; }

    /// Marks the grid so the next realize_slot draws fresh NLoS memory.
    void reset();

    void realize_slot(const ScenarioState &scen, const ChannelParams &p,
                      Rng &shadow_rng, Rng &nlos_rng, Rng &csi_rng);

    /// FNV hash over the true-channel bytes of the last realized slot.
    std::uint64_t true_channel_hash() const;

  private:
    int num_stations_;
    int num_users_;
    bool initial_ = true;
    std::vector<ChannelRealization> cells_;
};

} // namespace skybeam

#endif
