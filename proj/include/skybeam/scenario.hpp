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

#ifndef SKYBEAM_SCENARIO_HPP
#define SKYBEAM_SCENARIO_HPP

#include <vector>

#include "skybeam/rng.hpp"

namespace skybeam {

/// Network geometry and mobility parameters. Station index 0 is the HAPS,
/// indices 1..B are the HABs, one per ground cluster.
struct ScenarioConfig {
    int num_habs = 4;               // B
    int users_per_cluster = 4;      // K
    double cluster_radius_m = 2000.0;  // q
    double cluster_spacing_m = 6000.0; // l, center-to-center
    double hab_altitude_m = 2000.0;
    double haps_altitude_m = 20000.0;
    double user_speed_mps = 1.0;    // v
    double slot_duration_s = 0.02;  // T_c
    int slots_per_episode = 50;     // T
    int hab_antennas = 36;          // N_b, perfect square
    int haps_antennas = 64;         // N_b0, perfect square

    int total_users() const { return num_habs * users_per_cluster; }
    double max_step_m() const { return user_speed_mps * slot_duration_s; } // D_max
    bool clusters_overlap() const { return cluster_spacing_m < 2.0 * cluster_radius_m; }

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct BsPose {
    int bs_id = 0; // 0 = HAPS, 1..B = HABs
    Vec3 position;
    int antenna_count = 0;
};

struct UserState {
    int user_id = 0;
    int cluster_id = 0;     // 0..B-1; served by station 1 + cluster_id
    double x = 0.0, y = 0.0; // ground level
    double heading_rad = 0.0; // in [0, 2*pi)
};

struct Geometry {
    double distance_m = 0.0;
    double elevation_rad = 0.0; // from horizontal, pi/2 at nadir
    double azimuth_rad = 0.0;
};

/// Cluster centers on a ceil(sqrt(B)) x ceil(sqrt(B)) grid with spacing l,
/// one HAB per center, HAPS at the centroid of the used centers.
/// Returned vector: [0] = HAPS, [1..B] = HABs.
std::vector<BsPose> build_layout(const ScenarioConfig &cfg);

/// K users per cluster, uniform on each cluster disc, headings uniform on
/// [0, 2*pi). User ids are cluster-major: user u belongs to cluster u / K.
std::vector<UserState> spawn_users(const ScenarioConfig &cfg,
                                   const std::vector<BsPose> &layout, Rng &rng);

/// One mobility step. If the move would exit the cluster disc the heading is
/// resampled (up to 64 tries, then the user stays put for this slot).
UserState step_mobility(const UserState &user, const ScenarioConfig &cfg,
                        const BsPose &cluster_hab, Rng &rng);

/// Distance and angles from the station toward the user. Throws on zero
/// distance.
Geometry geometry(const BsPose &bs, const UserState &user);

/// Layout plus per-slot user state for one episode.
class ScenarioState {
  public:
    explicit ScenarioState(const ScenarioConfig &cfg);

    const ScenarioConfig &config() const { return cfg_; }
    const std::vector<BsPose> &stations() const { return stations_; }
    const std::vector<UserState> &users() const { return users_; }
    const BsPose &hab_of(const UserState &u) const { return stations_[1 + u.cluster_id]; }

    /// Respawn users and headings (episode reset).
    void reset(Rng &mobility_rng);

    /// Advance every user one slot.
    void step(Rng &mobility_rng);

  private:
    ScenarioConfig cfg_;
    std::vector<BsPose> stations_;
    std::vector<UserState> users_;
};

} // namespace skybeam

#endif
