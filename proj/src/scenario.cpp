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

#include "skybeam/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skybeam {

namespace {

bool is_perfect_square(int n) {
    if (n < 1)
        return false;
    int r = int(std::lround(std::sqrt(double(n))));
    return r * r == n;
}

constexpr double kTwoPi = 2.0 * M_PI;

} // namespace

void ScenarioConfig::validate() const {
    if (num_habs < 1)
        throw std::invalid_argument("scenario: B must be >= 1");
    if (users_per_cluster < 1)
        throw std::invalid_argument("scenario: K must be >= 1");
    if (cluster_radius_m <= 0.0)
        throw std::invalid_argument("scenario: q must be > 0");
    if (cluster_spacing_m < 0.0)
        throw std::invalid_argument("scenario: l must be >= 0");
    if (hab_altitude_m <= 0.0 || haps_altitude_m <= 0.0)
        throw std::invalid_argument("scenario: altitudes must be > 0");
    if (user_speed_mps < 0.0)
        throw std::invalid_argument("scenario: v must be >= 0");
    if (slot_duration_s <= 0.0)
        throw std::invalid_argument("scenario: T_c must be > 0");
    if (slots_per_episode < 1)
        throw std::invalid_argument("scenario: T must be >= 1");
    if (!is_perfect_square(hab_antennas))
        throw std::invalid_argument("scenario: N_b must be a perfect square");
    if (!is_perfect_square(haps_antennas))
        throw std::invalid_argument("scenario: N_b0 must be a perfect square");
    if (hab_antennas < users_per_cluster)
        throw std::invalid_argument("scenario: N_b must be >= K");
}

std::vector<BsPose> build_layout(const ScenarioConfig &cfg) {
    cfg.validate();
    const int b = cfg.num_habs;
    const int cols = int(std::ceil(std::sqrt(double(b))));

    std::vector<BsPose> out;
    out.resize(std::size_t(b) + 1);

    double cx = 0.0, cy = 0.0;
    for (int i = 0; i < b; ++i)
    {
        const int row = i / cols;
        const int col = i % cols;
        const double x = double(col) * cfg.cluster_spacing_m;
        const double y = double(row) * cfg.cluster_spacing_m;
        out[std::size_t(i) + 1] = BsPose{i + 1, Vec3{x, y, cfg.hab_altitude_m}, cfg.hab_antennas};
        cx += x;
        cy += y;
    }
    cx /= double(b);
    cy /= double(b);
    out[0] = BsPose{0, Vec3{cx, cy, cfg.haps_altitude_m}, cfg.haps_antennas};
    return out;
}

std::vector<UserState> spawn_users(const ScenarioConfig &cfg,
                                   const std::vector<BsPose> &layout, Rng &rng) {
    std::vector<UserState> users;
    users.reserve(std::size_t(cfg.total_users()));
    for (int c = 0; c < cfg.num_habs; ++c)
    {
        const Vec3 &center = layout[std::size_t(c) + 1].position;
        for (int k = 0; k < cfg.users_per_cluster; ++k)
        {
            // Uniform on the disc: radius via sqrt of a uniform draw.
            const double r = cfg.cluster_radius_m * std::sqrt(rng.uniform());
            const double a = rng.uniform(0.0, kTwoPi);
            UserState u;
            u.user_id = c * cfg.users_per_cluster + k;
            u.cluster_id = c;
            u.x = center.x + r * std::cos(a);
            u.y = center.y + r * std::sin(a);
            u.heading_rad = rng.uniform(0.0, kTwoPi);
            users.push_back(u);
        }
    }
    return users;
}

UserState step_mobility(const UserState &user, const ScenarioConfig &cfg,
                        const BsPose &cluster_hab, Rng &rng) {
    const double d = cfg.max_step_m();
    const double q2 = cfg.cluster_radius_m * cfg.cluster_radius_m;
    const Vec3 &c = cluster_hab.position;

    UserState out = user;
    double heading = user.heading_rad;
    for (int attempt = 0; attempt < 64; ++attempt)
    {
        const double nx = user.x + d * std::cos(heading);
        const double ny = user.y + d * std::sin(heading);
        const double dx = nx - c.x;
        const double dy = ny - c.y;
        if (dx * dx + dy * dy <= q2)
        {
            out.x = nx;
            out.y = ny;
            out.heading_rad = heading;
            return out;
        }
        heading = rng.uniform(0.0, kTwoPi);
    }
    // Retry cap hit (degenerate geometry): stay put, keep the last heading.
    out.heading_rad = heading;
    return out;
}

Geometry geometry(const BsPose &bs, const UserState &user) {
    const double dx = user.x - bs.position.x;
    const double dy = user.y - bs.position.y;
    const double dz = bs.position.z; // user at ground level
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (d <= 0.0)
        throw std::domain_error("geometry: co-located station and user (d = 0)");
    Geometry g;
    g.distance_m = d;
    g.elevation_rad = std::asin(dz / d);
    g.azimuth_rad = std::atan2(dy, dx);
    return g;
}

ScenarioState::ScenarioState(const ScenarioConfig &cfg)
    : cfg_(cfg), stations_(build_layout(cfg)) {}

void ScenarioState::reset(Rng &mobility_rng) {
    users_ = spawn_users(cfg_, stations_, mobility_rng);
}

void ScenarioState::step(Rng &mobility_rng) {
    for (auto &u : users_)
        u = step_mobility(u, cfg_, stations_[std::size_t(u.cluster_id) + 1], mobility_rng);
}

} // namespace skybeam
