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

#include <doctest.h>

#include <cmath>

#include "skybeam/scenario.hpp"

using namespace skybeam;

namespace {

ScenarioConfig table_cfg() {
    return ScenarioConfig{}; // defaults are the reference simulation values
}

} // namespace

TEST_CASE("layout: four clusters on a 2x2 grid with the HAPS at the centroid") {
    ScenarioConfig cfg = table_cfg();
    const auto layout = build_layout(cfg);
    REQUIRE(layout.size() == 5);

    CHECK(layout[1].position.x == 0.0);
    CHECK(layout[1].position.y == 0.0);
    CHECK(layout[2].position.x == 6000.0);
    CHECK(layout[2].position.y == 0.0);
    CHECK(layout[3].position.x == 0.0);
    CHECK(layout[3].position.y == 6000.0);
    CHECK(layout[4].position.x == 6000.0);
    CHECK(layout[4].position.y == 6000.0);
    for (int b = 1; b <= 4; ++b)
    {
        CHECK(layout[std::size_t(b)].position.z == 2000.0);
        CHECK(layout[std::size_t(b)].antenna_count == 36);
    }

    CHECK(layout[0].bs_id == 0);
    CHECK(layout[0].position.x == 3000.0);
    CHECK(layout[0].position.y == 3000.0);
    CHECK(layout[0].position.z == 20000.0);
    CHECK(layout[0].antenna_count == 64);
}

TEST_CASE("layout: degenerate single cluster") {
    ScenarioConfig cfg = table_cfg();
    cfg.num_habs = 1;
    const auto layout = build_layout(cfg);
    REQUIRE(layout.size() == 2);
    CHECK(layout[1].position.x == 0.0);
    CHECK(layout[1].position.y == 0.0);
    CHECK(layout[0].position.x == 0.0);
    CHECK(layout[0].position.y == 0.0);
}

TEST_CASE("layout: l = q raises the overlap flag but still builds") {
    ScenarioConfig cfg = table_cfg();
    cfg.cluster_spacing_m = 2000.0;
    CHECK(cfg.clusters_overlap());
    const auto layout = build_layout(cfg);
    CHECK(layout[2].position.x == 2000.0);

    cfg.cluster_spacing_m = 6000.0;
    CHECK_FALSE(cfg.clusters_overlap());
}

TEST_CASE("layout is deterministic") {
    ScenarioConfig cfg = table_cfg();
    const auto a = build_layout(cfg);
    const auto b = build_layout(cfg);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].position.x == b[i].position.x);
        CHECK(a[i].position.y == b[i].position.y);
    }
}

TEST_CASE("spawn: K users per cluster, inside their discs, seeded") {
    ScenarioConfig cfg = table_cfg();
    const auto layout = build_layout(cfg);
    Rng rng(3, "mobility");
    const auto users = spawn_users(cfg, layout, rng);
    REQUIRE(users.size() == 16);
    for (const auto &u : users)
    {
        CHECK(u.cluster_id == u.user_id / cfg.users_per_cluster);
        const auto &c = layout[std::size_t(u.cluster_id) + 1].position;
        const double d = std::hypot(u.x - c.x, u.y - c.y);
        CHECK(d <= cfg.cluster_radius_m);
        CHECK(u.heading_rad >= 0.0);
        CHECK(u.heading_rad < 2.0 * M_PI);
    }

    Rng rng2(3, "mobility");
    const auto users2 = spawn_users(cfg, layout, rng2);
    for (std::size_t i = 0; i < users.size(); ++i)
    {
        CHECK(users[i].x == users2[i].x);
        CHECK(users[i].y == users2[i].y);
        CHECK(users[i].heading_rad == users2[i].heading_rad);
    }
}

TEST_CASE("spawn: mean distance from center matches the uniform-disc value") {
    // For a uniform draw on a disc of radius q the mean radius is 2q/3.
    ScenarioConfig cfg = table_cfg();
    cfg.num_habs = 1;
    cfg.users_per_cluster = 1;
    const auto layout = build_layout(cfg);
    Rng rng(11, "mobility");
    const int n = 100000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto users = spawn_users(cfg, layout, rng);
        acc += std::hypot(users[0].x, users[0].y);
    }
    CHECK(acc / n == doctest::Approx(2.0 * cfg.cluster_radius_m / 3.0).epsilon(0.01));
}

TEST_CASE("mobility: one slot moves D_max along the heading") {
    ScenarioConfig cfg = table_cfg();
    const auto layout = build_layout(cfg);
    Rng rng(5, "mobility");

    UserState u;
    u.cluster_id = 0;
    u.x = layout[1].position.x;
    u.y = layout[1].position.y;
    u.heading_rad = M_PI / 2;
    const UserState moved = step_mobility(u, cfg, layout[1], rng);
    CHECK(moved.x == doctest::Approx(u.x).epsilon(1e-12));
    CHECK(moved.y == doctest::Approx(u.y + 0.02).epsilon(1e-12));
}

TEST_CASE("mobility: boundary hit resamples the heading and stays inside") {
    ScenarioConfig cfg = table_cfg();
    const auto layout = build_layout(cfg);
    Rng rng(5, "mobility");

    UserState u;
    u.cluster_id = 0;
    u.x = layout[1].position.x + cfg.cluster_radius_m - cfg.max_step_m() / 2;
    u.y = layout[1].position.y;
    u.heading_rad = 0.0; // would exit
    const UserState moved = step_mobility(u, cfg, layout[1], rng);
    const double d = std::hypot(moved.x - layout[1].position.x, moved.y - layout[1].position.y);
    CHECK(d <= cfg.cluster_radius_m);
    CHECK(moved.heading_rad != 0.0);
}

TEST_CASE("mobility: zero speed keeps every user in place") {
    ScenarioConfig cfg = table_cfg();
    cfg.user_speed_mps = 0.0;
    ScenarioState scen(cfg);
    Rng rng(5, "mobility");
    scen.reset(rng);
    const auto before = scen.users();
    for (int t = 0; t < cfg.slots_per_episode; ++t)
        scen.step(rng);
    for (std::size_t i = 0; i < before.size(); ++i)
    {
        CHECK(scen.users()[i].x == before[i].x);
        CHECK(scen.users()[i].y == before[i].y);
    }
}

TEST_CASE("mobility: containment and bounded step length over many steps") {
    ScenarioConfig cfg = table_cfg();
    cfg.user_speed_mps = 40.0; // exaggerate to stress the boundary rule
    ScenarioState scen(cfg);
    Rng rng(9, "mobility");
    scen.reset(rng);
    bool inside = true, bounded = true;
    auto prev = scen.users();
    for (int t = 0; t < 10000 / cfg.total_users(); ++t)
    {
        scen.step(rng);
        for (std::size_t i = 0; i < prev.size(); ++i)
        {
            const auto &u = scen.users()[i];
            const auto &c = scen.stations()[std::size_t(u.cluster_id) + 1].position;
            inside &= std::hypot(u.x - c.x, u.y - c.y) <= cfg.cluster_radius_m + 1e-9;
            bounded &= std::hypot(u.x - prev[i].x, u.y - prev[i].y) <= cfg.max_step_m() + 1e-9;
        }
        prev = scen.users();
    }
    CHECK(inside);
    CHECK(bounded);
}

TEST_CASE("geometry: nadir, slant distance, and azimuth symmetry") {
    BsPose hab{1, {0.0, 0.0, 2000.0}, 36};
    UserState below;
    below.x = 0.0;
    below.y = 0.0;
    const Geometry g1 = geometry(hab, below);
    CHECK(g1.distance_m == doctest::Approx(2000.0));
    CHECK(g1.elevation_rad == doctest::Approx(M_PI / 2));

    BsPose haps{0, {0.0, 0.0, 20000.0}, 64};
    UserState off;
    off.x = 2000.0;
    off.y = 0.0;
    const Geometry g2 = geometry(haps, off);
    CHECK(g2.distance_m == doctest::Approx(20099.751242241782).epsilon(1e-12));

    UserState diag;
    diag.x = 1234.5;
    diag.y = 1234.5;
    const Geometry g3 = geometry(haps, diag);
    CHECK(g3.azimuth_rad == doctest::Approx(M_PI / 4));
}

TEST_CASE("geometry: elevation stays in (0, pi/2] for users anywhere") {
    ScenarioConfig cfg = table_cfg();
    ScenarioState scen(cfg);
    Rng rng(13, "mobility");
    scen.reset(rng);
    for (const auto &bs : scen.stations())
        for (const auto &u : scen.users())
        {
            const Geometry g = geometry(bs, u);
            CHECK(g.elevation_rad > 0.0);
            CHECK(g.elevation_rad <= M_PI / 2);
        }
}

TEST_CASE("geometry: zero distance is rejected") {
    BsPose degenerate{1, {0.0, 0.0, 0.0}, 36};
    UserState u;
    CHECK_THROWS_AS((void)geometry(degenerate, u), std::domain_error);
}

TEST_CASE("config validation catches bad inputs") {
    ScenarioConfig cfg = table_cfg();
    cfg.num_habs = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = table_cfg();
    cfg.hab_antennas = 35; // not a perfect square
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = table_cfg();
    cfg.users_per_cluster = 40; // K > N_b
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = table_cfg();
    cfg.cluster_radius_m = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
