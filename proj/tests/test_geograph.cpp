/* Copyright 2026 The airgraph Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "airgraph/error.hpp"
#include "airgraph/geograph.hpp"
#include "airgraph/textio.hpp"
#include "helpers.hpp"

using namespace airgraph;
using geo::City;
using geo::ElevationGrid;

namespace {

City at(std::size_t id, double lat, double lon, double alt = 0.0) {
  return {id, "c" + std::to_string(id), lat, lon, alt};
}

ElevationGrid flat(double lat0, double lon0, double lat1, double lon1, double step = 0.1) {
  const auto rows = static_cast<std::size_t>(std::ceil((lat1 - lat0) / step)) + 1;
  const auto cols = static_cast<std::size_t>(std::ceil((lon1 - lon0) / step)) + 1;
  return {lat0, lon0, step, step, rows, cols, std::vector<double>(rows * cols, 0.0)};
}

// East-west wall of height h, three grid rows thick, centred on `lat`.
ElevationGrid wall(double lat, double h) {
  ElevationGrid g = flat(lat - 1.0, 109.0, lat + 1.0, 111.0, 0.05);
  std::vector<double> heights = g.heights();
  const auto centre = static_cast<std::size_t>(std::llround((lat - g.lat0()) / g.dlat()));
  for (std::size_t r = centre - 1; r <= centre + 1; ++r) {
    for (std::size_t c = 0; c < g.ncols(); ++c) heights[r * g.ncols() + c] = h;
  }
  return {g.lat0(), g.lon0(), g.dlat(), g.dlon(), g.nrows(), g.ncols(), heights};
}

// Two cities straddling the wall, `km` apart along the meridian lon = 110.
std::vector<City> across_wall(double lat, double km) {
  const double half = km / 2.0 / (geo::kEarthRadiusKm * std::numbers::pi / 180.0);
  return {at(0, lat - half, 110.0), at(1, lat + half, 110.0)};
}

}  // namespace

TEST_SUITE("geograph") {

TEST_CASE("haversine basics") {
  const City a = at(0, 0.0, 0.0), b = at(1, 0.0, 1.0);
  CHECK(geo::haversine_km(a, a) == 0.0);
  CHECK(geo::haversine_km(a, b) == doctest::Approx(2.0 * std::numbers::pi * 6371.0 / 360.0).epsilon(1e-12));
  CHECK(geo::haversine_km(a, b) == doctest::Approx(111.19).epsilon(1e-4));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-179, 179);
  for (int i = 0; i < 200; ++i) {
    const City p = at(0, lat(rng), lon(rng)), q = at(1, lat(rng), lon(rng));
    CHECK(geo::haversine_km(p, q) == geo::haversine_km(q, p));
    CHECK(geo::haversine_km(p, q) >= 0.0);
  }
}

TEST_CASE("bearing conventions") {
  CHECK(geo::bearing_deg(at(0, 30.0, 110.0), at(1, 31.0, 110.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(geo::bearing_deg(at(0, 0.0, 0.0), at(1, 0.0, 1.0)) == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(geo::bearing_deg(at(0, 0.0, 1.0), at(1, 0.0, 0.0)) == doctest::Approx(270.0).epsilon(1e-12));
  const City a = at(0, 0.1, 10.0), b = at(1, -0.2, 10.4);
  const double there = geo::bearing_deg(a, b), back = geo::bearing_deg(b, a);
  CHECK(std::abs(std::fmod(back - there + 360.0, 360.0) - 180.0) < 0.01);
  CHECK_THROWS_AS(geo::bearing_deg(a, a), GeometryError);
  for (double lon : {-179.0, -45.0, 0.0, 90.0, 179.0}) {
    const double b2 = geo::bearing_deg(at(0, 10.0, lon), at(1, 9.0, lon - 0.5));
    CHECK(b2 >= 0.0);
    CHECK(b2 < 360.0);
  }
}

TEST_CASE("ridge height on flat terrain is zero") {
  const ElevationGrid g = flat(29.0, 109.0, 32.0, 112.0);
  CHECK(geo::ridge_height(g, at(0, 30.0, 110.0), at(1, 31.0, 111.0)) == 0.0);
}

TEST_CASE("ridge height over a single raised node") {
  // Segment spans two cells with the 2000 m node in the middle. The interior
  // samples closest to it sit at lambda = 16/33 and 17/33, one 33rd of a cell
  // away, so bilinear interpolation gives 2000 * 32/33.
  std::vector<double> h(3 * 3, 0.0);
  h[1 * 3 + 1] = 2000.0;
  const ElevationGrid g(30.0, 110.0, 0.5, 0.5, 3, 3, h);
  const City a = at(0, 30.5, 110.0, 100.0), b = at(1, 30.5, 111.0, 300.0);
  const double ridge = geo::ridge_height(g, a, b);
  CHECK(ridge == doctest::Approx(2000.0 * 32.0 / 33.0 - 300.0).epsilon(1e-12));
  CHECK(std::abs(ridge - 1700.0) / 1700.0 < 0.05);
}

TEST_CASE("ridge height from a summit is not positive") {
  std::vector<double> h(5 * 5, 0.0);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      h[r * 5 + c] = 1000.0 - 200.0 * std::max(std::abs(int(r) - 2), std::abs(int(c) - 2));
    }
  }
  const ElevationGrid g(30.0, 110.0, 0.25, 0.25, 5, 5, h);
  const City summit = at(0, 30.5, 110.5, 1000.0), foot = at(1, 30.0, 111.0, 600.0);
  CHECK(geo::ridge_height(g, summit, foot) <= 0.0);
}

TEST_CASE("ridge height is symmetric and outside queries throw") {
  std::mt19937_64 rng(8);
  ElevationGrid base = flat(29.0, 109.0, 33.0, 113.0, 0.1);
  std::vector<double> h = base.heights();
  std::uniform_real_distribution<double> u(0.0, 2000.0);
  for (double& x : h) x = u(rng);
  const ElevationGrid g(base.lat0(), base.lon0(), 0.1, 0.1, base.nrows(), base.ncols(), h);
  for (int i = 0; i < 50; ++i) {
    auto cities = testing::random_cities(rng, 2, 29.5, 109.5, 3.0);
    CHECK(geo::ridge_height(g, cities[0], cities[1]) == geo::ridge_height(g, cities[1], cities[0]));
  }
  CHECK_THROWS_AS(geo::ridge_height(g, at(0, 30.0, 110.0), at(1, 40.0, 110.0)), GeometryError);
}

TEST_CASE("nested refinement never lowers the ridge estimate") {
  // n -> 2n+1 keeps every old sample point (k/(n+1) = 2k/(2n+2)).
  std::mt19937_64 rng(12);
  ElevationGrid base = flat(29.0, 109.0, 33.0, 113.0, 0.1);
  std::vector<double> h = base.heights();
  std::uniform_real_distribution<double> u(0.0, 3000.0);
  for (double& x : h) x = u(rng);
  const ElevationGrid g(base.lat0(), base.lon0(), 0.1, 0.1, base.nrows(), base.ncols(), h);
  for (int i = 0; i < 30; ++i) {
    auto c = testing::random_cities(rng, 2, 29.5, 109.5, 3.0);
    double prev = -1e300;
    for (std::size_t n = 2; n < 600; n = 2 * n + 1) {
      const double r = geo::ridge_height(g, c[0], c[1], n);
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("gating examples") {
  const ElevationGrid g = flat(29.0, 109.0, 31.0, 116.0);
  const double deg_km = geo::kEarthRadiusKm * std::numbers::pi / 180.0;
  SUBCASE("350 km apart on flat terrain") {
    const auto topo = geo::build_adjacency({at(0, 30.0, 110.0), at(1, 30.0 + 350.0 / deg_km, 110.0)},
                                           flat(29.0, 109.0, 35.0, 111.0));
    CHECK(topo.num_edges() == 0);
  }
  SUBCASE("100 km apart on flat terrain") {
    const auto topo = geo::build_adjacency(across_wall(30.0, 100.0), g);
    REQUIRE(topo.num_edges() == 2);
    CHECK(topo.edges[0] == geo::Edge{0, 1});
    CHECK(topo.edges[1] == geo::Edge{1, 0});
  }
  SUBCASE("a 1500 m wall blocks, a 1000 m wall does not") {
    const auto cities = across_wall(30.0, 100.0);
    CHECK(geo::ridge_height(wall(30.0, 1500.0), cities[0], cities[1]) == doctest::Approx(1500.0));
    CHECK(geo::build_adjacency(cities, wall(30.0, 1500.0)).num_edges() == 0);
    CHECK(geo::build_adjacency(cities, wall(30.0, 1000.0)).num_edges() == 2);
  }
  CHECK_THROWS_AS(geo::build_adjacency({}, g), GeometryError);
}

TEST_CASE("gates are strict") {
  const auto cities = across_wall(30.0, 100.0);
  const double d = geo::haversine_km(cities[0], cities[1]);
  CHECK(geo::build_adjacency(cities, wall(30.0, 1200.0)).num_edges() == 0);
  CHECK(geo::build_adjacency(cities, flat(28.0, 109.0, 32.0, 111.0), d).num_edges() == 0);
  CHECK(geo::build_adjacency(cities, flat(28.0, 109.0, 32.0, 111.0), std::nextafter(d, 1e9)).num_edges() == 2);
}

TEST_CASE("built graphs are symmetric, loop-free and gate-consistent") {
  std::mt19937_64 rng(21);
  ElevationGrid base = flat(29.0, 109.0, 34.0, 114.0, 0.1);
  std::vector<double> h = base.heights();
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = 1500.0 * std::sin(0.37 * double(k)) + 900.0;
  const ElevationGrid g(base.lat0(), base.lon0(), 0.1, 0.1, base.nrows(), base.ncols(), h);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cities = testing::random_cities(rng, 10, 29.5, 109.5, 4.0);
    const auto topo = geo::build_adjacency(cities, g);
    for (std::size_t e = 0; e < topo.num_edges(); ++e) {
      const auto [s, d] = topo.edges[e];
      CHECK(s != d);
      CHECK(std::find(topo.edges.begin(), topo.edges.end(), geo::Edge{d, s}) != topo.edges.end());
      CHECK(topo.dist_km[e] < 300.0);
      CHECK(geo::ridge_height(g, cities[s], cities[d]) < 1200.0);
      CHECK(topo.dist_km[e] == geo::haversine_km(cities[s], cities[d]));
    }
    for (std::size_t i = 0; i < cities.size(); ++i) {
      for (std::size_t e : topo.in_edges[i]) CHECK(topo.edges[e].dst == i);
      for (std::size_t e : topo.out_edges[i]) CHECK(topo.edges[e].src == i);
    }
  }
}

TEST_CASE("raising thresholds never removes edges") {
  std::mt19937_64 rng(33);
  ElevationGrid base = flat(29.0, 109.0, 34.0, 114.0, 0.1);
  std::vector<double> h = base.heights();
  std::uniform_real_distribution<double> u(0.0, 2500.0);
  for (double& x : h) x = u(rng);
  const ElevationGrid g(base.lat0(), base.lon0(), 0.1, 0.1, base.nrows(), base.ncols(), h);
  const auto cities = testing::random_cities(rng, 12, 29.5, 109.5, 4.0);
  const auto subset = [](const geo::GraphTopology& a, const geo::GraphTopology& b) {
    for (const auto& e : a.edges) {
      if (std::find(b.edges.begin(), b.edges.end(), e) == b.edges.end()) return false;
    }
    return true;
  };
  const std::vector<double> ds{50, 150, 300, 450}, ms{0, 600, 1200, 2400};
  for (std::size_t i = 0; i + 1 < ds.size(); ++i) {
    for (double m : ms) {
      CHECK(subset(geo::build_adjacency(cities, g, ds[i], m), geo::build_adjacency(cities, g, ds[i + 1], m)));
      CHECK(subset(geo::build_adjacency(cities, g, m / 8.0 + 100.0, ms[std::min<std::size_t>(i, 2)]),
                   geo::build_adjacency(cities, g, m / 8.0 + 100.0, ms[std::min<std::size_t>(i, 2) + 1])));
    }
  }
}

TEST_CASE("explicit edge lists keep their order") {
  const std::vector<City> cities{at(0, 30.0, 110.0), at(1, 30.5, 110.0), at(2, 30.0, 110.5)};
  const auto topo = geo::topology_from_edges(cities, {{2, 0}, {0, 1}});
  CHECK(topo.edges[0] == geo::Edge{2, 0});
  CHECK(topo.bearing_deg[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(geo::topology_from_edges(cities, {{1, 1}}), GeometryError);
  CHECK_THROWS_AS(geo::topology_from_edges(cities, {{0, 9}}), GeometryError);
}

TEST_CASE("file round trips") {
  const auto dir = std::filesystem::temp_directory_path() / "airgraph_geo_io";
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(2);
  auto cities = testing::random_cities(rng, 5);
  for (auto& c : cities) c.altitude = 123.456789 * double(c.id);
  geo::write_nodes_csv(dir / "nodes.csv", cities);
  CHECK(geo::read_nodes_csv(dir / "nodes.csv") == cities);

  std::vector<double> h(4 * 3);
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = 0.1 * double(k) + 1e-7;
  const ElevationGrid g(29.5, 109.25, 0.5, 0.75, 4, 3, h);
  geo::write_elevation_grid(dir / "elevation.grid", g);
  CHECK(geo::read_elevation_grid(dir / "elevation.grid") == g);

  text::write_file_atomic(dir / "bad.grid", "29 109 0.5 0.5 2 2\n1 2\n3\n");
  CHECK_THROWS_AS(geo::read_elevation_grid(dir / "bad.grid"), DataError);
  text::write_file_atomic(dir / "bad.csv", "id,lat\n0,1\n");
  CHECK_THROWS_AS(geo::read_nodes_csv(dir / "bad.csv"), DataError);
  try {
    geo::read_elevation_grid(dir / "missing.grid");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.kind() == DataError::Kind::kMissingFile);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("city validation") {
  CHECK_THROWS_AS(geo::validate_cities({at(1, 0, 0)}), GeometryError);
  CHECK_THROWS_AS(geo::validate_cities({at(0, 95.0, 0)}), GeometryError);
  CHECK_NOTHROW(geo::validate_cities({at(0, 10, 10), at(1, 11, 11)}));
}

}  // TEST_SUITE
