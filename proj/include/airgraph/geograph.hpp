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

// City graph construction: great-circle geometry, terrain ridges between
// city pairs and the distance/ridge gated directed adjacency.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace airgraph::geo {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultDistanceThresholdKm = 300.0;
inline constexpr double kDefaultRidgeThresholdM = 1200.0;
inline constexpr std::size_t kDefaultRidgeSamples = 32;

struct City {
  std::size_t id = 0;
  std::string name;
  double lat = 0.0;       // degrees
  double lon = 0.0;       // degrees
  double altitude = 0.0;  // meters

  bool operator==(const City&) const = default;
};

// Ids must be 0..N-1 in order; coordinates in range.
void validate_cities(const std::vector<City>& cities);

// Heights sampled at grid nodes: node (r, c) sits at
// (lat0 + r*dlat, lon0 + c*dlon). Queries interpolate bilinearly and must fall
// inside the node bounding box.
class ElevationGrid {
 public:
  ElevationGrid() = default;
  ElevationGrid(double lat0, double lon0, double dlat, double dlon, std::size_t nrows,
                std::size_t ncols, std::vector<double> heights);

  double height_at(double lat, double lon) const;
  bool contains(double lat, double lon) const;

  double lat0() const { return lat0_; }
  double lon0() const { return lon0_; }
  double dlat() const { return dlat_; }
  double dlon() const { return dlon_; }
  std::size_t nrows() const { return nrows_; }
  std::size_t ncols() const { return ncols_; }
  const std::vector<double>& heights() const { return heights_; }

  bool operator==(const ElevationGrid&) const = default;

 private:
  double lat0_ = 0.0, lon0_ = 0.0, dlat_ = 1.0, dlon_ = 1.0;
  std::size_t nrows_ = 0, ncols_ = 0;
  std::vector<double> heights_;
};

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;

  bool operator==(const Edge&) const = default;
};

// Immutable directed city graph. build_adjacency sorts edges by (src, dst)
// and always emits both directions. in_edges[i] / out_edges[i] hold edge
// indices.
struct GraphTopology {
  std::vector<City> cities;
  std::vector<Edge> edges;
  std::vector<double> dist_km;      // per edge
  std::vector<double> bearing_deg;  // per edge, src -> dst
  std::vector<std::vector<std::size_t>> in_edges;
  std::vector<std::vector<std::size_t>> out_edges;
  double d_theta_km = kDefaultDistanceThresholdKm;
  double m_theta_m = kDefaultRidgeThresholdM;

  std::size_t num_nodes() const { return cities.size(); }
  std::size_t num_edges() const { return edges.size(); }
};

double haversine_km(const City& a, const City& b);
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Initial great-circle bearing a -> b, clockwise from north, in [0, 360).
// Throws GeometryError for coincident points.
double bearing_deg(const City& a, const City& b);

// Highest interpolated terrain over `n_samples` evenly spaced interior points
// of the straight (lat, lon) segment, minus the higher endpoint altitude.
// Negative when the path stays below both endpoints.
double ridge_height(const ElevationGrid& grid, const City& a, const City& b,
                    std::size_t n_samples = kDefaultRidgeSamples);

// Connects i and j (both directions) iff dist < d_theta and ridge < m_theta.
// Pairs failing the distance gate are not probed for terrain.
GraphTopology build_adjacency(const std::vector<City>& cities, const ElevationGrid& grid,
                              double d_theta_km = kDefaultDistanceThresholdKm,
                              double m_theta_m = kDefaultRidgeThresholdM,
                              std::size_t n_samples = kDefaultRidgeSamples);

// Assembles a topology from an explicit edge list, kept in the given order
// and not required to be symmetric. Distances and bearings are recomputed.
GraphTopology topology_from_edges(const std::vector<City>& cities, std::vector<Edge> edges);

// File formats.
std::vector<City> read_nodes_csv(const std::filesystem::path& path);
void write_nodes_csv(const std::filesystem::path& path, const std::vector<City>& cities);
ElevationGrid read_elevation_grid(const std::filesystem::path& path);
void write_elevation_grid(const std::filesystem::path& path, const ElevationGrid& grid);
void write_graph_json(const std::filesystem::path& path, const GraphTopology& topology);

}  // namespace airgraph::geo
