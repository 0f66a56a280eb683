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

#include "airgraph/geograph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "airgraph/error.hpp"
#include "airgraph/textio.hpp"

namespace airgraph::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

void validate_cities(const std::vector<City>& cities) {
  for (std::size_t i = 0; i < cities.size(); ++i) {
    const City& c = cities[i];
    if (c.id != i) {
      throw GeometryError("city ids must be dense 0..N-1 in order; row " + std::to_string(i) +
                          " has id " + std::to_string(c.id));
    }
    if (!(c.lat >= -90.0 && c.lat <= 90.0) || !(c.lon >= -180.0 && c.lon <= 180.0)) {
      throw GeometryError("city " + std::to_string(i) + " has coordinates out of range");
    }
  }
}

ElevationGrid::ElevationGrid(double lat0, double lon0, double dlat, double dlon,
                             std::size_t nrows, std::size_t ncols, std::vector<double> heights)
    : lat0_(lat0),
      lon0_(lon0),
      dlat_(dlat),
      dlon_(dlon),
      nrows_(nrows),
      ncols_(ncols),
      heights_(std::move(heights)) {
  if (!(dlat > 0.0) || !(dlon > 0.0)) throw GeometryError("elevation grid: spacing must be positive");
  if (nrows < 2 || ncols < 2) throw GeometryError("elevation grid: need at least 2x2 nodes");
  if (heights_.size() != nrows * ncols) {
    throw GeometryError("elevation grid: " + std::to_string(nrows) + "x" + std::to_string(ncols) +
                        " grid holds " + std::to_string(heights_.size()) + " heights");
  }
}

bool ElevationGrid::contains(double lat, double lon) const {
  const double r = (lat - lat0_) / dlat_;
  const double c = (lon - lon0_) / dlon_;
  return r >= 0.0 && c >= 0.0 && r <= static_cast<double>(nrows_ - 1) &&
         c <= static_cast<double>(ncols_ - 1);
}

double ElevationGrid::height_at(double lat, double lon) const {
  if (!contains(lat, lon)) {
    std::ostringstream os;
    os << "elevation grid: point (" << lat << ", " << lon << ") lies outside the grid";
    throw GeometryError(os.str());
  }
  const double r = (lat - lat0_) / dlat_;
  const double c = (lon - lon0_) / dlon_;
  const std::size_t r0 = std::min(static_cast<std::size_t>(r), nrows_ - 2);
  const std::size_t c0 = std::min(static_cast<std::size_t>(c), ncols_ - 2);
  const double fr = r - static_cast<double>(r0);
  const double fc = c - static_cast<double>(c0);
  const auto h = [&](std::size_t i, std::size_t j) { return heights_[i * ncols_ + j]; };
  return (1 - fr) * ((1 - fc) * h(r0, c0) + fc * h(r0, c0 + 1)) +
         fr * ((1 - fc) * h(r0 + 1, c0) + fc * h(r0 + 1, c0 + 1));
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDegToRad, p2 = lat2 * kDegToRad;
  const double dp = p2 - p1;
  const double dl = (lon2 - lon1) * kDegToRad;
  const double s = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

double haversine_km(const City& a, const City& b) { return haversine_km(a.lat, a.lon, b.lat, b.lon); }

double bearing_deg(const City& a, const City& b) {
  if (a.lat == b.lat && a.lon == b.lon) {
    throw GeometryError("bearing: cities " + std::to_string(a.id) + " and " + std::to_string(b.id) +
                        " coincide");
  }
  const double p1 = a.lat * kDegToRad, p2 = b.lat * kDegToRad;
  const double dl = (b.lon - a.lon) * kDegToRad;
  const double y = std::sin(dl) * std::cos(p2);
  const double x = std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl);
  double deg = std::atan2(y, x) / kDegToRad;
  deg = std::fmod(deg + 360.0, 360.0);
  return deg >= 360.0 ? 0.0 : deg;
}

double ridge_height(const ElevationGrid& grid, const City& a, const City& b,
                    std::size_t n_samples) {
  if (n_samples < 2) throw GeometryError("ridge_height: need at least 2 samples");
  // Canonical endpoint order so the result is exactly symmetric.
  const bool swap = std::tie(a.lat, a.lon) > std::tie(b.lat, b.lon);
  const City& p = swap ? b : a;
  const City& q = swap ? a : b;
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= n_samples; ++k) {
    const double lambda = static_cast<double>(k) / static_cast<double>(n_samples + 1);
    const double lat = lambda * p.lat + (1.0 - lambda) * q.lat;
    const double lon = lambda * p.lon + (1.0 - lambda) * q.lon;
    peak = std::max(peak, grid.height_at(lat, lon));
  }
  return peak - std::max(a.altitude, b.altitude);
}

namespace {

void index_edges(GraphTopology& g) {
  const std::size_t n = g.cities.size();
  g.in_edges.assign(n, {});
  g.out_edges.assign(n, {});
  g.dist_km.clear();
  g.bearing_deg.clear();
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& edge = g.edges[e];
    if (edge.src >= n || edge.dst >= n) throw GeometryError("edge references an unknown city");
    if (edge.src == edge.dst) throw GeometryError("self-loops are not allowed");
    g.out_edges[edge.src].push_back(e);
    g.in_edges[edge.dst].push_back(e);
    g.dist_km.push_back(haversine_km(g.cities[edge.src], g.cities[edge.dst]));
    g.bearing_deg.push_back(bearing_deg(g.cities[edge.src], g.cities[edge.dst]));
  }
}

}  // namespace

GraphTopology build_adjacency(const std::vector<City>& cities, const ElevationGrid& grid,
                              double d_theta_km, double m_theta_m, std::size_t n_samples) {
  if (cities.empty()) throw GeometryError("build_adjacency: empty city list");
  validate_cities(cities);
  GraphTopology g;
  g.cities = cities;
  g.d_theta_km = d_theta_km;
  g.m_theta_m = m_theta_m;
  const std::size_t n = cities.size();
  std::vector<char> connected(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = haversine_km(cities[i], cities[j]);
      // Heaviside gates with H(x) = 1 iff x > 0.
      if (!(d_theta_km - d > 0.0)) continue;
      const double m = ridge_height(grid, cities[i], cities[j], n_samples);
      if (!(m_theta_m - m > 0.0)) continue;
      connected[i * n + j] = connected[j * n + i] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (connected[i * n + j]) g.edges.push_back({i, j});
    }
  }
  index_edges(g);
  return g;
}

GraphTopology topology_from_edges(const std::vector<City>& cities, std::vector<Edge> edges) {
  validate_cities(cities);
  GraphTopology g;
  g.cities = cities;
  g.edges = std::move(edges);
  index_edges(g);
  return g;
}

std::vector<City> read_nodes_csv(const std::filesystem::path& path) {
  const std::string body = text::read_file(path);
  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "id,name,lat,lon,altitude") {
    throw DataError(DataError::Kind::kHeaderInconsistency,
                    path.string() + ": expected header 'id,name,lat,lon,altitude'");
  }
  std::vector<City> cities;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto f = text::split(text::trim(line), ',');
    if (f.size() != 5) {
      throw DataError(DataError::Kind::kHeaderInconsistency,
                      path.string() + ": row " + std::to_string(cities.size() + 1) +
                          " does not have 5 fields");
    }
    City c;
    const long long id = text::parse_int(f[0], "nodes.csv id");
    if (id < 0) throw DataError(DataError::Kind::kValidation, "nodes.csv: negative id");
    c.id = static_cast<std::size_t>(id);
    c.name = std::string(text::trim(f[1]));
    c.lat = text::parse_double(f[2], "nodes.csv lat");
    c.lon = text::parse_double(f[3], "nodes.csv lon");
    c.altitude = text::parse_double(f[4], "nodes.csv altitude");
    cities.push_back(std::move(c));
  }
  try {
    validate_cities(cities);
  } catch (const GeometryError& e) {
    throw DataError(DataError::Kind::kValidation, path.string() + ": " + e.what());
  }
  return cities;
}

void write_nodes_csv(const std::filesystem::path& path, const std::vector<City>& cities) {
  std::string out = "id,name,lat,lon,altitude\n";
  for (const City& c : cities) {
    if (c.name.find(',') != std::string::npos) {
      throw DataError(DataError::Kind::kValidation, "city name may not contain commas: " + c.name);
    }
    out += std::to_string(c.id) + ',' + c.name + ',' + text::format_double(c.lat) + ',' +
           text::format_double(c.lon) + ',' + text::format_double(c.altitude) + '\n';
  }
  text::write_file_atomic(path, out);
}

ElevationGrid read_elevation_grid(const std::filesystem::path& path) {
  const std::string body = text::read_file(path);
  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(DataError::Kind::kHeaderInconsistency, path.string() + ": empty file");
  }
  std::vector<std::string_view> head;
  for (auto tok : text::split(text::trim(line), ' ')) {
    if (!tok.empty()) head.push_back(tok);
  }
  if (head.size() != 6) {
    throw DataError(DataError::Kind::kHeaderInconsistency,
                    path.string() + ": header must be 'lat0 lon0 dlat dlon nrows ncols'");
  }
  const double lat0 = text::parse_double(head[0], "grid lat0");
  const double lon0 = text::parse_double(head[1], "grid lon0");
  const double dlat = text::parse_double(head[2], "grid dlat");
  const double dlon = text::parse_double(head[3], "grid dlon");
  const long long nrows = text::parse_int(head[4], "grid nrows");
  const long long ncols = text::parse_int(head[5], "grid ncols");
  if (nrows < 2 || ncols < 2) {
    throw DataError(DataError::Kind::kHeaderInconsistency, path.string() + ": grid too small");
  }
  std::vector<double> heights;
  heights.reserve(static_cast<std::size_t>(nrows * ncols));
  long long rows = 0;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    long long cols = 0;
    for (auto tok : text::split(text::trim(line), ' ')) {
      if (tok.empty()) continue;
      heights.push_back(text::parse_double(tok, "grid height"));
      ++cols;
    }
    if (cols != ncols) {
      throw DataError(DataError::Kind::kHeaderInconsistency,
                      path.string() + ": row " + std::to_string(rows) + " has " +
                          std::to_string(cols) + " values, header says " + std::to_string(ncols));
    }
    ++rows;
  }
  if (rows != nrows) {
    throw DataError(DataError::Kind::kHeaderInconsistency,
                    path.string() + ": " + std::to_string(rows) + " rows, header says " +
                        std::to_string(nrows));
  }
  try {
    return ElevationGrid(lat0, lon0, dlat, dlon, static_cast<std::size_t>(nrows),
                         static_cast<std::size_t>(ncols), std::move(heights));
  } catch (const GeometryError& e) {
    throw DataError(DataError::Kind::kValidation, path.string() + ": " + e.what());
  }
}

void write_elevation_grid(const std::filesystem::path& path, const ElevationGrid& grid) {
  std::string out = text::format_double(grid.lat0()) + ' ' + text::format_double(grid.lon0()) +
                    ' ' + text::format_double(grid.dlat()) + ' ' +
                    text::format_double(grid.dlon()) + ' ' + std::to_string(grid.nrows()) + ' ' +
                    std::to_string(grid.ncols()) + '\n';
  for (std::size_t r = 0; r < grid.nrows(); ++r) {
    for (std::size_t c = 0; c < grid.ncols(); ++c) {
      if (c) out += ' ';
      out += text::format_double(grid.heights()[r * grid.ncols() + c]);
    }
    out += '\n';
  }
  text::write_file_atomic(path, out);
}

void write_graph_json(const std::filesystem::path& path, const GraphTopology& topology) {
  nlohmann::json j;
  j["d_theta_km"] = topology.d_theta_km;
  j["m_theta_m"] = topology.m_theta_m;
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : topology.edges) j["edges"].push_back({e.src, e.dst});
  j["dist_km"] = topology.dist_km;
  text::write_file_atomic(path, j.dump(1) + "\n");
}

}  // namespace airgraph::geo
