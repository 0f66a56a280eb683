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

#include "airgraph/synth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "airgraph/error.hpp"
#include "airgraph/textio.hpp"

namespace airgraph::synth {

namespace {

using num::Tensor;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Zero-mean AR(1) with a given stationary standard deviation.
class Ar1 {
 public:
  Ar1(double phi, double stddev) : phi_(phi), innov_(stddev * std::sqrt(1.0 - phi * phi)) {}

  double start(std::mt19937_64& rng) {
    value_ = std::normal_distribution<double>(0.0, innov_ / std::sqrt(1.0 - phi_ * phi_))(rng);
    return value_;
  }
  double next(std::mt19937_64& rng) {
    value_ = phi_ * value_ + std::normal_distribution<double>(0.0, innov_)(rng);
    return value_;
  }

 private:
  double phi_, innov_;
  double value_ = 0.0;
};

double hour_of(std::int64_t epoch) {
  std::int64_t s = epoch % 86400;
  if (s < 0) s += 86400;
  return static_cast<double>(s) / 3600.0;
}

std::vector<geo::City> place_cities(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lat(cfg.lat_min, cfg.lat_max);
  std::uniform_real_distribution<double> lon(cfg.lon_min, cfg.lon_max);
  std::vector<geo::City> cities;
  std::size_t attempts = 0;
  while (cities.size() < cfg.n_cities) {
    if (++attempts > 100000) {
      throw ConfigError("synth: cannot place " + std::to_string(cfg.n_cities) +
                        " cities with min_separation_km = " +
                        text::format_double(cfg.min_separation_km) + " in the box");
    }
    geo::City c;
    c.id = cities.size();
    c.name = "city" + std::to_string(c.id);
    c.lat = lat(rng);
    c.lon = lon(rng);
    const bool crowded = std::any_of(cities.begin(), cities.end(), [&](const geo::City& o) {
      return geo::haversine_km(c, o) < cfg.min_separation_km;
    });
    if (!crowded) cities.push_back(c);
  }
  return cities;
}

geo::ElevationGrid make_grid(const SynthConfig& cfg) {
  const double lat0 = cfg.lat_min - cfg.grid_margin_deg;
  const double lon0 = cfg.lon_min - cfg.grid_margin_deg;
  const auto rows = static_cast<std::size_t>(
      std::ceil((cfg.lat_max - cfg.lat_min + 2 * cfg.grid_margin_deg) / cfg.grid_step_deg)) + 1;
  const auto cols = static_cast<std::size_t>(
      std::ceil((cfg.lon_max - cfg.lon_min + 2 * cfg.grid_margin_deg) / cfg.grid_step_deg)) + 1;
  std::vector<double> heights(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double la = lat0 + static_cast<double>(r) * cfg.grid_step_deg;
      const double lo = lon0 + static_cast<double>(c) * cfg.grid_step_deg;
      double h = 0.0;
      for (const Mountain& m : cfg.mountains) {
        const double d2 = (la - m.lat) * (la - m.lat) + (lo - m.lon) * (lo - m.lon);
        h += m.height_m * std::exp(-0.5 * d2 / (m.radius_deg * m.radius_deg));
      }
      heights[r * cols + c] = h;
    }
  }
  return {lat0, lon0, cfg.grid_step_deg, cfg.grid_step_deg, rows, cols, std::move(heights)};
}

}  // namespace

std::vector<Mountain> parse_mountains(std::string_view text_in) {
  std::vector<Mountain> out;
  for (std::string_view item : text::split(text_in, ';')) {
    item = text::trim(item);
    if (item.empty()) continue;
    const auto f = text::split(item, ':');
    if (f.size() != 4) {
      throw ConfigError("mountain '" + std::string(item) + "' must be lat:lon:height:radius");
    }
    try {
      out.push_back({text::parse_double(text::trim(f[0]), "mountain lat"),
                     text::parse_double(text::trim(f[1]), "mountain lon"),
                     text::parse_double(text::trim(f[2]), "mountain height"),
                     text::parse_double(text::trim(f[3]), "mountain radius")});
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

std::string format_mountains(const std::vector<Mountain>& mountains) {
  std::string out;
  for (const Mountain& m : mountains) {
    if (!out.empty()) out += ";";
    out += text::format_double(m.lat) + ":" + text::format_double(m.lon) + ":" +
           text::format_double(m.height_m) + ":" + text::format_double(m.radius_deg);
  }
  return out;
}

void SynthConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError("synth: " + msg); };
  if (n_cities < 2) fail("n_cities must be at least 2");
  if (n_timesteps < 2) fail("n_timesteps must be at least 2");
  if (!(lat_min < lat_max) || !(lon_min < lon_max)) fail("empty bounding box");
  if (lat_min - grid_margin_deg < -90 || lat_max + grid_margin_deg > 90 ||
      lon_min - grid_margin_deg < -180 || lon_max + grid_margin_deg > 180) {
    fail("bounding box plus margin leaves the globe");
  }
  if (!(kappa >= 0)) fail("kappa must be >= 0");
  if (!(decay_base >= 0 && decay_base <= 1)) fail("decay_base must lie in [0, 1]");
  if (!(grid_step_deg > 0) || !(grid_margin_deg >= 0)) fail("bad grid step or margin");
  if (!(emission_min >= 0 && emission_max >= emission_min)) fail("bad emission range");
  if (!(wind_phi >= 0 && wind_phi < 1)) fail("wind_phi must lie in [0, 1)");
  if (!(wind_noise >= 0 && local_wind_noise >= 0 && pbl_noise >= 0)) fail("negative noise scale");
  if (!(pbl_scale > 0)) fail("pbl_scale must be positive");
  if (!(pbl_weight >= 0 && pbl_weight <= 1 && rain_weight >= 0 && rain_weight <= 1)) {
    fail("pbl_weight and rain_weight must lie in [0, 1]");
  }
  for (const Mountain& m : mountains) {
    if (!(m.radius_deg > 0)) fail("mountain radius must be positive");
  }
}

double retention_factor(const SynthConfig& cfg, double pbl_m, double precip_m) {
  const double rain_mm = std::max(0.0, precip_m * 1000.0);
  return (1.0 - cfg.pbl_weight * sigmoid((pbl_m - cfg.pbl_mid) / cfg.pbl_scale)) *
         (1.0 - cfg.rain_weight * std::min(rain_mm, 1.0));
}

std::vector<double> transport_step(const SynthConfig& cfg, const geo::GraphTopology& topology,
                                   std::span<const double> x, std::span<const double> retention,
                                   std::span<const double> advection,
                                   std::span<const double> emission) {
  const std::size_t n = topology.num_nodes();
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) next[i] = retention[i] * x[i] + emission[i];
  for (std::size_t e = 0; e < topology.num_edges(); ++e) {
    const auto [j, i] = topology.edges[e];
    next[i] += cfg.kappa * advection[e] * x[j];
    next[j] -= cfg.kappa * advection[e] * x[j];
  }
  for (double& v : next) v = std::clamp(v, feat::kPm25Min, feat::kPm25Max);
  return next;
}

World generate_world(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  World w;
  w.t0 = cfg.t0;
  w.grid = make_grid(cfg);
  w.cities = place_cities(cfg, rng);
  for (geo::City& c : w.cities) c.altitude = w.grid.height_at(c.lat, c.lon);
  w.topology = geo::build_adjacency(w.cities, w.grid, cfg.d_theta_km, cfg.m_theta_m);

  std::size_t connected = 0;
  for (std::size_t i = 0; i < w.cities.size(); ++i) {
    if (!w.topology.in_edges[i].empty()) ++connected;
  }
  if (connected < 2) {
    throw ConfigError("synth: fewer than 2 cities are connected; shrink the box or raise d_theta");
  }

  const std::size_t n = cfg.n_cities, m = w.topology.num_edges();
  const std::size_t total = cfg.burn_in + cfg.n_timesteps;

  std::uniform_real_distribution<double> emission_draw(cfg.emission_min, cfg.emission_max);
  std::uniform_real_distribution<double> phase_draw(-1.5, 1.5);
  std::vector<double> base(n), peak(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = emission_draw(rng);
    peak[i] = 8.0 + phase_draw(rng);
  }

  Ar1 region_u(cfg.wind_phi, cfg.wind_noise), region_v(cfg.wind_phi, cfg.wind_noise);
  std::vector<Ar1> local_u, local_v, pbl, kidx, temp, rh, rain, pres;
  for (std::size_t i = 0; i < n; ++i) {
    local_u.emplace_back(cfg.wind_phi, cfg.local_wind_noise);
    local_v.emplace_back(cfg.wind_phi, cfg.local_wind_noise);
    pbl.emplace_back(0.9, cfg.pbl_noise);
    kidx.emplace_back(0.95, 8.0);
    temp.emplace_back(0.97, 3.0);
    rh.emplace_back(0.95, 15.0);
    rain.emplace_back(0.8, 1.0);
    pres.emplace_back(0.98, 400.0);
  }

  std::vector<double> meteo(total * n * feat::kMeteoFeatures);
  double ru = region_u.start(rng), rv = region_v.start(rng);
  for (std::size_t t = 0; t < total; ++t) {
    if (t > 0) {
      ru = region_u.next(rng);
      rv = region_v.next(rng);
    }
    const std::int64_t epoch =
        cfg.t0 + (static_cast<std::int64_t>(t) - static_cast<std::int64_t>(cfg.burn_in)) *
                     feat::kStepSeconds;
    const double day_phase = 2.0 * std::numbers::pi * hour_of(epoch) / 24.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto draw = [&](Ar1& p) { return t == 0 ? p.start(rng) : p.next(rng); };
      double* row = &meteo[(t * n + i) * feat::kMeteoFeatures];
      row[feat::kUWind] = cfg.wind_u + ru + draw(local_u[i]);
      row[feat::kVWind] = cfg.wind_v + rv + draw(local_v[i]);
      // Deepest around 15:00 UTC-local, shallow at night.
      row[feat::kPblHeight] = std::max(
          50.0, cfg.pbl_mean + cfg.pbl_amplitude * std::cos(day_phase - 2.0 * std::numbers::pi * 15 / 24) +
                    draw(pbl[i]));
      row[feat::kKIndex] = 20.0 + draw(kidx[i]);
      row[feat::kTemperature2m] =
          285.0 + 5.0 * std::cos(day_phase - 2.0 * std::numbers::pi * 14 / 24) + draw(temp[i]);
      row[feat::kRelHumidity] = std::clamp(60.0 + draw(rh[i]), 5.0, 100.0);
      row[feat::kPrecipitation] = std::max(0.0, draw(rain[i]) - 1.2) * 2e-3;
      row[feat::kSurfacePressure] = 101325.0 - 12.0 * w.cities[i].altitude + draw(pres[i]);
    }
  }

  std::vector<double> retention(total * n), emission(total * n), adv(total * m);
  for (std::size_t t = 0; t < total; ++t) {
    const std::int64_t epoch =
        cfg.t0 + (static_cast<std::int64_t>(t) - static_cast<std::int64_t>(cfg.burn_in)) *
                     feat::kStepSeconds;
    const double hour = hour_of(epoch);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &meteo[(t * n + i) * feat::kMeteoFeatures];
      retention[t * n + i] = cfg.decay_base * retention_factor(cfg, row[feat::kPblHeight],
                                                               row[feat::kPrecipitation]);
      emission[t * n + i] =
          base[i] * (1.0 + cfg.diurnal_amplitude *
                               std::cos(2.0 * std::numbers::pi * (hour - peak[i]) / 24.0));
    }
    for (std::size_t e = 0; e < m; ++e) {
      const std::size_t j = w.topology.edges[e].src;
      const double* row = &meteo[(t * n + j) * feat::kMeteoFeatures];
      adv[t * m + e] = feat::advection_coefficient(row[feat::kUWind], row[feat::kVWind],
                                                   w.topology.dist_km[e],
                                                   w.topology.bearing_deg[e])
                           .coefficient;
    }
  }

  std::vector<double> pm(total * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = cfg.decay_base * (1.0 - 0.5 * cfg.pbl_weight);
    pm[i] = std::min(feat::kPm25Max, base[i] / std::max(1e-3, 1.0 - r));
  }
  for (std::size_t t = 0; t + 1 < total; ++t) {
    const auto next = transport_step(
        cfg, w.topology, std::span<const double>(&pm[t * n], n),
        std::span<const double>(&retention[t * n], n), std::span<const double>(&adv[t * m], m),
        std::span<const double>(&emission[t * n], n));
    std::copy(next.begin(), next.end(), pm.begin() + static_cast<std::ptrdiff_t>((t + 1) * n));
  }

  const auto keep = [&](const std::vector<double>& v, std::size_t width) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(cfg.burn_in * width),
                               v.end());
  };
  const std::size_t steps = cfg.n_timesteps;
  w.meteo = Tensor<double>({steps, n, feat::kMeteoFeatures}, keep(meteo, n * feat::kMeteoFeatures));
  w.pm25 = Tensor<double>({steps, n}, keep(pm, n));
  w.emission = Tensor<double>({steps, n}, keep(emission, n));
  w.retention = Tensor<double>({steps, n}, keep(retention, n));
  w.advection = Tensor<double>({steps, m}, keep(adv, m));
  return w;
}

io::Dataset to_dataset(const World& world, const std::string& name) {
  io::Dataset ds;
  ds.manifest.name = name;
  ds.manifest.t0 = world.t0;
  ds.manifest.step_seconds = feat::kStepSeconds;
  ds.cities = world.cities;
  ds.grid = world.grid;
  ds.meteo = world.meteo;
  ds.pm25 = world.pm25;
  ds.manifest.n_cities = world.cities.size();
  ds.manifest.n_timesteps = world.pm25.dim(0);
  ds.manifest.meteo_features.assign(feat::meteo_feature_names().begin(),
                                    feat::meteo_feature_names().end());
  return ds;
}

double learnability_r2(const World& world) {
  const std::size_t steps = world.pm25.dim(0), n = world.pm25.dim(1);
  const std::size_t m = world.topology.num_edges();
  const auto x = world.pm25.data();
  const auto s = world.advection.data();
  const auto e = world.emission.data();
  constexpr int kCols = 5;
  Eigen::MatrixXd a((steps - 1) * n, kCols);
  Eigen::VectorXd y((steps - 1) * n);
  for (std::size_t t = 0; t + 1 < steps; ++t) {
    std::vector<double> inflow(n, 0.0), outflow(n, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const auto [j, i] = world.topology.edges[k];
      inflow[i] += s[t * m + k] * x[t * n + j];
      outflow[j] += s[t * m + k] * x[t * n + j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(t * n + i);
      a.row(row) << 1.0, x[t * n + i], inflow[i], outflow[i], e[t * n + i];
      y(row) = x[(t + 1) * n + i];
    }
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
  const double ss_res = (y - a * coef).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  return ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
}

namespace {

struct Dense {
  const std::vector<double>* w;
  const std::vector<double>* b;
  std::size_t in, out;
};

Dense dense(const model::ParamSet<double>& params, const std::string& prefix,
            std::vector<std::vector<double>>& keep) {
  const auto& w = params.get(prefix + ".weight");
  const auto& b = params.get(prefix + ".bias");
  keep.emplace_back(w.data().begin(), w.data().end());
  const std::vector<double>* wp = &keep.back();
  keep.emplace_back(b.data().begin(), b.data().end());
  return {wp, &keep.back(), w.dim(0), w.dim(1)};
}

std::vector<double> forward(const Dense& d, const std::vector<double>& x) {
  std::vector<double> y(d.out);
  for (std::size_t o = 0; o < d.out; ++o) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d.in; ++k) acc += x[k] * (*d.w)[k * d.out + o];
    y[o] = acc + (*d.b)[o];
  }
  return y;
}

std::vector<double> row_of(const Tensor<double>& t, std::size_t r) {
  const std::size_t cols = t.dim(1);
  return {t.data().begin() + static_cast<std::ptrdiff_t>(r * cols),
          t.data().begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)};
}

std::vector<double> cat(std::initializer_list<const std::vector<double>*> parts) {
  std::vector<double> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

}  // namespace

Tensor<double> bruteforce_spatial(const Tensor<double>& xi, const Tensor<double>& edge_features,
                                  const geo::GraphTopology& topology,
                                  const model::ParamSet<double>& params, bool no_export) {
  std::vector<std::vector<double>> keep;
  keep.reserve(6);
  const Dense psi0 = dense(params, "edge_mlp.0", keep);
  const Dense psi1 = dense(params, "edge_mlp.1", keep);
  const Dense phi = dense(params, "node_mlp", keep);
  const auto message = [&](std::size_t from, std::size_t to, std::size_t edge) {
    const auto a = row_of(xi, from), b = row_of(xi, to), q = row_of(edge_features, edge);
    std::vector<double> hidden = forward(psi0, cat({&a, &b, &q}));
    for (double& v : hidden) v = 1.0 / (1.0 + std::exp(-v));
    return forward(psi1, hidden);
  };

  const std::size_t n = topology.num_nodes();
  std::vector<double> out;
  out.reserve(n * phi.out);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> total(psi1.out, 0.0);
    for (std::size_t e = 0; e < topology.num_edges(); ++e) {
      const auto [src, dst] = topology.edges[e];
      if (dst == i) {
        const auto msg = message(src, dst, e);
        for (std::size_t k = 0; k < total.size(); ++k) total[k] += msg[k];
      }
      if (src == i && !no_export) {
        const auto msg = message(src, dst, e);
        for (std::size_t k = 0; k < total.size(); ++k) total[k] -= msg[k];
      }
    }
    const auto z = forward(phi, total);
    out.insert(out.end(), z.begin(), z.end());
  }
  return Tensor<double>({n, phi.out}, std::move(out));
}

Tensor<double> bruteforce_rollout(const Tensor<double>& x0,
                                  std::span<const Tensor<double>> node_features,
                                  std::span<const Tensor<double>> edge_features,
                                  const geo::GraphTopology& topology,
                                  const model::ParamSet<double>& params,
                                  const model::ModelSpec& spec) {
  std::vector<std::vector<double>> keep;
  keep.reserve(8);
  const Dense wz = dense(params, "gru.update", keep);
  const Dense wr = dense(params, "gru.reset", keep);
  const Dense wc = dense(params, "gru.candidate", keep);
  const Dense omega = dense(params, "readout", keep);
  const std::size_t n = topology.num_nodes(), hd = spec.hidden_dim;

  std::vector<std::vector<double>> h(n, std::vector<double>(hd, 0.0));
  std::vector<double> prev(x0.data().begin(), x0.data().end());
  std::vector<double> output_list;
  for (std::size_t t = 0; t < node_features.size(); ++t) {
    const std::size_t p = node_features[t].dim(1);
    std::vector<double> xi_flat;
    for (std::size_t i = 0; i < n; ++i) {
      xi_flat.push_back(prev[i]);
      for (std::size_t c = 0; c < p; ++c) {
        const double v = node_features[t].at(i * p + c);
        xi_flat.push_back(spec.drop_pbl && c == feat::kPblHeight ? 0.0 : v);
      }
    }
    const Tensor<double> xi({n, p + 1}, xi_flat);
    const Tensor<double> zeta =
        bruteforce_spatial(xi, edge_features[t], topology, params, spec.no_export);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xr = row_of(xi, i), zr = row_of(zeta, i);
      const auto x = cat({&xr, &zr});
      const auto hx = cat({&h[i], &x});
      auto z = forward(wz, hx), r = forward(wr, hx);
      for (double& v : z) v = 1.0 / (1.0 + std::exp(-v));
      for (double& v : r) v = 1.0 / (1.0 + std::exp(-v));
      std::vector<double> rh(hd);
      for (std::size_t k = 0; k < hd; ++k) rh[k] = r[k] * h[i][k];
      auto cand = forward(wc, cat({&rh, &x}));
      for (std::size_t k = 0; k < hd; ++k) {
        h[i][k] = (1.0 - z[k]) * h[i][k] + z[k] * std::tanh(cand[k]);
      }
      prev[i] = forward(omega, h[i])[0];
    }
    output_list.insert(output_list.end(), prev.begin(), prev.end());
  }
  return Tensor<double>({node_features.size(), n, 1}, std::move(output_list));
}

}  // namespace airgraph::synth
