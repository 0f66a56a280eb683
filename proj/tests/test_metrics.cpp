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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "airgraph/error.hpp"
#include "airgraph/metrics.hpp"

using namespace airgraph;
using metrics::ConfusionCounts;
using metrics::ForecastSet;

TEST_SUITE("metrics") {

TEST_CASE("rmse and mae examples") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const auto same = metrics::rmse_mae(a, a);
  CHECK(same.rmse == 0.0);
  CHECK(same.mae == 0.0);
  const auto r = metrics::rmse_mae(std::vector<double>{3.0, -4.0}, std::vector<double>{0.0, 0.0});
  CHECK(r.rmse == std::sqrt(12.5));
  CHECK(r.mae == 3.5);
  CHECK_THROWS_AS(metrics::rmse_mae(a, std::vector<double>{1.0}), ShapeError);
  CHECK_THROWS_AS(metrics::rmse_mae(std::vector<double>{}, std::vector<double>{}), ShapeError);
}

TEST_CASE("rmse dominates mae and follows the residual") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(50.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(17), t(17), shifted(17);
    for (auto& v : p) v = n(rng);
    for (auto& v : t) v = n(rng);
    const double c = n(rng) - 50.0;
    std::transform(p.begin(), p.end(), shifted.begin(), [c](double v) { return v + c; });
    const auto r = metrics::rmse_mae(p, t);
    CHECK(r.rmse >= r.mae);
    double sq = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < 17; ++i) {
      sq += std::pow(p[i] + c - t[i], 2);
      ab += std::abs(p[i] + c - t[i]);
    }
    const auto s = metrics::rmse_mae(shifted, t);
    CHECK(s.rmse == doctest::Approx(std::sqrt(sq / 17.0)).epsilon(1e-12));
    CHECK(s.mae == doctest::Approx(ab / 17.0).epsilon(1e-12));
  }
}

TEST_CASE("binarization examples") {
  const std::vector<double> x{80.0, 70.0};
  CHECK(metrics::binarize_and_count(x, x) == ConfusionCounts{1, 0, 0, 1});
  CHECK(metrics::binarize_and_count(std::vector<double>{80.0, 80.0}, std::vector<double>{70.0, 80.0}) ==
        ConfusionCounts{1, 0, 1, 0});
  CHECK(metrics::binarize_and_count(std::vector<double>{75.0}, std::vector<double>{75.0}) ==
        ConfusionCounts{0, 0, 0, 1});
  CHECK(metrics::binarize_and_count(std::vector<double>{75.0}, std::vector<double>{76.0}) ==
        ConfusionCounts{0, 1, 0, 0});
  CHECK(metrics::binarize_and_count(std::vector<double>{20.0}, std::vector<double>{10.0}, 15.0) ==
        ConfusionCounts{0, 0, 1, 0});
}

TEST_CASE("categorical score examples") {
  auto s = metrics::csi_pod_far({1, 0, 0, 0});
  CHECK(s.csi == 1.0);
  CHECK(s.pod == 1.0);
  CHECK(s.far == 0.0);
  s = metrics::csi_pod_far({0, 1, 1, 0});
  CHECK(s.csi == 0.0);
  CHECK(s.pod == 0.0);
  CHECK(s.far == 1.0);
  s = metrics::csi_pod_far({2, 1, 1, 5});
  CHECK(s.csi == 0.5);
  CHECK(s.pod == 2.0 / 3.0);
  CHECK(s.far == 1.0 / 3.0);
  CHECK(s.degenerate.empty());
}

TEST_CASE("zero denominators use recorded conventions") {
  const auto s = metrics::csi_pod_far({0, 0, 0, 9});
  CHECK(s.csi == 1.0);
  CHECK(s.pod == 1.0);
  CHECK(s.far == 0.0);
  CHECK(s.degenerate.size() == 3);
  const auto only_alarms = metrics::csi_pod_far({0, 0, 2, 1});
  CHECK(only_alarms.pod == 1.0);
  CHECK(only_alarms.far == 1.0);
  CHECK(only_alarms.csi == 0.0);
}

TEST_CASE("csi is bounded by pod and 1 - far") {
  std::mt19937_64 rng(10000);
  std::uniform_int_distribution<std::uint64_t> u(0, 1000);
  for (int i = 0; i < 10000; ++i) {
    const ConfusionCounts c{u(rng) + 1, u(rng) + 1, u(rng) + 1, u(rng)};
    const auto s = metrics::csi_pod_far(c);
    CHECK(s.csi <= s.pod);
    CHECK(s.csi <= 1.0 - s.far + 1e-15);
    CHECK(s.csi >= 0.0);
    CHECK(s.far <= 1.0);
  }
}

TEST_CASE("aggregation examples") {
  SUBCASE("single cell equals direct metrics") {
    ForecastSet fs{4, 1, 1, {80, 60, 90, 10}, {70, 65, 100, 5}};
    const auto r = metrics::aggregate_report(fs);
    const auto direct = metrics::rmse_mae(fs.pred, fs.truth);
    const auto cat = metrics::csi_pod_far(metrics::binarize_and_count(fs.pred, fs.truth));
    CHECK(r.rmse == direct.rmse);
    CHECK(r.mae == direct.mae);
    CHECK(r.csi == cat.csi);
    CHECK(r.pod == cat.pod);
    CHECK(r.far == cat.far);
  }
  SUBCASE("cell rmse is averaged uniformly") {
    // City 0 is off by 10 everywhere, city 1 by 20.
    ForecastSet fs{2, 1, 2, {10, 20, 10, 20}, {0, 0, 0, 0}};
    CHECK(metrics::aggregate_report(fs).rmse == 15.0);
  }
  SUBCASE("the 3 h leadtime uses step one only") {
    ForecastSet fs{1, 4, 1, {1, 100, 100, 100}, {0, 0, 0, 0}};
    const auto r = metrics::aggregate_report(fs);
    REQUIRE_FALSE(r.per_leadtime.empty());
    CHECK(r.per_leadtime[0].leadtime_h == 3);
    CHECK(r.per_leadtime[0].rmse == 1.0);
    CHECK(r.per_leadtime[1].leadtime_h == 12);
    CHECK(r.per_leadtime[1].rmse == 100.0);
    CHECK(r.per_leadtime.size() == 2);
  }
  CHECK_THROWS_AS(metrics::aggregate_report(ForecastSet{2, 1, 2, {1, 2, 3}, {1, 2, 3, 4}}), ShapeError);
}

TEST_CASE("pooled and per-cell categorical scores") {
  // Cell A: one hit. Cell B: one miss and one correct negative over two windows.
  ForecastSet fs{2, 1, 2, {80, 10, 80, 10}, {90, 90, 90, 5}};
  const auto pooled = metrics::aggregate_report(fs, false);
  CHECK(pooled.counts == ConfusionCounts{2, 1, 0, 1});
  CHECK(pooled.pod == 2.0 / 3.0);
  const auto cells = metrics::aggregate_report(fs, true);
  CHECK(cells.per_cell_categorical);
  CHECK(cells.pod == doctest::Approx((1.0 + 0.0) / 2.0));
}

TEST_CASE("metrics are invariant to relabeling cities") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  const std::size_t W = 6, S = 24, C = 7;
  ForecastSet fs{W, S, C, std::vector<double>(W * S * C), std::vector<double>(W * S * C)};
  for (auto& v : fs.pred) v = u(rng);
  for (auto& v : fs.truth) v = u(rng);
  std::vector<std::size_t> perm(C);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  ForecastSet moved = fs;
  for (std::size_t w = 0; w < W; ++w) {
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t c = 0; c < C; ++c) {
        moved.pred[(w * S + s) * C + perm[c]] = fs.pred_at(w, s, c);
        moved.truth[(w * S + s) * C + perm[c]] = fs.truth_at(w, s, c);
      }
    }
  }
  for (bool per_cell : {false, true}) {
    const auto a = metrics::aggregate_report(fs, per_cell), b = metrics::aggregate_report(moved, per_cell);
    CHECK(a.rmse == doctest::Approx(b.rmse).epsilon(1e-13));
    CHECK(a.mae == doctest::Approx(b.mae).epsilon(1e-13));
    CHECK(a.csi == doctest::Approx(b.csi).epsilon(1e-13));
    CHECK(a.pod == doctest::Approx(b.pod).epsilon(1e-13));
    CHECK(a.far == doctest::Approx(b.far).epsilon(1e-13));
  }
  CHECK(metrics::aggregate_report(fs).per_leadtime.size() == metrics::report_leadtimes().size());
}

}  // TEST_SUITE
