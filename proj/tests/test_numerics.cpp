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
#include <functional>
#include <random>

#include "airgraph/error.hpp"
#include "airgraph/gradcheck.hpp"
#include "airgraph/optim.hpp"
#include "airgraph/tensor.hpp"
#include "helpers.hpp"

using namespace airgraph;
using num::Tape;
using num::Tensor;
using testing::random_tensor;

namespace {

std::vector<double> values(const Tensor<double>& t) { return {t.data().begin(), t.data().end()}; }

// Scalarizes an op output with fixed random weights so every output entry
// carries a distinct gradient.
Tensor<double> weighted_sum(const Tensor<double>& y, const Tensor<double>& w) {
  return num::sum(num::mul(y, w));
}

double check_op(std::uint64_t seed, const std::vector<Tensor<double>>& inputs,
                const std::function<Tensor<double>(const std::vector<Tensor<double>>&)>& op) {
  std::mt19937_64 rng(seed * 7919 + 1);
  const Tensor<double> probe = op(inputs);
  const Tensor<double> w = random_tensor(rng, probe.shape());
  const auto f = [&](const std::vector<Tensor<double>>& p) { return weighted_sum(op(p), w); };
  return num::grad_check(f, inputs).max_relative_error;
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("relu zeroes negatives") {
  const Tensor<double> x({3}, {-1.0, 0.0, 2.0});
  CHECK(values(num::relu(x)) == std::vector<double>{0.0, 0.0, 2.0});
}

TEST_CASE("concat along the last axis") {
  const auto a = Tensor<double>::filled({2, 3}, 1.0);
  const auto b = Tensor<double>::filled({2, 1}, 2.0);
  const auto c = num::concat<double>({a, b});
  CHECK(c.shape() == num::Shape{2, 4});
  CHECK(values(c) == std::vector<double>{1, 1, 1, 2, 1, 1, 1, 2});
}

TEST_CASE("scatter_add sums rows that share an index") {
  const Tensor<double> src({3, 1}, {1.0, 2.0, 3.0});
  const std::vector<std::size_t> index{0, 0, 1};
  const auto out = num::scatter_add(src, std::span<const std::size_t>(index), 2);
  CHECK(values(out) == std::vector<double>{3.0, 3.0});
}

TEST_CASE("primitive shape errors name the op and both shapes") {
  const auto a = Tensor<double>::zeros({2, 3});
  const auto b = Tensor<double>::zeros({2, 3});
  try {
    (void)num::matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("(2,3)") != std::string::npos);
  }
  CHECK_THROWS_AS(num::add(a, Tensor<double>::zeros({3, 2})), ShapeError);
  CHECK_THROWS_AS(num::concat<double>({a, Tensor<double>::zeros({3, 1})}), ShapeError);
  const std::vector<std::size_t> bad{0, 5};
  CHECK_THROWS_AS(num::scatter_add(a, std::span<const std::size_t>(bad), 2), ShapeError);
  CHECK_THROWS_AS(num::gather_rows(a, std::span<const std::size_t>(bad)), ShapeError);
}

TEST_CASE("ops mix tape and constant operands") {
  Tape<double> tape;
  const auto w = tape.watch(Tensor<double>({2}, {1.0, 2.0}));
  const Tensor<double> c({2}, {3.0, 4.0});
  const auto y = num::mul(w, c);
  CHECK(y.on_tape());
  CHECK_FALSE(num::mul(c, c).on_tape());
  const auto g = tape.backward(num::sum(y));
  CHECK(values(g[0]) == std::vector<double>{3.0, 4.0});
}

TEST_CASE("backward of sum(w*w) is 2w") {
  Tape<double> tape;
  const auto w = tape.watch(Tensor<double>({2}, {1.0, 2.0}));
  const auto g = tape.backward(num::sum(num::mul(w, w)));
  CHECK(values(g[0]) == std::vector<double>{2.0, 4.0});
}

TEST_CASE("sigmoid slope at zero is a quarter") {
  Tape<double> tape;
  const auto w = tape.watch(Tensor<double>({1}, {0.0}));
  const auto g = tape.backward(num::sum(num::sigmoid(w)));
  CHECK(g[0].at(0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("backward rejects non-scalar and off-tape losses") {
  Tape<double> tape;
  const auto w = tape.watch(Tensor<double>({2}, {1.0, 2.0}));
  CHECK_THROWS_AS(tape.backward(num::mul(w, w)), ShapeError);
  CHECK_THROWS_AS(tape.backward(Tensor<double>::scalar(1.0)), Error);
  Tape<double> other;
  const auto v = other.watch(Tensor<double>::scalar(2.0));
  CHECK_THROWS_AS(tape.backward(num::sum(v)), Error);
}

TEST_CASE("unreachable parameters get zero gradients") {
  Tape<double> tape;
  const auto a = tape.watch(Tensor<double>({2}, {1.0, 2.0}));
  const auto b = tape.watch(Tensor<double>({3}, {1.0, 2.0, 3.0}));
  const auto g = tape.backward(num::sum(a));
  CHECK(values(g[1]) == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("two-layer perceptron gradient matches finite differences") {
  std::mt19937_64 rng(11);
  const auto x = random_tensor(rng, {5, 4});
  const std::vector<Tensor<double>> params = {random_tensor(rng, {4, 6}), random_tensor(rng, {6}),
                                              random_tensor(rng, {6, 2}), random_tensor(rng, {2})};
  const auto f = [&](const std::vector<Tensor<double>>& p) {
    const auto h = num::sigmoid(num::add_bias(num::matmul(x, p[0]), p[1]));
    const auto y = num::add_bias(num::matmul(h, p[2]), p[3]);
    return num::mean(num::mul(y, y));
  };
  CHECK(num::grad_check(f, params).max_relative_error < 1e-5);
}

TEST_CASE("grad_check on a linear map is exact to rounding") {
  std::mt19937_64 rng(3);
  const auto x = random_tensor(rng, {3, 4});
  const auto c = random_tensor(rng, {3, 2});
  const auto f = [&](const std::vector<Tensor<double>>& p) {
    return num::sum(num::mul(num::matmul(x, p[0]), c));
  };
  CHECK(num::grad_check(f, {random_tensor(rng, {4, 2})}).max_relative_error < 1e-9);
}

TEST_CASE("grad_check of a constant function reports zero") {
  const auto f = [](const std::vector<Tensor<double>>&) { return Tensor<double>::scalar(4.0); };
  const auto r = num::grad_check(f, {Tensor<double>({2}, {1.0, 2.0})});
  CHECK(r.max_relative_error == 0.0);
  CHECK(r.entries_checked == 2);
}

TEST_CASE("grad_check propagates NaN") {
  const auto f = [](const std::vector<Tensor<double>>& p) {
    return num::sum(num::affine(p[0], std::nan(""), 0.0));
  };
  CHECK(std::isnan(num::grad_check(f, {Tensor<double>({1}, {1.0})}).max_relative_error));
}

TEST_CASE("every primitive passes a gradient check over 100 seeds") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t m = testing::uniform_int(rng, 1, 5), k = testing::uniform_int(rng, 1, 5),
                      n = testing::uniform_int(rng, 1, 5);
    const auto a = random_tensor(rng, {m, k});
    const auto a2 = random_tensor(rng, {m, k});
    const auto b = random_tensor(rng, {k, n});
    const auto bias = random_tensor(rng, {k});
    std::vector<std::size_t> idx(testing::uniform_int(rng, 1, 6));
    for (auto& i : idx) i = testing::uniform_int(rng, 0, m - 1);
    const std::size_t lo = testing::uniform_int(rng, 0, m - 1);
    const std::size_t hi = testing::uniform_int(rng, lo + 1, m);

    using V = std::vector<Tensor<double>>;
    const std::vector<std::pair<const char*, double>> checks = {
        {"matmul", check_op(seed, {a, b}, [](const V& p) { return num::matmul(p[0], p[1]); })},
        {"add", check_op(seed, {a, a2}, [](const V& p) { return num::add(p[0], p[1]); })},
        {"sub", check_op(seed, {a, a2}, [](const V& p) { return num::sub(p[0], p[1]); })},
        {"mul", check_op(seed, {a, a2}, [](const V& p) { return num::mul(p[0], p[1]); })},
        {"add_bias",
         check_op(seed, {a, bias}, [](const V& p) { return num::add_bias(p[0], p[1]); })},
        {"affine", check_op(seed, {a}, [](const V& p) { return num::affine(p[0], -1.5, 0.25); })},
        {"sigmoid", check_op(seed, {a}, [](const V& p) { return num::sigmoid(p[0]); })},
        {"tanh", check_op(seed, {a}, [](const V& p) { return num::tanh(p[0]); })},
        {"relu", check_op(seed, {testing::away_from_zero(rng, {m, k})},
                          [](const V& p) { return num::relu(p[0]); })},
        {"concat", check_op(seed, {a, random_tensor(rng, {m, n})},
                            [](const V& p) { return num::concat<double>({p[0], p[1]}); })},
        {"concat_rows", check_op(seed, {a, random_tensor(rng, {n, k})},
                                 [](const V& p) { return num::concat_rows<double>({p[0], p[1]}); })},
        {"sum", check_op(seed, {a}, [](const V& p) { return num::sum(p[0]); })},
        {"mean", check_op(seed, {a}, [](const V& p) { return num::mean(p[0]); })},
        {"scatter_add", check_op(seed, {random_tensor(rng, {idx.size(), k})},
                                 [&](const V& p) {
                                   return num::scatter_add(p[0], std::span<const std::size_t>(idx), m);
                                 })},
        {"gather_rows", check_op(seed, {a},
                                 [&](const V& p) {
                                   return num::gather_rows(p[0], std::span<const std::size_t>(idx));
                                 })},
        {"slice_rows", check_op(seed, {a}, [&](const V& p) { return num::slice_rows(p[0], lo, hi); })},
        {"reshape", check_op(seed, {a}, [&](const V& p) { return num::reshape(p[0], {k, m}); })},
    };
    for (const auto& [name, err] : checks) {
      INFO("primitive " << name << " seed " << seed);
      CHECK(err < 1e-5);
      worst = std::max(worst, err);
    }
  }
  MESSAGE("worst relative error over all primitives: " << worst);
}

TEST_CASE("scatter_add is linear") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = testing::uniform_int(rng, 1, 8);
    const auto a = random_tensor(rng, {rows, 3});
    const auto b = random_tensor(rng, {rows, 3});
    std::vector<std::size_t> idx(rows);
    for (auto& i : idx) i = testing::uniform_int(rng, 0, 3);
    const std::span<const std::size_t> s(idx);
    const auto lhs = num::scatter_add(num::add(a, b), s, 4);
    const auto rhs = num::add(num::scatter_add(a, s, 4), num::scatter_add(b, s, 4));
    CHECK(testing::max_abs_diff(lhs, rhs) < 1e-14);
  }
}

TEST_CASE("backward is bit-identical across repeated runs") {
  const auto run = [] {
    std::mt19937_64 rng(99);
    const auto x = random_tensor(rng, {6, 3});
    Tape<double> tape;
    const auto w = tape.watch(random_tensor(rng, {3, 4}));
    const auto y = num::tanh(num::matmul(x, w));
    return values(tape.backward(num::mean(num::mul(y, y)))[0]);
  };
  CHECK(run() == run());
}

TEST_CASE("rmsprop hand example") {
  std::vector<Tensor<double>> p{Tensor<double>({1}, {1.0})};
  const std::vector<Tensor<double>> g{Tensor<double>({1}, {1.0})};
  num::RmspropState<double> state;
  num::rmsprop_step<double>(p, g, state, {0.1, 0.9, 1e-8});
  CHECK(state.acc[0][0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(p[0].at(0) == doctest::Approx(1.0 - 0.1 / (std::sqrt(0.1) + 1e-8)).epsilon(1e-15));
  CHECK(p[0].at(0) == doctest::Approx(0.6838).epsilon(1e-4));
  CHECK(state.step == 1);
}

TEST_CASE("rmsprop with zero gradient leaves parameters and decays the accumulator") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Tensor<double>> p{random_tensor(rng, {3, 2})};
    const auto before = values(p[0]);
    num::RmspropState<double> state;
    state.acc = {{0.5, 0.1, 0.0, 2.0, 1e-3, 7.0}};
    const std::vector<Tensor<double>> g{Tensor<double>::zeros({3, 2})};
    num::rmsprop_step<double>(p, g, state, {});
    CHECK(values(p[0]) == before);
    CHECK(state.acc[0][0] == doctest::Approx(0.5 * 0.99));
    for (double a : state.acc[0]) CHECK(a >= 0.0);
  }
}

TEST_CASE("rmsprop steps shrink under a constant gradient") {
  std::vector<Tensor<double>> p{Tensor<double>({1}, {0.0})};
  const std::vector<Tensor<double>> g{Tensor<double>({1}, {2.0})};
  num::RmspropState<double> state;
  num::rmsprop_step<double>(p, g, state, {0.01, 0.9, 1e-8});
  const double d1 = std::abs(p[0].at(0));
  num::rmsprop_step<double>(p, g, state, {0.01, 0.9, 1e-8});
  const double d2 = std::abs(p[0].at(0)) - d1;
  CHECK(d2 < d1);
}

TEST_CASE("rmsprop rejects misaligned shapes") {
  std::vector<Tensor<double>> p{Tensor<double>::zeros({2})};
  const std::vector<Tensor<double>> g{Tensor<double>::zeros({3})};
  num::RmspropState<double> state;
  CHECK_THROWS_AS(num::rmsprop_step<double>(p, g, state, {}), ShapeError);
}

TEST_CASE("mse loss examples") {
  const Tensor<double> truth({2, 2}, {1.0, 2.0, 3.0, 4.0});
  CHECK(num::mse_loss(truth, truth).item() == 0.0);
  CHECK(num::mse_loss(num::affine(truth, 1.0, 1.0), truth).item() == doctest::Approx(1.0));
  const Tensor<double> pred({2, 2}, {2.0, 1.0, 5.0, 4.0});
  CHECK(num::mse_loss(pred, truth).item() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(num::mse_loss(pred, Tensor<double>::zeros({4})), ShapeError);
}

}  // TEST_SUITE
