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

#include "airgraph/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "airgraph/error.hpp"

namespace airgraph::num {

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------- Tensor

template <typename T>
Tensor<T>::Tensor() : shape_{0}, data_(std::make_shared<std::vector<T>>()) {}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::make_shared<std::vector<T>>(std::move(data))) {
  if (numel(shape_) != data_->size()) {
    throw ShapeError("tensor: shape " + shape_str(shape_) + " does not hold " +
                     std::to_string(data_->size()) + " values");
  }
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape) {
  return filled(std::move(shape), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::filled(Shape shape, T value) {
  const std::size_t n = numel(shape);
  return Tensor(std::move(shape), std::vector<T>(n, value));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
  return Tensor(Shape{}, std::vector<T>{value});
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError("tensor: axis " + std::to_string(axis) + " out of range for shape " +
                     shape_str(shape_));
  }
  return shape_[axis];
}

template <typename T>
std::span<T> Tensor<T>::mutable_data() {
  if (tape_) throw Error("tensor: values on a tape are read-only");
  if (data_.use_count() > 1) data_ = std::make_shared<std::vector<T>>(*data_);
  return {data_->data(), data_->size()};
}

template <typename T>
T Tensor<T>::item() const {
  if (data_->size() != 1) {
    throw ShapeError("item: expected one value, shape is " + shape_str(shape_));
  }
  return (*data_)[0];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  Tensor out = *this;
  out.tape_ = nullptr;
  out.node_ = 0;
  return out;
}

// ------------------------------------------------------------------ Tape

template <typename T>
Tensor<T> Tape<T>::watch(const Tensor<T>& value) {
  if (value.on_tape()) throw Error("watch: tensor is already on a tape");
  Tensor<T> out = value;
  out.tape_ = this;
  out.node_ = nodes_.size();
  nodes_.push_back(Node{{}, nullptr, value.size()});
  leaves_.push_back(out.node_);
  leaf_shapes_.push_back(value.shape());
  return out;
}

template <typename T>
Tensor<T> Tape<T>::record(Shape shape, std::vector<T> value,
                          std::initializer_list<const Tensor<T>*> operands, BackwardFn fn) {
  return record(std::move(shape), std::move(value),
                std::vector<const Tensor<T>*>(operands), std::move(fn));
}

template <typename T>
Tensor<T> Tape<T>::record(Shape shape, std::vector<T> value,
                          const std::vector<const Tensor<T>*>& operands, BackwardFn fn) {
  Node node;
  node.numel = value.size();
  node.backward = std::move(fn);
  node.parents.reserve(operands.size());
  for (const Tensor<T>* op : operands) {
    if (op->tape_ == this) {
      node.parents.push_back(static_cast<std::ptrdiff_t>(op->node_));
    } else if (op->tape_ == nullptr) {
      node.parents.push_back(-1);
    } else {
      throw Error("tape: operands belong to different tapes");
    }
  }
  Tensor<T> out(std::move(shape), std::move(value));
  out.tape_ = this;
  out.node_ = nodes_.size();
  nodes_.push_back(std::move(node));
  return out;
}

template <typename T>
std::vector<Tensor<T>> Tape<T>::backward(const Tensor<T>& loss) {
  if (loss.tape_ != this) throw Error("backward: loss is not on this tape");
  if (loss.size() != 1) {
    throw ShapeError("backward: loss must be scalar, shape is " + shape_str(loss.shape()));
  }
  std::vector<Grad> grads(nodes_.size());
  grads[loss.node_].assign(1, T(1));

  std::vector<Grad*> slots;
  for (std::size_t k = loss.node_ + 1; k-- > 0;) {
    Node& node = nodes_[k];
    if (grads[k].empty() || !node.backward) continue;
    slots.assign(node.parents.size(), nullptr);
    bool any = false;
    for (std::size_t p = 0; p < node.parents.size(); ++p) {
      const std::ptrdiff_t parent = node.parents[p];
      if (parent < 0) continue;
      Grad& g = grads[static_cast<std::size_t>(parent)];
      if (g.empty()) g.assign(nodes_[static_cast<std::size_t>(parent)].numel, T(0));
      slots[p] = &g;
      any = true;
    }
    if (any) node.backward(grads[k], slots);
  }

  std::vector<Tensor<T>> out;
  out.reserve(leaves_.size());
  for (std::size_t l = 0; l < leaves_.size(); ++l) {
    Grad& g = grads[leaves_[l]];
    if (g.empty()) g.assign(numel(leaf_shapes_[l]), T(0));
    out.emplace_back(leaf_shapes_[l], std::move(g));
  }
  return out;
}

// ------------------------------------------------------------------- ops

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ConstMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using MutMap = Eigen::Map<RowMat<T>>;

template <typename T>
Tape<T>* common_tape(const std::vector<const Tensor<T>*>& operands) {
  Tape<T>* tape = nullptr;
  for (const Tensor<T>* op : operands) {
    if (!op->on_tape()) continue;
    if (tape && tape != op->tape()) throw Error("tape: operands belong to different tapes");
    tape = op->tape();
  }
  return tape;
}

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> value,
                      const std::vector<const Tensor<T>*>& operands,
                      typename Tape<T>::BackwardFn fn) {
  Tape<T>* tape = common_tape(operands);
  if (!tape) return Tensor<T>(std::move(shape), std::move(value));
  return tape->record(std::move(shape), std::move(value), operands, std::move(fn));
}

[[noreturn]] void shape_mismatch(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                   shape_str(b));
}

void require_rank2(const char* op, const Shape& s) {
  if (s.size() != 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got shape " + shape_str(s));
  }
}

template <typename T, typename Fwd, typename Deriv>
Tensor<T> unary(const Tensor<T>& a, Fwd fwd, Deriv deriv) {
  std::vector<T> out(a.size());
  const auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(x[i]);
  auto y = std::make_shared<std::vector<T>>(out);
  return make_result<T>(a.shape(), std::move(out), {&a},
                        [a, y, deriv](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
                          auto& ga = *in[0];
                          const auto x = a.data();
                          for (std::size_t i = 0; i < ga.size(); ++i) {
                            ga[i] += g[i] * deriv(x[i], (*y)[i]);
                          }
                        });
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank2("matmul", a.shape());
  require_rank2("matmul", b.shape());
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) shape_mismatch("matmul", a.shape(), b.shape());
  std::vector<T> out(m * n);
  MutMap<T>(out.data(), m, n).noalias() =
      ConstMap<T>(a.data().data(), m, k) * ConstMap<T>(b.data().data(), k, n);
  return make_result<T>(
      {m, n}, std::move(out), {&a, &b},
      [a, b, m, k, n](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
        ConstMap<T> G(g.data(), m, n);
        if (in[0]) {
          MutMap<T>(in[0]->data(), m, k).noalias() +=
              G * ConstMap<T>(b.data().data(), k, n).transpose();
        }
        if (in[1]) {
          MutMap<T>(in[1]->data(), k, n).noalias() +=
              ConstMap<T>(a.data().data(), m, k).transpose() * G;
        }
      });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) shape_mismatch("add", a.shape(), b.shape());
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return make_result<T>(a.shape(), std::move(out), {&a, &b},
                        [](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
                          for (auto* gi : in) {
                            if (!gi) continue;
                            for (std::size_t i = 0; i < g.size(); ++i) (*gi)[i] += g[i];
                          }
                        });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) shape_mismatch("sub", a.shape(), b.shape());
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) - b.at(i);
  return make_result<T>(a.shape(), std::move(out), {&a, &b},
                        [](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
                          if (in[0]) {
                            for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i];
                          }
                          if (in[1]) {
                            for (std::size_t i = 0; i < g.size(); ++i) (*in[1])[i] -= g[i];
                          }
                        });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) shape_mismatch("mul", a.shape(), b.shape());
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  return make_result<T>(a.shape(), std::move(out), {&a, &b},
                        [a, b](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
                          if (in[0]) {
                            for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i] * b.at(i);
                          }
                          if (in[1]) {
                            for (std::size_t i = 0; i < g.size(); ++i) (*in[1])[i] += g[i] * a.at(i);
                          }
                        });
}

template <typename T>
Tensor<T> add_bias(const Tensor<T>& a, const Tensor<T>& bias) {
  require_rank2("add_bias", a.shape());
  const std::size_t m = a.dim(0), n = a.dim(1);
  if (bias.rank() != 1 || bias.dim(0) != n) shape_mismatch("add_bias", a.shape(), bias.shape());
  std::vector<T> out(a.size());
  const auto x = a.data();
  const auto c = bias.data();
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = x[r * n + j] + c[j];
  }
  return make_result<T>(
      a.shape(), std::move(out), {&a, &bias},
      [m, n](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
        if (in[0]) {
          for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i];
        }
        if (in[1]) {
          for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t j = 0; j < n; ++j) (*in[1])[j] += g[r * n + j];
          }
        }
      });
}

template <typename T>
Tensor<T> affine(const Tensor<T>& a, T alpha, T beta) {
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * a.at(i) + beta;
  return make_result<T>(a.shape(), std::move(out), {&a},
                        [alpha](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
                          for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += alpha * g[i];
                        });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return unary(
      a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& a) {
  return unary(a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return x > T(0) ? x : T(0); },
      [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  const Shape& first = parts.front().shape();
  if (first.empty()) throw ShapeError("concat: scalar operand");
  Shape lead(first.begin(), first.end() - 1);
  const std::size_t rows = numel(lead);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != first.size() || !std::equal(lead.begin(), lead.end(), s.begin())) {
      shape_mismatch("concat", first, s);
    }
    widths.push_back(s.back());
    total += s.back();
  }
  std::vector<T> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto x = parts[p].data();
    const std::size_t w = widths[p];
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(r * w), w,
                  out.begin() + static_cast<std::ptrdiff_t>(r * total + offset));
    }
    offset += w;
  }
  Shape shape = lead;
  shape.push_back(total);
  std::vector<const Tensor<T>*> ops;
  for (const auto& p : parts) ops.push_back(&p);
  return make_result<T>(
      std::move(shape), std::move(out), ops,
      [widths, rows, total](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
        std::size_t off = 0;
        for (std::size_t p = 0; p < widths.size(); ++p) {
          const std::size_t w = widths[p];
          if (in[p]) {
            auto& gp = *in[p];
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t j = 0; j < w; ++j) gp[r * w + j] += g[r * total + off + j];
            }
          }
          off += w;
        }
      });
}

template <typename T>
Tensor<T> concat_rows(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  const Shape& first = parts.front().shape();
  if (first.empty()) throw ShapeError("concat_rows: scalar operand");
  std::vector<std::size_t> sizes;
  std::size_t rows = 0;
  std::vector<T> out;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != first.size() || !std::equal(first.begin() + 1, first.end(), s.begin() + 1)) {
      shape_mismatch("concat_rows", first, s);
    }
    rows += s[0];
    sizes.push_back(p.size());
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  Shape shape = first;
  shape[0] = rows;
  std::vector<const Tensor<T>*> ops;
  for (const auto& p : parts) ops.push_back(&p);
  return make_result<T>(
      std::move(shape), std::move(out), ops,
      [sizes](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
        std::size_t off = 0;
        for (std::size_t p = 0; p < sizes.size(); ++p) {
          if (in[p]) {
            for (std::size_t i = 0; i < sizes[p]; ++i) (*in[p])[i] += g[off + i];
          }
          off += sizes[p];
        }
      });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = T(0);
  for (T v : a.data()) total += v;
  return make_result<T>({}, {total}, {&a},
                        [](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
                          for (auto& v : *in[0]) v += g[0];
                        });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  if (a.size() == 0) throw ShapeError("mean: empty tensor");
  return affine(sum(a), T(1) / static_cast<T>(a.size()), T(0));
}

template <typename T>
Tensor<T> scatter_add(const Tensor<T>& src, std::span<const std::size_t> index,
                      std::size_t out_rows) {
  require_rank2("scatter_add", src.shape());
  const std::size_t e = src.dim(0), f = src.dim(1);
  if (index.size() != e) {
    throw ShapeError("scatter_add: index length " + std::to_string(index.size()) +
                     " does not match source shape " + shape_str(src.shape()));
  }
  std::vector<T> out(out_rows * f, T(0));
  const auto x = src.data();
  for (std::size_t r = 0; r < e; ++r) {
    if (index[r] >= out_rows) {
      throw ShapeError("scatter_add: index " + std::to_string(index[r]) + " out of range for " +
                       std::to_string(out_rows) + " output rows");
    }
    for (std::size_t j = 0; j < f; ++j) out[index[r] * f + j] += x[r * f + j];
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return make_result<T>(
      {out_rows, f}, std::move(out), {&src},
      [idx = std::move(idx), f](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
        auto& gs = *in[0];
        for (std::size_t r = 0; r < idx.size(); ++r) {
          for (std::size_t j = 0; j < f; ++j) gs[r * f + j] += g[idx[r] * f + j];
        }
      });
}

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& src, std::span<const std::size_t> index) {
  require_rank2("gather_rows", src.shape());
  const std::size_t n = src.dim(0), f = src.dim(1);
  std::vector<T> out(index.size() * f);
  const auto x = src.data();
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= n) {
      throw ShapeError("gather_rows: index " + std::to_string(index[r]) + " out of range for shape " +
                       shape_str(src.shape()));
    }
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(index[r] * f), f,
                out.begin() + static_cast<std::ptrdiff_t>(r * f));
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return make_result<T>(
      {index.size(), f}, std::move(out), {&src},
      [idx = std::move(idx), f](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
        auto& gs = *in[0];
        for (std::size_t r = 0; r < idx.size(); ++r) {
          for (std::size_t j = 0; j < f; ++j) gs[idx[r] * f + j] += g[r * f + j];
        }
      });
}

template <typename T>
Tensor<T> slice_rows(const Tensor<T>& a, std::size_t begin, std::size_t end) {
  if (a.rank() == 0 || begin > end || end > a.dim(0)) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") invalid for shape " + shape_str(a.shape()));
  }
  const std::size_t stride = a.dim(0) ? a.size() / a.dim(0) : 0;
  std::vector<T> out(a.data().begin() + static_cast<std::ptrdiff_t>(begin * stride),
                     a.data().begin() + static_cast<std::ptrdiff_t>(end * stride));
  Shape shape = a.shape();
  shape[0] = end - begin;
  const std::size_t off = begin * stride;
  return make_result<T>(std::move(shape), std::move(out), {&a},
                        [off](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
                          for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[off + i] += g[i];
                        });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (numel(shape) != a.size()) shape_mismatch("reshape", a.shape(), shape);
  std::vector<T> out(a.data().begin(), a.data().end());
  return make_result<T>(std::move(shape), std::move(out), {&a},
                        [](std::span<const T> g, std::span<typename Tape<T>::Grad* const> in) {
                          for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i];
                        });
}

#define AIRGRAPH_INSTANTIATE(T)                                                          \
  template class Tensor<T>;                                                              \
  template class Tape<T>;                                                                \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                         \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> add_bias(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> affine(const Tensor<T>&, T, T);                                     \
  template Tensor<T> sigmoid(const Tensor<T>&);                                          \
  template Tensor<T> tanh(const Tensor<T>&);                                             \
  template Tensor<T> relu(const Tensor<T>&);                                             \
  template Tensor<T> concat(const std::vector<Tensor<T>>&);                              \
  template Tensor<T> concat_rows(const std::vector<Tensor<T>>&);                         \
  template Tensor<T> sum(const Tensor<T>&);                                              \
  template Tensor<T> mean(const Tensor<T>&);                                             \
  template Tensor<T> scatter_add(const Tensor<T>&, std::span<const std::size_t>, std::size_t); \
  template Tensor<T> gather_rows(const Tensor<T>&, std::span<const std::size_t>);        \
  template Tensor<T> slice_rows(const Tensor<T>&, std::size_t, std::size_t);             \
  template Tensor<T> reshape(const Tensor<T>&, Shape);

AIRGRAPH_INSTANTIATE(float)
AIRGRAPH_INSTANTIATE(double)

#undef AIRGRAPH_INSTANTIATE

}  // namespace airgraph::num
