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

// Dense row-major tensors and a define-by-run gradient tape.
//
// A Tensor either lives off any tape (a constant) or is a handle to a node on
// exactly one Tape. Every op below records its result on the tape of its
// on-tape operands; off-tape operands are treated as constants. An op whose
// operands are all constants returns a constant. The Tape must outlive every
// tensor recorded on it.

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace airgraph::num {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

template <typename T>
class Tape;

template <typename T>
class Tensor {
 public:
  Tensor();
  Tensor(Shape shape, std::vector<T> data);

  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, T value);
  static Tensor scalar(T value);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_->size(); }

  std::span<const T> data() const { return {data_->data(), data_->size()}; }
  // Copy-on-write access for constants. Throws for tensors on a tape, whose
  // values are frozen once recorded.
  std::span<T> mutable_data();

  T item() const;
  T at(std::size_t flat_index) const { return (*data_)[flat_index]; }

  bool on_tape() const { return tape_ != nullptr; }
  Tape<T>* tape() const { return tape_; }
  std::size_t node() const { return node_; }

  // Same values, off any tape.
  Tensor detach() const;

 private:
  friend class Tape<T>;

  Shape shape_;
  std::shared_ptr<std::vector<T>> data_;
  Tape<T>* tape_ = nullptr;
  std::size_t node_ = 0;
};

template <typename T>
class Tape {
 public:
  using Grad = std::vector<T>;
  // Called once per reachable node during backward. `grads_in` holds one
  // accumulator per operand, null for constant operands. Implementations
  // add (never assign) into the accumulators.
  using BackwardFn =
      std::function<void(std::span<const T> grad_out, std::span<Grad* const> grads_in)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a leaf (typically a parameter) whose gradient backward() reports.
  Tensor<T> watch(const Tensor<T>& value);

  Tensor<T> record(Shape shape, std::vector<T> value,
                   std::initializer_list<const Tensor<T>*> operands, BackwardFn fn);
  Tensor<T> record(Shape shape, std::vector<T> value,
                   const std::vector<const Tensor<T>*>& operands, BackwardFn fn);

  // Gradient of a scalar loss w.r.t. every watched leaf, in watch order.
  // Leaves the loss does not depend on get zero gradients.
  std::vector<Tensor<T>> backward(const Tensor<T>& loss);

  std::size_t size() const { return nodes_.size(); }
  std::size_t num_watched() const { return leaves_.size(); }

 private:
  struct Node {
    std::vector<std::ptrdiff_t> parents;
    BackwardFn backward;
    std::size_t numel = 0;
  };

  std::vector<Node> nodes_;
  std::vector<std::size_t> leaves_;
  std::vector<Shape> leaf_shapes_;
};

// Primitive set. Shapes are checked; violations throw ShapeError naming the
// primitive and the offending shapes.

// [m,k] x [k,n] -> [m,n]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

// Elementwise on equal shapes.
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

// [m,n] + [n], the bias row added to every row.
template <typename T>
Tensor<T> add_bias(const Tensor<T>& a, const Tensor<T>& bias);

// alpha * a + beta
template <typename T>
Tensor<T> affine(const Tensor<T>& a, T alpha, T beta);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a);
template <typename T>
Tensor<T> tanh(const Tensor<T>& a);
template <typename T>
Tensor<T> relu(const Tensor<T>& a);

// Concatenation along the last axis; leading dims must agree.
template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts);
// Concatenation along the first axis; trailing dims must agree.
template <typename T>
Tensor<T> concat_rows(const std::vector<Tensor<T>>& parts);

// Sum / mean of every entry -> scalar.
template <typename T>
Tensor<T> sum(const Tensor<T>& a);
template <typename T>
Tensor<T> mean(const Tensor<T>& a);

// out[index[e], :] += src[e, :], out has `out_rows` rows.
template <typename T>
Tensor<T> scatter_add(const Tensor<T>& src, std::span<const std::size_t> index,
                      std::size_t out_rows);
// out[e, :] = src[index[e], :]
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& src, std::span<const std::size_t> index);
// Rows [begin, end) of the first axis.
template <typename T>
Tensor<T> slice_rows(const Tensor<T>& a, std::size_t begin, std::size_t end);

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape);

}  // namespace airgraph::num
