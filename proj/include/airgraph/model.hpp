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

// Forecasting networks. All models run in standardized space and share the
// rollout contract: given the observed concentration x0 [N,1] and T steps of
// node features P^t [N,p] (plus edge features Q^t [M,q] for the graph model),
// produce T predictions stacked as [T, N, 1].
//
// Batching is done by stacking B copies of the graph into one disjoint graph
// (EdgeIndex with num_graphs = B); the per-node networks never notice.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airgraph/geograph.hpp"
#include "airgraph/tensor.hpp"

namespace airgraph::model {

enum class ModelKind { kPm25Gnn, kMlp, kGru, kLstm, kNodesFcGru };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

enum class Precision { kFloat32, kFloat64 };

std::string_view to_string(Precision p);
Precision parse_precision(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::kPm25Gnn;
  std::size_t edge_hidden = 32;  // width of the edge MLP's hidden layer
  std::size_t edge_dim = 32;     // edge message width
  std::size_t spatial_dim = 32;  // aggregated spatial state width
  std::size_t hidden_dim = 64;   // recurrent state width
  std::size_t mlp_hidden = 32;   // hidden width of the MLP baseline
  bool drop_pbl = false;
  bool no_export = false;
  std::uint64_t seed = 0;

  // Throws ConfigError: zero widths, or ablation flags on a baseline.
  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

struct FeatureDims {
  std::size_t node_features = 0;  // p
  std::size_t edge_features = 0;  // q
  std::size_t num_nodes = 0;      // N, only nodesfc_gru depends on it

  bool operator==(const FeatureDims&) const = default;
};

struct ParamInfo {
  std::string name;
  num::Shape shape;
  std::size_t fan_in = 0;
  bool is_bias = false;
};

// Every learnable tensor in a fixed order.
std::vector<ParamInfo> param_layout(const ModelSpec& spec, const FeatureDims& dims);
std::size_t count_params(const ModelSpec& spec, const FeatureDims& dims);

template <typename T>
struct ParamSet {
  std::vector<std::string> names;
  std::vector<num::Tensor<T>> values;

  const num::Tensor<T>& get(std::string_view name) const;
  std::size_t size() const { return values.size(); }
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero, from
// spec.seed.
template <typename T>
ParamSet<T> init_params(const ModelSpec& spec, const FeatureDims& dims);

// Same names, every tensor registered on `tape`.
template <typename T>
ParamSet<T> watch_params(const ParamSet<T>& params, num::Tape<T>& tape);

template <typename To, typename From>
ParamSet<To> cast_params(const ParamSet<From>& params);

// Edge list over (possibly batched) node indices.
struct EdgeIndex {
  std::size_t num_nodes = 0;   // total over all graphs in the batch
  std::size_t num_graphs = 1;
  std::vector<std::size_t> src;
  std::vector<std::size_t> dst;

  std::size_t num_edges() const { return src.size(); }
  std::size_t nodes_per_graph() const { return num_nodes / num_graphs; }

  // `copies` disjoint replicas; replica b owns nodes [b*N, (b+1)*N) and
  // edges [b*M, (b+1)*M).
  static EdgeIndex from_topology(const geo::GraphTopology& topology, std::size_t copies = 1);
};

template <typename T>
struct Affine {
  num::Tensor<T> weight;  // [in, out]
  num::Tensor<T> bias;    // [out]

  num::Tensor<T> operator()(const num::Tensor<T>& x) const;
};

template <typename T>
Affine<T> affine_from(const ParamSet<T>& params, const std::string& prefix);

// xi = [x_prev, P_t]
template <typename T>
num::Tensor<T> node_repr(const num::Tensor<T>& x_prev, const num::Tensor<T>& node_features);

template <typename T>
struct SpatialWeights {
  Affine<T> edge_in;   // first edge MLP layer, sigmoid after
  Affine<T> edge_out;  // second edge MLP layer
  Affine<T> node;      // aggregate -> spatial state
};

template <typename T>
SpatialWeights<T> spatial_weights(const ParamSet<T>& params);

// e_{j->i} = edge_out(sigmoid(edge_in([xi_j, xi_i, Q_{j->i}])));
// zeta_i = node( sum_{j->i} e_{j->i} - sum_{i->j} e_{i->j} ), the export sum
// omitted when no_export.
template <typename T>
num::Tensor<T> spatial_step(const num::Tensor<T>& xi, const num::Tensor<T>& edge_features,
                            const EdgeIndex& edges, const SpatialWeights<T>& w, bool no_export);

template <typename T>
struct GruWeights {
  Affine<T> update;     // z
  Affine<T> reset;      // r
  Affine<T> candidate;  // h~
};

template <typename T>
GruWeights<T> gru_weights(const ParamSet<T>& params, const std::string& prefix = "gru");

// z = s(Wz[h,x]); r = s(Wr[h,x]); h~ = tanh(W[r*h, x]); h' = (1-z)*h + z*h~
template <typename T>
num::Tensor<T> gru_cell(const num::Tensor<T>& x, const num::Tensor<T>& h_prev,
                        const GruWeights<T>& w);

template <typename T>
struct LstmWeights {
  Affine<T> input, forget, cell, output;
};

template <typename T>
struct LstmState {
  num::Tensor<T> h, c;
};

template <typename T>
LstmWeights<T> lstm_weights(const ParamSet<T>& params);

template <typename T>
LstmState<T> lstm_cell(const num::Tensor<T>& x, const LstmState<T>& prev, const LstmWeights<T>& w);

template <typename T>
num::Tensor<T> readout(const num::Tensor<T>& h, const Affine<T>& w);

// Graph model rollout. P and Q hold one tensor per forecast step.
template <typename T>
num::Tensor<T> rollout(const num::Tensor<T>& x0, std::span<const num::Tensor<T>> node_features,
                       std::span<const num::Tensor<T>> edge_features, const EdgeIndex& edges,
                       const ParamSet<T>& params, const ModelSpec& spec);

// mlp, gru, lstm and nodesfc_gru. Edge features are never consulted.
template <typename T>
num::Tensor<T> baseline_forward(const ModelSpec& spec, const num::Tensor<T>& x0,
                                std::span<const num::Tensor<T>> node_features,
                                const EdgeIndex& edges, const ParamSet<T>& params);

// Dispatches on spec.kind.
template <typename T>
num::Tensor<T> forecast(const ModelSpec& spec, const ParamSet<T>& params, const num::Tensor<T>& x0,
                        std::span<const num::Tensor<T>> node_features,
                        std::span<const num::Tensor<T>> edge_features, const EdgeIndex& edges);

}  // namespace airgraph::model
