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

#include "airgraph/model.hpp"

#include <cmath>
#include <random>

#include "airgraph/error.hpp"
#include "airgraph/featurize.hpp"

namespace airgraph::model {

using num::Shape;
using num::Tensor;

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kPm25Gnn: return "pm25gnn";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kGru: return "gru";
    case ModelKind::kLstm: return "lstm";
    case ModelKind::kNodesFcGru: return "nodesfc_gru";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::kPm25Gnn, ModelKind::kMlp, ModelKind::kGru, ModelKind::kLstm,
                      ModelKind::kNodesFcGru}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown model kind '" + std::string(name) +
                    "' (expected pm25gnn, mlp, gru, lstm or nodesfc_gru)");
}

std::string_view to_string(Precision p) { return p == Precision::kFloat32 ? "f32" : "f64"; }

Precision parse_precision(std::string_view name) {
  if (name == "f32" || name == "float32") return Precision::kFloat32;
  if (name == "f64" || name == "float64") return Precision::kFloat64;
  throw ConfigError("precision must be f32 or f64, got '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (edge_hidden == 0 || edge_dim == 0 || spatial_dim == 0 || hidden_dim == 0 || mlp_hidden == 0) {
    throw ConfigError("model: hidden sizes must be positive");
  }
  if ((drop_pbl || no_export) && kind != ModelKind::kPm25Gnn) {
    throw ConfigError("model: ablation flags apply only to pm25gnn, not " +
                      std::string(to_string(kind)));
  }
}

namespace {

void push_affine(std::vector<ParamInfo>& out, const std::string& prefix, std::size_t in,
                 std::size_t width) {
  out.push_back({prefix + ".weight", {in, width}, in, false});
  out.push_back({prefix + ".bias", {width}, in, true});
}

void push_gru(std::vector<ParamInfo>& out, std::size_t x_dim, std::size_t h_dim) {
  for (const char* gate : {"update", "reset", "candidate"}) {
    push_affine(out, std::string("gru.") + gate, h_dim + x_dim, h_dim);
  }
}

}  // namespace

std::vector<ParamInfo> param_layout(const ModelSpec& spec, const FeatureDims& dims) {
  spec.validate();
  const std::size_t node_in = 1 + dims.node_features;
  std::vector<ParamInfo> out;
  switch (spec.kind) {
    case ModelKind::kPm25Gnn:
      push_affine(out, "edge_mlp.0", 2 * node_in + dims.edge_features, spec.edge_hidden);
      push_affine(out, "edge_mlp.1", spec.edge_hidden, spec.edge_dim);
      push_affine(out, "node_mlp", spec.edge_dim, spec.spatial_dim);
      push_gru(out, node_in + spec.spatial_dim, spec.hidden_dim);
      push_affine(out, "readout", spec.hidden_dim, 1);
      break;
    case ModelKind::kNodesFcGru:
      if (dims.num_nodes == 0) throw ConfigError("nodesfc_gru needs the node count");
      push_affine(out, "fc", dims.num_nodes * node_in, dims.num_nodes * spec.spatial_dim);
      push_gru(out, node_in + spec.spatial_dim, spec.hidden_dim);
      push_affine(out, "readout", spec.hidden_dim, 1);
      break;
    case ModelKind::kGru:
      push_gru(out, node_in, spec.hidden_dim);
      push_affine(out, "readout", spec.hidden_dim, 1);
      break;
    case ModelKind::kLstm:
      for (const char* gate : {"input", "forget", "cell", "output"}) {
        push_affine(out, std::string("lstm.") + gate, spec.hidden_dim + node_in, spec.hidden_dim);
      }
      push_affine(out, "readout", spec.hidden_dim, 1);
      break;
    case ModelKind::kMlp:
      push_affine(out, "mlp.0", node_in, spec.mlp_hidden);
      push_affine(out, "mlp.1", spec.mlp_hidden, 1);
      break;
  }
  return out;
}

std::size_t count_params(const ModelSpec& spec, const FeatureDims& dims) {
  std::size_t total = 0;
  for (const ParamInfo& p : param_layout(spec, dims)) total += num::numel(p.shape);
  return total;
}

template <typename T>
const Tensor<T>& ParamSet<T>::get(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw ConfigError("parameter '" + std::string(name) + "' not found");
}

template <typename T>
ParamSet<T> init_params(const ModelSpec& spec, const FeatureDims& dims) {
  std::mt19937_64 rng(spec.seed);
  ParamSet<T> out;
  for (const ParamInfo& info : param_layout(spec, dims)) {
    std::vector<T> data(num::numel(info.shape), T(0));
    if (!info.is_bias) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(info.fan_in));
      for (T& v : data) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = static_cast<T>((2.0 * u - 1.0) * bound);
      }
    }
    out.names.push_back(info.name);
    out.values.emplace_back(info.shape, std::move(data));
  }
  return out;
}

template <typename T>
ParamSet<T> watch_params(const ParamSet<T>& params, num::Tape<T>& tape) {
  ParamSet<T> out;
  out.names = params.names;
  for (const auto& v : params.values) out.values.push_back(tape.watch(v.detach()));
  return out;
}

template <typename To, typename From>
ParamSet<To> cast_params(const ParamSet<From>& params) {
  ParamSet<To> out;
  out.names = params.names;
  for (const auto& v : params.values) {
    std::vector<To> data(v.data().begin(), v.data().end());
    out.values.emplace_back(v.shape(), std::move(data));
  }
  return out;
}

EdgeIndex EdgeIndex::from_topology(const geo::GraphTopology& topology, std::size_t copies) {
  if (copies == 0) throw ConfigError("EdgeIndex: need at least one copy");
  EdgeIndex out;
  const std::size_t n = topology.num_nodes();
  out.num_nodes = n * copies;
  out.num_graphs = copies;
  out.src.reserve(topology.num_edges() * copies);
  out.dst.reserve(topology.num_edges() * copies);
  for (std::size_t b = 0; b < copies; ++b) {
    for (const geo::Edge& e : topology.edges) {
      out.src.push_back(b * n + e.src);
      out.dst.push_back(b * n + e.dst);
    }
  }
  return out;
}

template <typename T>
Tensor<T> Affine<T>::operator()(const Tensor<T>& x) const {
  return num::add_bias(num::matmul(x, weight), bias);
}

template <typename T>
Affine<T> affine_from(const ParamSet<T>& params, const std::string& prefix) {
  return {params.get(prefix + ".weight"), params.get(prefix + ".bias")};
}

template <typename T>
Tensor<T> node_repr(const Tensor<T>& x_prev, const Tensor<T>& node_features) {
  if (x_prev.rank() != 2 || x_prev.dim(1) != 1 || node_features.rank() != 2 ||
      node_features.dim(0) != x_prev.dim(0)) {
    throw ShapeError("node_repr: expected [N,1] and [N,p], got " + num::shape_str(x_prev.shape()) +
                     " and " + num::shape_str(node_features.shape()));
  }
  return num::concat<T>({x_prev, node_features});
}

template <typename T>
SpatialWeights<T> spatial_weights(const ParamSet<T>& params) {
  return {affine_from(params, "edge_mlp.0"), affine_from(params, "edge_mlp.1"),
          affine_from(params, "node_mlp")};
}

template <typename T>
Tensor<T> spatial_step(const Tensor<T>& xi, const Tensor<T>& edge_features, const EdgeIndex& edges,
                       const SpatialWeights<T>& w, bool no_export) {
  if (xi.rank() != 2 || xi.dim(0) != edges.num_nodes) {
    throw ShapeError("spatial_step: node representation " + num::shape_str(xi.shape()) +
                     " does not match " + std::to_string(edges.num_nodes) + " nodes");
  }
  if (edge_features.rank() != 2 || edge_features.dim(0) != edges.num_edges()) {
    throw ShapeError("spatial_step: edge features " + num::shape_str(edge_features.shape()) +
                     " do not match " + std::to_string(edges.num_edges()) + " edges");
  }
  const Tensor<T> from = num::gather_rows(xi, std::span<const std::size_t>(edges.src));
  const Tensor<T> to = num::gather_rows(xi, std::span<const std::size_t>(edges.dst));
  const Tensor<T> message =
      w.edge_out(num::sigmoid(w.edge_in(num::concat<T>({from, to, edge_features}))));
  Tensor<T> agg = num::scatter_add(message, std::span<const std::size_t>(edges.dst), edges.num_nodes);
  if (!no_export) {
    agg = num::sub(agg, num::scatter_add(message, std::span<const std::size_t>(edges.src),
                                         edges.num_nodes));
  }
  return w.node(agg);
}

template <typename T>
GruWeights<T> gru_weights(const ParamSet<T>& params, const std::string& prefix) {
  return {affine_from(params, prefix + ".update"), affine_from(params, prefix + ".reset"),
          affine_from(params, prefix + ".candidate")};
}

template <typename T>
Tensor<T> gru_cell(const Tensor<T>& x, const Tensor<T>& h_prev, const GruWeights<T>& w) {
  if (x.rank() != 2 || h_prev.rank() != 2 || x.dim(0) != h_prev.dim(0)) {
    throw ShapeError("gru_cell: input " + num::shape_str(x.shape()) + " vs state " +
                     num::shape_str(h_prev.shape()));
  }
  const Tensor<T> hx = num::concat<T>({h_prev, x});
  const Tensor<T> z = num::sigmoid(w.update(hx));
  const Tensor<T> r = num::sigmoid(w.reset(hx));
  const Tensor<T> candidate = num::tanh(w.candidate(num::concat<T>({num::mul(r, h_prev), x})));
  return num::add(num::mul(num::affine(z, T(-1), T(1)), h_prev), num::mul(z, candidate));
}

template <typename T>
LstmWeights<T> lstm_weights(const ParamSet<T>& params) {
  return {affine_from(params, "lstm.input"), affine_from(params, "lstm.forget"),
          affine_from(params, "lstm.cell"), affine_from(params, "lstm.output")};
}

template <typename T>
LstmState<T> lstm_cell(const Tensor<T>& x, const LstmState<T>& prev, const LstmWeights<T>& w) {
  const Tensor<T> hx = num::concat<T>({prev.h, x});
  const Tensor<T> i = num::sigmoid(w.input(hx));
  const Tensor<T> f = num::sigmoid(w.forget(hx));
  const Tensor<T> g = num::tanh(w.cell(hx));
  const Tensor<T> o = num::sigmoid(w.output(hx));
  Tensor<T> c = num::add(num::mul(f, prev.c), num::mul(i, g));
  Tensor<T> h = num::mul(o, num::tanh(c));
  return {std::move(h), std::move(c)};
}

template <typename T>
Tensor<T> readout(const Tensor<T>& h, const Affine<T>& w) {
  return w(h);
}

namespace {

template <typename T>
void check_rollout_inputs(const Tensor<T>& x0, std::span<const Tensor<T>> node_features,
                          const EdgeIndex& edges) {
  if (node_features.empty()) throw ShapeError("rollout: need at least one forecast step");
  if (x0.rank() != 2 || x0.dim(1) != 1 || x0.dim(0) != edges.num_nodes) {
    throw ShapeError("rollout: x0 has shape " + num::shape_str(x0.shape()) + ", expected (" +
                     std::to_string(edges.num_nodes) + ",1)");
  }
}

template <typename T>
Tensor<T> stack_steps(const std::vector<Tensor<T>>& steps, std::size_t nodes) {
  return num::reshape(num::concat_rows(steps), {steps.size(), nodes, 1});
}

// Zeroes the PBL column while keeping shapes, so P stays differentiable.
template <typename T>
Tensor<T> pbl_mask(const Tensor<T>& features) {
  Tensor<T> mask = Tensor<T>::filled(features.shape(), T(1));
  auto m = mask.mutable_data();
  const std::size_t cols = features.dim(1);
  for (std::size_t r = 0; r < features.dim(0); ++r) m[r * cols + feat::kPblHeight] = T(0);
  return mask;
}

}  // namespace

template <typename T>
Tensor<T> rollout(const Tensor<T>& x0, std::span<const Tensor<T>> node_features,
                  std::span<const Tensor<T>> edge_features, const EdgeIndex& edges,
                  const ParamSet<T>& params, const ModelSpec& spec) {
  check_rollout_inputs(x0, node_features, edges);
  if (node_features.size() != edge_features.size()) {
    throw ShapeError("rollout: " + std::to_string(node_features.size()) + " node steps but " +
                     std::to_string(edge_features.size()) + " edge steps");
  }
  const SpatialWeights<T> sw = spatial_weights(params);
  const GruWeights<T> gw = gru_weights(params);
  const Affine<T> out = affine_from(params, "readout");
  const Tensor<T> mask = spec.drop_pbl ? pbl_mask(node_features[0]) : Tensor<T>();

  Tensor<T> h = Tensor<T>::zeros({edges.num_nodes, spec.hidden_dim});
  Tensor<T> prev = x0;
  std::vector<Tensor<T>> steps;
  for (std::size_t t = 0; t < node_features.size(); ++t) {
    const Tensor<T> p = spec.drop_pbl ? num::mul(node_features[t], mask) : node_features[t];
    const Tensor<T> xi = node_repr(prev, p);
    const Tensor<T> zeta = spatial_step(xi, edge_features[t], edges, sw, spec.no_export);
    h = gru_cell(num::concat<T>({xi, zeta}), h, gw);
    prev = readout(h, out);
    steps.push_back(prev);
  }
  return stack_steps(steps, edges.num_nodes);
}

template <typename T>
Tensor<T> baseline_forward(const ModelSpec& spec, const Tensor<T>& x0,
                           std::span<const Tensor<T>> node_features, const EdgeIndex& edges,
                           const ParamSet<T>& params) {
  check_rollout_inputs(x0, node_features, edges);
  const std::size_t n = edges.num_nodes;
  std::vector<Tensor<T>> steps;
  switch (spec.kind) {
    case ModelKind::kMlp: {
      // No memory: each step sees only the observed start value and its own
      // features.
      const Affine<T> l0 = affine_from(params, "mlp.0");
      const Affine<T> l1 = affine_from(params, "mlp.1");
      for (const Tensor<T>& p : node_features) {
        steps.push_back(l1(num::sigmoid(l0(node_repr(x0, p)))));
      }
      break;
    }
    case ModelKind::kGru: {
      const GruWeights<T> gw = gru_weights(params);
      const Affine<T> out = affine_from(params, "readout");
      Tensor<T> h = Tensor<T>::zeros({n, spec.hidden_dim});
      Tensor<T> prev = x0;
      for (const Tensor<T>& p : node_features) {
        h = gru_cell(node_repr(prev, p), h, gw);
        prev = readout(h, out);
        steps.push_back(prev);
      }
      break;
    }
    case ModelKind::kLstm: {
      const LstmWeights<T> lw = lstm_weights(params);
      const Affine<T> out = affine_from(params, "readout");
      LstmState<T> state{Tensor<T>::zeros({n, spec.hidden_dim}),
                         Tensor<T>::zeros({n, spec.hidden_dim})};
      Tensor<T> prev = x0;
      for (const Tensor<T>& p : node_features) {
        state = lstm_cell(node_repr(prev, p), state, lw);
        prev = readout(state.h, out);
        steps.push_back(prev);
      }
      break;
    }
    case ModelKind::kNodesFcGru: {
      const Affine<T> fc = affine_from(params, "fc");
      const GruWeights<T> gw = gru_weights(params);
      const Affine<T> out = affine_from(params, "readout");
      const std::size_t graphs = edges.num_graphs;
      Tensor<T> h = Tensor<T>::zeros({n, spec.hidden_dim});
      Tensor<T> prev = x0;
      for (const Tensor<T>& p : node_features) {
        const Tensor<T> xi = node_repr(prev, p);
        const Tensor<T> flat = num::reshape(xi, {graphs, xi.size() / graphs});
        const Tensor<T> mixed = fc(flat);
        const Tensor<T> zeta = num::reshape(mixed, {n, mixed.size() / n});
        h = gru_cell(num::concat<T>({xi, zeta}), h, gw);
        prev = readout(h, out);
        steps.push_back(prev);
      }
      break;
    }
    case ModelKind::kPm25Gnn:
      throw ConfigError("baseline_forward: pm25gnn is not a baseline, use rollout");
  }
  return stack_steps(steps, n);
}

template <typename T>
Tensor<T> forecast(const ModelSpec& spec, const ParamSet<T>& params, const Tensor<T>& x0,
                   std::span<const Tensor<T>> node_features,
                   std::span<const Tensor<T>> edge_features, const EdgeIndex& edges) {
  if (spec.kind == ModelKind::kPm25Gnn) {
    return rollout(x0, node_features, edge_features, edges, params, spec);
  }
  return baseline_forward(spec, x0, node_features, edges, params);
}

#define AIRGRAPH_INSTANTIATE(T)                                                                \
  template struct ParamSet<T>;                                                                 \
  template struct Affine<T>;                                                                   \
  template ParamSet<T> init_params<T>(const ModelSpec&, const FeatureDims&);                   \
  template ParamSet<T> watch_params(const ParamSet<T>&, num::Tape<T>&);                        \
  template Affine<T> affine_from(const ParamSet<T>&, const std::string&);                      \
  template Tensor<T> node_repr(const Tensor<T>&, const Tensor<T>&);                            \
  template SpatialWeights<T> spatial_weights(const ParamSet<T>&);                              \
  template Tensor<T> spatial_step(const Tensor<T>&, const Tensor<T>&, const EdgeIndex&,        \
                                  const SpatialWeights<T>&, bool);                             \
  template GruWeights<T> gru_weights(const ParamSet<T>&, const std::string&);                  \
  template Tensor<T> gru_cell(const Tensor<T>&, const Tensor<T>&, const GruWeights<T>&);       \
  template LstmWeights<T> lstm_weights(const ParamSet<T>&);                                    \
  template LstmState<T> lstm_cell(const Tensor<T>&, const LstmState<T>&, const LstmWeights<T>&); \
  template Tensor<T> readout(const Tensor<T>&, const Affine<T>&);                              \
  template Tensor<T> rollout(const Tensor<T>&, std::span<const Tensor<T>>,                     \
                             std::span<const Tensor<T>>, const EdgeIndex&, const ParamSet<T>&, \
                             const ModelSpec&);                                                \
  template Tensor<T> baseline_forward(const ModelSpec&, const Tensor<T>&,                      \
                                      std::span<const Tensor<T>>, const EdgeIndex&,            \
                                      const ParamSet<T>&);                                     \
  template Tensor<T> forecast(const ModelSpec&, const ParamSet<T>&, const Tensor<T>&,          \
                              std::span<const Tensor<T>>, std::span<const Tensor<T>>,          \
                              const EdgeIndex&);

AIRGRAPH_INSTANTIATE(float)
AIRGRAPH_INSTANTIATE(double)

#undef AIRGRAPH_INSTANTIATE

template ParamSet<float> cast_params(const ParamSet<double>&);
template ParamSet<double> cast_params(const ParamSet<float>&);
template ParamSet<double> cast_params(const ParamSet<double>&);
template ParamSet<float> cast_params(const ParamSet<float>&);

}  // namespace airgraph::model
