#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "invforge/gradcheck.hpp"
#include "invforge/trainer.hpp"

namespace invforge::test {

struct GradCase {
  std::string name;
  ParamStore64 params;
  LossBuilder build;
};

inline Tensor64 random_tensor(Shape shape, RngStream& rng, double scale = 1.0) {
  Tensor64 t(std::move(shape));
  for (double& v : t.data()) v = scale * rng.normal();
  return t;
}

// Central differences straddling a relu kink compare one-sided slopes, so
// relu inputs are kept at least `margin` away from zero.
inline void push_from_zero(Tensor64& t, double margin) {
  for (double& v : t.data()) {
    if (std::abs(v) < margin) v = v < 0 ? -margin : margin;
  }
}

/// One scalar graph per op, per dense-layer activation, and per model-kind
/// objective, all drawn from `seed`. Dropout masks are fixed outside the
/// builders so every builder is deterministic.
inline std::vector<GradCase> gradient_cases(std::uint64_t seed) {
  RngStream rng = RngStream::from_seed(seed);
  ParamStore64 p;
  Tensor64 a = random_tensor({3, 4}, rng);
  push_from_zero(a, 0.05);
  p.add("t.a", a);
  p.add("t.b", random_tensor({4, 5}, rng));
  p.add("t.c", random_tensor({3, 4}, rng));
  p.add("t.bias", random_tensor({4}, rng));
  p.add("t.d", random_tensor({3, 2}, rng));
  const Tensor64 mask = dropout_mask<double>({3, 4}, 0.5, rng);
  const std::vector<int> labels{0, 4, 2};
  const Tensor64 target = random_tensor({3, 5}, rng);

  struct Nodes {
    NodeId a, b, c, bias, d;
  };
  auto op = [&](std::string name, std::function<NodeId(Graph64&, const Nodes&)> body) {
    return GradCase{std::move(name), p, [body](Graph64& g, ParamStore64& s) {
                      const Nodes n{g.parameter(s, "t.a"), g.parameter(s, "t.b"), g.parameter(s, "t.c"),
                                    g.parameter(s, "t.bias"), g.parameter(s, "t.d")};
                      return body(g, n);
                    }};
  };
  std::vector<GradCase> cases;
  cases.push_back(op("matmul", [](Graph64& g, const Nodes& n) { return sum(g, matmul(g, n.a, n.b)); }));
  cases.push_back(op("add_sub_mul", [](Graph64& g, const Nodes& n) {
    return sum(g, mul(g, sub(g, add(g, n.a, n.bias), n.c), n.a));
  }));
  cases.push_back(op("mul_broadcast", [](Graph64& g, const Nodes& n) { return sum(g, mul(g, n.a, n.bias)); }));
  cases.push_back(op("scale_mean", [](Graph64& g, const Nodes& n) { return mean(g, scale(g, n.a, -2.5)); }));
  cases.push_back(op("relu", [](Graph64& g, const Nodes& n) { return sum(g, mul(g, relu(g, n.a), n.c)); }));
  cases.push_back(op("sigmoid", [](Graph64& g, const Nodes& n) { return sum(g, mul(g, sigmoid(g, n.a), n.c)); }));
  cases.push_back(op("tanh", [](Graph64& g, const Nodes& n) { return sum(g, mul(g, tanh(g, n.a), n.c)); }));
  cases.push_back(
      op("softmax", [](Graph64& g, const Nodes& n) { return sum(g, mul(g, softmax_rows(g, n.a), n.c)); }));
  cases.push_back(op("mask", [mask](Graph64& g, const Nodes& n) {
    return sum(g, mul(g, apply_mask(g, n.a, mask), n.c));
  }));
  cases.push_back(op("concat_slice", [](Graph64& g, const Nodes& n) {
    return sum(g, mul(g, slice_cols(g, concat_cols(g, n.a, n.d), 2, 6), n.c));
  }));
  cases.push_back(op("cross_entropy", [labels](Graph64& g, const Nodes& n) {
    return cross_entropy(g, softmax_rows(g, matmul(g, n.a, n.b)), labels);
  }));
  cases.push_back(op("mse", [target](Graph64& g, const Nodes& n) {
    return mse(g, matmul(g, n.a, n.b), g.constant(target));
  }));

  // Two-layer dense networks, one per hidden activation.
  const Tensor64 x = random_tensor({5, 4}, rng);
  const Tensor64 y = random_tensor({5, 3}, rng);
  for (Activation act : {Activation::linear, Activation::relu, Activation::sigmoid, Activation::tanh,
                         Activation::softmax}) {
    ParamStore64 s;
    const std::vector<LayerSpec> layers{{4, 6, act}, {6, 3, Activation::linear}};
    for (std::size_t i = 0; i < layers.size(); ++i) {
      s.add(layer_param_name("net", i, "weight"), random_tensor({layers[i].input_dim, layers[i].output_dim}, rng, 0.5));
      s.add(layer_param_name("net", i, "bias"), random_tensor({layers[i].output_dim}, rng, 0.1));
    }
    if (act == Activation::relu) {
      // Redraw the first bias until every hidden pre-activation clears the kink.
      for (int attempt = 0; attempt < 1000; ++attempt) {
        Graph64 g;
        const auto& pre = g.value(add(g, matmul(g, g.constant(x), g.parameter(s, "net.layer0.weight")),
                                      g.parameter(s, "net.layer0.bias")));
        if (std::ranges::all_of(pre.data(), [](double v) { return std::abs(v) > 0.05; })) break;
        s.at("net.layer0.bias").value = random_tensor({6}, rng, 0.5);
      }
    }
    cases.push_back({"dense_" + std::string(to_string(act)), s, [x, y, layers](Graph64& g, ParamStore64& st) {
                       return mse(g, dense_stack(g, st, "net", layers, g.constant(x), true), g.constant(y));
                     }});
  }

  // Complete objectives of every model kind, with smooth hidden units so no
  // coordinate sits on a relu kink (relu itself is covered above).
  ArchitectureOptions o;
  o.hidden_activation = Activation::tanh;
  o.input_dim = 6;
  o.num_classes = 3;
  o.dim_e1 = 3;
  o.dim_e2 = 2;
  o.encoder_hidden = {5};
  o.predictor_hidden = {4};
  o.decoder_hidden = {4, 4};
  const Tensor64 xo = random_tensor({4, 6}, rng, 0.5);
  const std::vector<int> yo{0, 2, 1, 2};
  const Tensor64 psi_mask = dropout_mask<double>({4, 3}, 0.5, rng);
  for (ModelKind kind : {ModelKind::full, ModelKind::b0, ModelKind::b1}) {
    const Model m(make_architecture(kind, o), rng.next_u64());
    const ArchitectureSpec spec = m.spec();
    ParamStore64 s = m.params().cast<double>();
    const ComponentSet all = s.components();
    const PsiFn<double> psi = [psi_mask](Graph64& g, NodeId e1) { return apply_mask(g, e1, psi_mask); };
    cases.push_back({"objective_" + std::string(to_string(kind)) + "_j_m1", s,
                     [=](Graph64& g, ParamStore64& st) {
                       return build_objective(g, st, spec, xo, yo, LossWeights{}, all, psi).j_m1;
                     }});
    if (kind == ModelKind::full) {
      cases.push_back({"objective_full_j_m2", s, [=](Graph64& g, ParamStore64& st) {
                         return *build_objective(g, st, spec, xo, yo, LossWeights{}, all, psi).j_m2;
                       }});
    }
  }
  return cases;
}

// Finite-difference step used by every gradient check.
inline constexpr double kGradEpsilon = 1e-3;

}  // namespace invforge::test
