#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "invforge/graph.hpp"
#include "invforge/kv.hpp"
#include "invforge/params.hpp"

namespace invforge {

// Parameter component prefixes.
inline constexpr std::string_view kEnc = "enc";
inline constexpr std::string_view kPred = "pred";
inline constexpr std::string_view kDec = "dec";
inline constexpr std::string_view kDis1 = "dis1";
inline constexpr std::string_view kDis2 = "dis2";

// Player groups of the adversarial game.
ComponentSet m1_components();
ComponentSet m2_components();

/// full: encoder, predictor, decoder and both disentanglers.
/// b0:   encoder + predictor over one unsplit embedding.
/// b1:   full model without disentanglers, trained non-adversarially.
enum class ModelKind : std::uint8_t { full, b0, b1 };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

struct LayerSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  Activation activation = Activation::linear;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct ArchitectureSpec {
  ModelKind kind = ModelKind::full;
  std::size_t dim_e1 = 0;
  std::size_t dim_e2 = 0;
  std::vector<LayerSpec> encoder_layers;
  std::vector<LayerSpec> predictor_layers;
  std::vector<LayerSpec> decoder_layers;
  std::vector<LayerSpec> dis1_layers;
  std::vector<LayerSpec> dis2_layers;
  // Dropout probability of the noisy transformer on the decoder path.
  double psi_rate = 0.5;

  std::size_t input_dim() const;
  std::size_t num_classes() const;
  std::size_t embedding_dim() const noexcept { return dim_e1 + dim_e2; }
  bool has_decoder() const noexcept { return kind != ModelKind::b0; }
  bool has_disentanglers() const noexcept { return kind == ModelKind::full; }

  // Throws DimensionError / ConfigError naming the broken invariant.
  void validate() const;

  void write(KeyValues& kv) const;
  static ArchitectureSpec read(const KeyValues& kv);

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

/// Convenience description of the dense architectures used in experiments.
struct ArchitectureOptions {
  std::size_t input_dim = 784;
  std::size_t num_classes = 10;
  std::size_t dim_e1 = 128;
  std::size_t dim_e2 = 128;
  std::vector<std::size_t> encoder_hidden{512};
  std::vector<std::size_t> predictor_hidden{256};
  std::vector<std::size_t> decoder_hidden{512, 512};
  std::vector<std::size_t> dis_hidden{};
  Activation hidden_activation = Activation::relu;
  Activation embedding_activation = Activation::tanh;
  Activation decoder_output = Activation::sigmoid;
  double psi_rate = 0.5;
};

ArchitectureSpec make_architecture(ModelKind kind, const ArchitectureOptions& options);

std::string layer_param_name(std::string_view component, std::size_t layer, std::string_view what);

/// Architecture plus parameters. Parameter names are
/// "<component>.layer<i>.weight" ([in x out]) and "<component>.layer<i>.bias".
class Model {
 public:
  // Glorot-uniform weights (one named RNG stream per tensor), zero biases.
  Model(ArchitectureSpec spec, std::uint64_t seed);
  // Adopts existing parameters after checking names and shapes.
  Model(ArchitectureSpec spec, ParamStore params);

  const ArchitectureSpec& spec() const noexcept { return spec_; }
  ParamStore& params() noexcept { return params_; }
  const ParamStore& params() const noexcept { return params_; }

 private:
  ArchitectureSpec spec_;
  ParamStore params_;
};

/// Parameter names and shapes implied by an architecture, in store order.
std::vector<std::pair<std::string, Shape>> expected_parameters(const ArchitectureSpec& spec);

// ---------------------------------------------------------------------------
// Graph-level wiring, generic over the scalar type so the double-precision
// gradient oracle can run the exact same network code.

template <class T>
NodeId dense_stack(BasicGraph<T>& g, BasicParamStore<T>& store, std::string_view component,
                   std::span<const LayerSpec> layers, NodeId input, bool trainable) {
  NodeId h = input;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const NodeId w = g.parameter(store, layer_param_name(component, i, "weight"), trainable);
    const NodeId b = g.parameter(store, layer_param_name(component, i, "bias"), trainable);
    h = activation(g, add(g, matmul(g, h, w), b), layers[i].activation);
  }
  return h;
}

struct SplitNodes {
  NodeId e1;
  // Absent for the unsplit b0 embedding.
  std::optional<NodeId> e2;
};

inline void check_width(std::size_t got, std::size_t want, std::string_view what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected width " + std::to_string(want) + ", got " +
                         std::to_string(got));
  }
}

template <class T>
SplitNodes encode_nodes(BasicGraph<T>& g, BasicParamStore<T>& store, const ArchitectureSpec& spec, NodeId x,
                        bool trainable) {
  check_width(g.value(x).cols(), spec.input_dim(), "encoder input");
  const NodeId h = dense_stack(g, store, kEnc, spec.encoder_layers, x, trainable);
  if (spec.kind == ModelKind::b0) return {h, std::nullopt};
  return {slice_cols(g, h, 0, spec.dim_e1), slice_cols(g, h, spec.dim_e1, spec.dim_e1 + spec.dim_e2)};
}

template <class T>
NodeId predict_nodes(BasicGraph<T>& g, BasicParamStore<T>& store, const ArchitectureSpec& spec, NodeId e1,
                     bool trainable) {
  check_width(g.value(e1).cols(), spec.predictor_layers.front().input_dim, "predictor input");
  return dense_stack(g, store, kPred, spec.predictor_layers, e1, trainable);
}

template <class T>
NodeId noisy_transform_nodes(BasicGraph<T>& g, NodeId e1, double psi_rate, RngStream& rng, bool training) {
  return dropout(g, e1, psi_rate, rng, training);
}

template <class T>
NodeId decode_nodes(BasicGraph<T>& g, BasicParamStore<T>& store, const ArchitectureSpec& spec, NodeId e1_noisy,
                    NodeId e2, bool trainable) {
  if (!spec.has_decoder()) throw ContractError("model kind has no decoder");
  check_width(g.value(e1_noisy).cols(), spec.dim_e1, "decoder e1 input");
  check_width(g.value(e2).cols(), spec.dim_e2, "decoder e2 input");
  return dense_stack(g, store, kDec, spec.decoder_layers, concat_cols(g, e1_noisy, e2), trainable);
}

// Returns (e2_hat, e1_hat) = (Dis1(e1), Dis2(e2)).
template <class T>
std::pair<NodeId, NodeId> disentangle_nodes(BasicGraph<T>& g, BasicParamStore<T>& store,
                                            const ArchitectureSpec& spec, NodeId e1, NodeId e2, bool trainable) {
  if (!spec.has_disentanglers()) throw ContractError("model kind has no disentanglers");
  check_width(g.value(e1).cols(), spec.dim_e1, "dis1 input");
  check_width(g.value(e2).cols(), spec.dim_e2, "dis2 input");
  const NodeId e2_hat = dense_stack(g, store, kDis1, spec.dis1_layers, e1, trainable);
  const NodeId e1_hat = dense_stack(g, store, kDis2, spec.dis2_layers, e2, trainable);
  return {e2_hat, e1_hat};
}

// ---------------------------------------------------------------------------
// Tensor-level inference API (no gradients, noise disabled unless asked).

struct SplitEmbedding {
  Tensor e1;
  Tensor e2;  // empty for b0
};

SplitEmbedding encode(const Model& model, const Tensor& x);
Tensor predict(const Model& model, const Tensor& e1);
Tensor noisy_transform(const Tensor& e1, double psi_rate, RngStream& rng, bool training);
Tensor decode(const Model& model, const Tensor& e1_noisy, const Tensor& e2);
// Returns (e2_hat, e1_hat).
std::pair<Tensor, Tensor> disentangle_forward(const Model& model, const SplitEmbedding& emb);

}  // namespace invforge
