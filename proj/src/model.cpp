#include "invforge/model.hpp"

#include <sstream>

namespace invforge {

ComponentSet m1_components() { return {std::string(kEnc), std::string(kPred), std::string(kDec)}; }
ComponentSet m2_components() { return {std::string(kDis1), std::string(kDis2)}; }

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::full: return "full";
    case ModelKind::b0: return "b0";
    case ModelKind::b1: return "b1";
  }
  return "full";
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::full, ModelKind::b0, ModelKind::b1}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown model kind '" + std::string(text) + "' (expected full, b0 or b1)");
}

std::string layer_param_name(std::string_view component, std::size_t layer, std::string_view what) {
  std::string name(component);
  name += ".layer";
  name += std::to_string(layer);
  name += '.';
  name += what;
  return name;
}

std::size_t ArchitectureSpec::input_dim() const {
  if (encoder_layers.empty()) throw DimensionError("architecture has no encoder layers");
  return encoder_layers.front().input_dim;
}

std::size_t ArchitectureSpec::num_classes() const {
  if (predictor_layers.empty()) throw DimensionError("architecture has no predictor layers");
  return predictor_layers.back().output_dim;
}

namespace {

void check_stack(std::string_view name, const std::vector<LayerSpec>& layers, bool required) {
  if (layers.empty()) {
    if (required) throw DimensionError(std::string(name) + ": needs at least one layer");
    return;
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].input_dim == 0 || layers[i].output_dim == 0) {
      throw DimensionError(std::string(name) + " layer " + std::to_string(i) + ": dims must be positive");
    }
    if (i > 0 && layers[i - 1].output_dim != layers[i].input_dim) {
      throw DimensionError(std::string(name) + " layer " + std::to_string(i) + ": input width " +
                           std::to_string(layers[i].input_dim) + " does not follow previous output width " +
                           std::to_string(layers[i - 1].output_dim));
    }
  }
}

void expect(bool ok, const std::string& message) {
  if (!ok) throw DimensionError(message);
}

std::string format_layers(const std::vector<LayerSpec>& layers) {
  std::ostringstream os;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) os << ',';
    os << layers[i].input_dim << 'x' << layers[i].output_dim << ':' << to_string(layers[i].activation);
  }
  return os.str();
}

std::vector<LayerSpec> parse_layers(std::string_view text, std::string_view key) {
  std::vector<LayerSpec> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) {
    const auto x = item.find('x');
    const auto colon = item.find(':');
    if (x == std::string::npos || colon == std::string::npos || colon < x) {
      throw ConfigError(std::string(key) + ": malformed layer '" + item + "' (expected INxOUT:activation)");
    }
    LayerSpec l;
    l.input_dim = static_cast<std::size_t>(parse_int(std::string_view(item).substr(0, x), key));
    l.output_dim = static_cast<std::size_t>(parse_int(std::string_view(item).substr(x + 1, colon - x - 1), key));
    l.activation = parse_activation(std::string_view(item).substr(colon + 1));
    out.push_back(l);
  }
  return out;
}

}  // namespace

void ArchitectureSpec::validate() const {
  if (!(psi_rate >= 0.0 && psi_rate < 1.0)) throw ConfigError("psi_rate must be in [0, 1)");
  expect(dim_e1 > 0 && dim_e2 > 0, "embedding widths must be positive");
  check_stack("encoder", encoder_layers, true);
  check_stack("predictor", predictor_layers, true);
  check_stack("decoder", decoder_layers, has_decoder());
  check_stack("dis1", dis1_layers, has_disentanglers());
  check_stack("dis2", dis2_layers, has_disentanglers());

  expect(encoder_layers.back().output_dim == embedding_dim(),
         "encoder final width " + std::to_string(encoder_layers.back().output_dim) + " != dim_e1 + dim_e2 = " +
             std::to_string(embedding_dim()));
  const std::size_t pred_in = kind == ModelKind::b0 ? embedding_dim() : dim_e1;
  expect(predictor_layers.front().input_dim == pred_in,
         "predictor input width must be " + std::to_string(pred_in));
  if (has_decoder()) {
    expect(decoder_layers.front().input_dim == embedding_dim(), "decoder input width must be dim_e1 + dim_e2");
    expect(decoder_layers.back().output_dim == input_dim(), "decoder output width must equal the input width");
  } else {
    expect(decoder_layers.empty(), "b0 has no decoder");
  }
  if (has_disentanglers()) {
    expect(dis1_layers.front().input_dim == dim_e1 && dis1_layers.back().output_dim == dim_e2,
           "dis1 must map dim_e1 -> dim_e2");
    expect(dis2_layers.front().input_dim == dim_e2 && dis2_layers.back().output_dim == dim_e1,
           "dis2 must map dim_e2 -> dim_e1");
  } else {
    expect(dis1_layers.empty() && dis2_layers.empty(), "only the full model has disentanglers");
  }
}

void ArchitectureSpec::write(KeyValues& kv) const {
  kv.set("arch.kind", std::string(to_string(kind)));
  kv.set("arch.dim_e1", static_cast<std::uint64_t>(dim_e1));
  kv.set("arch.dim_e2", static_cast<std::uint64_t>(dim_e2));
  kv.set("arch.psi_rate", psi_rate);
  kv.set("arch.encoder", format_layers(encoder_layers));
  kv.set("arch.predictor", format_layers(predictor_layers));
  kv.set("arch.decoder", format_layers(decoder_layers));
  kv.set("arch.dis1", format_layers(dis1_layers));
  kv.set("arch.dis2", format_layers(dis2_layers));
}

ArchitectureSpec ArchitectureSpec::read(const KeyValues& kv) {
  ArchitectureSpec s;
  s.kind = parse_model_kind(kv.get("arch.kind"));
  s.dim_e1 = kv.get_uint("arch.dim_e1");
  s.dim_e2 = kv.get_uint("arch.dim_e2");
  s.psi_rate = kv.get_double("arch.psi_rate");
  s.encoder_layers = parse_layers(kv.get("arch.encoder"), "arch.encoder");
  s.predictor_layers = parse_layers(kv.get("arch.predictor"), "arch.predictor");
  s.decoder_layers = parse_layers(kv.get("arch.decoder"), "arch.decoder");
  s.dis1_layers = parse_layers(kv.get("arch.dis1"), "arch.dis1");
  s.dis2_layers = parse_layers(kv.get("arch.dis2"), "arch.dis2");
  s.validate();
  return s;
}

namespace {
std::vector<LayerSpec> chain(std::size_t in, const std::vector<std::size_t>& hidden, Activation hidden_act,
                             std::size_t out, Activation out_act) {
  std::vector<LayerSpec> layers;
  std::size_t prev = in;
  for (std::size_t h : hidden) {
    layers.push_back({prev, h, hidden_act});
    prev = h;
  }
  layers.push_back({prev, out, out_act});
  return layers;
}
}  // namespace

ArchitectureSpec make_architecture(ModelKind kind, const ArchitectureOptions& o) {
  ArchitectureSpec s;
  s.kind = kind;
  s.dim_e1 = o.dim_e1;
  s.dim_e2 = o.dim_e2;
  s.psi_rate = o.psi_rate;
  const std::size_t e = o.dim_e1 + o.dim_e2;
  s.encoder_layers = chain(o.input_dim, o.encoder_hidden, o.hidden_activation, e, o.embedding_activation);
  const std::size_t pred_in = kind == ModelKind::b0 ? e : o.dim_e1;
  s.predictor_layers = chain(pred_in, o.predictor_hidden, o.hidden_activation, o.num_classes, Activation::softmax);
  if (kind != ModelKind::b0) {
    s.decoder_layers = chain(e, o.decoder_hidden, o.hidden_activation, o.input_dim, o.decoder_output);
  }
  if (kind == ModelKind::full) {
    // Disentanglers regress embeddings, so their output layer is linear.
    s.dis1_layers = chain(o.dim_e1, o.dis_hidden, o.hidden_activation, o.dim_e2, Activation::linear);
    s.dis2_layers = chain(o.dim_e2, o.dis_hidden, o.hidden_activation, o.dim_e1, Activation::linear);
  }
  s.validate();
  return s;
}

std::vector<std::pair<std::string, Shape>> expected_parameters(const ArchitectureSpec& spec) {
  std::vector<std::pair<std::string, Shape>> out;
  auto add_stack = [&](std::string_view component, const std::vector<LayerSpec>& layers) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      out.emplace_back(layer_param_name(component, i, "weight"), Shape{layers[i].input_dim, layers[i].output_dim});
      out.emplace_back(layer_param_name(component, i, "bias"), Shape{layers[i].output_dim});
    }
  };
  add_stack(kEnc, spec.encoder_layers);
  add_stack(kPred, spec.predictor_layers);
  add_stack(kDec, spec.decoder_layers);
  add_stack(kDis1, spec.dis1_layers);
  add_stack(kDis2, spec.dis2_layers);
  return out;
}

Model::Model(ArchitectureSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  spec_.validate();
  const RngStream init = RngStream::from_seed(seed).split("init");
  for (const auto& [name, shape] : expected_parameters(spec_)) {
    if (shape.size() == 2) {
      params_.add(name, glorot_uniform<float>(shape[0], shape[1], init.split(name)));
    } else {
      params_.add(name, Tensor::zeros(shape));
    }
  }
}

Model::Model(ArchitectureSpec spec, ParamStore params) : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  const auto expected = expected_parameters(spec_);
  if (expected.size() != params_.size()) {
    throw DimensionError("parameter count mismatch: architecture needs " + std::to_string(expected.size()) +
                         " tensors, got " + std::to_string(params_.size()));
  }
  for (const auto& [name, shape] : expected) {
    if (!params_.contains(name)) throw DimensionError("missing parameter '" + name + "'");
    if (params_.at(name).value.shape() != shape) {
      throw DimensionError("parameter '" + name + "' has shape " + shape_string(params_.at(name).value.shape()) +
                           ", architecture needs " + shape_string(shape));
    }
  }
}

// Inference wrappers bind parameters as non-trainable nodes and never call
// backward, so the store is only read.
namespace {
ParamStore& readonly(const Model& model) { return const_cast<ParamStore&>(model.params()); }
}  // namespace

SplitEmbedding encode(const Model& model, const Tensor& x) {
  Graph g;
  const SplitNodes n = encode_nodes(g, readonly(model), model.spec(), g.constant(x), false);
  SplitEmbedding out;
  out.e1 = g.value(n.e1);
  if (n.e2) out.e2 = g.value(*n.e2);
  return out;
}

Tensor predict(const Model& model, const Tensor& e1) {
  Graph g;
  return g.value(predict_nodes(g, readonly(model), model.spec(), g.constant(e1), false));
}

Tensor noisy_transform(const Tensor& e1, double psi_rate, RngStream& rng, bool training) {
  Graph g;
  return g.value(noisy_transform_nodes(g, g.constant(e1), psi_rate, rng, training));
}

Tensor decode(const Model& model, const Tensor& e1_noisy, const Tensor& e2) {
  Graph g;
  return g.value(decode_nodes(g, readonly(model), model.spec(), g.constant(e1_noisy), g.constant(e2), false));
}

std::pair<Tensor, Tensor> disentangle_forward(const Model& model, const SplitEmbedding& emb) {
  Graph g;
  const auto [e2_hat, e1_hat] =
      disentangle_nodes(g, readonly(model), model.spec(), g.constant(emb.e1), g.constant(emb.e2), false);
  return {g.value(e2_hat), g.value(e1_hat)};
}

}  // namespace invforge
