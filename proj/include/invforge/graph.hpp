#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "invforge/params.hpp"
#include "invforge/rng.hpp"
#include "invforge/tensor.hpp"

namespace invforge {

struct NodeId {
  std::uint32_t index = 0;
  friend bool operator==(NodeId, NodeId) = default;
};

enum class OpKind : std::uint8_t {
  constant,
  parameter,
  matmul,
  add,
  sub,
  mul,
  scale,
  relu,
  sigmoid,
  tanh,
  softmax,
  mask,
  concat,
  slice,
  sum,
  mean,
  cross_entropy,
  mse,
};

enum class Activation : std::uint8_t { linear, relu, sigmoid, tanh, softmax };

std::string_view to_string(Activation act) noexcept;
Activation parse_activation(std::string_view text);

/// Define-by-run tape. Nodes are appended in evaluation order, so the node
/// vector is already topologically sorted; backward walks it in reverse and
/// visits each node once.
template <class T>
class BasicGraph {
 public:
  using TensorT = BasicTensor<T>;
  using Store = BasicParamStore<T>;
  using BackwardFn = std::function<void(BasicGraph&, NodeId self)>;

  NodeId constant(TensorT value);
  // Binds a store entry. A non-trainable parameter still passes gradients
  // through to its consumers' other inputs but never receives one itself.
  NodeId parameter(Store& store, std::string_view name, bool trainable = true);

  NodeId record(OpKind kind, std::vector<NodeId> inputs, TensorT value, BackwardFn backward);

  const TensorT& value(NodeId id) const;
  // Empty tensor when no gradient reached the node.
  const TensorT& grad(NodeId id) const { return node(id).grad; }
  TensorT& grad_buffer(NodeId id);
  bool requires_grad(NodeId id) const { return node(id).requires_grad; }
  OpKind kind(NodeId id) const { return node(id).kind; }
  std::span<const NodeId> inputs(NodeId id) const { return node(id).inputs; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Reverse-mode sweep from a scalar ([1]) node. Gradient accumulators of
  /// every bound store are reset first, so parameters the loss does not
  /// reach end with zero gradients.
  void backward(NodeId loss);

 private:
  struct Node {
    OpKind kind = OpKind::constant;
    std::vector<NodeId> inputs;
    TensorT value;
    const TensorT* external = nullptr;
    TensorT grad;
    BackwardFn backward;
    bool requires_grad = false;
    bool trainable_param = false;
    Store* store = nullptr;
    ParamEntry<T>* entry = nullptr;
  };

  const Node& node(NodeId id) const;
  Node& node(NodeId id);

  std::vector<Node> nodes_;
};

using Graph = BasicGraph<float>;
using Graph64 = BasicGraph<double>;

extern template class BasicGraph<float>;
extern template class BasicGraph<double>;

// Operations. Binary add/sub/mul accept equal shapes, or a [n] / [1 x n]
// right operand broadcast across the rows of an [m x n] left operand.
template <class T> NodeId matmul(BasicGraph<T>& g, NodeId a, NodeId b);
template <class T> NodeId add(BasicGraph<T>& g, NodeId a, NodeId b);
template <class T> NodeId sub(BasicGraph<T>& g, NodeId a, NodeId b);
template <class T> NodeId mul(BasicGraph<T>& g, NodeId a, NodeId b);
template <class T> NodeId scale(BasicGraph<T>& g, NodeId a, double factor);
template <class T> NodeId relu(BasicGraph<T>& g, NodeId a);
template <class T> NodeId sigmoid(BasicGraph<T>& g, NodeId a);
template <class T> NodeId tanh(BasicGraph<T>& g, NodeId a);
template <class T> NodeId softmax_rows(BasicGraph<T>& g, NodeId a);
template <class T> NodeId activation(BasicGraph<T>& g, NodeId a, Activation act);
// Multiplies by a fixed mask; the backward pass reuses the same mask.
template <class T> NodeId apply_mask(BasicGraph<T>& g, NodeId a, BasicTensor<T> mask);
// Inverted dropout: zero with probability `rate`, survivors scaled by
// 1/(1-rate). Identity (same node) when not training or rate == 0.
template <class T> NodeId dropout(BasicGraph<T>& g, NodeId a, double rate, RngStream& rng, bool training);
template <class T> NodeId concat_cols(BasicGraph<T>& g, NodeId a, NodeId b);
template <class T> NodeId slice_cols(BasicGraph<T>& g, NodeId a, std::size_t begin, std::size_t end);
template <class T> NodeId sum(BasicGraph<T>& g, NodeId a);
template <class T> NodeId mean(BasicGraph<T>& g, NodeId a);
// Mean of -log(max(p[i, y_i], 1e-12)) over rows.
template <class T> NodeId cross_entropy(BasicGraph<T>& g, NodeId probs, std::span<const int> labels);
// Mean squared difference over all elements.
template <class T> NodeId mse(BasicGraph<T>& g, NodeId a, NodeId b);

/// Dropout mask values (0 or 1/(1-rate)) for a tensor of `shape`.
template <class T>
BasicTensor<T> dropout_mask(const Shape& shape, double rate, RngStream& rng);

void check_dropout_rate(double rate);

inline constexpr double kLogClamp = 1e-12;

}  // namespace invforge
