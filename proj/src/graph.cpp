#include "invforge/graph.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace invforge {

std::string_view to_string(Activation act) noexcept {
  switch (act) {
    case Activation::linear: return "linear";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::softmax: return "softmax";
  }
  return "linear";
}

Activation parse_activation(std::string_view text) {
  for (Activation a : {Activation::linear, Activation::relu, Activation::sigmoid, Activation::tanh,
                       Activation::softmax}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigError("unknown activation '" + std::string(text) + "'");
}

void check_dropout_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
}

// ---------------------------------------------------------------------------
// Graph

template <class T>
auto BasicGraph<T>::node(NodeId id) const -> const Node& {
  if (id.index >= nodes_.size()) throw ContractError("node id out of range");
  return nodes_[id.index];
}

template <class T>
auto BasicGraph<T>::node(NodeId id) -> Node& {
  if (id.index >= nodes_.size()) throw ContractError("node id out of range");
  return nodes_[id.index];
}

template <class T>
NodeId BasicGraph<T>::constant(TensorT value) {
  Node n;
  n.kind = OpKind::constant;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <class T>
NodeId BasicGraph<T>::parameter(Store& store, std::string_view name, bool trainable) {
  Node n;
  n.kind = OpKind::parameter;
  n.store = &store;
  n.entry = &store.at(name);
  n.external = &n.entry->value;
  n.requires_grad = trainable;
  n.trainable_param = trainable;
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <class T>
NodeId BasicGraph<T>::record(OpKind kind, std::vector<NodeId> inputs, TensorT value, BackwardFn backward) {
  Node n;
  n.kind = kind;
  for (NodeId in : inputs) {
    if (in.index >= nodes_.size()) throw ContractError("op input refers to a later node");
    n.requires_grad = n.requires_grad || nodes_[in.index].requires_grad;
  }
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <class T>
const BasicTensor<T>& BasicGraph<T>::value(NodeId id) const {
  const Node& n = node(id);
  return n.external ? *n.external : n.value;
}

template <class T>
BasicTensor<T>& BasicGraph<T>::grad_buffer(NodeId id) {
  Node& n = node(id);
  if (n.grad.empty()) n.grad = TensorT::zeros(value(id).shape());
  return n.grad;
}

template <class T>
void BasicGraph<T>::backward(NodeId loss) {
  const TensorT& lv = value(loss);
  if (lv.shape() != Shape{1}) {
    throw ContractError("backward needs a scalar [1] loss, got " + shape_string(lv.shape()));
  }
  std::set<Store*> stores;
  for (Node& n : nodes_) {
    n.grad = TensorT();
    if (n.store) stores.insert(n.store);
  }
  for (Store* s : stores) s->zero_grad();

  grad_buffer(loss)[0] = T(1);
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, NodeId{static_cast<std::uint32_t>(i)});
  }
  for (Node& n : nodes_) {
    if (!n.trainable_param || n.grad.empty()) continue;
    T* dst = n.entry->grad.raw();
    const T* src = n.grad.raw();
    for (std::size_t k = 0, m = n.grad.size(); k < m; ++k) dst[k] += src[k];
  }
}

template class BasicGraph<float>;
template class BasicGraph<double>;

// ---------------------------------------------------------------------------
// Operations

namespace {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
Eigen::Map<const RowMat<T>> as_matrix(const BasicTensor<T>& t) {
  return {t.raw(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

template <class T>
Eigen::Map<RowMat<T>> as_matrix(BasicTensor<T>& t) {
  return {t.raw(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

bool is_2d(const Shape& s) { return s.size() == 1 || s.size() == 2; }

enum class Broadcast { none, rows };

template <class T>
Broadcast binary_layout(const BasicTensor<T>& a, const BasicTensor<T>& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::none;
  const bool b_is_row = b.rank() == 1 || (b.rank() == 2 && b.rows() == 1);
  if (a.rank() == 2 && b_is_row && b.cols() == a.cols()) return Broadcast::rows;
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_string(a.shape()) + " and " +
                       shape_string(b.shape()));
}

// Column sums of an [m x n] buffer into a length-n buffer.
template <class T>
void accumulate_column_sums(const BasicTensor<T>& src, BasicTensor<T>& dst) {
  const std::size_t m = src.rows(), n = src.cols();
  T* out = dst.raw();
  for (std::size_t r = 0; r < m; ++r) {
    const T* row = src.raw() + r * n;
    for (std::size_t c = 0; c < n; ++c) out[c] += row[c];
  }
}

template <class T, class F, class D>
NodeId pointwise_with_rule(BasicGraph<T>& g, NodeId a, OpKind kind, F forward, D derivative) {
  const BasicTensor<T>& x = g.value(a);
  BasicTensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = forward(x[i]);
  // derivative(x, y) gives dy/dx from the saved input and output.
  return g.record(kind, {a}, std::move(y), [a, derivative](BasicGraph<T>& gr, NodeId self) {
    const BasicTensor<T>& G = gr.grad(self);
    const BasicTensor<T>& X = gr.value(a);
    const BasicTensor<T>& Y = gr.value(self);
    BasicTensor<T>& dA = gr.grad_buffer(a);
    for (std::size_t i = 0; i < G.size(); ++i) dA[i] += G[i] * derivative(X[i], Y[i]);
  });
}

template <class T>
T stable_sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

}  // namespace

template <class T>
NodeId matmul(BasicGraph<T>& g, NodeId a, NodeId b) {
  const BasicTensor<T>& A = g.value(a);
  const BasicTensor<T>& B = g.value(b);
  if (!is_2d(A.shape()) || !is_2d(B.shape()) || A.cols() != B.rows()) {
    throw DimensionError("matmul: incompatible shapes " + shape_string(A.shape()) + " and " +
                         shape_string(B.shape()));
  }
  BasicTensor<T> C({A.rows(), B.cols()});
  as_matrix(C).noalias() = as_matrix(A) * as_matrix(B);
  return g.record(OpKind::matmul, {a, b}, std::move(C), [a, b](BasicGraph<T>& gr, NodeId self) {
    const auto G = as_matrix(gr.grad(self));
    if (gr.requires_grad(a)) {
      auto dA = as_matrix(gr.grad_buffer(a));
      dA.noalias() += G * as_matrix(gr.value(b)).transpose();
    }
    if (gr.requires_grad(b)) {
      auto dB = as_matrix(gr.grad_buffer(b));
      dB.noalias() += as_matrix(gr.value(a)).transpose() * G;
    }
  });
}

template <class T>
NodeId add(BasicGraph<T>& g, NodeId a, NodeId b) {
  const BasicTensor<T>& A = g.value(a);
  const BasicTensor<T>& B = g.value(b);
  const Broadcast bc = binary_layout(A, B, "add");
  BasicTensor<T> C = A;
  const std::size_t n = B.size();
  for (std::size_t i = 0; i < C.size(); ++i) C[i] += B[bc == Broadcast::rows ? i % n : i];
  return g.record(OpKind::add, {a, b}, std::move(C), [a, b, bc](BasicGraph<T>& gr, NodeId self) {
    const BasicTensor<T>& G = gr.grad(self);
    if (gr.requires_grad(a)) {
      BasicTensor<T>& dA = gr.grad_buffer(a);
      for (std::size_t i = 0; i < G.size(); ++i) dA[i] += G[i];
    }
    if (gr.requires_grad(b)) {
      BasicTensor<T>& dB = gr.grad_buffer(b);
      if (bc == Broadcast::rows) {
        accumulate_column_sums(G, dB);
      } else {
        for (std::size_t i = 0; i < G.size(); ++i) dB[i] += G[i];
      }
    }
  });
}

template <class T>
NodeId sub(BasicGraph<T>& g, NodeId a, NodeId b) {
  const BasicTensor<T>& A = g.value(a);
  const BasicTensor<T>& B = g.value(b);
  const Broadcast bc = binary_layout(A, B, "sub");
  BasicTensor<T> C = A;
  const std::size_t n = B.size();
  for (std::size_t i = 0; i < C.size(); ++i) C[i] -= B[bc == Broadcast::rows ? i % n : i];
  return g.record(OpKind::sub, {a, b}, std::move(C), [a, b, bc](BasicGraph<T>& gr, NodeId self) {
    const BasicTensor<T>& G = gr.grad(self);
    if (gr.requires_grad(a)) {
      BasicTensor<T>& dA = gr.grad_buffer(a);
      for (std::size_t i = 0; i < G.size(); ++i) dA[i] += G[i];
    }
    if (gr.requires_grad(b)) {
      BasicTensor<T>& dB = gr.grad_buffer(b);
      const std::size_t n = dB.size();
      for (std::size_t i = 0; i < G.size(); ++i) dB[bc == Broadcast::rows ? i % n : i] -= G[i];
    }
  });
}

template <class T>
NodeId mul(BasicGraph<T>& g, NodeId a, NodeId b) {
  const BasicTensor<T>& A = g.value(a);
  const BasicTensor<T>& B = g.value(b);
  const Broadcast bc = binary_layout(A, B, "mul");
  BasicTensor<T> C = A;
  const std::size_t n = B.size();
  for (std::size_t i = 0; i < C.size(); ++i) C[i] *= B[bc == Broadcast::rows ? i % n : i];
  return g.record(OpKind::mul, {a, b}, std::move(C), [a, b, bc](BasicGraph<T>& gr, NodeId self) {
    const BasicTensor<T>& G = gr.grad(self);
    const BasicTensor<T>& A = gr.value(a);
    const BasicTensor<T>& B = gr.value(b);
    const std::size_t n = B.size();
    if (gr.requires_grad(a)) {
      BasicTensor<T>& dA = gr.grad_buffer(a);
      for (std::size_t i = 0; i < G.size(); ++i) dA[i] += G[i] * B[bc == Broadcast::rows ? i % n : i];
    }
    if (gr.requires_grad(b)) {
      BasicTensor<T>& dB = gr.grad_buffer(b);
      for (std::size_t i = 0; i < G.size(); ++i) dB[bc == Broadcast::rows ? i % n : i] += G[i] * A[i];
    }
  });
}

template <class T>
NodeId scale(BasicGraph<T>& g, NodeId a, double factor) {
  const T f = static_cast<T>(factor);
  BasicTensor<T> C = g.value(a);
  for (T& v : C.data()) v *= f;
  return g.record(OpKind::scale, {a}, std::move(C), [a, f](BasicGraph<T>& gr, NodeId self) {
    const BasicTensor<T>& G = gr.grad(self);
    BasicTensor<T>& dA = gr.grad_buffer(a);
    for (std::size_t i = 0; i < G.size(); ++i) dA[i] += f * G[i];
  });
}

template <class T>
NodeId relu(BasicGraph<T>& g, NodeId a) {
  return pointwise_with_rule(
      g, a, OpKind::relu, [](T x) { return x < T(0) ? T(0) : x; },
      [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <class T>
NodeId sigmoid(BasicGraph<T>& g, NodeId a) {
  return pointwise_with_rule(
      g, a, OpKind::sigmoid, [](T x) { return stable_sigmoid(x); }, [](T, T y) { return y * (T(1) - y); });
}

template <class T>
NodeId tanh(BasicGraph<T>& g, NodeId a) {
  return pointwise_with_rule(
      g, a, OpKind::tanh, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <class T>
NodeId softmax_rows(BasicGraph<T>& g, NodeId a) {
  const BasicTensor<T>& X = g.value(a);
  if (!is_2d(X.shape()) || X.cols() == 0) {
    throw DimensionError("softmax_rows: needs a matrix, got " + shape_string(X.shape()));
  }
  BasicTensor<T> Y(X.shape());
  const std::size_t m = X.rows(), n = X.cols();
  for (std::size_t r = 0; r < m; ++r) {
    const T* x = X.raw() + r * n;
    T* y = Y.raw() + r * n;
    const T mx = *std::max_element(x, x + n);
    T total = 0;
    for (std::size_t c = 0; c < n; ++c) {
      y[c] = std::exp(x[c] - mx);
      total += y[c];
    }
    for (std::size_t c = 0; c < n; ++c) y[c] /= total;
  }
  return g.record(OpKind::softmax, {a}, std::move(Y), [a](BasicGraph<T>& gr, NodeId self) {
    const BasicTensor<T>& G = gr.grad(self);
    const BasicTensor<T>& Yv = gr.value(self);
    BasicTensor<T>& dA = gr.grad_buffer(a);
    const std::size_t m = Yv.rows(), n = Yv.cols();
    for (std::size_t r = 0; r < m; ++r) {
      const T* y = Yv.raw() + r * n;
      const T* gr_row = G.raw() + r * n;
      T dot = 0;
      for (std::size_t c = 0; c < n; ++c) dot += gr_row[c] * y[c];
      T* d = dA.raw() + r * n;
      for (std::size_t c = 0; c < n; ++c) d[c] += y[c] * (gr_row[c] - dot);
    }
  });
}

template <class T>
NodeId activation(BasicGraph<T>& g, NodeId a, Activation act) {
  switch (act) {
    case Activation::linear: return a;
    case Activation::relu: return relu(g, a);
    case Activation::sigmoid: return sigmoid(g, a);
    case Activation::tanh: return tanh(g, a);
    case Activation::softmax: return softmax_rows(g, a);
  }
  return a;
}

template <class T>
NodeId apply_mask(BasicGraph<T>& g, NodeId a, BasicTensor<T> mask) {
  const BasicTensor<T>& X = g.value(a);
  if (mask.shape() != X.shape()) {
    throw DimensionError("mask shape " + shape_string(mask.shape()) + " does not match " +
                         shape_string(X.shape()));
  }
  BasicTensor<T> Y = X;
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] *= mask[i];
  return g.record(OpKind::mask, {a}, std::move(Y),
                  [a, mask = std::move(mask)](BasicGraph<T>& gr, NodeId self) {
                    const BasicTensor<T>& G = gr.grad(self);
                    BasicTensor<T>& dA = gr.grad_buffer(a);
                    for (std::size_t i = 0; i < G.size(); ++i) dA[i] += G[i] * mask[i];
                  });
}

template <class T>
BasicTensor<T> dropout_mask(const Shape& shape, double rate, RngStream& rng) {
  check_dropout_rate(rate);
  BasicTensor<T> mask(shape);
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  for (T& m : mask.data()) m = rng.uniform() < rate ? T(0) : keep;
  return mask;
}

template <class T>
NodeId dropout(BasicGraph<T>& g, NodeId a, double rate, RngStream& rng, bool training) {
  check_dropout_rate(rate);
  if (!training || rate == 0.0) return a;
  return apply_mask(g, a, dropout_mask<T>(g.value(a).shape(), rate, rng));
}

template <class T>
NodeId concat_cols(BasicGraph<T>& g, NodeId a, NodeId b) {
  const BasicTensor<T>& A = g.value(a);
  const BasicTensor<T>& B = g.value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.rows() != B.rows()) {
    throw DimensionError("concat_cols: incompatible shapes " + shape_string(A.shape()) + " and " +
                         shape_string(B.shape()));
  }
  const std::size_t m = A.rows(), na = A.cols(), nb = B.cols();
  BasicTensor<T> C({m, na + nb});
  for (std::size_t r = 0; r < m; ++r) {
    std::copy_n(A.raw() + r * na, na, C.raw() + r * (na + nb));
    std::copy_n(B.raw() + r * nb, nb, C.raw() + r * (na + nb) + na);
  }
  return g.record(OpKind::concat, {a, b}, std::move(C), [a, b, m, na, nb](BasicGraph<T>& gr, NodeId self) {
    const BasicTensor<T>& G = gr.grad(self);
    if (gr.requires_grad(a)) {
      BasicTensor<T>& dA = gr.grad_buffer(a);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < na; ++c) dA[r * na + c] += G[r * (na + nb) + c];
    }
    if (gr.requires_grad(b)) {
      BasicTensor<T>& dB = gr.grad_buffer(b);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < nb; ++c) dB[r * nb + c] += G[r * (na + nb) + na + c];
    }
  });
}

template <class T>
NodeId slice_cols(BasicGraph<T>& g, NodeId a, std::size_t begin, std::size_t end) {
  const BasicTensor<T>& A = g.value(a);
  if (A.rank() != 2 || begin >= end || end > A.cols()) {
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") invalid for " + shape_string(A.shape()));
  }
  const std::size_t m = A.rows(), n = A.cols(), w = end - begin;
  BasicTensor<T> C({m, w});
  for (std::size_t r = 0; r < m; ++r) std::copy_n(A.raw() + r * n + begin, w, C.raw() + r * w);
  return g.record(OpKind::slice, {a}, std::move(C), [a, m, n, w, begin](BasicGraph<T>& gr, NodeId self) {
    const BasicTensor<T>& G = gr.grad(self);
    BasicTensor<T>& dA = gr.grad_buffer(a);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < w; ++c) dA[r * n + begin + c] += G[r * w + c];
  });
}

template <class T>
NodeId sum(BasicGraph<T>& g, NodeId a) {
  const BasicTensor<T>& A = g.value(a);
  T total = 0;
  for (T v : A.data()) total += v;
  return g.record(OpKind::sum, {a}, BasicTensor<T>({1}, total), [a](BasicGraph<T>& gr, NodeId self) {
    const T G = gr.grad(self)[0];
    for (T& d : gr.grad_buffer(a).data()) d += G;
  });
}

template <class T>
NodeId mean(BasicGraph<T>& g, NodeId a) {
  const BasicTensor<T>& A = g.value(a);
  T total = 0;
  for (T v : A.data()) total += v;
  const T inv = T(1) / static_cast<T>(A.size());
  return g.record(OpKind::mean, {a}, BasicTensor<T>({1}, total * inv), [a, inv](BasicGraph<T>& gr, NodeId self) {
    const T G = gr.grad(self)[0] * inv;
    for (T& d : gr.grad_buffer(a).data()) d += G;
  });
}

template <class T>
NodeId cross_entropy(BasicGraph<T>& g, NodeId probs, std::span<const int> labels) {
  const BasicTensor<T>& P = g.value(probs);
  if (P.rank() != 2 || P.rows() != labels.size()) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for probabilities " +
                         shape_string(P.shape()));
  }
  const std::size_t m = P.rows(), n = P.cols();
  std::vector<int> y(labels.begin(), labels.end());
  T total = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (y[r] < 0 || static_cast<std::size_t>(y[r]) >= n) {
      throw DataError("label " + std::to_string(y[r]) + " out of range for " + std::to_string(n) + " classes");
    }
    total -= std::log(std::max(P.at(r, y[r]), static_cast<T>(kLogClamp)));
  }
  const T inv = T(1) / static_cast<T>(m);
  return g.record(OpKind::cross_entropy, {probs}, BasicTensor<T>({1}, total * inv),
                  [probs, y = std::move(y), inv, n](BasicGraph<T>& gr, NodeId self) {
                    const T G = gr.grad(self)[0] * inv;
                    const BasicTensor<T>& Pv = gr.value(probs);
                    BasicTensor<T>& dP = gr.grad_buffer(probs);
                    for (std::size_t r = 0; r < y.size(); ++r) {
                      const T p = Pv[r * n + y[r]];
                      if (p > static_cast<T>(kLogClamp)) dP[r * n + y[r]] -= G / p;
                    }
                  });
}

template <class T>
NodeId mse(BasicGraph<T>& g, NodeId a, NodeId b) {
  const BasicTensor<T>& A = g.value(a);
  const BasicTensor<T>& B = g.value(b);
  if (A.shape() != B.shape()) {
    throw DimensionError("mse: shape mismatch " + shape_string(A.shape()) + " vs " + shape_string(B.shape()));
  }
  T total = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const T d = A[i] - B[i];
    total += d * d;
  }
  const T inv = T(1) / static_cast<T>(A.size());
  return g.record(OpKind::mse, {a, b}, BasicTensor<T>({1}, total * inv), [a, b, inv](BasicGraph<T>& gr, NodeId self) {
    const T G = gr.grad(self)[0] * T(2) * inv;
    const BasicTensor<T>& Av = gr.value(a);
    const BasicTensor<T>& Bv = gr.value(b);
    if (gr.requires_grad(a)) {
      BasicTensor<T>& dA = gr.grad_buffer(a);
      for (std::size_t i = 0; i < dA.size(); ++i) dA[i] += G * (Av[i] - Bv[i]);
    }
    if (gr.requires_grad(b)) {
      BasicTensor<T>& dB = gr.grad_buffer(b);
      for (std::size_t i = 0; i < dB.size(); ++i) dB[i] -= G * (Av[i] - Bv[i]);
    }
  });
}

#define INVFORGE_INSTANTIATE(T)                                                                  \
  template NodeId matmul<T>(BasicGraph<T>&, NodeId, NodeId);                                     \
  template NodeId add<T>(BasicGraph<T>&, NodeId, NodeId);                                        \
  template NodeId sub<T>(BasicGraph<T>&, NodeId, NodeId);                                        \
  template NodeId mul<T>(BasicGraph<T>&, NodeId, NodeId);                                        \
  template NodeId scale<T>(BasicGraph<T>&, NodeId, double);                                      \
  template NodeId sigmoid<T>(BasicGraph<T>&, NodeId);                                            \
  template NodeId tanh<T>(BasicGraph<T>&, NodeId);                                               \
  template NodeId softmax_rows<T>(BasicGraph<T>&, NodeId);                                       \
  template NodeId activation<T>(BasicGraph<T>&, NodeId, Activation);                             \
  template NodeId apply_mask<T>(BasicGraph<T>&, NodeId, BasicTensor<T>);                         \
  template NodeId dropout<T>(BasicGraph<T>&, NodeId, double, RngStream&, bool);                  \
  template NodeId concat_cols<T>(BasicGraph<T>&, NodeId, NodeId);                                \
  template NodeId slice_cols<T>(BasicGraph<T>&, NodeId, std::size_t, std::size_t);               \
  template NodeId sum<T>(BasicGraph<T>&, NodeId);                                                \
  template NodeId mean<T>(BasicGraph<T>&, NodeId);                                               \
  template NodeId cross_entropy<T>(BasicGraph<T>&, NodeId, std::span<const int>);                \
  template NodeId mse<T>(BasicGraph<T>&, NodeId, NodeId);                                        \
  template BasicTensor<T> dropout_mask<T>(const Shape&, double, RngStream&);                     \
  template NodeId relu<T>(BasicGraph<T>&, NodeId);

INVFORGE_INSTANTIATE(float)
INVFORGE_INSTANTIATE(double)
#undef INVFORGE_INSTANTIATE

}  // namespace invforge
