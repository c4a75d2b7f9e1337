#pragma once

#include <optional>
#include <span>
#include <utility>

#include "invforge/graph.hpp"

namespace invforge {

struct LossWeights {
  double alpha = 100.0;
  double beta = 0.1;
  double gamma = 1.0;

  void validate() const;
  // alpha / beta, undefined when beta == 0.
  std::optional<double> eta() const noexcept;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct ComponentLosses {
  double l_pred = 0.0;
  double l_dec = 0.0;
  double l_dis1 = 0.0;
  double l_dis2 = 0.0;
};

struct LossBreakdown {
  double l_pred = 0.0;
  double l_dec = 0.0;
  double l_dis1 = 0.0;
  double l_dis2 = 0.0;
  double j_m1 = 0.0;
  double j_m2 = 0.0;

  bool all_finite() const noexcept;
  friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

/// Player objectives. M1 (encoder, predictor, decoder) minimizes
///   j_m1 = alpha*l_pred + beta*l_dec - gamma*(l_dis1 + l_dis2),
/// M2 (the disentanglers) minimizes its own regression error
///   j_m2 = l_dis1 + l_dis2,
/// so the two players pull the disentanglement terms in opposite directions.
LossBreakdown composite_objectives(const ComponentLosses& losses, const LossWeights& weights);

// Tensor-level losses.
double pred_loss(const Tensor& probs, std::span<const int> labels);
double dec_loss(const Tensor& x_hat, const Tensor& x);
// (l_dis1, l_dis2) = (MSE(e2_hat, e2), MSE(e1_hat, e1)).
std::pair<double, double> dis_losses(const Tensor& e2_hat, const Tensor& e2, const Tensor& e1_hat, const Tensor& e1);

// Graph-level losses.
template <class T>
NodeId pred_loss(BasicGraph<T>& g, NodeId probs, std::span<const int> labels) {
  return cross_entropy(g, probs, labels);
}

template <class T>
NodeId dec_loss(BasicGraph<T>& g, NodeId x_hat, NodeId x) {
  return mse(g, x_hat, x);
}

template <class T>
std::pair<NodeId, NodeId> dis_losses(BasicGraph<T>& g, NodeId e2_hat, NodeId e2, NodeId e1_hat, NodeId e1) {
  return {mse(g, e2_hat, e2), mse(g, e1_hat, e1)};
}

}  // namespace invforge
