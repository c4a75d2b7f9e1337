#include "invforge/losses.hpp"

#include <cmath>

namespace invforge {

void LossWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0)) {
    throw ConfigError("loss weights must be finite and non-negative");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw ConfigError("loss weights must be finite");
  }
  if (alpha == 0.0 && beta == 0.0 && gamma == 0.0) throw ConfigError("loss weights cannot all be zero");
}

std::optional<double> LossWeights::eta() const noexcept {
  if (beta > 0.0) return alpha / beta;
  return std::nullopt;
}

bool LossBreakdown::all_finite() const noexcept {
  return std::isfinite(l_pred) && std::isfinite(l_dec) && std::isfinite(l_dis1) && std::isfinite(l_dis2) &&
         std::isfinite(j_m1) && std::isfinite(j_m2);
}

LossBreakdown composite_objectives(const ComponentLosses& c, const LossWeights& w) {
  LossBreakdown b;
  b.l_pred = c.l_pred;
  b.l_dec = c.l_dec;
  b.l_dis1 = c.l_dis1;
  b.l_dis2 = c.l_dis2;
  b.j_m1 = w.alpha * c.l_pred + w.beta * c.l_dec - w.gamma * (c.l_dis1 + c.l_dis2);
  b.j_m2 = c.l_dis1 + c.l_dis2;
  return b;
}

double pred_loss(const Tensor& probs, std::span<const int> labels) {
  Graph g;
  return g.value(pred_loss(g, g.constant(probs), labels))[0];
}

double dec_loss(const Tensor& x_hat, const Tensor& x) {
  Graph g;
  return g.value(dec_loss(g, g.constant(x_hat), g.constant(x)))[0];
}

std::pair<double, double> dis_losses(const Tensor& e2_hat, const Tensor& e2, const Tensor& e1_hat, const Tensor& e1) {
  Graph g;
  const auto [l1, l2] = dis_losses(g, g.constant(e2_hat), g.constant(e2), g.constant(e1_hat), g.constant(e1));
  return {g.value(l1)[0], g.value(l2)[0]};
}

}  // namespace invforge
