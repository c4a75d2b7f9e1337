#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "invforge/dataset.hpp"
#include "invforge/kv.hpp"
#include "invforge/losses.hpp"
#include "invforge/model.hpp"

namespace invforge {

struct TrainConfig {
  LossWeights weights;
  // Number of M2 steps after each M1 step.
  std::size_t k = 5;
  std::size_t epochs = 50;
  std::size_t batch_size = 128;
  double lr_m1 = 1e-3;
  double lr_m2 = 1e-3;
  std::uint64_t seed = 1;
  // Global-norm clip on M1 gradients; <= 0 disables.
  double clip_norm = 5.0;

  void validate() const;
  void write(KeyValues& kv) const;
  static TrainConfig read(const KeyValues& kv);

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Resumable position of a run. cycle_pos 0 means the next step belongs to
/// M1; 1..k count the M2 steps of the current cycle.
struct TrainState {
  std::uint64_t epoch = 0;
  std::uint64_t batch_index = 0;
  std::uint64_t step = 0;
  std::uint64_t m1_steps = 0;
  std::uint64_t m2_steps = 0;
  std::uint64_t cycle_pos = 0;
  std::uint64_t dropout_cursor = 0;

  void write(KeyValues& kv) const;
  static TrainState read(const KeyValues& kv);

  friend bool operator==(const TrainState&, const TrainState&) = default;
};

enum class Player : std::uint8_t { m1, m2 };
std::string_view to_string(Player p) noexcept;

struct MetricsRecord {
  std::uint64_t epoch = 0;
  std::uint64_t step = 0;
  Player player = Player::m1;
  LossBreakdown losses;
  double ms = 0.0;
};

using MetricsSink = std::function<void(const MetricsRecord&)>;

class TrainingDivergence : public Error {
 public:
  TrainingDivergence(Player player, LossBreakdown losses);
  Player player() const noexcept { return player_; }
  const LossBreakdown& losses() const noexcept { return losses_; }

 private:
  Player player_;
  LossBreakdown losses_;
};

/// Loss nodes of one forward pass. Terms a model kind lacks are absent.
struct ObjectiveNodes {
  NodeId l_pred;
  std::optional<NodeId> l_dec;
  std::optional<NodeId> l_dis1;
  std::optional<NodeId> l_dis2;
  NodeId j_m1;
  std::optional<NodeId> j_m2;
};

template <class T>
using PsiFn = std::function<NodeId(BasicGraph<T>&, NodeId)>;

/// Forward pass of every network the model kind has, with the noisy
/// transformer `psi` applied to e1 on the decoder path only.
///   full: j_m1 = a*l_pred + b*l_dec - g*(l_dis1 + l_dis2), j_m2 = l_dis1 + l_dis2
///   b1:   j_m1 = a*l_pred + b*l_dec
///   b0:   j_m1 = a*l_pred over the unsplit embedding
/// Only components in `trainable` receive parameter gradients. Disentangler
/// targets are not detached.
template <class T>
ObjectiveNodes build_objective(BasicGraph<T>& g, BasicParamStore<T>& store, const ArchitectureSpec& spec,
                               const BasicTensor<T>& x, std::span<const int> y, const LossWeights& w,
                               const ComponentSet& trainable, const PsiFn<T>& psi) {
  auto tr = [&](std::string_view c) { return trainable.contains(c); };
  const NodeId xn = g.constant(x);
  check_width(x.cols(), spec.input_dim(), "encoder input");
  const NodeId h = dense_stack(g, store, kEnc, spec.encoder_layers, xn, tr(kEnc));
  ObjectiveNodes out;
  if (spec.kind == ModelKind::b0) {
    out.l_pred = pred_loss(g, predict_nodes(g, store, spec, h, tr(kPred)), y);
    out.j_m1 = scale(g, out.l_pred, w.alpha);
    return out;
  }
  const NodeId e1 = slice_cols(g, h, 0, spec.dim_e1);
  const NodeId e2 = slice_cols(g, h, spec.dim_e1, spec.embedding_dim());
  out.l_pred = pred_loss(g, predict_nodes(g, store, spec, e1, tr(kPred)), y);
  const NodeId x_hat = decode_nodes(g, store, spec, psi(g, e1), e2, tr(kDec));
  out.l_dec = dec_loss(g, x_hat, xn);
  NodeId j = add(g, scale(g, out.l_pred, w.alpha), scale(g, *out.l_dec, w.beta));
  if (spec.has_disentanglers()) {
    const auto [e2_hat, e1_hat] = disentangle_nodes(g, store, spec, e1, e2, tr(kDis1) || tr(kDis2));
    const auto [l1, l2] = dis_losses(g, e2_hat, e2, e1_hat, e1);
    out.l_dis1 = l1;
    out.l_dis2 = l2;
    const NodeId dis = add(g, l1, l2);
    j = sub(g, j, scale(g, dis, w.gamma));
    out.j_m2 = dis;
  }
  out.j_m1 = j;
  return out;
}

/// Scalar values of an objective's nodes, with absent terms as zero.
template <class T>
LossBreakdown read_breakdown(const BasicGraph<T>& g, const ObjectiveNodes& n) {
  auto v = [&](std::optional<NodeId> id) { return id ? static_cast<double>(g.value(*id)[0]) : 0.0; };
  LossBreakdown b;
  b.l_pred = g.value(n.l_pred)[0];
  b.l_dec = v(n.l_dec);
  b.l_dis1 = v(n.l_dis1);
  b.l_dis2 = v(n.l_dis2);
  b.j_m1 = g.value(n.j_m1)[0];
  b.j_m2 = v(n.j_m2);
  return b;
}

/// One M1 update: forward with psi active, backprop j_m1, clip, Adam on
/// {enc, pred, dec}. Disentangler parameters are left bit-identical.
LossBreakdown train_step_m1(Model& model, const Batch& batch, const TrainConfig& config, RngStream& dropout);

/// One M2 update on {dis1, dis2} minimizing j_m2; the rest stays bit-identical.
LossBreakdown train_step_m2(Model& model, const Batch& batch, const TrainConfig& config, RngStream& dropout);

/// Baseline update (b0 or b1): minimizes j_m1 of the model kind over every
/// component the model has.
LossBreakdown train_step_baseline(Model& model, const Batch& batch, const TrainConfig& config,
                                  RngStream& dropout);

struct TrainHooks {
  MetricsSink sink;
  // Called after each completed epoch with the current state.
  std::function<void(const Model&, const TrainState&)> on_epoch;
};

/// Runs (or resumes) training until config.epochs passes are complete.
/// Each epoch walks a seeded permutation of the dataset in batches of
/// config.batch_size (the last may be short). For the full model the steps
/// cycle 1 x M1 then k x M2, each step taking the next batch; baselines take
/// one baseline step per batch.
TrainState train(Model& model, const Dataset& data, const TrainConfig& config, const TrainHooks& hooks = {},
                 TrainState state = {});

/// Trains a fresh baseline (b0 or b1) model.
Model train_baseline(ModelKind variant, const ArchitectureOptions& options, const Dataset& data,
                     const TrainConfig& config, const TrainHooks& hooks = {});

/// Indices of epoch `epoch`'s permutation.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::uint64_t epoch);

// CSV metrics.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& r);

}  // namespace invforge
