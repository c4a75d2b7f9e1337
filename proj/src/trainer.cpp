#include "invforge/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace invforge {

void TrainConfig::validate() const {
  weights.validate();
  if (k < 1) throw ConfigError("train.k must be >= 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(lr_m1 > 0.0) || !(lr_m2 > 0.0) || !std::isfinite(lr_m1) || !std::isfinite(lr_m2)) {
    throw ConfigError("learning rates must be positive and finite");
  }
  if (!std::isfinite(clip_norm)) throw ConfigError("train.clip_norm must be finite");
}

void TrainConfig::write(KeyValues& kv) const {
  kv.set("train.alpha", weights.alpha);
  kv.set("train.beta", weights.beta);
  kv.set("train.gamma", weights.gamma);
  kv.set("train.k", static_cast<std::uint64_t>(k));
  kv.set("train.epochs", static_cast<std::uint64_t>(epochs));
  kv.set("train.batch_size", static_cast<std::uint64_t>(batch_size));
  kv.set("train.lr_m1", lr_m1);
  kv.set("train.lr_m2", lr_m2);
  kv.set("train.seed", seed);
  kv.set("train.clip_norm", clip_norm);
}

TrainConfig TrainConfig::read(const KeyValues& kv) {
  TrainConfig c;
  c.weights.alpha = kv.get_double("train.alpha");
  c.weights.beta = kv.get_double("train.beta");
  c.weights.gamma = kv.get_double("train.gamma");
  c.k = kv.get_uint("train.k");
  c.epochs = kv.get_uint("train.epochs");
  c.batch_size = kv.get_uint("train.batch_size");
  c.lr_m1 = kv.get_double("train.lr_m1");
  c.lr_m2 = kv.get_double("train.lr_m2");
  c.seed = kv.get_uint("train.seed");
  c.clip_norm = kv.get_double("train.clip_norm");
  c.validate();
  return c;
}

void TrainState::write(KeyValues& kv) const {
  kv.set("state.epoch", epoch);
  kv.set("state.batch_index", batch_index);
  kv.set("state.step", step);
  kv.set("state.m1_steps", m1_steps);
  kv.set("state.m2_steps", m2_steps);
  kv.set("state.cycle_pos", cycle_pos);
  kv.set("state.dropout_cursor", dropout_cursor);
}

TrainState TrainState::read(const KeyValues& kv) {
  TrainState s;
  s.epoch = kv.get_uint("state.epoch");
  s.batch_index = kv.get_uint("state.batch_index");
  s.step = kv.get_uint("state.step");
  s.m1_steps = kv.get_uint("state.m1_steps");
  s.m2_steps = kv.get_uint("state.m2_steps");
  s.cycle_pos = kv.get_uint("state.cycle_pos");
  s.dropout_cursor = kv.get_uint("state.dropout_cursor");
  return s;
}

std::string_view to_string(Player p) noexcept { return p == Player::m1 ? "m1" : "m2"; }

namespace {
std::string divergence_message(Player player, const LossBreakdown& b) {
  std::ostringstream os;
  os << "training diverged on " << to_string(player) << " step: l_pred=" << b.l_pred << " l_dec=" << b.l_dec
     << " l_dis1=" << b.l_dis1 << " l_dis2=" << b.l_dis2 << " j_m1=" << b.j_m1 << " j_m2=" << b.j_m2;
  return os.str();
}
}  // namespace

TrainingDivergence::TrainingDivergence(Player player, LossBreakdown losses)
    : Error(divergence_message(player, losses)), player_(player), losses_(losses) {}

namespace {

void check_batch(const Model& model, const Batch& batch) {
  if (batch.x.rank() != 2 || batch.x.rows() != batch.y.size()) throw DimensionError("malformed batch");
  check_width(batch.x.cols(), model.spec().input_dim(), "batch features");
}

PsiFn<float> psi_from(const Model& model, RngStream& rng) {
  const double rate = model.spec().psi_rate;
  return [rate, &rng](Graph& g, NodeId e1) { return dropout(g, e1, rate, rng, true); };
}

LossBreakdown step(Model& model, const Batch& batch, const TrainConfig& config, RngStream& rng, Player player,
                   const ComponentSet& trainable, double lr, double clip) {
  check_batch(model, batch);
  Graph g;
  const ObjectiveNodes n = build_objective(g, model.params(), model.spec(), batch.x, batch.y, config.weights,
                                           trainable, psi_from(model, rng));
  const LossBreakdown b = read_breakdown(g, n);
  if (!b.all_finite()) throw TrainingDivergence(player, b);
  const NodeId target = player == Player::m1 ? n.j_m1 : *n.j_m2;
  g.backward(target);
  if (clip > 0.0) clip_grad_norm(model.params(), trainable, clip);
  AdamConfig adam;
  adam.lr = lr;
  optimizer_step(model.params(), adam, trainable);
  return b;
}

}  // namespace

LossBreakdown train_step_m1(Model& model, const Batch& batch, const TrainConfig& config, RngStream& dropout) {
  if (model.spec().kind != ModelKind::full) throw ContractError("M1/M2 steps need the full model");
  return step(model, batch, config, dropout, Player::m1, m1_components(), config.lr_m1, config.clip_norm);
}

LossBreakdown train_step_m2(Model& model, const Batch& batch, const TrainConfig& config, RngStream& dropout) {
  if (model.spec().kind != ModelKind::full) throw ContractError("M1/M2 steps need the full model");
  return step(model, batch, config, dropout, Player::m2, m2_components(), config.lr_m2, 0.0);
}

LossBreakdown train_step_baseline(Model& model, const Batch& batch, const TrainConfig& config,
                                  RngStream& dropout) {
  if (model.spec().kind == ModelKind::full) throw ContractError("baseline step needs a b0 or b1 model");
  return step(model, batch, config, dropout, Player::m1, model.params().components(), config.lr_m1,
              config.clip_norm);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng = RngStream::from_seed(seed).split("shuffle").split(epoch);
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

TrainState train(Model& model, const Dataset& data, const TrainConfig& config, const TrainHooks& hooks,
                 TrainState state) {
  config.validate();
  data.validate();
  check_width(data.feature_dim(), model.spec().input_dim(), "dataset features");
  if (data.num_classes() > model.spec().num_classes()) {
    throw DimensionError("dataset has more classes than the predictor outputs");
  }
  const bool full = model.spec().kind == ModelKind::full;
  if (!full) state.cycle_pos = 0;
  RngStream dropout = RngStream::from_seed(config.seed).split("dropout");
  dropout.set_cursor(state.dropout_cursor);
  const std::size_t nb = (data.size() + config.batch_size - 1) / config.batch_size;
  using clock = std::chrono::steady_clock;
  while (state.epoch < config.epochs) {
    const auto order = epoch_order(data.size(), config.seed, state.epoch);
    while (state.batch_index < nb) {
      const std::size_t begin = state.batch_index * config.batch_size;
      const std::size_t end = std::min(data.size(), begin + config.batch_size);
      const Batch batch = data.batch(std::span<const std::size_t>(order).subspan(begin, end - begin));
      const auto t0 = clock::now();
      MetricsRecord rec;
      rec.epoch = state.epoch;
      rec.step = state.step;
      if (!full) {
        rec.player = Player::m1;
        rec.losses = train_step_baseline(model, batch, config, dropout);
        ++state.m1_steps;
      } else if (state.cycle_pos == 0) {
        rec.player = Player::m1;
        rec.losses = train_step_m1(model, batch, config, dropout);
        ++state.m1_steps;
      } else {
        rec.player = Player::m2;
        rec.losses = train_step_m2(model, batch, config, dropout);
        ++state.m2_steps;
      }
      if (full) state.cycle_pos = (state.cycle_pos + 1) % (config.k + 1);
      rec.ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      ++state.step;
      ++state.batch_index;
      state.dropout_cursor = dropout.cursor();
      if (hooks.sink) hooks.sink(rec);
    }
    state.batch_index = 0;
    ++state.epoch;
    if (hooks.on_epoch) hooks.on_epoch(model, state);
  }
  return state;
}

Model train_baseline(ModelKind variant, const ArchitectureOptions& options, const Dataset& data,
                     const TrainConfig& config, const TrainHooks& hooks) {
  if (variant == ModelKind::full) throw ConfigError("train_baseline expects b0 or b1");
  Model model(make_architecture(variant, options), config.seed);
  train(model, data, config, hooks);
  return model;
}

std::string metrics_csv_header() { return "epoch,step,player,l_pred,l_dec,l_dis1,l_dis2,j_m1,j_m2,ms"; }

std::string metrics_csv_row(const MetricsRecord& r) {
  std::ostringstream os;
  const auto& b = r.losses;
  os << r.epoch << ',' << r.step << ',' << to_string(r.player) << ',' << format_double(b.l_pred) << ','
     << format_double(b.l_dec) << ',' << format_double(b.l_dis1) << ',' << format_double(b.l_dis2) << ','
     << format_double(b.j_m1) << ',' << format_double(b.j_m2) << ',' << format_double(r.ms);
  return os.str();
}

}  // namespace invforge
