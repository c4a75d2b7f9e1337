#include <gtest/gtest.h>

#include <filesystem>

#include "invforge/checkpoint.hpp"
#include "invforge/eval.hpp"
#include "invforge/trainer.hpp"
#include "toy.hpp"

using namespace invforge;
using test::blobs;
using test::same_entries;
using test::small_arch;

namespace {

Model full_model(std::uint64_t seed = 1) { return Model(make_architecture(ModelKind::full, small_arch(4, 2)), seed); }

TrainConfig quick(std::size_t epochs = 1, std::size_t batch = 16) {
  TrainConfig c;
  c.epochs = epochs;
  c.batch_size = batch;
  return c;
}

}  // namespace

TEST(TrainStep, M1LeavesDisentanglersBitIdentical) {
  Model m = full_model();
  const Dataset d = blobs(32, 4, 1);
  const Model before = m;
  RngStream rng = RngStream::from_seed(1);
  train_step_m1(m, d.range(0, 32), quick(), rng);
  EXPECT_TRUE(same_entries(m.params(), before.params(), kDis1));
  EXPECT_TRUE(same_entries(m.params(), before.params(), kDis2));
  EXPECT_FALSE(same_entries(m.params(), before.params(), kEnc));
  EXPECT_FALSE(same_entries(m.params(), before.params(), kDec));
}

TEST(TrainStep, M2LeavesFirstPlayerBitIdentical) {
  Model m = full_model();
  const Dataset d = blobs(32, 4, 1);
  const Model before = m;
  RngStream rng = RngStream::from_seed(1);
  train_step_m2(m, d.range(0, 32), quick(), rng);
  for (auto c : {kEnc, kPred, kDec}) EXPECT_TRUE(same_entries(m.params(), before.params(), c)) << c;
  EXPECT_FALSE(same_entries(m.params(), before.params(), kDis1));
}

TEST(TrainStep, PureClassifierStepsReducePredictionLoss) {
  Model m = full_model();
  const Batch b = blobs(64, 4, 2).range(0, 64);
  TrainConfig c = quick();
  c.weights = LossWeights{100, 0, 0};
  RngStream rng = RngStream::from_seed(1);
  const double first = train_step_m1(m, b, c, rng).l_pred;
  double last = first;
  for (int i = 0; i < 49; ++i) last = train_step_m1(m, b, c, rng).l_pred;
  EXPECT_LT(last, first);
}

TEST(TrainStep, DisentanglerRecoversLinearMap) {
  ArchitectureOptions o = small_arch(4, 2);
  o.encoder_hidden = {};
  o.embedding_activation = Activation::linear;
  Model m(make_architecture(ModelKind::full, o), 3);
  // e2 = e1 * A for a fixed 3x2 map A.
  auto& w = m.params().at("enc.layer0.weight").value;
  const float a[3][2] = {{0.5f, -0.2f}, {0.1f, 0.3f}, {-0.4f, 0.2f}};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t j = 0; j < 2; ++j) {
      float v = 0;
      for (std::size_t i = 0; i < 3; ++i) v += w.at(r, i) * a[i][j];
      w.at(r, 3 + j) = v;
    }
  }
  const Batch b = blobs(64, 4, 4).range(0, 64);
  TrainConfig c = quick();
  c.lr_m2 = 1e-2;
  RngStream rng = RngStream::from_seed(1);
  double l1 = 1;
  for (int i = 0; i < 500; ++i) l1 = train_step_m2(m, b, c, rng).l_dis1;
  EXPECT_LT(l1, 1e-3);
}

TEST(TrainStep, DeterministicForEqualSeeds) {
  const Batch b = blobs(32, 4, 1).range(0, 32);
  auto run = [&] {
    Model m = full_model(9);
    RngStream rng = RngStream::from_seed(2);
    train_step_m1(m, b, quick(), rng);
    return train_step_m2(m, b, quick(), rng);
  };
  EXPECT_EQ(run(), run());
}

TEST(TrainStep, NonFiniteLossRaisesDivergenceWithBreakdown) {
  Model m = full_model();
  m.params().at("enc.layer0.weight").value[0] = std::numeric_limits<float>::quiet_NaN();
  RngStream rng = RngStream::from_seed(1);
  try {
    train_step_m1(m, blobs(8, 4, 1).range(0, 8), quick(), rng);
    FAIL() << "expected divergence";
  } catch (const TrainingDivergence& e) {
    EXPECT_EQ(e.player(), Player::m1);
    EXPECT_FALSE(e.losses().all_finite());
  }
}

TEST(TrainStep, KindChecks) {
  Model b0(make_architecture(ModelKind::b0, small_arch(4, 2)), 1);
  Model full = full_model();
  const Batch b = blobs(8, 4, 1).range(0, 8);
  RngStream rng;
  EXPECT_THROW(train_step_m1(b0, b, quick(), rng), ContractError);
  EXPECT_THROW(train_step_baseline(full, b, quick(), rng), ContractError);
  EXPECT_THROW(train_step_m1(full, blobs(8, 3, 1).range(0, 8), quick(), rng), DimensionError);
}

TEST(Train, ScheduleIsOneFirstPlayerStepPerKSecondPlayerSteps) {
  Model m = full_model();
  const Dataset d = blobs(60, 4, 1);
  std::vector<MetricsRecord> recs;
  TrainHooks hooks;
  hooks.sink = [&](const MetricsRecord& r) { recs.push_back(r); };
  const TrainState s = train(m, d, quick(10, 1), hooks);
  ASSERT_EQ(recs.size(), 600u);
  std::size_t m1 = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].step, i);
    EXPECT_EQ(recs[i].player == Player::m1, i % 6 == 0);
    m1 += recs[i].player == Player::m1;
  }
  EXPECT_EQ(m1, 100u);
  EXPECT_EQ(s.m1_steps, 100u);
  EXPECT_EQ(s.m2_steps, 500u);
}

TEST(Train, ScheduleCountsStayWithinOneCycle) {
  for (std::size_t k : {1, 3, 7}) {
    Model m = full_model();
    TrainConfig c = quick(3, 4);
    c.k = k;
    const TrainState s = train(m, blobs(37, 4, 1), c);
    const auto diff = static_cast<long>(s.m1_steps * k) - static_cast<long>(s.m2_steps);
    EXPECT_LE(std::abs(diff), static_cast<long>(k));
    EXPECT_EQ(s.step, 3u * 10u);  // ceil(37 / 4) batches per epoch, last one short
  }
}

TEST(Train, ZeroEpochsKeepsInitialization) {
  Model m = full_model();
  const Model before = m;
  train(m, blobs(16, 4, 1), quick(0));
  for (const auto& [name, e] : m.params()) EXPECT_EQ(e.value, before.params().at(name).value);
}

TEST(Train, DeterministicAndResumableFromCheckpoint) {
  const Dataset d = blobs(50, 4, 5);
  const TrainConfig two = quick(2, 8);
  Model straight = full_model();
  const TrainState s_straight = train(straight, d, two);

  Model first = full_model();
  const TrainState s1 = train(first, d, quick(1, 8));
  const Checkpoint ck = parse_checkpoint(serialize_checkpoint(first, quick(1, 8), s1));
  Model resumed = ck.model;
  const TrainState s2 = train(resumed, d, two, {}, ck.state);
  EXPECT_EQ(s2, s_straight);
  for (const auto& [name, e] : straight.params()) {
    EXPECT_EQ(e.value, resumed.params().at(name).value) << name;
    EXPECT_EQ(e.adam_v, resumed.params().at(name).adam_v) << name;
  }
}

TEST(Train, EmptyDatasetRejected) {
  Model m = full_model();
  EXPECT_THROW(train(m, Dataset(4, 2), quick()), DataError);
}

TEST(Baseline, B0ReachesPerfectAccuracyOnSeparableData) {
  const Dataset d = blobs(200, 4, 6, 0.2);
  TrainConfig c = quick(30, 16);
  const Model m = train_baseline(ModelKind::b0, small_arch(4, 2), d, c);
  EXPECT_EQ(m.spec().kind, ModelKind::b0);
  EXPECT_DOUBLE_EQ(predictor_accuracy(m, d), 1.0);
}

TEST(Baseline, B1WithoutDecoderWeightMatchesPredictionGradient) {
  Model m(make_architecture(ModelKind::b1, small_arch(4, 2)), 2);
  const Batch b = blobs(16, 4, 1).range(0, 16);
  const PsiFn<float> psi = [](Graph& g, NodeId e1) { return e1; };
  const ComponentSet all = m.params().components();
  Graph g1;
  const ObjectiveNodes n1 = build_objective(g1, m.params(), m.spec(), b.x, b.y, LossWeights{100, 0, 0}, all, psi);
  g1.backward(n1.j_m1);
  const Tensor with_dec = m.params().at("enc.layer0.weight").grad;
  EXPECT_EQ(m.params().at("dec.layer0.weight").grad, Tensor::zeros(m.params().at("dec.layer0.weight").value.shape()));
  Graph g2;
  const ObjectiveNodes n2 = build_objective(g2, m.params(), m.spec(), b.x, b.y, LossWeights{100, 0, 0}, all, psi);
  g2.backward(scale(g2, n2.l_pred, 100.0));
  EXPECT_EQ(with_dec, m.params().at("enc.layer0.weight").grad);
  const LossBreakdown br = read_breakdown(g1, n1);
  EXPECT_EQ(br.l_dis1, 0.0);
  EXPECT_EQ(br.l_dis2, 0.0);
  EXPECT_EQ(br.j_m2, 0.0);
}

TEST(Baseline, B1StepsNeverCreateDisentanglers) {
  const Model m = train_baseline(ModelKind::b1, small_arch(4, 2), blobs(32, 4, 1), quick(1, 8));
  EXPECT_FALSE(m.params().components().contains("dis1"));
  EXPECT_THROW(train_baseline(ModelKind::full, small_arch(4, 2), blobs(32, 4, 1), quick()), ConfigError);
}

TEST(Config, ValidationAndKeyValueRoundTrip) {
  TrainConfig c;
  c.k = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.weights.beta = 0.25;
  c.seed = 123456789012345ULL;
  KeyValues kv;
  c.write(kv);
  EXPECT_EQ(TrainConfig::read(KeyValues::parse(kv.to_string())), c);
}

TEST(Metrics, CsvHeaderAndRow) {
  EXPECT_EQ(metrics_csv_header(), "epoch,step,player,l_pred,l_dec,l_dis1,l_dis2,j_m1,j_m2,ms");
  MetricsRecord r;
  r.epoch = 2;
  r.step = 7;
  r.player = Player::m2;
  r.losses.l_pred = 0.5;
  EXPECT_EQ(metrics_csv_row(r).substr(0, 12), "2,7,m2,0.5,0");
}

TEST(Checkpoint, RoundTripReproducesForwardBitExactly) {
  Model m = full_model(4);
  TrainState s;
  s = train(m, blobs(40, 4, 1), quick(1, 8));
  const auto path = std::filesystem::temp_directory_path() / "invforge-ck-test.bin";
  save_checkpoint(path, m, quick(1, 8), s);
  const Checkpoint ck = load_checkpoint(path);
  std::filesystem::remove(path);
  EXPECT_EQ(ck.state, s);
  EXPECT_EQ(ck.config, quick(1, 8));
  EXPECT_EQ(ck.model.spec(), m.spec());
  const Tensor x = blobs(10, 4, 2).range(0, 10).x;
  const SplitEmbedding a = encode(m, x);
  const SplitEmbedding b = encode(ck.model, x);
  EXPECT_EQ(a.e1, b.e1);
  EXPECT_EQ(a.e2, b.e2);
  EXPECT_EQ(predict(m, a.e1), predict(ck.model, b.e1));
  EXPECT_EQ(decode(m, a.e1, a.e2), decode(ck.model, b.e1, b.e2));
}

TEST(Checkpoint, TruncatedFileIsCorrupt) {
  const std::string bytes = serialize_checkpoint(full_model(), TrainConfig{}, TrainState{});
  for (std::size_t cut : {std::size_t{5}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(parse_checkpoint(bytes.substr(0, cut)), CheckpointError) << cut;
  }
  EXPECT_THROW(parse_checkpoint(bytes + "x"), CheckpointError);
}

TEST(Checkpoint, BumpedVersionIsUnsupported) {
  std::string bytes = serialize_checkpoint(full_model(), TrainConfig{}, TrainState{});
  const auto pos = bytes.find("version=1\n");
  ASSERT_NE(pos, std::string::npos);
  bytes.replace(pos, 10, "version=2\n");
  EXPECT_THROW(parse_checkpoint(bytes), UnsupportedVersionError);
}

TEST(Checkpoint, ShapeMismatchRejected) {
  std::string bytes = serialize_checkpoint(full_model(), TrainConfig{}, TrainState{});
  const auto pos = bytes.find("arch.dim_e1=3");
  ASSERT_NE(pos, std::string::npos);
  bytes.replace(pos, 13, "arch.dim_e1=4");
  EXPECT_THROW(parse_checkpoint(bytes), Error);
}
