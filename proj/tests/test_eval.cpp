#include <gtest/gtest.h>

#include <map>

#include "fixtures.hpp"
#include "invforge/eval.hpp"
#include "toy.hpp"

using namespace invforge;

namespace {

ProbeConfig fast_probe() {
  ProbeConfig p;
  p.epochs = 20;
  return p;
}

}  // namespace

TEST(Embed, ShapesAndDeterminism) {
  const Model m(make_architecture(ModelKind::full, test::small_arch(4, 2)), 1);
  const Dataset d = test::blobs(25, 4, 1);
  const Embeddings a = embed_dataset(m, d, 7);
  EXPECT_EQ(a.size(), 25u);
  EXPECT_EQ(a.e1.size(), 25u * 3);
  EXPECT_EQ(a.e2.size(), 25u * 2);
  EXPECT_EQ(a.z.size(), 25u);
  const Embeddings again = embed_dataset(m, d, 7);
  EXPECT_EQ(a.e1, again.e1);
  EXPECT_EQ(a.e2, again.e2);
  // Chunking only changes the matmul blocking, not the values beyond rounding.
  const Embeddings b = embed_dataset(m, d);
  for (std::size_t i = 0; i < a.e1.size(); ++i) EXPECT_NEAR(a.e1[i], b.e1[i], 1e-6);
  EXPECT_THROW(embed_dataset(m, test::blobs(5, 3, 1)), DimensionError);
}

TEST(Embed, B0ExportsWholeEmbeddingAsFirstBlock) {
  const Model m(make_architecture(ModelKind::b0, test::small_arch(4, 2)), 1);
  const Embeddings e = embed_dataset(m, test::blobs(5, 4, 1));
  EXPECT_EQ(e.dim_e1, 5u);
  EXPECT_EQ(e.dim_e2, 0u);
  EXPECT_TRUE(e.e2.empty());
}

TEST(Embed, ZeroLinearEncoderGivesZeros) {
  ArchitectureOptions o = test::small_arch(4, 2);
  o.hidden_activation = Activation::linear;
  o.embedding_activation = Activation::linear;
  Model m(make_architecture(ModelKind::full, o), 1);
  for (auto& [name, e] : m.params()) {
    if (component_of(name) == kEnc) e.value.fill(0.0f);
  }
  const Embeddings e = embed_dataset(m, test::blobs(10, 4, 1));
  for (float v : e.e1) EXPECT_EQ(v, 0.0f);
  for (float v : e.e2) EXPECT_EQ(v, 0.0f);
}

TEST(Probe, SeparableByConstruction) {
  RngStream rng = RngStream::from_seed(1);
  const std::size_t n = 2000;
  std::vector<float> f(n * 3);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) f[i * 3 + j] = static_cast<float>(rng.normal());
    y[i] = f[i * 3 + 1] > 0 ? 1 : 0;
  }
  EXPECT_GE(train_probe(f, 3, y, fast_probe()), 0.99);
}

TEST(Probe, NoiseEmbeddingsStayAtChance) {
  RngStream rng = RngStream::from_seed(2);
  const std::size_t n = 5000;
  std::vector<float> f(n * 8);
  std::vector<int> y(n);
  for (float& v : f) v = static_cast<float>(rng.normal());
  for (int& v : y) v = static_cast<int>(rng.below(5));
  const double acc = train_probe(f, 8, y, fast_probe());
  EXPECT_GE(acc, 0.15);
  EXPECT_LE(acc, 0.25);
}

TEST(Probe, ConstantEmbeddingsGiveMajorityClass) {
  const std::size_t n = 10000;
  std::vector<float> f(n * 2, 0.5f);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 10 < 7 ? 0 : 1;
  EXPECT_NEAR(train_probe(f, 2, y, fast_probe()), 0.7, 0.05);
}

TEST(Probe, RejectsDegenerateLabelsAndBadShapes) {
  std::vector<float> f(20, 1.0f);
  EXPECT_THROW(train_probe(f, 2, std::vector<int>(10, 3), fast_probe()), DegenerateDataError);
  EXPECT_THROW(train_probe(f, 3, std::vector<int>(10, 3), fast_probe()), DimensionError);
  ProbeConfig bad;
  bad.train_fraction = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Probe, DeterministicUnderSeed) {
  const Embeddings e = embed_dataset(Model(make_architecture(ModelKind::full, test::small_arch(4, 2)), 1),
                                     test::blobs(300, 4, 3));
  EXPECT_EQ(train_probe(e.e1, 3, e.y, fast_probe()), train_probe(e.e1, 3, e.y, fast_probe()));
}

TEST(EvalInvariance, ReportKeysAndEncoderIsolation) {
  Model m(make_architecture(ModelKind::full, test::small_arch(4, 2)), 1);
  Dataset test_set = test::blobs(300, 4, 4);
  test_set.set_split(SplitTag::test);
  Dataset shifted = test::blobs(100, 4, 5, 0.6);
  shifted.set_split(SplitTag::test);
  const std::vector<NamedDataset> sets{{"train", "train", false, test::blobs(50, 4, 1)},
                                       {"test", "theta", true, test_set},
                                       {"test_55", "55", false, shifted}};
  const ParamStore before = m.params();
  EvalOptions opt;
  opt.probe = fast_probe();
  const EvalReport r = eval_invariance(m, sets, opt);
  EXPECT_TRUE(test::same_entries(m.params(), before, kEnc));
  EXPECT_EQ(r.a_y.size(), 2u);
  EXPECT_TRUE(r.a_y.contains("theta"));
  EXPECT_TRUE(r.a_y.contains("55"));
  ASSERT_TRUE(r.a_z_e1 && r.a_z_e2 && r.z_chance);
  EXPECT_DOUBLE_EQ(*r.z_chance, 0.5);
  for (double v : {*r.a_z_e1, *r.a_z_e2, r.a_y.at("theta")}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  const EvalReport back = EvalReport::from_kv(KeyValues::parse(r.to_kv().to_string()));
  EXPECT_EQ(back.a_y, r.a_y);
  EXPECT_EQ(back.a_z_e1, r.a_z_e1);
}

TEST(EvalInvariance, MissingNuisanceLeavesProbesAbsent) {
  const Model m(make_architecture(ModelKind::full, test::small_arch(4, 2)), 1);
  Dataset plain(4, 2, SplitTag::test);
  const Dataset src = test::blobs(20, 4, 1);
  for (std::size_t i = 0; i < src.size(); ++i) plain.add(src.features(i), src.labels()[i]);
  const EvalReport r = eval_invariance(m, {{"test", "theta", true, plain}}, EvalOptions{});
  EXPECT_FALSE(r.a_z_e1.has_value());
  EXPECT_FALSE(r.a_z_e2.has_value());
  const KeyValues kv = r.to_kv();
  EXPECT_FALSE(kv.contains("a_z_e1"));
  EXPECT_TRUE(kv.contains("a_y_theta"));
}

TEST(EmbeddingCsv, RoundTripAndLayout) {
  const Model m(make_architecture(ModelKind::full, test::small_arch(4, 2)), 1);
  const Embeddings e = embed_dataset(m, test::blobs(12, 4, 1));
  const std::string csv = embeddings_csv(e);
  const auto header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(header, "e1_0,e1_1,e1_2,e2_0,e2_1,y,z");
  const auto first_row = csv.substr(header.size() + 1, csv.find('\n', header.size() + 1) - header.size() - 1);
  EXPECT_EQ(std::count(first_row.begin(), first_row.end(), ',') + 1, 3 + 2 + 2);
  const auto dir = test::scratch_dir("csv");
  export_embeddings(e, dir / "emb.csv");
  const Embeddings r = read_embeddings_csv(dir / "emb.csv");
  ASSERT_EQ(r.e1.size(), e.e1.size());
  for (std::size_t i = 0; i < e.e1.size(); ++i) EXPECT_NEAR(r.e1[i], e.e1[i], 1e-6);
  for (std::size_t i = 0; i < e.e2.size(); ++i) EXPECT_NEAR(r.e2[i], e.e2[i], 1e-6);
  EXPECT_EQ(r.y, e.y);
  EXPECT_EQ(r.z, e.z);
}

TEST(EmbeddingCsv, EmptyAndUnlabeled) {
  Embeddings e;
  e.dim_e1 = 2;
  e.dim_e2 = 1;
  EXPECT_EQ(embeddings_csv(e), "e1_0,e1_1,e2_0,y,z\n");
  const Embeddings r = parse_embeddings_csv(embeddings_csv(e));
  EXPECT_EQ(r.size(), 0u);
  EXPECT_EQ(r.dim_e1, 2u);
  e.e1 = {0.5f, -1.0f};
  e.e2 = {2.0f};
  e.y = {1};
  const Embeddings u = parse_embeddings_csv(embeddings_csv(e));
  EXPECT_TRUE(u.z.empty());
  EXPECT_EQ(u.e1, e.e1);
}

TEST(Sweep, RowsFollowGridOrder) {
  const Dataset train = test::blobs(120, 4, 1);
  Dataset test_set = test::blobs(100, 4, 2);
  test_set.set_split(SplitTag::test);
  TrainConfig c;
  c.epochs = 2;
  c.batch_size = 16;
  ProbeConfig p = fast_probe();
  p.epochs = 3;
  const std::vector<SweepCell> grid{{100, 0}, {100, 0.1}, {0, 0.1}};
  const auto rows = eta_sweep(train, test_set, grid, test::small_arch(4, 2), c, p);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].alpha, grid[i].alpha);
    EXPECT_EQ(rows[i].beta, grid[i].beta);
  }
  EXPECT_FALSE(rows[0].eta.has_value());
  EXPECT_DOUBLE_EQ(*rows[1].eta, 1000.0);
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Sweep, E2OnlyReconstructionIgnoresFirstBlock) {
  Model m(make_architecture(ModelKind::full, test::small_arch(4, 2)), 1);
  const Dataset d = test::blobs(10, 4, 1);
  const double before = e2_only_reconstruction_mse(m, d);
  for (auto& [name, e] : m.params()) {
    if (component_of(name) == kPred) e.value.fill(3.0f);
  }
  EXPECT_EQ(e2_only_reconstruction_mse(m, d), before);
  EXPECT_THROW(e2_only_reconstruction_mse(Model(make_architecture(ModelKind::b0, test::small_arch(4, 2)), 1), d),
               ContractError);
}
