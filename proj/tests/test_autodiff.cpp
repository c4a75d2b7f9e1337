#include <gtest/gtest.h>

#include <cmath>

#include "invforge/gradcheck.hpp"
#include "invforge/graph.hpp"
#include "grad_cases.hpp"

using namespace invforge;

using test::random_tensor;

TEST(Matmul, MatchesTripleLoop) {
  RngStream rng = RngStream::from_seed(3);
  const Tensor64 a = random_tensor({4, 7}, rng);
  const Tensor64 b = random_tensor({7, 5}, rng);
  Graph64 g;
  const Tensor64& c = g.value(matmul(g, g.constant(a), g.constant(b)));
  ASSERT_EQ(c.shape(), (Shape{4, 5}));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 7; ++k) acc += a.at(i, k) * b.at(k, j);
      EXPECT_NEAR(c.at(i, j), acc, 1e-12);
    }
  }
}

TEST(Matmul, SmallLiteral) {
  Graph g;
  const Tensor& c = g.value(matmul(g, g.constant(Tensor::matrix({{1, 2}, {3, 4}})),
                                   g.constant(Tensor::matrix({{5, 6}, {7, 8}}))));
  EXPECT_EQ(c, Tensor::matrix({{19, 22}, {43, 50}}));
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  Graph g;
  try {
    matmul(g, g.constant(Tensor({2, 3})), g.constant(Tensor({4, 2})));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("4x2"), std::string::npos) << msg;
  }
}

TEST(Elementwise, RowBroadcastOfBias) {
  Graph g;
  const Tensor& c = g.value(add(g, g.constant(Tensor::matrix({{1, 2}, {3, 4}})), g.constant(Tensor::vector({10, 20}))));
  EXPECT_EQ(c, Tensor::matrix({{11, 22}, {13, 24}}));
  EXPECT_THROW(add(g, g.constant(Tensor({2, 2})), g.constant(Tensor({3}))), DimensionError);
  EXPECT_THROW(mul(g, g.constant(Tensor({2, 2})), g.constant(Tensor({2, 3}))), DimensionError);
}

TEST(Softmax, RowsSumToOneAndSurviveLargeInputs) {
  Graph g;
  const Tensor& p = g.value(softmax_rows(g, g.constant(Tensor::matrix({{1000, 1001, 1002}, {-5, 0, 5}, {0, 0, 0}}))));
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0.0;
    for (float v : p.row(r)) {
      EXPECT_TRUE(std::isfinite(v));
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
  EXPECT_NEAR(p.at(2, 0), 1.0 / 3.0, 1e-7);
}

TEST(Dropout, RateZeroIsIdentityAndInferenceIsIdentity) {
  RngStream rng = RngStream::from_seed(1);
  Graph g;
  const NodeId x = g.constant(Tensor::matrix({{1, 2, 3}}));
  EXPECT_EQ(dropout(g, x, 0.0, rng, true), x);
  EXPECT_EQ(dropout(g, x, 0.5, rng, false), x);
  EXPECT_EQ(rng.cursor(), 0u);
}

TEST(Dropout, RejectsRateOfOne) {
  RngStream rng;
  Graph g;
  EXPECT_THROW(dropout(g, g.constant(Tensor({1, 1})), 1.0, rng, true), ConfigError);
  EXPECT_THROW(dropout(g, g.constant(Tensor({1, 1})), -0.1, rng, true), ConfigError);
}

TEST(Dropout, BackwardUsesTheForwardMask) {
  RngStream rng = RngStream::from_seed(9);
  ParamStore64 store;
  store.add("p.x", Tensor64::full({1, 64}, 1.0));
  Graph64 g;
  const NodeId x = g.parameter(store, "p.x");
  const NodeId y = dropout(g, x, 0.5, rng, true);
  g.backward(sum(g, y));
  const auto& out = g.value(y);
  const auto& grad = store.at("p.x").grad;
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(grad[i], out[i]);  // mask value == out / x
}

TEST(Dropout, SurvivorsScaledByInverseKeepProbability) {
  RngStream rng = RngStream::from_seed(2);
  const Tensor m = dropout_mask<float>({1000}, 0.25, rng);
  for (float v : m.data()) EXPECT_TRUE(v == 0.0f || std::abs(v - 1.0f / 0.75f) < 1e-6f);
}

TEST(Backward, NonScalarLossIsContractError) {
  Graph g;
  EXPECT_THROW(g.backward(g.constant(Tensor({2}))), ContractError);
}

TEST(Backward, UnreachableParametersGetZeroGradients) {
  ParamStore store;
  store.add("a.w", Tensor::full({2}, 1.0f));
  store.add("b.w", Tensor::full({2}, 1.0f));
  store.at("b.w").grad = Tensor::full({2}, 7.0f);
  Graph g;
  const NodeId a = g.parameter(store, "a.w");
  g.parameter(store, "b.w");
  g.backward(sum(g, scale(g, a, 3.0)));
  EXPECT_EQ(store.at("a.w").grad, Tensor::full({2}, 3.0f));
  EXPECT_EQ(store.at("b.w").grad, Tensor::zeros({2}));
}

TEST(Backward, FrozenParameterReceivesNoGradientButPassesItOn) {
  ParamStore store;
  store.add("a.w", Tensor::full({1, 2}, 2.0f));
  store.add("b.w", Tensor::full({2, 1}, 3.0f));
  Graph g;
  const NodeId a = g.parameter(store, "a.w", true);
  const NodeId b = g.parameter(store, "b.w", false);
  g.backward(sum(g, matmul(g, a, b)));
  EXPECT_EQ(store.at("a.w").grad, Tensor::full({1, 2}, 3.0f));
  EXPECT_TRUE(store.at("b.w").grad.empty() || store.at("b.w").grad == Tensor::zeros({2, 1}));
}

TEST(CrossEntropy, ValueClampAndLabelRange) {
  Graph g;
  const NodeId p = g.constant(Tensor::matrix({{0.25f, 0.75f}, {1.0f, 0.0f}}));
  const int labels[] = {1, 1};
  const double expect = (-std::log(0.75) - std::log(1e-12)) / 2.0;
  EXPECT_NEAR(g.value(cross_entropy(g, p, labels))[0], expect, 1e-4);
  const int bad[] = {0, 2};
  EXPECT_THROW(cross_entropy(g, p, bad), DataError);
}

TEST(Mse, ValueAndShapeCheck) {
  Graph g;
  const NodeId a = g.constant(Tensor::matrix({{1, 2}, {3, 4}}));
  const NodeId b = g.constant(Tensor::matrix({{0, 2}, {3, 6}}));
  EXPECT_FLOAT_EQ(g.value(mse(g, a, b))[0], 5.0f / 4.0f);
  EXPECT_THROW(mse(g, a, g.constant(Tensor({2, 3}))), DimensionError);
}

// Finite-difference checks of every op's backward rule, each dense
// activation and the complete objectives.
class OpGradient : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(OpGradient, EveryCaseMatchesCentralDifferences) {
  for (auto& c : test::gradient_cases(GetParam())) {
    EXPECT_LT(finite_diff_check(c.build, c.params, test::kGradEpsilon), 1e-3) << c.name;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, OpGradient, ::testing::Values(1u, 2u, 3u));

TEST(GradCheck, ZeroParameterGraphAndBadEpsilon) {
  ParamStore64 empty;
  const LossBuilder build = [](Graph64& g, ParamStore64&) { return g.constant(Tensor64::full({1}, 3.0)); };
  EXPECT_EQ(finite_diff_check(build, empty, 1e-6), 0.0);
  EXPECT_THROW(finite_diff_check(build, empty, 0.0), ConfigError);
}

TEST(GradCheck, DetectsAWrongBackwardRule) {
  ParamStore64 p;
  p.add("t.a", Tensor64::full({2}, 0.7));
  const LossBuilder build = [](Graph64& g, ParamStore64& s) {
    const NodeId a = g.parameter(s, "t.a");
    // Forward computes 2a, backward claims gradient 1.
    Tensor64 v = g.value(a);
    for (double& x : v.data()) x *= 2;
    const NodeId y = g.record(OpKind::scale, {a}, v, [a](Graph64& gg, NodeId self) {
      const auto& go = gg.grad(self);
      auto& ga = gg.grad_buffer(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    });
    return sum(g, y);
  };
  EXPECT_GT(finite_diff_check(build, p, 1e-6), 0.4);
}
