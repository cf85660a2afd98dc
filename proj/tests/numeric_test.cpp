#include <gtest/gtest.h>

#include "ttrl/math.hpp"
#include "ttrl/numeric.hpp"
#include "ttrl/random.hpp"

namespace ttrl {
namespace {

TEST(Numeric, Grammar) {
  EXPECT_TRUE(is_numeric("7"));
  EXPECT_TRUE(is_numeric("-12"));
  EXPECT_TRUE(is_numeric("+3.25"));
  EXPECT_FALSE(is_numeric(""));
  EXPECT_FALSE(is_numeric("7."));
  EXPECT_FALSE(is_numeric(".5"));
  EXPECT_FALSE(is_numeric("1e5"));
  EXPECT_FALSE(is_numeric("comply"));
  EXPECT_FALSE(is_numeric("1.2.3"));
}

TEST(Numeric, LastSubstring) {
  EXPECT_EQ(last_numeric_substring("Answer 1: ... Answer 2: 7").value(), "7");
  EXPECT_EQ(last_numeric_substring("x = -3.5, y = 12.").value(), "12");
  EXPECT_EQ(last_numeric_substring("variant-4").value(), "-4");
  EXPECT_FALSE(last_numeric_substring("I refuse.").has_value());
  EXPECT_FALSE(last_numeric_substring("").has_value());
}

TEST(Numeric, OffsetKeepsShape) {
  EXPECT_EQ(offset_answer("7", 2), "9");
  EXPECT_EQ(offset_answer("-1", 1), "0");
  EXPECT_EQ(offset_answer("2.50", 1), "3.50");
  EXPECT_THROW(offset_answer("seven", 1), std::invalid_argument);
}

TEST(Numeric, Equality) {
  EXPECT_TRUE(numeric_equal("7", "7.0"));
  EXPECT_TRUE(numeric_equal("+7", "7"));
  EXPECT_FALSE(numeric_equal("7", "8"));
  EXPECT_FALSE(numeric_equal("", "0"));
}

TEST(Math, SoftmaxIsShiftInvariant) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd z(6);
    for (auto& v : z) v = 20.0 * (rng.uniform() - 0.5);
    const double shift = 50.0 * (rng.uniform() - 0.5);
    const Eigen::VectorXd p = softmax(z);
    const Eigen::VectorXd q = softmax((z.array() + shift).matrix().eval());
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_TRUE((p.array() > 0).all());
    EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((log_softmax(z).array().exp().matrix() - p).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Math, SoftmaxWorksForFloat) {
  Eigen::VectorXf z(3);
  z << 1.0f, 2.0f, 3.0f;
  const Eigen::VectorXf p = softmax(z);
  EXPECT_NEAR(p.sum(), 1.0f, 1e-6f);
}

TEST(Math, EntropyCases) {
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(7, 1.0 / 7.0);
  EXPECT_NEAR(entropy(uniform), std::log(7.0), 1e-12);
  Eigen::Vector2d half(0.5, 0.5);
  EXPECT_NEAR(entropy(half), std::log(2.0), 1e-12);
  Eigen::Vector2d degenerate(1.0 - 1e-12, 1e-12);
  EXPECT_LT(entropy(degenerate), 1e-10);
  EXPECT_GE(entropy(degenerate), 0.0);
}

TEST(Random, DeterministicAndInRange) {
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  Rng c(9);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(c.below(7), 7u);
}

TEST(Random, ShuffleIsPermutation) {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  Rng rng(3);
  auto w = v;
  shuffle(w, rng);
  EXPECT_NE(w, v);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(w, v);
}

TEST(Random, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(2, "a"));
  EXPECT_EQ(derive_seed(1, "a"), derive_seed(1, "a"));
}

}  // namespace
}  // namespace ttrl
