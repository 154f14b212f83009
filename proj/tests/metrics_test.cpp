#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wsi/metrics.hpp"
#include "wsi/random.hpp"

using namespace wsi;
using V = std::vector<int>;

TEST(Ari, HandValues) {
  EXPECT_DOUBLE_EQ(ari(V{0, 0, 1, 1}, V{0, 0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(ari(V{0, 0, 1, 1}, V{1, 1, 0, 0}), 1.0);
  EXPECT_NEAR(ari(V{0, 0, 1, 1}, V{0, 1, 0, 1}), -0.5, 1e-15);
}

TEST(Ari, Degenerate) {
  EXPECT_EQ(ari(V{3, 3, 3}, V{0, 1, 2}), 0.0);
  EXPECT_EQ(ari(V{0, 1, 2}, V{5, 6, 7}), 1.0);
  EXPECT_EQ(ari(V{0, 0, 1, 1}, V{0, 0, 0, 0}), 0.0);
  EXPECT_EQ(ari(V{0, 0, 1, 1}, V{0, 1, 2, 3}), 0.0);
  EXPECT_THROW(ari(V{0}, V{0}), DomainError);
  EXPECT_THROW(ari(V{0, 1}, V{0}), ValidationError);
}

TEST(Ari, WorksOnStringLabels) {
  const std::vector<std::string> g{"a", "a", "b"}, p{"x", "x", "y"};
  EXPECT_DOUBLE_EQ(ari(g, p), 1.0);
}

TEST(VMeasure, HandValues) {
  EXPECT_DOUBLE_EQ(v_measure(V{0, 0, 1, 1}, V{0, 0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(v_measure(V{0, 0, 1, 1}, V{0, 0, 0, 0}), 0.0);
  // singletons: h = 1, c = 1 - ln2 / ln4 = 0.5, V = 2/3
  const auto parts = v_measure_parts(V{0, 0, 1, 1}, V{0, 1, 2, 3});
  EXPECT_DOUBLE_EQ(parts.homogeneity, 1.0);
  EXPECT_NEAR(parts.completeness, 0.5, 1e-15);
  EXPECT_NEAR(parts.v, 2.0 / 3.0, 1e-15);
}

TEST(PairedF, HandValues) {
  EXPECT_DOUBLE_EQ(paired_f(V{0, 0, 1, 1}, V{0, 0, 0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(paired_f(V{0, 0, 1, 1}, V{0, 1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(paired_f(V{0, 0, 1, 1}, V{0, 0, 1, 1}), 1.0);
  const auto pc = pair_counts(V{0, 0, 1, 1}, V{0, 0, 0, 0});
  EXPECT_EQ(pc.pred, 6.0);
  EXPECT_EQ(pc.gold, 2.0);
  EXPECT_EQ(pc.common, 2.0);
}

TEST(Metrics, MatchBruteForce) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(29);
    const int kg = 1 + static_cast<int>(rng.below(6)), kp = 1 + static_cast<int>(rng.below(8));
    V g(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = static_cast<int>(rng.below(kg));
      p[i] = static_cast<int>(rng.below(kp));
    }
    EXPECT_NEAR(ari(g, p), oracle::ari(g, p), 1e-12);
    EXPECT_NEAR(v_measure(g, p), oracle::v_measure(g, p), 1e-12);
    EXPECT_NEAR(paired_f(g, p), oracle::paired_f(g, p), 1e-12);
  }
}

TEST(Aggregate, WeightedAri) {
  WordScore a, b;
  a.word = "a";
  a.ari = 1.0;
  a.num_examples = 30;
  b.word = "b";
  b.ari = 0.0;
  b.num_examples = 10;
  const auto agg = aggregate_scores({a, b});
  EXPECT_DOUBLE_EQ(agg.weighted_ari, 0.75);
  EXPECT_EQ(agg.num_examples, 40u);
}

TEST(Aggregate, SingleWordEqualsItself) {
  const auto s = score_word("w", V{0, 0, 1, 1, 2}, V{0, 0, 1, 2, 2});
  const auto agg = aggregate_scores({s});
  EXPECT_DOUBLE_EQ(agg.weighted_ari, s.ari);
  EXPECT_DOUBLE_EQ(agg.v_measure, s.v_measure);
  EXPECT_DOUBLE_EQ(agg.paired_f, s.paired_f);
  EXPECT_DOUBLE_EQ(agg.paired_f_pooled, s.paired_f);
  EXPECT_DOUBLE_EQ(agg.avg, std::sqrt(s.v_measure * s.paired_f));
  EXPECT_DOUBLE_EQ(agg.mse_nc, 0.0);
  EXPECT_DOUBLE_EQ(agg.mean_num_clusters, 3.0);
}

TEST(Aggregate, MseNc) {
  auto a = score_word("a", V{0, 0, 1, 1}, V{0, 0, 0, 0});   // 1 vs 2
  auto b = score_word("b", V{0, 1, 2, 2}, V{0, 1, 2, 3});   // 4 vs 3
  EXPECT_DOUBLE_EQ(aggregate_scores({a, b}).mse_nc, 1.0);
  EXPECT_DOUBLE_EQ(mse_cluster_counts({1, 4}, {2, 3}), 1.0);
  EXPECT_THROW(mse_cluster_counts({1}, {2, 3}), ValidationError);
}

TEST(Aggregate, MaxAriOnlyWhenEveryWordHasIt) {
  auto a = score_word("a", V{0, 0, 1, 1}, V{0, 0, 1, 1});
  auto b = score_word("b", V{0, 1, 0, 1}, V{0, 0, 1, 1});
  a.max_ari = 1.0;
  EXPECT_FALSE(aggregate_scores({a, b}).weighted_max_ari.has_value());
  b.max_ari = 0.5;
  EXPECT_DOUBLE_EQ(*aggregate_scores({a, b}).weighted_max_ari, 0.75);
}
