#include <gtest/gtest.h>

#include <set>

#include "wsi/combine.hpp"

using namespace wsi;

namespace {
SubstituteDistribution dist(std::vector<SubstituteEntry> e, Direction dir = Direction::forward) {
  SubstituteDistribution d;
  d.context_id = "c";
  d.word = "w";
  d.direction = dir;
  d.entries = std::move(e);
  return d;
}

std::map<std::string, double> as_map(const std::vector<ScoredToken>& v) {
  std::map<std::string, double> m;
  for (const auto& t : v) m[t.token] = t.score;
  return m;
}
}  // namespace

TEST(Renormalize, TopK) {
  auto r = renormalize_top_k(dist({{"a", 0.2, 1}, {"b", 0.2, 2}}), 2);
  EXPECT_DOUBLE_EQ(r.entries[0].probability, 0.5);
  EXPECT_DOUBLE_EQ(r.entries[1].probability, 0.5);
  r = renormalize_top_k(dist({{"a", 0.4, 1}, {"b", 0.2, 2}, {"c", 0.1, 3}}), 2);
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_NEAR(r.entries[0].probability, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.entries[1].probability, 1.0 / 3.0, 1e-15);
  r = renormalize_top_k(dist({{"a", 0.4, 1}, {"b", 0.1, 2}}), 10);
  EXPECT_DOUBLE_EQ(r.entries[0].probability, 0.8);
  EXPECT_THROW(renormalize_top_k(dist({}), 3), NoSubstitutesError);
}

TEST(CombineAvg, Examples) {
  auto m = as_map(combine_avg(dist({{"b", 0.4, 2}, {"a", 0.6, 1}}), dist({{"b", 0.8, 2}, {"a", 0.2, 1}})));
  EXPECT_DOUBLE_EQ(m["a"], 0.4);
  EXPECT_DOUBLE_EQ(m["b"], 0.6);
  m = as_map(combine_avg(dist({{"a", 1.0, 1}}), dist({{"b", 1.0, 2}})));
  EXPECT_DOUBLE_EQ(m["a"], 0.5);
  EXPECT_DOUBLE_EQ(m["b"], 0.5);
  const auto same = dist({{"a", 0.7, 1}, {"b", 0.3, 2}});
  m = as_map(combine_avg(same, same));
  EXPECT_DOUBLE_EQ(m["a"], 0.7);
  EXPECT_DOUBLE_EQ(m["b"], 0.3);
}

TEST(Alpha, HandValues) {
  EXPECT_NEAR(alpha(0.0, 0.1), 0.0, 1e-12);
  EXPECT_NEAR(alpha(0.5, 0.1), 0.5, 1e-12);
  EXPECT_NEAR(alpha(1.0, 0.1), 1.0, 1e-12);
  EXPECT_NEAR(alpha(0.95, 0.1), 0.75, 1e-12);
  EXPECT_NEAR(alpha(0.05, 0.1), 0.25, 1e-12);
  EXPECT_NEAR(alpha(0.3, 0.5), 0.3, 1e-12);
  EXPECT_THROW(alpha(1.5, 0.1), DomainError);
  EXPECT_THROW(alpha(0.5, 0.0), DomainError);
}

TEST(Alpha, MonotoneAndClamped) {
  for (double beta : {0.1, 0.25, 0.5}) {
    double prev = -1;
    for (int i = 0; i <= 1000; ++i) {
      const double a = alpha(i / 1000.0, beta);
      EXPECT_GE(a, prev - 1e-15);
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
      prev = a;
    }
  }
}

TEST(CombinePosWeighted, Reductions) {
  const auto f = dist({{"a", 0.6, 1}, {"b", 0.4, 2}});
  const auto b = dist({{"a", 0.2, 1}, {"c", 0.8, 3}}, Direction::backward);
  EXPECT_EQ(as_map(combine_pos_weighted(f, b, 0.5, 0.1)), as_map(combine_avg(f, b)));
  auto m = as_map(combine_pos_weighted(f, b, 1.0, 0.1));
  EXPECT_DOUBLE_EQ(m["a"], 0.6);
  EXPECT_DOUBLE_EQ(m["b"], 0.4);
  EXPECT_DOUBLE_EQ(m["c"], 0.0);
  m = as_map(combine_pos_weighted(f, b, 0.0, 0.1));
  EXPECT_DOUBLE_EQ(m["a"], 0.2);
  EXPECT_DOUBLE_EQ(m["b"], 0.0);
  EXPECT_DOUBLE_EQ(m["c"], 0.8);
}

TEST(CombineBayes, RareWordPromoted) {
  const auto f = dist({{"common", 0.2, 10}, {"rare", 0.1, 100}});
  const auto b = dist({{"common", 0.2, 10}, {"rare", 0.2, 100}}, Direction::backward);
  const auto out = combine_bayes(f, b, 2.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].token, "rare");
  EXPECT_NEAR(out[0].score, 200.0, 1e-9);
  EXPECT_NEAR(out[1].score, 4.0, 1e-12);
  // z = 0 orders by P_fwd * P_bwd
  EXPECT_EQ(combine_bayes(f, b, 0.0)[0].token, "common");
}

TEST(CombineBayes, OrderSurvivesOverflowingPrior) {
  const auto f = dist({{"common", 0.9, 400}, {"rare", 1e-4, 401}});
  const auto b = dist({{"common", 0.9, 400}, {"rare", 1e-4, 401}}, Direction::backward);
  // 401^10000 overflows a double; the order must still follow the true scores
  const auto out = combine_bayes(f, b, 10000.0);
  EXPECT_EQ(out[0].token, "rare");
  EXPECT_GT(out[0].key, out[1].key);
}

TEST(CombineBayes, IntersectionOnly) {
  const auto f = dist({{"a", 0.5, 1}, {"b", 0.3, 2}});
  const auto b = dist({{"b", 0.6, 2}, {"c", 0.4, 3}}, Direction::backward);
  const auto out = combine_bayes(f, b, 1.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].token, "b");
  EXPECT_THROW(combine_bayes(dist({{"a", 1.0, 1}}), dist({{"b", 1.0, 2}}), 1.0), NoSubstitutesError);
}

TEST(CombineBayes, ExponentDoublingMatchesPmiFamily) {
  // ordering by P_fwd * P_bwd * rank^(2z') equals combine_bayes at z = 2z'
  const auto f = dist({{"a", 0.4, 1}, {"b", 0.3, 5}, {"c", 0.2, 40}});
  const auto b = dist({{"a", 0.5, 1}, {"b", 0.3, 5}, {"c", 0.1, 40}}, Direction::backward);
  for (double zp : {0.25, 0.5, 1.0}) {
    const auto out = combine_bayes(f, b, 2 * zp);
    std::vector<std::pair<double, std::string>> ref;
    for (std::size_t i = 0; i < 3; ++i)
      ref.emplace_back(-f.entries[i].probability * b.entries[i].probability *
                           std::pow(static_cast<double>(f.entries[i].rank), 2 * zp),
                       f.entries[i].token);
    std::sort(ref.begin(), ref.end());
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(out[i].token, ref[i].second);
  }
}

TEST(MakeRepresentatives, Sampling) {
  const auto f = dist({{"a", 0.5, 1}, {"b", 0.3, 2}, {"c", 0.2, 3}});
  const auto b = dist({{"d", 0.6, 4}, {"a", 0.4, 1}}, Direction::backward);
  CombineConfig cfg;
  cfg.method = CombineMethod::sampling;
  cfg.num_representatives = 20;
  cfg.sample_size = 15;
  cfg.rng_seed = 5;
  const auto set = make_representatives(f, b, cfg, 0.5);
  ASSERT_EQ(set.items.size(), 20u);
  for (const auto& r : set.items) {
    EXPECT_EQ(r.substitutes.size(), 30u);
    EXPECT_EQ(r.context_id, "c");
  }
  EXPECT_EQ(make_representatives(f, b, cfg, 0.5).items, set.items);
  cfg.rng_seed = 6;
  EXPECT_NE(make_representatives(f, b, cfg, 0.5).items, set.items);
}

TEST(MakeRepresentatives, BaseUnion) {
  const auto f = dist({{"a", 0.5, 1}, {"b", 0.3, 2}, {"x", 0.1, 9}});
  const auto b = dist({{"b", 0.6, 2}, {"c", 0.3, 3}, {"y", 0.1, 8}}, Direction::backward);
  CombineConfig cfg;
  cfg.method = CombineMethod::base_union;
  cfg.top_k = 2;
  const auto set = make_representatives(f, b, cfg, 0.5);
  ASSERT_EQ(set.items.size(), 1u);
  EXPECT_EQ(set.items[0].substitutes, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(MakeRepresentatives, BayesTopKAndFallback) {
  std::vector<SubstituteEntry> fe, be;
  for (std::size_t i = 0; i < 300; ++i) {
    fe.push_back({"t" + std::to_string(i), 1.0 / 300, i + 1});
    be.push_back({"t" + std::to_string(i), 1.0 / 300, i + 1});
  }
  CombineConfig cfg;  // bayes-comb, K = 200
  auto set = make_representatives(dist(fe), dist(be, Direction::backward), cfg, 0.5);
  ASSERT_EQ(set.items.size(), 1u);
  EXPECT_EQ(set.items[0].substitutes.size(), 200u);
  EXPECT_FALSE(set.bayes_fallback);
  set = make_representatives(dist({{"a", 1.0, 1}}), dist({{"b", 1.0, 2}}, Direction::backward), cfg, 0.5);
  EXPECT_TRUE(set.bayes_fallback);
  EXPECT_EQ(set.items[0].substitutes, (std::vector<std::string>{"a", "b"}));
}

TEST(MakeRepresentatives, AvgMethodsTakeTopK) {
  const auto f = dist({{"a", 0.5, 1}, {"b", 0.3, 2}, {"c", 0.2, 3}});
  const auto b = dist({{"c", 0.9, 3}, {"a", 0.1, 1}}, Direction::backward);
  CombineConfig cfg;
  cfg.method = CombineMethod::avg;
  cfg.top_k = 2;
  // a (0.625 + 0.1) / 2, b 0.375 / 2, c 0.9 / 2
  EXPECT_EQ(make_representatives(f, b, cfg, 0.5).items[0].substitutes, (std::vector<std::string>{"a", "c"}));
  cfg.method = CombineMethod::pos_weight_avg;
  // pos = 1: forward only after renormalizing top-2 (a 0.625, b 0.375)
  EXPECT_EQ(make_representatives(f, b, cfg, 1.0).items[0].substitutes, (std::vector<std::string>{"a", "b"}));
}

TEST(CombineConfig, Validation) {
  CombineConfig c;
  c.top_k = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.beta = 0.7;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_combine_method("median"), ConfigError);
  EXPECT_EQ(parse_combine_method("base"), CombineMethod::base_union);
}
