#include <gtest/gtest.h>

#include "wsi/analysis.hpp"
#include "wsi/metrics.hpp"

using namespace wsi;

namespace {
SenseProfile profile(std::string sense, std::map<std::string, double> counts, double total, std::size_t vocab,
                     std::size_t examples = 100) {
  SenseProfile p;
  p.word = "w";
  p.sense_id = std::move(sense);
  p.substitute_counts = std::move(counts);
  p.total = total;
  p.vocab_size = vocab;
  p.num_examples = examples;
  return p;
}
}  // namespace

TEST(SmoothedProb, HandValues) {
  const auto p = profile("s", {{"x", 10}}, 100, 900);
  EXPECT_DOUBLE_EQ(smoothed_prob(p, "x"), 0.011);
  EXPECT_DOUBLE_EQ(smoothed_prob(p, "unseen"), 0.001);
  EXPECT_DOUBLE_EQ(smoothed_prob(profile("s", {{"x", 5}}, 5, 1), "x"), 1.0);
  EXPECT_THROW(smoothed_prob(profile("s", {}, 0, 0), "x"), DomainError);
}

TEST(Discriminative, MinCountFilter) {
  const auto p1 = profile("a", {{"rare", 9}, {"ok", 10}}, 100, 50);
  const auto p2 = profile("b", {{"rare", 9}}, 100, 50);
  const auto out = discriminative_substitutes(p1, p2, 10, 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].lemma, "ok");
}

TEST(Discriminative, ExclusiveLemmaOutranksShared) {
  const auto p1 = profile("a", {{"only", 40}, {"shared", 40}}, 200, 100);
  const auto p2 = profile("b", {{"shared", 5}}, 200, 100);
  const auto out = discriminative_substitutes(p1, p2, 10, 0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].lemma, "only");
  EXPECT_GT(out[0].ratio, out[1].ratio);
  EXPECT_NEAR(out[0].ratio, 41.0, 1e-12);
  EXPECT_NEAR(out[1].ratio, 41.0 / 6.0, 1e-12);
}

TEST(Discriminative, HighVersusZeroFrequencyPattern) {
  // 45 of 81 sense-1 examples carry the lemma, none of the sense-2 ones
  const auto p1 = profile("1", {{"перегородка", 45}, {"общее", 30}}, 300, 400, 81);
  const auto p2 = profile("2", {{"общее", 30}}, 300, 400, 60);
  const auto out = discriminative_substitutes(p1, p2);
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out[0].lemma, "перегородка");
  EXPECT_NEAR(out[0].freq1, 45.0 / 81.0, 1e-15);
  EXPECT_EQ(out[0].freq2, 0.0);
  EXPECT_NEAR(out[0].freq1, 0.56, 0.005);
}

TEST(Discriminative, TopN) {
  std::map<std::string, double> c;
  for (int i = 0; i < 20; ++i) c["l" + std::to_string(i)] = 10 + i;
  const auto p1 = profile("a", c, 1000, 100), p2 = profile("b", {}, 1000, 100);
  EXPECT_EQ(discriminative_substitutes(p1, p2, 10, 10).size(), 10u);
  EXPECT_EQ(discriminative_substitutes(p1, p2, 10, 0).size(), 20u);
}

TEST(SenseProfiles, CountOncePerExample) {
  // the first example's two representatives both contain "x"
  const std::vector<std::vector<Representative>> reps{
      {{"1", {"x", "y"}}, {"1", {"x", "w"}}}, {{"2", {"x"}}}, {{"3", {"z", "w"}}}};
  const auto ps = build_sense_profiles("w", reps, {"a", "a", "b"}, Lemmatizer{}, "w", {});
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0].sense_id, "a");
  EXPECT_EQ(ps[0].count("x"), 2.0);
  EXPECT_EQ(ps[0].count("y"), 1.0);
  EXPECT_EQ(ps[0].count("w"), 0.0);  // target excluded
  EXPECT_EQ(ps[0].num_examples, 2u);
  EXPECT_EQ(ps[0].vocab_size, 3u);  // x y z
  EXPECT_EQ(ps[1].vocab_size, 3u);
  EXPECT_THROW(build_sense_profiles("w", reps, {"a"}, Lemmatizer{}, "w", {}), ValidationError);
}

TEST(NcDifferences, Subtraction) {
  const auto rep = nc_difference_report({{"w", 3, 5, 4}});
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].submitted_minus_true, 2);
  EXPECT_EQ(rep.rows[0].submitted_minus_max_ari, 1);
  EXPECT_EQ(rep.rows[0].true_minus_max_ari, -1);
}

TEST(NcDifferences, ZeroWhenSubmittedIsTrue) {
  const auto rep = nc_difference_report({{"a", 2, 2, 3}, {"b", 4, 4, 4}});
  for (const auto& r : rep.rows) EXPECT_EQ(r.submitted_minus_true, 0);
  EXPECT_EQ(rep.mse_submitted_vs_true, 0.0);
  EXPECT_THROW(nc_difference_report({{"a", 0, 2, 3}}), ValidationError);
}

TEST(NcDifferences, MseMatchesAggregate) {
  using V = std::vector<int>;
  const auto a = score_word("a", V{0, 0, 1, 1, 2}, V{0, 0, 0, 0, 0});
  const auto b = score_word("b", V{0, 0, 1, 1}, V{0, 1, 2, 3});
  const auto rep = nc_difference_report({{"a", a.gold_num_senses, a.num_clusters, 2},
                                         {"b", b.gold_num_senses, b.num_clusters, 2}});
  EXPECT_DOUBLE_EQ(rep.mse_submitted_vs_true, aggregate_scores({a, b}).mse_nc);
}

TEST(Quantiles, Type7) {
  const auto q = quantiles({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(q.min, 1);
  EXPECT_DOUBLE_EQ(q.q1, 1.75);
  EXPECT_DOUBLE_EQ(q.median, 2.5);
  EXPECT_DOUBLE_EQ(q.q3, 3.25);
  EXPECT_DOUBLE_EQ(q.max, 4);
  EXPECT_DOUBLE_EQ(q.mean, 2.5);
}
