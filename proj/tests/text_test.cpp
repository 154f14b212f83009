#include <gtest/gtest.h>

#include "wsi/occurrence.hpp"
#include "wsi/random.hpp"
#include "wsi/text.hpp"

using namespace wsi;

TEST(Text, CodepointsAndOffsets) {
  const std::string s = "штамп x";
  EXPECT_EQ(text::codepoint_count(s), 7u);
  EXPECT_EQ(text::byte_offset(s, 5), 10u);
  EXPECT_EQ(text::byte_offset(s, 7), s.size());
}

TEST(Text, LowercaseAsciiAndCyrillic) {
  EXPECT_EQ(text::lowercase("ABC def"), "abc def");
  EXPECT_EQ(text::lowercase("ПЕЧАТЬ Ёлка"), "печать ёлка");
}

TEST(Text, TokenizeSplitsOnAnyWhitespace) {
  EXPECT_EQ(text::tokenize("  The\tcat\n sat "), (std::vector<std::string>{"the", "cat", "sat"}));
  EXPECT_TRUE(text::tokenize("   ").empty());
}

TEST(Text, SplitKeepsEmptyFields) {
  EXPECT_EQ(text::split("a\t\tb", '\t'), (std::vector<std::string>{"a", "", "b"}));
}

TEST(Text, Fnv1aKnownValues) {
  EXPECT_EQ(text::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(text::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng r(7);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.below(5);
    ASSERT_LT(v, 5u);
    ++seen[v];
  }
  for (int c : seen) EXPECT_GT(c, 150);
}

TEST(Rng, CategoricalSamplerFollowsWeights) {
  const std::vector<double> w{0.1, 0.0, 0.9};
  const CategoricalSampler s(w);
  Rng r(3);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 10000; ++i) ++counts[s(r)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[2] / 10000.0, 0.9, 0.02);
}

namespace {
Occurrence occ(std::string ctx, std::size_t b, std::size_t e) {
  return Occurrence{"id", "w", std::nullopt, {b, e}, std::move(ctx)};
}
}  // namespace

TEST(Occurrence, SplitContext) {
  const auto o = occ("These apples are sold", 6, 12);
  const auto p = split_context(o);
  EXPECT_EQ(p.left, "These ");
  EXPECT_EQ(p.target, "apples");
  EXPECT_EQ(p.right, " are sold");
}

TEST(Occurrence, SplitContextUnicode) {
  const auto o = occ("на штампе печать", 3, 9);
  const auto p = split_context(o);
  EXPECT_EQ(p.target, "штампе");
  EXPECT_EQ(p.right, " печать");
}

TEST(Occurrence, SpanValidation) {
  EXPECT_THROW(validate(occ("short", 10, 15)), ValidationError);
  EXPECT_THROW(validate(occ("short", 2, 2)), ValidationError);
  EXPECT_NO_THROW(validate(occ("short", 0, 5)));
}

TEST(Occurrence, NormalizedPositionEndpoints) {
  EXPECT_DOUBLE_EQ(normalized_position(occ("cat sat", 0, 3)), 0.0);
  EXPECT_DOUBLE_EQ(normalized_position(occ("cat sat", 4, 7)), 1.0);
  EXPECT_DOUBLE_EQ(normalized_position(occ("ab X cd", 3, 4)), 0.5);
  EXPECT_DOUBLE_EQ(normalized_position(occ("X", 0, 1)), 0.5);
}
