#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsi/error.hpp"

namespace wsi {

// Contingency table between a gold and a predicted labelling. Labels of any
// ordered type are mapped to dense ids in first-seen order.
struct Contingency {
  std::size_t n = 0;
  std::vector<double> gold_sizes;  // a_i
  std::vector<double> pred_sizes;  // b_j
  std::map<std::pair<std::size_t, std::size_t>, double> cells;  // n_ij, non-zero only

  template <typename G, typename P>
  static Contingency build(const std::vector<G>& gold, const std::vector<P>& pred) {
    if (gold.size() != pred.size())
      throw ValidationError("label sequences differ in length (" + std::to_string(gold.size()) +
                            " vs " + std::to_string(pred.size()) + ")");
    Contingency c;
    c.n = gold.size();
    std::map<G, std::size_t> gid;
    std::map<P, std::size_t> pid;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const auto g = gid.try_emplace(gold[i], gid.size()).first->second;
      const auto p = pid.try_emplace(pred[i], pid.size()).first->second;
      if (g == c.gold_sizes.size()) c.gold_sizes.push_back(0.0);
      if (p == c.pred_sizes.size()) c.pred_sizes.push_back(0.0);
      c.gold_sizes[g] += 1.0;
      c.pred_sizes[p] += 1.0;
      c.cells[{g, p}] += 1.0;
    }
    return c;
  }
};

namespace detail {
inline double pairs(double x) { return x * (x - 1.0) / 2.0; }

inline double entropy(const std::vector<double>& sizes, double n) {
  double h = 0.0;
  for (double s : sizes)
    if (s > 0) h -= (s / n) * std::log(s / n);
  return h;
}
}  // namespace detail

// Hubert-Arabie adjusted Rand index. A gold labelling with a single class
// scores 0 (the index is undefined there). When both labellings make the
// expected and maximal index coincide, identical partitions score 1.
template <typename G, typename P>
double ari(const std::vector<G>& gold, const std::vector<P>& pred) {
  const Contingency c = Contingency::build(gold, pred);
  if (c.n < 2) throw DomainError("ARI needs at least two items");
  if (c.gold_sizes.size() < 2) return 0.0;
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [_, v] : c.cells) index += detail::pairs(v);
  for (double a : c.gold_sizes) sum_a += detail::pairs(a);
  for (double b : c.pred_sizes) sum_b += detail::pairs(b);
  const double expected = sum_a * sum_b / detail::pairs(static_cast<double>(c.n));
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) {
    const bool same = c.cells.size() == c.gold_sizes.size() && c.cells.size() == c.pred_sizes.size();
    return same ? 1.0 : 0.0;
  }
  return (index - expected) / denom;
}

struct VMeasure {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v = 0.0;
};

// Entropy-based V-measure with beta = 1 and natural logs.
template <typename G, typename P>
VMeasure v_measure_parts(const std::vector<G>& gold, const std::vector<P>& pred) {
  const Contingency c = Contingency::build(gold, pred);
  if (c.n == 0) throw DomainError("V-measure needs at least one item");
  const double n = static_cast<double>(c.n);
  const double h_gold = detail::entropy(c.gold_sizes, n);
  const double h_pred = detail::entropy(c.pred_sizes, n);
  double h_gold_given_pred = 0.0, h_pred_given_gold = 0.0;
  for (const auto& [key, v] : c.cells) {
    h_gold_given_pred -= (v / n) * std::log(v / c.pred_sizes[key.second]);
    h_pred_given_gold -= (v / n) * std::log(v / c.gold_sizes[key.first]);
  }
  VMeasure m;
  m.homogeneity = h_gold == 0.0 ? 1.0 : 1.0 - h_gold_given_pred / h_gold;
  m.completeness = h_pred == 0.0 ? 1.0 : 1.0 - h_pred_given_gold / h_pred;
  const double s = m.homogeneity + m.completeness;
  m.v = s == 0.0 ? 0.0 : 2.0 * m.homogeneity * m.completeness / s;
  return m;
}

template <typename G, typename P>
double v_measure(const std::vector<G>& gold, const std::vector<P>& pred) {
  return v_measure_parts(gold, pred).v;
}

// Pair counts behind the paired F-score; additive across words.
struct PairCounts {
  double common = 0.0;  // pairs together in both
  double pred = 0.0;    // pairs together in pred
  double gold = 0.0;    // pairs together in gold

  double f_score() const {
    if (pred == 0.0) return gold == 0.0 ? 1.0 : 0.0;
    if (gold == 0.0 || common == 0.0) return 0.0;
    const double p = common / pred;
    const double r = common / gold;
    return 2.0 * p * r / (p + r);
  }
};

template <typename G, typename P>
PairCounts pair_counts(const std::vector<G>& gold, const std::vector<P>& pred) {
  const Contingency c = Contingency::build(gold, pred);
  PairCounts pc;
  for (const auto& [_, v] : c.cells) pc.common += detail::pairs(v);
  for (double a : c.gold_sizes) pc.gold += detail::pairs(a);
  for (double b : c.pred_sizes) pc.pred += detail::pairs(b);
  return pc;
}

// SemEval-2010 paired F-score: F1 over same-cluster item pairs.
template <typename G, typename P>
double paired_f(const std::vector<G>& gold, const std::vector<P>& pred) {
  return pair_counts(gold, pred).f_score();
}

template <typename L>
std::size_t count_distinct(const std::vector<L>& labels) {
  std::vector<L> s = labels;
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

// --- per-word scores and aggregation ----------------------------------------

struct WordScore {
  std::string word;
  double ari = 0.0;
  double v_measure = 0.0;
  double paired_f = 0.0;
  std::size_t num_clusters = 0;
  std::size_t num_examples = 0;
  std::size_t gold_num_senses = 0;
  std::optional<double> max_ari;
  std::optional<std::size_t> max_ari_nc;
  // Pooled statistics, kept so dataset-level pooled metrics can be derived.
  PairCounts pairs;
  bool single_gold_class = false;
};

template <typename G, typename P>
WordScore score_word(const std::string& word, const std::vector<G>& gold, const std::vector<P>& pred) {
  WordScore s;
  s.word = word;
  s.num_examples = gold.size();
  s.num_clusters = count_distinct(pred);
  s.gold_num_senses = count_distinct(gold);
  s.single_gold_class = s.gold_num_senses < 2;
  s.ari = gold.size() >= 2 ? ari(gold, pred) : 0.0;
  s.v_measure = v_measure(gold, pred);
  s.pairs = pair_counts(gold, pred);
  s.paired_f = s.pairs.f_score();
  return s;
}

struct AggregateScores {
  double weighted_ari = 0.0;
  double v_measure = 0.0;     // example-weighted mean of per-word values
  double paired_f = 0.0;      // example-weighted mean of per-word values
  double avg = 0.0;           // sqrt(v_measure * paired_f)
  double paired_f_pooled = 0.0;  // F over pair counts summed across words
  double mean_num_clusters = 0.0;
  double mse_nc = 0.0;
  std::optional<double> weighted_max_ari;
  std::size_t num_words = 0;
  std::size_t num_examples = 0;
};

struct EvalReport {
  std::vector<WordScore> per_word;  // sorted by word
  AggregateScores aggregate;
  std::vector<std::string> failed_words;
  std::vector<std::string> warnings;
  bool partial() const { return !failed_words.empty(); }
};

inline double geometric_mean(double a, double b) { return std::sqrt(std::max(0.0, a * b)); }

inline AggregateScores aggregate_scores(const std::vector<WordScore>& words) {
  AggregateScores agg;
  agg.num_words = words.size();
  if (words.empty()) return agg;
  double total = 0.0, ari_sum = 0.0, v_sum = 0.0, f_sum = 0.0, nc_sum = 0.0, se = 0.0;
  double max_ari_sum = 0.0;
  bool have_max_ari = true;
  PairCounts pooled;
  for (const auto& w : words) {
    const double n = static_cast<double>(w.num_examples);
    total += n;
    ari_sum += w.ari * n;
    v_sum += w.v_measure * n;
    f_sum += w.paired_f * n;
    nc_sum += static_cast<double>(w.num_clusters);
    const double d = static_cast<double>(w.num_clusters) - static_cast<double>(w.gold_num_senses);
    se += d * d;
    pooled.common += w.pairs.common;
    pooled.gold += w.pairs.gold;
    pooled.pred += w.pairs.pred;
    if (w.max_ari) {
      max_ari_sum += *w.max_ari * n;
    } else {
      have_max_ari = false;
    }
  }
  agg.num_examples = static_cast<std::size_t>(total);
  if (total > 0) {
    agg.weighted_ari = ari_sum / total;
    agg.v_measure = v_sum / total;
    agg.paired_f = f_sum / total;
    if (have_max_ari) agg.weighted_max_ari = max_ari_sum / total;
  }
  agg.avg = geometric_mean(agg.v_measure, agg.paired_f);
  agg.paired_f_pooled = pooled.f_score();
  const double nw = static_cast<double>(words.size());
  agg.mean_num_clusters = nc_sum / nw;
  agg.mse_nc = se / nw;
  return agg;
}

// Mean squared difference between predicted and reference cluster counts.
inline double mse_cluster_counts(const std::vector<std::size_t>& predicted,
                                 const std::vector<std::size_t>& reference) {
  if (predicted.size() != reference.size()) throw ValidationError("cluster count lists differ in length");
  if (predicted.empty()) return 0.0;
  double se = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = static_cast<double>(predicted[i]) - static_cast<double>(reference[i]);
    se += d * d;
  }
  return se / static_cast<double>(predicted.size());
}

}  // namespace wsi
