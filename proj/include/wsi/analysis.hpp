#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wsi/combine.hpp"
#include "wsi/error.hpp"
#include "wsi/vectorize.hpp"

namespace wsi {

// Substitute lemma counts for the examples of one sense of one word.
struct SenseProfile {
  std::string word;
  std::string sense_id;
  std::map<std::string, double> substitute_counts;
  double total = 0.0;           // sum of substitute_counts
  std::size_t vocab_size = 0;   // |vocab| in the add-one denominator
  std::size_t num_examples = 0;

  double count(const std::string& lemma) const {
    const auto it = substitute_counts.find(lemma);
    return it == substitute_counts.end() ? 0.0 : it->second;
  }
};

// (cnt(w|sense) + 1) / (cnt(sense) + |vocab|)
inline double smoothed_prob(const SenseProfile& p, const std::string& lemma) {
  if (p.vocab_size < 1) throw DomainError("vocabulary size must be >= 1");
  return (p.count(lemma) + 1.0) / (p.total + static_cast<double>(p.vocab_size));
}

// Builds one profile per sense. Each lemma is counted at most once per
// example, however many representatives produced it. `senses[i]` is the
// sense (gold or induced) of the occurrence owning representative set i.
// All profiles share the word's full lemma vocabulary size.
inline std::vector<SenseProfile> build_sense_profiles(
    const std::string& word, const std::vector<std::vector<Representative>>& reps_per_occurrence,
    const std::vector<std::string>& senses, const Lemmatizer& lem, const std::string& target_lemma,
    const VectorizeConfig& cfg) {
  if (reps_per_occurrence.size() != senses.size())
    throw ValidationError("sense list and representative list differ in size");
  std::map<std::string, SenseProfile> by_sense;
  std::set<std::string> vocab;
  for (std::size_t o = 0; o < senses.size(); ++o) {
    std::set<std::string> lemmas;
    for (const auto& r : reps_per_occurrence[o])
      for (const auto& t : r.substitutes) {
        const auto& l = lem.lemmatize(t);
        if (cfg.exclude_target && l == target_lemma) continue;
        lemmas.insert(l);
      }
    auto& p = by_sense[senses[o]];
    p.word = word;
    p.sense_id = senses[o];
    ++p.num_examples;
    for (const auto& l : lemmas) {
      p.substitute_counts[l] += 1.0;
      p.total += 1.0;
      vocab.insert(l);
    }
  }
  std::vector<SenseProfile> out;
  for (auto& [_, p] : by_sense) {
    p.vocab_size = std::max<std::size_t>(1, vocab.size());
    out.push_back(std::move(p));
  }
  return out;
}

struct DiscriminativeSubstitute {
  std::string lemma;
  double ratio = 0.0;  // P(w|sense1) / P(w|sense2), both add-one smoothed
  double freq1 = 0.0;  // count / number of examples of sense 1
  double freq2 = 0.0;
  double count1 = 0.0;
  double count2 = 0.0;
};

// Lemmas seen at least min_count times in either sense, ranked by the
// smoothed probability ratio (descending, then lemma). top_n = 0 means all.
inline std::vector<DiscriminativeSubstitute> discriminative_substitutes(const SenseProfile& p1,
                                                                        const SenseProfile& p2,
                                                                        double min_count = 10,
                                                                        std::size_t top_n = 10) {
  if (p1.word != p2.word) throw ValidationError("sense profiles belong to different words");
  std::set<std::string> lemmas;
  for (const auto& [l, _] : p1.substitute_counts) lemmas.insert(l);
  for (const auto& [l, _] : p2.substitute_counts) lemmas.insert(l);
  std::vector<DiscriminativeSubstitute> out;
  for (const auto& l : lemmas) {
    const double c1 = p1.count(l), c2 = p2.count(l);
    if (std::max(c1, c2) < min_count) continue;
    DiscriminativeSubstitute d;
    d.lemma = l;
    d.count1 = c1;
    d.count2 = c2;
    d.ratio = smoothed_prob(p1, l) / smoothed_prob(p2, l);
    d.freq1 = p1.num_examples ? c1 / static_cast<double>(p1.num_examples) : 0.0;
    d.freq2 = p2.num_examples ? c2 / static_cast<double>(p2.num_examples) : 0.0;
    out.push_back(std::move(d));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.ratio > b.ratio; });
  if (top_n > 0 && out.size() > top_n) out.resize(top_n);
  return out;
}

// --- cluster-count differences -----------------------------------------------

struct NcTriple {
  std::string word;
  std::size_t true_nc = 0;
  std::size_t submitted_nc = 0;
  std::size_t max_ari_nc = 0;
};

struct NcDifferenceRow {
  std::string word;
  long submitted_minus_true = 0;
  long submitted_minus_max_ari = 0;
  long true_minus_max_ari = 0;
};

struct Quantiles {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

// Linear-interpolation quantiles (the usual "type 7" definition).
inline Quantiles quantiles(std::vector<double> xs) {
  Quantiles q;
  if (xs.empty()) return q;
  std::sort(xs.begin(), xs.end());
  auto at = [&](double p) {
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
  };
  q.min = xs.front();
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  q.max = xs.back();
  double s = 0.0;
  for (double x : xs) s += x;
  q.mean = s / static_cast<double>(xs.size());
  return q;
}

struct NcDifferenceReport {
  std::vector<NcDifferenceRow> rows;
  Quantiles submitted_minus_true, submitted_minus_max_ari, true_minus_max_ari;
  double mse_submitted_vs_true = 0.0;
};

inline NcDifferenceReport nc_difference_report(const std::vector<NcTriple>& per_word) {
  NcDifferenceReport rep;
  std::vector<double> a, b, c;
  double se = 0.0;
  for (const auto& t : per_word) {
    if (t.true_nc == 0 || t.submitted_nc == 0 || t.max_ari_nc == 0)
      throw ValidationError("word '" + t.word + "': cluster counts must be positive");
    NcDifferenceRow r;
    r.word = t.word;
    r.submitted_minus_true = static_cast<long>(t.submitted_nc) - static_cast<long>(t.true_nc);
    r.submitted_minus_max_ari = static_cast<long>(t.submitted_nc) - static_cast<long>(t.max_ari_nc);
    r.true_minus_max_ari = static_cast<long>(t.true_nc) - static_cast<long>(t.max_ari_nc);
    a.push_back(static_cast<double>(r.submitted_minus_true));
    b.push_back(static_cast<double>(r.submitted_minus_max_ari));
    c.push_back(static_cast<double>(r.true_minus_max_ari));
    se += a.back() * a.back();
    rep.rows.push_back(std::move(r));
  }
  rep.submitted_minus_true = quantiles(a);
  rep.submitted_minus_max_ari = quantiles(b);
  rep.true_minus_max_ari = quantiles(c);
  if (!per_word.empty()) rep.mse_submitted_vs_true = se / static_cast<double>(per_word.size());
  return rep;
}

}  // namespace wsi
