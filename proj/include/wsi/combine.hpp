#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wsi/error.hpp"
#include "wsi/random.hpp"
#include "wsi/substitutes.hpp"
#include "wsi/text.hpp"

namespace wsi {

enum class CombineMethod { base_union, sampling, avg, pos_weight_avg, bayes_comb };

inline std::string_view to_string(CombineMethod m) {
  switch (m) {
    case CombineMethod::base_union: return "base-union";
    case CombineMethod::sampling: return "sampling";
    case CombineMethod::avg: return "avg";
    case CombineMethod::pos_weight_avg: return "pos-weight-avg";
    case CombineMethod::bayes_comb: return "bayes-comb";
  }
  return "?";
}

inline CombineMethod parse_combine_method(std::string_view s) {
  if (s == "base-union" || s == "base") return CombineMethod::base_union;
  if (s == "sampling") return CombineMethod::sampling;
  if (s == "avg") return CombineMethod::avg;
  if (s == "pos-weight-avg") return CombineMethod::pos_weight_avg;
  if (s == "bayes-comb") return CombineMethod::bayes_comb;
  throw ConfigError("unknown combine method '" + std::string(s) + "'");
}

struct CombineConfig {
  CombineMethod method = CombineMethod::bayes_comb;
  std::size_t top_k = 200;            // K
  std::size_t num_representatives = 20;  // S, sampling only
  std::size_t sample_size = 15;       // L, sampling only
  double zipf_z = 2.0;                // z, bayes-comb only
  double beta = 0.1;                  // pos-weight-avg only
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (top_k < 1) throw ConfigError("K must be >= 1");
    if (num_representatives < 1) throw ConfigError("S must be >= 1");
    if (sample_size < 1) throw ConfigError("L must be >= 1");
    if (!(zipf_z >= 0.0)) throw ConfigError("z must be >= 0");
    if (!(beta > 0.0 && beta <= 0.5)) throw ConfigError("beta must be in (0, 0.5]");
  }
};

// A multiset of substitute tokens standing in for one occurrence.
struct Representative {
  std::string context_id;
  std::vector<std::string> substitutes;
  friend bool operator==(const Representative&, const Representative&) = default;
};

struct ScoredToken {
  std::string token;
  double score = 0.0;
  std::size_t rank = 0;
  double key = 0.0;  // sort key; log(score) for bayes-comb, which can overflow
};

inline void sort_scored(std::vector<ScoredToken>& v) {
  std::sort(v.begin(), v.end(), [](const ScoredToken& a, const ScoredToken& b) {
    if (a.key != b.key) return a.key > b.key;
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.token < b.token;
  });
}

// Keeps the k most probable entries and rescales them to sum to one.
inline SubstituteDistribution renormalize_top_k(const SubstituteDistribution& dist, std::size_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (dist.entries.empty())
    throw NoSubstitutesError("context " + dist.context_id + ": no substitutes available");
  SubstituteDistribution out = dist;
  std::sort(out.entries.begin(), out.entries.end(), entry_before);
  if (out.entries.size() > k) out.entries.resize(k);
  double sum = 0.0;
  for (const auto& e : out.entries) sum += e.probability;
  for (auto& e : out.entries) e.probability /= sum;
  return out;
}

namespace detail {

struct PairedProb {
  double fwd = 0.0;
  double bwd = 0.0;
  std::size_t rank = 0;
};

// Token -> (P_fwd, P_bwd, rank) over the union of both supports. The
// forward side's rank wins when the two disagree.
inline std::map<std::string, PairedProb> join(const SubstituteDistribution& fwd,
                                              const SubstituteDistribution& bwd) {
  std::map<std::string, PairedProb> joined;
  for (const auto& e : fwd.entries) {
    auto& p = joined[e.token];
    p.fwd = e.probability;
    p.rank = e.rank;
  }
  for (const auto& e : bwd.entries) {
    auto& p = joined[e.token];
    p.bwd = e.probability;
    if (p.rank == 0) p.rank = e.rank;
  }
  return joined;
}

inline std::vector<ScoredToken> weighted(const SubstituteDistribution& fwd,
                                         const SubstituteDistribution& bwd, double fwd_weight) {
  if (fwd.entries.empty() && bwd.entries.empty())
    throw NoSubstitutesError("context " + fwd.context_id + ": both distributions are empty");
  std::vector<ScoredToken> out;
  for (const auto& [tok, p] : join(fwd, bwd)) {
    const double score = fwd_weight * p.fwd + (1.0 - fwd_weight) * p.bwd;
    out.push_back({tok, score, p.rank, score});
  }
  sort_scored(out);
  return out;
}

}  // namespace detail

inline std::vector<ScoredToken> combine_avg(const SubstituteDistribution& fwd,
                                            const SubstituteDistribution& bwd) {
  return detail::weighted(fwd, bwd, 0.5);
}

// Weight of the forward model given the normalized target position: 0.5 in
// the middle, falling linearly to 0 (resp. rising to 1) once the left (resp.
// right) context is shorter than beta of the example.
inline double alpha(double pos, double beta) {
  if (!(pos >= 0.0 && pos <= 1.0)) throw DomainError("position must be in [0, 1]");
  if (!(beta > 0.0 && beta <= 0.5)) throw DomainError("beta must be in (0, 0.5]");
  const double slope = 0.5 / beta;
  return std::max(std::min(0.5, slope * pos), slope * (pos - 1.0 + 2.0 * beta));
}

inline std::vector<ScoredToken> combine_pos_weighted(const SubstituteDistribution& fwd,
                                                     const SubstituteDistribution& bwd, double pos,
                                                     double beta) {
  return detail::weighted(fwd, bwd, alpha(pos, beta));
}

// P_fwd * P_bwd * rank^z over tokens present on both sides. Scores are
// unnormalized; only their order and ratios matter.
inline std::vector<ScoredToken> combine_bayes(const SubstituteDistribution& fwd,
                                              const SubstituteDistribution& bwd, double z) {
  std::vector<ScoredToken> out;
  for (const auto& [tok, p] : detail::join(fwd, bwd)) {
    if (p.fwd <= 0.0 || p.bwd <= 0.0) continue;
    if (p.rank == 0) throw ValidationError("token '" + tok + "' has no frequency rank");
    const double log_score = std::log(p.fwd) + std::log(p.bwd) + z * std::log(static_cast<double>(p.rank));
    out.push_back({tok, std::exp(log_score), p.rank, log_score});
  }
  if (out.empty())
    throw NoSubstitutesError("context " + fwd.context_id +
                             ": forward and backward distributions share no substitutes");
  sort_scored(out);
  return out;
}

// Representatives for one occurrence plus a note when the Bayesian
// combination had to fall back to the union.
struct RepresentativeSet {
  std::vector<Representative> items;
  bool bayes_fallback = false;
};

// Seed for one occurrence's sampling stream: the run seed mixed with a
// stable hash of the context id, so results do not depend on processing
// order.
inline Rng occurrence_rng(std::uint64_t seed, std::string_view context_id) {
  return Rng{seed, text::fnv1a(context_id)};
}

inline RepresentativeSet make_representatives(const SubstituteDistribution& fwd,
                                              const SubstituteDistribution& bwd,
                                              const CombineConfig& cfg, double pos) {
  cfg.validate();
  RepresentativeSet out;
  const std::string& id = fwd.context_id;
  auto take_top = [&](std::vector<ScoredToken> scored) {
    Representative r{id, {}};
    const std::size_t k = std::min(cfg.top_k, scored.size());
    for (std::size_t i = 0; i < k; ++i) r.substitutes.push_back(std::move(scored[i].token));
    std::sort(r.substitutes.begin(), r.substitutes.end());
    out.items.push_back(std::move(r));
  };

  switch (cfg.method) {
    case CombineMethod::base_union: {
      const auto f = renormalize_top_k(fwd, cfg.top_k);
      const auto b = renormalize_top_k(bwd, cfg.top_k);
      Representative r{id, {}};
      for (const auto& e : f.entries) r.substitutes.push_back(e.token);
      for (const auto& e : b.entries) r.substitutes.push_back(e.token);
      std::sort(r.substitutes.begin(), r.substitutes.end());
      r.substitutes.erase(std::unique(r.substitutes.begin(), r.substitutes.end()), r.substitutes.end());
      out.items.push_back(std::move(r));
      break;
    }
    case CombineMethod::sampling: {
      const auto f = renormalize_top_k(fwd, cfg.top_k);
      const auto b = renormalize_top_k(bwd, cfg.top_k);
      std::vector<double> wf, wb;
      for (const auto& e : f.entries) wf.push_back(e.probability);
      for (const auto& e : b.entries) wb.push_back(e.probability);
      const CategoricalSampler sf(wf), sb(wb);
      Rng rng = occurrence_rng(cfg.rng_seed, id);
      for (std::size_t s = 0; s < cfg.num_representatives; ++s) {
        Representative r{id, {}};
        r.substitutes.reserve(2 * cfg.sample_size);
        for (std::size_t i = 0; i < cfg.sample_size; ++i) r.substitutes.push_back(f.entries[sf(rng)].token);
        for (std::size_t i = 0; i < cfg.sample_size; ++i) r.substitutes.push_back(b.entries[sb(rng)].token);
        std::sort(r.substitutes.begin(), r.substitutes.end());
        out.items.push_back(std::move(r));
      }
      break;
    }
    case CombineMethod::avg:
      take_top(combine_avg(renormalize_top_k(fwd, cfg.top_k), renormalize_top_k(bwd, cfg.top_k)));
      break;
    case CombineMethod::pos_weight_avg:
      take_top(combine_pos_weighted(renormalize_top_k(fwd, cfg.top_k),
                                    renormalize_top_k(bwd, cfg.top_k), pos, cfg.beta));
      break;
    case CombineMethod::bayes_comb:
      try {
        take_top(combine_bayes(fwd, bwd, cfg.zipf_z));
      } catch (const NoSubstitutesError&) {
        if (fwd.entries.empty() && bwd.entries.empty()) throw;
        // Disjoint supports: rank the union by P_fwd + P_bwd instead.
        out.bayes_fallback = true;
        take_top(detail::weighted(fwd, bwd, 0.5));
      }
      break;
  }
  return out;
}

}  // namespace wsi
