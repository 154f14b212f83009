#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wsi/combine.hpp"
#include "wsi/error.hpp"
#include "wsi/text.hpp"

namespace wsi {

// Dictionary lemmatizer. Unknown tokens map to themselves. Chains in the
// dictionary (a -> b, b -> c) are collapsed on load so that lemmatize is
// idempotent.
class Lemmatizer {
 public:
  Lemmatizer() = default;

  explicit Lemmatizer(std::unordered_map<std::string, std::string> mapping) {
    for (const auto& [tok, _] : mapping) {
      std::string cur = tok;
      std::set<std::string> visited{cur};
      for (auto it = mapping.find(cur); it != mapping.end() && it->second != cur;
           it = mapping.find(cur)) {
        cur = it->second;
        if (!visited.insert(cur).second)
          throw ValidationError("lemma dictionary has a cycle through '" + tok + "'");
      }
      if (cur != tok) mapping_.emplace(tok, cur);
    }
  }

  const std::string& lemmatize(const std::string& token) const {
    const auto it = mapping_.find(token);
    return it == mapping_.end() ? token : it->second;
  }

  std::size_t size() const noexcept { return mapping_.size(); }

 private:
  std::unordered_map<std::string, std::string> mapping_;
};

// TSV: token <TAB> lemma. Blank lines and '#' comments are skipped. An
// empty file gives the identity lemmatizer.
inline Lemmatizer read_lemmatizer(std::istream& in) {
  std::unordered_map<std::string, std::string> mapping;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      throw ParseError(lineno, "expected 'token<TAB>lemma'");
    mapping[cols[0]] = cols[1];
  }
  return Lemmatizer(std::move(mapping));
}

inline Lemmatizer read_lemmatizer_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lemma dictionary " + path);
  return read_lemmatizer(in);
}

struct VectorizeConfig {
  bool use_tfidf = false;
  bool exclude_target = true;
};

struct SparseVector {
  std::vector<std::uint32_t> indices;  // strictly increasing
  std::vector<double> values;          // all > 0
  std::size_t dim = 0;

  bool empty() const noexcept { return indices.empty(); }
  std::size_t nnz() const noexcept { return indices.size(); }
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else if (a.indices[i] > b.indices[j]) {
      ++j;
    } else {
      s += a.values[i++] * b.values[j++];
    }
  }
  return s;
}

inline double norm(const SparseVector& v) { return std::sqrt(dot(v, v)); }

// Per-word lemma vocabulary with ids in sorted lemma order.
struct Vocabulary {
  std::vector<std::string> lemmas;
  std::unordered_map<std::string, std::uint32_t> ids;

  std::size_t size() const noexcept { return lemmas.size(); }
  bool contains(const std::string& lemma) const { return ids.count(lemma) != 0; }
};

inline Vocabulary build_vocab(const std::vector<Representative>& reps, const Lemmatizer& lem,
                              const std::string& target_lemma, const VectorizeConfig& cfg) {
  std::set<std::string> lemmas;
  for (const auto& r : reps)
    for (const auto& t : r.substitutes) {
      const auto& l = lem.lemmatize(t);
      if (cfg.exclude_target && l == target_lemma) continue;
      lemmas.insert(l);
    }
  if (lemmas.empty())
    throw NoSubstitutesError("word '" + target_lemma + "': every representative is empty after exclusion");
  Vocabulary v;
  for (const auto& l : lemmas) {
    v.ids.emplace(l, static_cast<std::uint32_t>(v.lemmas.size()));
    v.lemmas.push_back(l);
  }
  return v;
}

// Bag-of-lemmas counts. Out-of-vocabulary lemmas (including an excluded
// target, which build_vocab never admits) are dropped.
inline SparseVector to_bow(const Representative& rep, const Vocabulary& vocab, const Lemmatizer& lem) {
  std::map<std::uint32_t, double> counts;
  for (const auto& t : rep.substitutes) {
    const auto it = vocab.ids.find(lem.lemmatize(t));
    if (it != vocab.ids.end()) counts[it->second] += 1.0;
  }
  SparseVector v;
  v.dim = vocab.size();
  for (const auto& [id, c] : counts) {
    v.indices.push_back(id);
    v.values.push_back(c);
  }
  return v;
}

// tf * (ln((1 + N) / (1 + df)) + 1) over the given collection.
inline std::vector<SparseVector> tfidf_scale(const std::vector<SparseVector>& vectors) {
  if (vectors.empty()) return {};
  std::size_t dim = 0;
  for (const auto& v : vectors) dim = std::max(dim, v.dim);
  std::vector<double> df(dim, 0.0);
  for (const auto& v : vectors)
    for (auto idx : v.indices) df[idx] += 1.0;
  const double n = static_cast<double>(vectors.size());
  std::vector<double> idf(dim);
  for (std::size_t t = 0; t < dim; ++t) idf[t] = std::log((1.0 + n) / (1.0 + df[t])) + 1.0;
  std::vector<SparseVector> out = vectors;
  for (auto& v : out)
    for (std::size_t i = 0; i < v.indices.size(); ++i) v.values[i] *= idf[v.indices[i]];
  return out;
}

}  // namespace wsi
