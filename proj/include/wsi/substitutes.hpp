#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wsi/error.hpp"
#include "wsi/occurrence.hpp"
#include "wsi/text.hpp"

namespace wsi {

enum class Direction { forward, backward };

inline std::string_view to_string(Direction d) { return d == Direction::forward ? "fwd" : "bwd"; }

inline Direction parse_direction(std::string_view s) {
  if (s == "fwd" || s == "forward") return Direction::forward;
  if (s == "bwd" || s == "backward") return Direction::backward;
  throw ConfigError("unknown direction '" + std::string(s) + "'");
}

struct SubstituteEntry {
  std::string token;
  double probability = 0.0;
  std::size_t rank = 0;  // corpus frequency rank, 1 = most frequent
  friend bool operator==(const SubstituteEntry&, const SubstituteEntry&) = default;
};

// Ranked substitutes for one side of one occurrence.
struct SubstituteDistribution {
  std::string context_id;
  std::string word;
  Direction direction = Direction::forward;
  std::vector<SubstituteEntry> entries;
  nlohmann::json meta = nlohmann::json::object();

  bool operator==(const SubstituteDistribution&) const = default;
};

// Descending probability, then ascending rank, then token. Total order on
// entries with distinct tokens.
inline bool entry_before(const SubstituteEntry& a, const SubstituteEntry& b) {
  if (a.probability != b.probability) return a.probability > b.probability;
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.token < b.token;
}

// Throws ValidationError (tagged with `line` when non-zero) on any broken
// invariant: probability outside (0,1], rank 0, duplicate token, unsorted
// entries, or mass above one.
inline void validate(const SubstituteDistribution& d, std::size_t line = 0) {
  auto fail = [&](const std::string& what) -> void {
    if (line) throw ValidationError(line, what);
    throw ValidationError("context " + d.context_id + ": " + what);
  };
  std::unordered_set<std::string_view> seen;
  double sum = 0.0;
  for (std::size_t i = 0; i < d.entries.size(); ++i) {
    const auto& e = d.entries[i];
    if (!(e.probability > 0.0 && e.probability <= 1.0))
      fail("probability of '" + e.token + "' outside (0, 1]");
    if (e.rank == 0) fail("rank of '" + e.token + "' must be positive");
    if (!seen.insert(e.token).second) fail("duplicate token '" + e.token + "'");
    if (i > 0 && d.entries[i - 1].probability < e.probability)
      fail("entries not sorted by probability");
    sum += e.probability;
  }
  if (sum > 1.0 + 1e-6) fail("probabilities sum to " + std::to_string(sum) + " > 1");
}

// Add-k smoothed n-gram model over whitespace tokens. Stands in for a real
// pretrained LM; immutable once trained.
class ToyLm {
 public:
  static constexpr std::string_view kBoundary = "<s>";

  int order() const noexcept { return order_; }
  Direction direction() const noexcept { return direction_; }
  double smoothing_k() const noexcept { return smoothing_k_; }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }

  // 1-based frequency rank; 0 for out-of-vocabulary tokens.
  std::size_t rank(std::string_view token) const {
    const auto it = ids_.find(std::string(token));
    return it == ids_.end() ? 0 : it->second + 1;
  }

  // P(token | history) over the vocabulary. `history` is in the model's own
  // reading order (already reversed for backward models); only the last
  // order-1 tokens matter, missing ones are padded with the boundary marker.
  std::vector<double> predict(const std::vector<std::string>& history) const {
    const std::string key = history_key(history);
    std::vector<double> probs(vocab_.size(), 0.0);
    const auto it = counts_.find(key);
    double total = 0.0;
    if (it != counts_.end()) total = it->second.total;
    const double denom = total + smoothing_k_ * static_cast<double>(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) probs[i] = smoothing_k_ / denom;
    if (it != counts_.end())
      for (const auto& [id, c] : it->second.next) probs[id] = (c + smoothing_k_) / denom;
    return probs;
  }

  double probability(const std::vector<std::string>& history, std::string_view token) const {
    const std::size_t r = rank(token);
    if (r == 0) return 0.0;
    return predict(history)[r - 1];
  }

 private:
  friend ToyLm train_toy_lm(const std::vector<std::vector<std::string>>&, int, Direction, double);

  struct HistoryCounts {
    double total = 0.0;
    std::unordered_map<std::size_t, double> next;
  };

  std::string history_key(const std::vector<std::string>& history) const {
    const std::size_t need = static_cast<std::size_t>(order_ - 1);
    std::string key;
    for (std::size_t i = 0; i < need; ++i) {
      // position i of the window, right-aligned against the end of history
      const std::size_t from_end = need - i;
      if (from_end <= history.size()) {
        key += history[history.size() - from_end];
      } else {
        key += kBoundary;
      }
      key += '\x1f';
    }
    return key;
  }

  int order_ = 2;
  Direction direction_ = Direction::forward;
  double smoothing_k_ = 1.0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::unordered_map<std::string, HistoryCounts> counts_;
};

// Tokens are used as given; callers tokenize with text::tokenize. Backward
// models are trained on each sequence reversed.
inline ToyLm train_toy_lm(const std::vector<std::vector<std::string>>& corpus, int order,
                          Direction direction, double smoothing_k) {
  if (order < 2) throw ConfigError("toy LM order must be >= 2");
  if (!(smoothing_k > 0.0)) throw ConfigError("toy LM smoothing_k must be > 0");
  std::size_t tokens = 0;
  for (const auto& s : corpus) tokens += s.size();
  if (tokens == 0) throw ConfigError("toy LM corpus is empty");

  ToyLm lm;
  lm.order_ = order;
  lm.direction_ = direction;
  lm.smoothing_k_ = smoothing_k;

  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& s : corpus)
    for (const auto& t : s) ++freq[t];
  std::vector<std::pair<std::string, std::size_t>> by_freq(freq.begin(), freq.end());
  std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  lm.vocab_.reserve(by_freq.size());
  for (auto& [tok, _] : by_freq) {
    lm.ids_.emplace(tok, lm.vocab_.size());
    lm.vocab_.push_back(tok);
  }

  std::vector<std::string> history;
  for (const auto& s : corpus) {
    std::vector<std::string> seq = s;
    if (direction == Direction::backward) std::reverse(seq.begin(), seq.end());
    history.clear();
    for (const auto& tok : seq) {
      auto& hc = lm.counts_[lm.history_key(history)];
      hc.total += 1.0;
      hc.next[lm.ids_.at(tok)] += 1.0;
      history.push_back(tok);
    }
  }
  return lm;
}

// Left and right query texts handed to the forward and backward models. With
// a pattern, "l c r" becomes "l c<pattern>_" forward and "_<pattern>c r"
// backward.
struct QueryContexts {
  std::string left;
  std::string right;
};

inline QueryContexts query_contexts(const Occurrence& occ, bool use_pattern,
                                    std::string_view pattern_text) {
  const ContextParts parts = split_context(occ);
  QueryContexts q;
  if (use_pattern) {
    q.left = std::string(parts.left) + std::string(parts.target) + std::string(pattern_text);
    q.right = std::string(pattern_text) + std::string(parts.target) + std::string(parts.right);
  } else {
    q.left = std::string(parts.left);
    q.right = std::string(parts.right);
  }
  return q;
}

// Top-k substitutes for the target position of `occ`, using the side of the
// context that matches the model's direction. k beyond the vocabulary size
// is truncated.
inline SubstituteDistribution predict_substitutes(const ToyLm& lm, const Occurrence& occ,
                                                  std::size_t top_k, bool use_pattern = false,
                                                  std::string_view pattern_text = " and ") {
  if (top_k == 0) throw ConfigError("top_k must be >= 1");
  const QueryContexts q = query_contexts(occ, use_pattern, pattern_text);
  std::vector<std::string> history;
  if (lm.direction() == Direction::forward) {
    history = text::tokenize(q.left);
  } else {
    history = text::tokenize(q.right);
    std::reverse(history.begin(), history.end());
  }
  const std::vector<double> probs = lm.predict(history);

  std::vector<SubstituteEntry> all;
  all.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) all.push_back({lm.vocab()[i], probs[i], i + 1});
  const std::size_t k = std::min(top_k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), entry_before);
  all.resize(k);

  SubstituteDistribution d;
  d.context_id = occ.context_id;
  d.word = occ.word;
  d.direction = lm.direction();
  d.entries = std::move(all);
  return d;
}

// --- distribution files (JSON lines) ---------------------------------------

inline nlohmann::json to_json(const SubstituteDistribution& d) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : d.entries) entries.push_back({e.token, e.probability, e.rank});
  nlohmann::json j = {{"context_id", d.context_id},
                      {"word", d.word},
                      {"direction", std::string(to_string(d.direction))},
                      {"entries", std::move(entries)}};
  if (!d.meta.empty()) j["meta"] = d.meta;
  return j;
}

inline SubstituteDistribution distribution_from_json(const nlohmann::json& j, std::size_t line) {
  SubstituteDistribution d;
  try {
    if (!j.is_object()) throw ParseError(line, "expected a JSON object");
    d.context_id = j.at("context_id").get<std::string>();
    d.word = j.at("word").get<std::string>();
    const auto dir = j.at("direction").get<std::string>();
    if (dir != "fwd" && dir != "bwd") throw ParseError(line, "direction must be \"fwd\" or \"bwd\"");
    d.direction = parse_direction(dir);
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 3) throw ParseError(line, "entry must be [token, probability, rank]");
      const auto rank = e.at(2).get<long long>();
      if (rank <= 0) throw ValidationError(line, "rank must be positive");
      d.entries.push_back({e.at(0).get<std::string>(), e.at(1).get<double>(), static_cast<std::size_t>(rank)});
    }
    if (j.contains("meta")) {
      if (!j["meta"].is_object()) throw ParseError(line, "meta must be an object");
      d.meta = j["meta"];
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(line, ex.what());
  }
  validate(d, line);
  return d;
}

inline std::vector<SubstituteDistribution> read_distributions(std::istream& in) {
  std::vector<SubstituteDistribution> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& ex) {
      throw ParseError(lineno, ex.what());
    }
    out.push_back(distribution_from_json(j, lineno));
  }
  return out;
}

inline std::vector<SubstituteDistribution> read_distribution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open distribution file " + path);
  return read_distributions(in);
}

inline void write_distributions(std::ostream& out, const std::vector<SubstituteDistribution>& ds) {
  for (const auto& d : ds) out << to_json(d).dump() << '\n';
}

}  // namespace wsi
