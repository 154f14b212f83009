#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "wsi/dataset.hpp"
#include "wsi/error.hpp"
#include "wsi/random.hpp"
#include "wsi/text.hpp"

namespace wsi {

// Knobs for the pseudoword generator. The corpus is a mixture of semantic
// classes; each class has its own nouns plus words that only ever appear
// right before or right after those nouns. A pseudoword glues together two
// nouns from different classes, and its gold sense is the original noun.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::size_t corpus_tokens = 50000;
  std::size_t num_classes = 8;
  std::size_t nouns_per_class = 6;
  std::size_t cue_words_per_class = 5;  // on each side
  std::size_t num_pseudowords = 4;
  std::size_t examples_per_sense = 20;
  // Probability that one side of a sentence carries a class-neutral word
  // next to the noun instead of a class cue.
  double neutral_side_rate = 0.5;
  std::size_t max_filler = 3;  // filler words on each outer edge
};

struct SyntheticData {
  std::vector<std::vector<std::string>> corpus;  // tokenized sentences
  Dataset dataset;
};

namespace detail {

inline std::string make_word(Rng& rng, std::set<std::string>& used) {
  static const std::vector<std::string> onset{"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
  static const std::vector<std::string> nucleus{"a", "e", "i", "o", "u"};
  for (;;) {
    std::string w;
    const std::size_t syl = 2 + rng.below(2);
    for (std::size_t i = 0; i < syl; ++i) w += rng.pick(onset) + rng.pick(nucleus);
    if (used.insert(w).second) return w;
  }
}

}  // namespace detail

inline SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 2) throw ConfigError("synthetic data needs at least two classes");
  if (spec.nouns_per_class < 1 || spec.cue_words_per_class < 1)
    throw ConfigError("synthetic classes need nouns and cue words");
  if (spec.num_pseudowords * 2 > spec.num_classes * spec.nouns_per_class)
    throw ConfigError("not enough nouns for the requested pseudowords");
  Rng rng(spec.seed);
  std::set<std::string> used{"the", "a", "this", "is", "was", "and", "it", "then", "so", "we", "they", "very"};
  const std::vector<std::string> neutral_left{"the", "a", "this"};
  const std::vector<std::string> neutral_right{"is", "was", "and"};
  const std::vector<std::string> filler{"it", "then", "so", "we", "they", "very"};

  struct Class {
    std::vector<std::string> nouns, left, right;
  };
  std::vector<Class> classes(spec.num_classes);
  for (auto& c : classes) {
    for (std::size_t i = 0; i < spec.nouns_per_class; ++i) c.nouns.push_back(detail::make_word(rng, used));
    for (std::size_t i = 0; i < spec.cue_words_per_class; ++i) {
      c.left.push_back(detail::make_word(rng, used));
      c.right.push_back(detail::make_word(rng, used));
    }
  }
  // Zipf-like noun weights inside a class.
  std::vector<double> noun_w(spec.nouns_per_class);
  for (std::size_t i = 0; i < noun_w.size(); ++i) noun_w[i] = 1.0 / static_cast<double>(i + 1);
  const CategoricalSampler pick_noun(noun_w);

  // Sentence around a given noun; returns tokens and the noun's index.
  auto sentence = [&](const Class& c, const std::string& noun, std::size_t& noun_pos) {
    std::vector<std::string> s;
    const std::size_t pre = rng.below(spec.max_filler + 1);
    for (std::size_t i = 0; i < pre; ++i) s.push_back(rng.pick(filler));
    const bool neutral = rng.bernoulli(spec.neutral_side_rate);
    const bool neutral_left_side = neutral && rng.bernoulli(0.5);
    const bool neutral_right_side = neutral && !neutral_left_side;
    s.push_back(neutral_left_side ? rng.pick(neutral_left) : rng.pick(c.left));
    noun_pos = s.size();
    s.push_back(noun);
    s.push_back(neutral_right_side ? rng.pick(neutral_right) : rng.pick(c.right));
    const std::size_t post = rng.below(spec.max_filler + 1);
    for (std::size_t i = 0; i < post; ++i) s.push_back(rng.pick(filler));
    return s;
  };

  SyntheticData out;
  struct Slot {
    std::size_t sentence;
    std::size_t pos;
  };
  std::vector<std::vector<std::vector<Slot>>> where(spec.num_classes,
                                                    std::vector<std::vector<Slot>>(spec.nouns_per_class));
  std::size_t tokens = 0;
  while (tokens < spec.corpus_tokens) {
    const std::size_t ci = rng.below(spec.num_classes);
    const std::size_t ni = pick_noun(rng);
    std::size_t pos = 0;
    auto s = sentence(classes[ci], classes[ci].nouns[ni], pos);
    where[ci][ni].push_back({out.corpus.size(), pos});
    tokens += s.size();
    out.corpus.push_back(std::move(s));
  }

  // Pseudowords: pair classes without reuse, prefer nouns with enough corpus
  // occurrences, top up with fresh sentences otherwise.
  std::vector<std::size_t> class_order(spec.num_classes);
  for (std::size_t i = 0; i < class_order.size(); ++i) class_order[i] = i;
  rng.shuffle(class_order);
  std::set<std::pair<std::size_t, std::size_t>> taken;
  std::size_t next_class = 0;
  auto take_noun = [&]() {
    const std::size_t ci = class_order[next_class++ % class_order.size()];
    for (std::size_t tries = 0;; ++tries) {
      const std::size_t ni = rng.below(spec.nouns_per_class);
      if (taken.insert({ci, ni}).second) return std::pair{ci, ni};
      if (tries > 1000) throw ConfigError("could not pick distinct pseudoword nouns");
    }
  };

  std::size_t row_id = 0;
  for (std::size_t p = 0; p < spec.num_pseudowords; ++p) {
    const auto a = take_noun();
    auto b = take_noun();
    while (b.first == a.first) b = take_noun();
    const std::string& wa = classes[a.first].nouns[a.second];
    const std::string& wb = classes[b.first].nouns[b.second];
    const std::string pseudo = wa + "_" + wb;
    for (const auto& [ci, ni] : {a, b}) {
      auto slots = where[ci][ni];
      rng.shuffle(slots);
      if (slots.size() > spec.examples_per_sense) slots.resize(spec.examples_per_sense);
      std::vector<std::pair<std::vector<std::string>, std::size_t>> contexts;
      for (const auto& sl : slots) contexts.emplace_back(out.corpus[sl.sentence], sl.pos);
      while (contexts.size() < spec.examples_per_sense) {
        std::size_t pos = 0;
        auto s = sentence(classes[ci], classes[ci].nouns[ni], pos);
        contexts.emplace_back(s, pos);
        out.corpus.push_back(std::move(s));
      }
      for (auto& [toks, pos] : contexts) {
        DatasetRow row;
        std::string ctx;
        std::size_t begin = 0;
        for (std::size_t i = 0; i < toks.size(); ++i) {
          if (i) ctx += ' ';
          if (i == pos) {
            begin = text::codepoint_count(ctx);
            ctx += pseudo;
          } else {
            ctx += toks[i];
          }
        }
        row.occ.context_id = "syn" + std::to_string(row_id++);
        row.occ.word = pseudo;
        row.occ.gold_sense_id = classes[ci].nouns[ni];
        row.occ.target_span = {begin, begin + text::codepoint_count(pseudo)};
        row.occ.context = std::move(ctx);
        row.positions = std::to_string(row.occ.target_span.begin) + "-" + std::to_string(row.occ.target_span.end);
        out.dataset.add(std::move(row));
      }
    }
  }
  return out;
}

inline void write_corpus(std::ostream& out, const std::vector<std::vector<std::string>>& corpus) {
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
    out << '\n';
  }
}

// One sentence per line, tokenized the same way as LM queries.
inline std::vector<std::vector<std::string>> read_corpus(std::istream& in) {
  std::vector<std::vector<std::string>> corpus;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = text::tokenize(line);
    if (!toks.empty()) corpus.push_back(std::move(toks));
  }
  return corpus;
}

inline std::vector<std::vector<std::string>> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus " + path);
  return read_corpus(in);
}

}  // namespace wsi
