#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wsi/analysis.hpp"
#include "wsi/cluster.hpp"
#include "wsi/combine.hpp"
#include "wsi/config.hpp"
#include "wsi/csv.hpp"
#include "wsi/dataset.hpp"
#include "wsi/evaluate.hpp"
#include "wsi/substitutes.hpp"
#include "wsi/synthetic.hpp"
#include "wsi/vectorize.hpp"
#include "wsi/version.hpp"

namespace wsi {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// handled exactly once; results must be written to per-index slots.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

// Forward and backward substitute distributions for any occurrence, from a
// pair of toy LMs or from a precomputed distribution file.
class SubstituteProvider {
 public:
  static SubstituteProvider from_lms(ToyLm fwd, ToyLm bwd, const SourceConfig& cfg) {
    SubstituteProvider p;
    p.cfg_ = cfg;
    p.fwd_lm_ = std::make_shared<const ToyLm>(std::move(fwd));
    p.bwd_lm_ = std::make_shared<const ToyLm>(std::move(bwd));
    return p;
  }

  static SubstituteProvider from_corpus(const std::vector<std::vector<std::string>>& corpus,
                                        const SourceConfig& cfg) {
    return from_lms(train_toy_lm(corpus, cfg.order, Direction::forward, cfg.smoothing_k),
                    train_toy_lm(corpus, cfg.order, Direction::backward, cfg.smoothing_k), cfg);
  }

  static SubstituteProvider from_distributions(const std::vector<SubstituteDistribution>& ds,
                                               const SourceConfig& cfg) {
    SubstituteProvider p;
    p.cfg_ = cfg;
    auto table = std::make_shared<Table>();
    for (const auto& d : ds) {
      auto& slot = (*table)[d.context_id];
      auto& side = d.direction == Direction::forward ? slot.first : slot.second;
      if (side) throw ValidationError("context " + d.context_id + ": duplicate " +
                                      std::string(to_string(d.direction)) + " distribution");
      side = d;
    }
    p.table_ = std::move(table);
    return p;
  }

  static SubstituteProvider from_config(const SourceConfig& cfg) {
    if (cfg.kind == SourceKind::file)
      return from_distributions(read_distribution_file(cfg.distributions_path), cfg);
    return from_corpus(read_corpus_file(cfg.corpus_path), cfg);
  }

  std::pair<SubstituteDistribution, SubstituteDistribution> get(const Occurrence& occ) const {
    if (fwd_lm_) {
      const std::size_t k = cfg_.top_k ? cfg_.top_k : fwd_lm_->vocab_size();
      auto f = predict_substitutes(*fwd_lm_, occ, k, cfg_.use_pattern, cfg_.pattern);
      auto b = predict_substitutes(*bwd_lm_, occ, k, cfg_.use_pattern, cfg_.pattern);
      return {std::move(f), std::move(b)};
    }
    const auto it = table_->find(occ.context_id);
    if (it == table_->end() || !it->second.first || !it->second.second)
      throw NoSubstitutesError("context " + occ.context_id + ": missing fwd or bwd distribution");
    auto f = *it->second.first, b = *it->second.second;
    if (cfg_.top_k) {
      if (f.entries.size() > cfg_.top_k) f.entries.resize(cfg_.top_k);
      if (b.entries.size() > cfg_.top_k) b.entries.resize(cfg_.top_k);
    }
    return {std::move(f), std::move(b)};
  }

  const SourceConfig& config() const noexcept { return cfg_; }

 private:
  using Table = std::unordered_map<std::string, std::pair<std::optional<SubstituteDistribution>,
                                                          std::optional<SubstituteDistribution>>>;
  SourceConfig cfg_;
  std::shared_ptr<const ToyLm> fwd_lm_, bwd_lm_;
  std::shared_ptr<const Table> table_;
};

// Per-word cluster counts of a predictions file (distinct predict_sense_id).
inline std::map<std::string, std::size_t> cluster_counts(const Dataset& ds) {
  std::map<std::string, std::size_t> out;
  for (const auto& [word, idx] : ds.by_word) {
    std::set<std::string> ids;
    for (auto i : idx)
      if (!ds.rows[i].predict_sense_id.empty()) ids.insert(ds.rows[i].predict_sense_id);
    out[word] = ids.size();
  }
  return out;
}

struct WordOutcome {
  std::string word;
  bool ok = false;
  std::string error;
  std::vector<std::size_t> rows;  // dataset rows, file order
  ClusteringResult clustering;
  std::optional<MaxAriResult> max_ari;
  std::vector<std::vector<Representative>> reps;  // per occurrence
  std::vector<std::string> bayes_fallback_ids;
};

struct DiscriminativeRow {
  std::string word;
  std::string sense;        // sense the lemma is discriminative for
  std::string other_sense;
  DiscriminativeSubstitute sub;
};

struct RunResult {
  Dataset predictions;
  std::vector<WordOutcome> words;  // sorted by word
  std::optional<EvalReport> report;
  std::optional<std::pair<EvalReport, EvalReport>> baselines;
  std::optional<NcDifferenceReport> nc_differences;
  std::vector<DiscriminativeRow> discriminative;
  std::string analysis_source;  // "gold" or "clusters"
  nlohmann::json manifest;

  bool partial() const {
    return std::any_of(words.begin(), words.end(), [](const auto& w) { return !w.ok; });
  }
};

namespace detail {

inline WordOutcome process_word(const std::string& word, const std::vector<std::size_t>& rows,
                                const Dataset& ds, const SubstituteProvider& provider, const Lemmatizer& lem,
                                const RunConfig& cfg, std::optional<std::size_t> prev_nc, bool gold) {
  WordOutcome out;
  out.word = word;
  out.rows = rows;
  try {
    std::vector<SparseVector> vectors;
    std::vector<Representative> all_reps;
    std::vector<std::size_t> owner;
    for (std::size_t o = 0; o < rows.size(); ++o) {
      const Occurrence& occ = ds.rows[rows[o]].occ;
      const auto [fwd, bwd] = provider.get(occ);
      auto set = make_representatives(fwd, bwd, cfg.combine, normalized_position(occ));
      if (set.bayes_fallback) out.bayes_fallback_ids.push_back(occ.context_id);
      for (auto& r : set.items) {
        all_reps.push_back(r);
        owner.push_back(o);
      }
      out.reps.push_back(std::move(set.items));
    }
    const std::string target_lemma = lem.lemmatize(text::lowercase(word));
    const Vocabulary vocab = build_vocab(all_reps, lem, target_lemma, cfg.vectorize);
    for (const auto& r : all_reps) vectors.push_back(to_bow(r, vocab, lem));
    if (cfg.vectorize.use_tfidf) vectors = tfidf_scale(vectors);

    ClusterSelectConfig sel = cfg.select;
    if (cfg.selector == Selector::prevnc || cfg.selector == Selector::prevnc2) {
      if (prev_nc) sel.fixed_nc = *prev_nc;
      if (!sel.fixed_nc || *sel.fixed_nc == 0)
        throw ConfigError("no previous cluster count for word '" + word + "'");
    }
    std::vector<std::string> gold_labels;
    if (gold)
      for (auto r : rows) gold_labels.push_back(*ds.rows[r].occ.gold_sense_id);
    out.clustering = cluster_word(vectors, owner, rows.size(), sel, cfg.selector, gold_labels);
    out.clustering.word = word;
    if (gold && cfg.eval.max_ari) {
      MaxAriGrid grid = cfg.eval.max_ari_grid;
      // keep the run's own clustering inside the searched space
      grid.nc_min = std::min(grid.nc_min, out.clustering.num_clusters);
      grid.nc_max = std::max(grid.nc_max, out.clustering.num_clusters);
      out.max_ari = max_ari_search(vectors, owner, rows.size(), gold_labels, grid);
    }
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace detail

// Everything run_pipeline needs besides the config, already loaded.
struct RunInputs {
  const Dataset* dataset = nullptr;
  const SubstituteProvider* provider = nullptr;
  const Lemmatizer* lemmatizer = nullptr;
  std::map<std::string, std::size_t> prev_nc;  // prevnc / prevnc2 per-word counts
};

// Hash of the canonical config text. The worker count does not change any
// output, so it is left out.
inline std::string config_hash(RunConfig cfg) {
  cfg.workers = 1;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(text::fnv1a(format_run_config(cfg))));
  return buf;
}

inline RunResult run_pipeline(const RunConfig& cfg, const RunInputs& in) {
  cfg.validate_engine();
  const Dataset& ds = *in.dataset;
  const bool gold = ds.has_gold();
  if (cfg.selector == Selector::gold_oracle && !gold) throw ConfigError("selector gold-oracle needs gold labels");
  if (cfg.eval.analysis && cfg.eval.analysis_source == "gold" && !gold)
    throw ConfigError("analysis from gold senses needs gold labels");
  if ((cfg.selector == Selector::prevnc || cfg.selector == Selector::prevnc2) && in.prev_nc.empty() &&
      !cfg.select.fixed_nc)
    throw ConfigError("selector prevnc/prevnc2 needs previous predictions or select.fixed_nc");

  RunResult res;
  std::vector<std::string> words;
  for (const auto& [w, _] : ds.by_word) words.push_back(w);
  res.words.resize(words.size());
  parallel_for(words.size(), cfg.workers, [&](std::size_t i) {
    const auto& w = words[i];
    std::optional<std::size_t> prev;
    if (auto it = in.prev_nc.find(w); it != in.prev_nc.end()) prev = it->second;
    res.words[i] = detail::process_word(w, ds.by_word.at(w), ds, *in.provider, *in.lemmatizer, cfg, prev, gold);
  });

  res.predictions = ds;
  for (auto& r : res.predictions.rows) r.predict_sense_id.clear();
  for (const auto& w : res.words) {
    if (!w.ok) continue;
    for (std::size_t o = 0; o < w.rows.size(); ++o)
      res.predictions.rows[w.rows[o]].predict_sense_id = std::to_string(w.clustering.labels[o]);
  }

  if (gold) {
    EvalReport rep = evaluate_dataset(res.predictions);
    std::map<std::string, const WordOutcome*> by_word;
    for (const auto& w : res.words) by_word[w.word] = &w;
    std::vector<NcTriple> triples;
    for (auto& s : rep.per_word) {
      const auto* w = by_word.at(s.word);
      if (w->max_ari) {
        s.max_ari = w->max_ari->best_ari;
        s.max_ari_nc = w->max_ari->num_clusters;
        triples.push_back({s.word, s.gold_num_senses, s.num_clusters, w->max_ari->num_clusters});
      }
    }
    rep.aggregate = aggregate_scores(rep.per_word);
    for (const auto& w : res.words)
      if (!w.ok) rep.warnings.push_back("word '" + w.word + "' failed: " + w.error);
    res.report = std::move(rep);
    if (cfg.eval.baselines) res.baselines = baselines(ds);
    if (cfg.eval.max_ari && !triples.empty()) res.nc_differences = nc_difference_report(triples);
  }

  if (cfg.eval.analysis) {
    const bool by_gold = cfg.eval.analysis_source == "gold" || (cfg.eval.analysis_source == "auto" && gold);
    res.analysis_source = by_gold ? "gold" : "clusters";
    for (const auto& w : res.words) {
      if (!w.ok) continue;
      std::vector<std::string> senses;
      for (std::size_t o = 0; o < w.rows.size(); ++o)
        senses.push_back(by_gold ? *ds.rows[w.rows[o]].occ.gold_sense_id : std::to_string(w.clustering.labels[o]));
      const std::string target_lemma = in.lemmatizer->lemmatize(text::lowercase(w.word));
      auto profiles = build_sense_profiles(w.word, w.reps, senses, *in.lemmatizer, target_lemma, cfg.vectorize);
      if (profiles.size() < 2) continue;
      std::stable_sort(profiles.begin(), profiles.end(),
                       [](const auto& a, const auto& b) { return a.num_examples > b.num_examples; });
      for (int dir = 0; dir < 2; ++dir) {
        const auto& p1 = profiles[dir == 0 ? 0 : 1];
        const auto& p2 = profiles[dir == 0 ? 1 : 0];
        for (auto& d : discriminative_substitutes(p1, p2, cfg.eval.disc_min_count, cfg.eval.disc_top_n))
          res.discriminative.push_back({w.word, p1.sense_id, p2.sense_id, std::move(d)});
      }
    }
  }

  nlohmann::json flags = nlohmann::json::object();
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& w : res.words) {
    if (!w.ok) failed.push_back({{"word", w.word}, {"error", w.error}});
    if (!w.bayes_fallback_ids.empty()) flags["bayes_fallback"][w.word] = w.bayes_fallback_ids;
    if (w.ok && w.clustering.degenerate) flags["degenerate_clustering"].push_back(w.word);
    if (w.ok && w.clustering.empty_vectors)
      flags["empty_vectors"][w.word] = w.clustering.empty_vectors;
  }
  const auto summary = ds.summary();
  res.manifest = {{"library", "wsi"},
                  {"version", kVersion},
                  {"config_hash", config_hash(cfg)},
                  {"seed", cfg.seed},
                  {"selector", std::string(to_string(cfg.selector))},
                  {"combine_method", std::string(to_string(cfg.combine.method))},
                  {"lm_meta", {{"add_bias", cfg.source.add_bias}, {"normalize_output", cfg.source.normalize_output}}},
                  {"dataset", {{"words", summary.num_words},
                               {"examples", summary.num_examples},
                               {"mean_senses_per_word", summary.mean_senses_per_word}}},
                  {"partial", res.partial()},
                  {"failed_words", std::move(failed)},
                  {"flags", std::move(flags)}};
  return res;
}

// Dataset, substitutes, lemmatizer and previous predictions named in a
// config, loaded once and shared by any number of runs.
struct LoadedInputs {
  Dataset dataset;
  SubstituteProvider provider;
  Lemmatizer lemmatizer;
  std::map<std::string, std::size_t> prev_nc;

  explicit LoadedInputs(const RunConfig& cfg)
      : dataset(read_dataset_file(cfg.dataset_path)),
        provider(SubstituteProvider::from_config(cfg.source)),
        lemmatizer(cfg.lemmatizer_path.empty() ? Lemmatizer{} : read_lemmatizer_file(cfg.lemmatizer_path)) {
    if (!cfg.prev_predictions_path.empty()) prev_nc = cluster_counts(read_dataset_file(cfg.prev_predictions_path));
  }
  LoadedInputs(const LoadedInputs&) = delete;
  LoadedInputs& operator=(const LoadedInputs&) = delete;

  RunInputs inputs() const { return RunInputs{&dataset, &provider, &lemmatizer, prev_nc}; }
};

inline RunResult run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  const LoadedInputs loaded(cfg);
  return run_pipeline(cfg, loaded.inputs());
}

inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << content;
}

inline void write_discriminative_csv(std::ostream& out, const std::vector<DiscriminativeRow>& rows) {
  csv::write_row(out, {"word", "sense", "other_sense", "lemma", "freq1", "freq2", "ratio", "count1", "count2"});
  for (const auto& r : rows)
    csv::write_row(out, {r.word, r.sense, r.other_sense, r.sub.lemma, csv::num(r.sub.freq1), csv::num(r.sub.freq2),
                         csv::num(r.sub.ratio), csv::num(r.sub.count1), csv::num(r.sub.count2)});
}

inline void write_nc_difference_csv(std::ostream& out, const NcDifferenceReport& rep) {
  csv::write_row(out, {"word", "submitted_minus_true", "submitted_minus_max_ari", "true_minus_max_ari"});
  for (const auto& r : rep.rows)
    csv::write_row(out, {r.word, csv::num(r.submitted_minus_true), csv::num(r.submitted_minus_max_ari),
                         csv::num(r.true_minus_max_ari)});
  const std::pair<const char*, const Quantiles*> cols[] = {{"submitted_minus_true", &rep.submitted_minus_true},
                                                           {"submitted_minus_max_ari", &rep.submitted_minus_max_ari},
                                                           {"true_minus_max_ari", &rep.true_minus_max_ari}};
  for (const char* stat : {"min", "q1", "median", "q3", "max", "mean"}) {
    std::vector<std::string> row{std::string("*") + stat + "*"};
    for (const auto& [_, q] : cols) {
      const std::string s = stat;
      const double v = s == "min" ? q->min : s == "q1" ? q->q1 : s == "median" ? q->median
                     : s == "q3" ? q->q3 : s == "max" ? q->max : q->mean;
      row.push_back(csv::num(v));
    }
    csv::write_row(out, row);
  }
}

// Writes predictions.tsv, manifest.json and, when available, report.json,
// report.csv, baselines.json, nc_differences.csv, discriminative.csv and
// representatives.jsonl. Nothing time- or host-dependent is written, so
// equal runs give byte-equal directories.
inline void write_run_outputs(const RunResult& res, const RunConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ostringstream s;
    write_dataset(s, res.predictions);
    write_text_file(dir / "predictions.tsv", s.str());
  }
  write_text_file(dir / "manifest.json", res.manifest.dump(2) + "\n");
  write_text_file(dir / "config.toml", format_run_config(cfg));
  if (res.report) {
    write_text_file(dir / "report.json", to_json(*res.report).dump(2) + "\n");
    std::ostringstream s;
    write_report_csv(s, *res.report);
    write_text_file(dir / "report.csv", s.str());
  }
  if (res.baselines) {
    const nlohmann::json j = {{"one_cluster_per_word", to_json(res.baselines->first)},
                              {"one_cluster_per_instance", to_json(res.baselines->second)}};
    write_text_file(dir / "baselines.json", j.dump(2) + "\n");
  }
  if (res.nc_differences) {
    std::ostringstream s;
    write_nc_difference_csv(s, *res.nc_differences);
    write_text_file(dir / "nc_differences.csv", s.str());
  }
  if (!res.analysis_source.empty()) {
    std::ostringstream s;
    write_discriminative_csv(s, res.discriminative);
    write_text_file(dir / "discriminative.csv", s.str());
  }
  {
    std::ostringstream s;
    for (const auto& w : res.words)
      for (const auto& occ_reps : w.reps)
        for (const auto& r : occ_reps)
          s << nlohmann::json{{"context_id", r.context_id}, {"substitutes", r.substitutes}}.dump() << '\n';
    write_text_file(dir / "representatives.jsonl", s.str());
  }
}

// --- grid search -----------------------------------------------------------------

struct GridRow {
  std::size_t index = 0;
  RunConfig config;
  bool ok = true;
  std::string status = "ok";
  AggregateScores scores;
  double objective = 0.0;
};

struct GridResult {
  std::vector<GridRow> rows;  // sorted by objective, descending; grid order on ties
  GridObjective objective = GridObjective::ari;
};

inline GridResult grid_search(const RunConfig& base, const GridSpec& grid, const RunInputs& in) {
  if (!in.dataset->has_gold()) throw ConfigError("grid search needs gold labels");
  auto points = grid.expand(base);
  GridResult out;
  out.objective = grid.objective;
  out.rows.resize(points.size());
  parallel_for(points.size(), base.workers, [&](std::size_t i) {
    GridRow& row = out.rows[i];
    row.index = i;
    row.config = points[i];
    row.config.workers = 1;
    if (grid.objective == GridObjective::max_ari) row.config.eval.max_ari = true;
    row.config.eval.baselines = false;
    row.config.eval.analysis = false;
    try {
      const RunResult r = run_pipeline(row.config, in);
      row.scores = r.report->aggregate;
      if (r.partial()) row.status = "partial";
      row.objective = grid.objective == GridObjective::ari ? row.scores.weighted_ari
                                                           : row.scores.weighted_max_ari.value_or(0.0);
    } catch (const Error& e) {
      row.ok = false;
      row.status = std::string("failed: ") + e.what();
    }
    row.config.workers = base.workers;
  });
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const GridRow& a, const GridRow& b) {
    if (a.ok != b.ok) return a.ok;
    return a.objective > b.objective;
  });
  return out;
}

inline void write_grid_csv(std::ostream& out, const GridResult& g) {
  csv::write_row(out, {"rank", "index", "method", "K", "S", "L", "z", "beta", "exclude_target", "tfidf", "objective",
                       "weighted_ari", "weighted_max_ari", "v_measure", "paired_f", "avg", "mean_num_clusters",
                       "status"});
  std::size_t rank = 0;
  for (const auto& r : g.rows) {
    const auto& c = r.config.combine;
    csv::write_row(out, {csv::num(++rank), csv::num(r.index), std::string(to_string(c.method)), csv::num(c.top_k),
                         csv::num(c.num_representatives), csv::num(c.sample_size), csv::num(c.zipf_z),
                         csv::num(c.beta), r.config.vectorize.exclude_target ? "true" : "false",
                         r.config.vectorize.use_tfidf ? "true" : "false", csv::num(r.objective),
                         csv::num(r.scores.weighted_ari),
                         r.scores.weighted_max_ari ? csv::num(*r.scores.weighted_max_ari) : "",
                         csv::num(r.scores.v_measure), csv::num(r.scores.paired_f), csv::num(r.scores.avg),
                         csv::num(r.scores.mean_num_clusters), r.status});
  }
}

// --- comparing two submissions --------------------------------------------------

struct WordComparison {
  std::string word;
  WordScore a, b;
  std::size_t gold_nc = 0;
};

struct ComparisonReport {
  std::vector<WordComparison> per_word;
  EvalReport a, b;
  double mse_nc_a = 0.0, mse_nc_b = 0.0;
  std::optional<EvalReport> prevnc, prevnc2;  // reruns constrained to b's counts
};

// Scores two prediction files against a gold file. With `rerun` set, the
// pipeline is run again with prevnc and prevnc2 using b's per-word counts.
inline ComparisonReport compare_submissions(const Dataset& pred_a, const Dataset& pred_b, const Dataset& gold,
                                            const std::optional<std::pair<RunConfig, RunInputs>>& rerun = {}) {
  auto ids = [](const Dataset& d) {
    std::set<std::string> s;
    for (const auto& r : d.rows) s.insert(r.occ.context_id);
    return s;
  };
  const auto gold_ids = ids(gold);
  std::string problems;
  for (const auto* d : {&pred_a, &pred_b}) {
    const auto other = ids(*d);
    std::vector<std::string> missing, extra;
    std::set_difference(gold_ids.begin(), gold_ids.end(), other.begin(), other.end(), std::back_inserter(missing));
    std::set_difference(other.begin(), other.end(), gold_ids.begin(), gold_ids.end(), std::back_inserter(extra));
    const char* name = d == &pred_a ? "A" : "B";
    for (const auto& m : missing) problems += std::string(" missing in ") + name + ": " + m + ";";
    for (const auto& e : extra) problems += std::string(" not in gold (") + name + "): " + e + ";";
  }
  if (!problems.empty()) throw ValidationError("context ids differ:" + problems);
  if (!gold.has_gold()) throw ConfigError("gold file has rows without gold_sense_id");

  auto with_gold = [&](const Dataset& pred) {
    std::unordered_map<std::string, std::string> p;
    for (const auto& r : pred.rows) p[r.occ.context_id] = r.predict_sense_id;
    Dataset d = gold;
    for (auto& r : d.rows) r.predict_sense_id = p.at(r.occ.context_id);
    return d;
  };
  ComparisonReport rep;
  rep.a = evaluate_dataset(with_gold(pred_a));
  rep.b = evaluate_dataset(with_gold(pred_b));
  std::map<std::string, const WordScore*> bmap;
  for (const auto& s : rep.b.per_word) bmap[s.word] = &s;
  for (const auto& s : rep.a.per_word) {
    const auto it = bmap.find(s.word);
    if (it == bmap.end()) continue;
    rep.per_word.push_back({s.word, s, *it->second, s.gold_num_senses});
  }
  rep.mse_nc_a = rep.a.aggregate.mse_nc;
  rep.mse_nc_b = rep.b.aggregate.mse_nc;

  if (rerun) {
    RunInputs in = rerun->second;
    in.dataset = &gold;
    in.prev_nc = cluster_counts(with_gold(pred_b));
    for (Selector s : {Selector::prevnc, Selector::prevnc2}) {
      RunConfig c = rerun->first;
      c.selector = s;
      c.select.fixed_nc.reset();
      c.prev_predictions_path = "(submission B)";
      c.eval.baselines = false;
      c.eval.analysis = false;
      c.eval.max_ari = false;
      auto r = run_pipeline(c, in);
      (s == Selector::prevnc ? rep.prevnc : rep.prevnc2) = std::move(*r.report);
    }
  }
  return rep;
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : r.per_word)
    words.push_back({{"word", w.word},
                     {"gold_nc", w.gold_nc},
                     {"a", to_json(w.a)},
                     {"b", to_json(w.b)},
                     {"delta_ari", w.a.ari - w.b.ari},
                     {"delta_v_measure", w.a.v_measure - w.b.v_measure},
                     {"delta_paired_f", w.a.paired_f - w.b.paired_f}});
  nlohmann::json j = {{"per_word", std::move(words)},
                      {"a", to_json(r.a)},
                      {"b", to_json(r.b)},
                      {"mse_nc_a", r.mse_nc_a},
                      {"mse_nc_b", r.mse_nc_b}};
  if (r.prevnc) j["prevnc"] = to_json(*r.prevnc);
  if (r.prevnc2) j["prevnc2"] = to_json(*r.prevnc2);
  return j;
}

}  // namespace wsi
