#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wsi/csv.hpp"
#include "wsi/dataset.hpp"
#include "wsi/metrics.hpp"

namespace wsi {

inline constexpr const char* kAggregationNote =
    "weighted_ari, v_measure and paired_f are example-weighted means of per-word scores; "
    "avg = sqrt(v_measure * paired_f); paired_f_pooled sums pair counts over words";

// Scores a dataset's predict_sense_id column against its gold column, word
// by word. Words with any missing gold or prediction are skipped and listed
// in failed_words.
inline EvalReport evaluate_dataset(const Dataset& ds) {
  EvalReport rep;
  for (const auto& [word, idx] : ds.by_word) {
    std::vector<std::string> gold, pred;
    bool ok = true;
    for (auto i : idx) {
      const auto& r = ds.rows[i];
      if (!r.occ.gold_sense_id || r.predict_sense_id.empty()) {
        ok = false;
        break;
      }
      gold.push_back(*r.occ.gold_sense_id);
      pred.push_back(r.predict_sense_id);
    }
    if (!ok) {
      rep.failed_words.push_back(word);
      continue;
    }
    auto s = score_word(word, gold, pred);
    if (s.single_gold_class) rep.warnings.push_back("word '" + word + "' has one gold sense; ARI set to 0");
    rep.per_word.push_back(std::move(s));
  }
  rep.aggregate = aggregate_scores(rep.per_word);
  return rep;
}

// The two trivial clusterings: everything in one cluster per word, and one
// cluster per example.
inline std::pair<EvalReport, EvalReport> baselines(const Dataset& ds) {
  Dataset one = ds, each = ds;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    one.rows[i].predict_sense_id = "0";
    each.rows[i].predict_sense_id = std::to_string(i);
  }
  return {evaluate_dataset(one), evaluate_dataset(each)};
}

inline nlohmann::json to_json(const WordScore& w) {
  nlohmann::json j = {{"word", w.word},
                      {"ari", w.ari},
                      {"v_measure", w.v_measure},
                      {"paired_f", w.paired_f},
                      {"num_clusters", w.num_clusters},
                      {"num_examples", w.num_examples},
                      {"gold_num_senses", w.gold_num_senses}};
  if (w.max_ari) j["max_ari"] = *w.max_ari;
  if (w.max_ari_nc) j["max_ari_nc"] = *w.max_ari_nc;
  return j;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : r.per_word) words.push_back(to_json(w));
  const auto& a = r.aggregate;
  nlohmann::json agg = {{"weighted_ari", a.weighted_ari},
                        {"v_measure", a.v_measure},
                        {"paired_f", a.paired_f},
                        {"avg", a.avg},
                        {"paired_f_pooled", a.paired_f_pooled},
                        {"mean_num_clusters", a.mean_num_clusters},
                        {"mse_nc", a.mse_nc},
                        {"num_words", a.num_words},
                        {"num_examples", a.num_examples}};
  if (a.weighted_max_ari) agg["weighted_max_ari"] = *a.weighted_max_ari;
  return {{"per_word", std::move(words)},
          {"aggregate", std::move(agg)},
          {"partial", r.partial()},
          {"failed_words", r.failed_words},
          {"warnings", r.warnings},
          {"metadata", {{"aggregation", kAggregationNote}, {"v_measure_beta", 1.0}, {"log_base", "e"}}}};
}

// One row per word plus a final "*aggregate*" row.
inline void write_report_csv(std::ostream& out, const EvalReport& r) {
  csv::write_row(out, {"word", "ari", "v_measure", "paired_f", "avg", "num_clusters", "gold_num_senses",
                       "num_examples", "max_ari", "max_ari_nc"});
  for (const auto& w : r.per_word)
    csv::write_row(out, {w.word, csv::num(w.ari), csv::num(w.v_measure), csv::num(w.paired_f),
                         csv::num(geometric_mean(w.v_measure, w.paired_f)), csv::num(w.num_clusters),
                         csv::num(w.gold_num_senses), csv::num(w.num_examples),
                         w.max_ari ? csv::num(*w.max_ari) : "", w.max_ari_nc ? csv::num(*w.max_ari_nc) : ""});
  const auto& a = r.aggregate;
  csv::write_row(out, {"*aggregate*", csv::num(a.weighted_ari), csv::num(a.v_measure), csv::num(a.paired_f),
                       csv::num(a.avg), csv::num(a.mean_num_clusters), "", csv::num(a.num_examples),
                       a.weighted_max_ari ? csv::num(*a.weighted_max_ari) : "", ""});
}

}  // namespace wsi
