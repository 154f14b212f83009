#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wsi/pipeline.hpp"

using namespace wsi;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  SyntheticData data;
  SubstituteProvider provider;
  Lemmatizer lem;
  RunConfig cfg;

  explicit Fixture(std::uint64_t seed = 3) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.corpus_tokens = 8000;
    spec.num_pseudowords = 2;
    spec.examples_per_sense = 10;
    data = make_synthetic(spec);
    cfg.source.corpus_path = "unused";
    cfg.combine.top_k = 8;
    cfg.eval.max_ari_grid.nc_max = 6;
    cfg.select.nc_max = 6;
    cfg.eval.disc_min_count = 2;
    provider = SubstituteProvider::from_corpus(data.corpus, cfg.source);
  }

  RunInputs inputs() const { return RunInputs{&data.dataset, &provider, &lem, {}}; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wsi_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  parallel_for(0, 4, [&](std::size_t) { FAIL(); });
}

TEST(Synthetic, ShapeAndGold) {
  SyntheticSpec spec;
  spec.corpus_tokens = 5000;
  spec.num_pseudowords = 3;
  spec.examples_per_sense = 7;
  const auto d = make_synthetic(spec);
  EXPECT_EQ(d.dataset.by_word.size(), 3u);
  EXPECT_EQ(d.dataset.rows.size(), 42u);
  EXPECT_TRUE(d.dataset.has_gold());
  for (const auto& r : d.dataset.rows) {
    EXPECT_EQ(split_context(r.occ).target, r.occ.word);
    EXPECT_NE(r.occ.word.find(*r.occ.gold_sense_id), std::string::npos);
  }
  std::size_t tokens = 0;
  for (const auto& s : d.corpus) tokens += s.size();
  EXPECT_GE(tokens, 5000u);
  const auto again = make_synthetic(spec);
  std::ostringstream a, b;
  write_dataset(a, d.dataset);
  write_dataset(b, again.dataset);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Provider, FileSourceNeedsBothDirections) {
  SubstituteDistribution f;
  f.context_id = "1";
  f.word = "w";
  f.entries = {{"a", 0.5, 1}};
  SourceConfig cfg;
  cfg.kind = SourceKind::file;
  auto p = SubstituteProvider::from_distributions({f}, cfg);
  const Occurrence occ{"1", "w", std::nullopt, {0, 1}, "w"};
  EXPECT_THROW(p.get(occ), NoSubstitutesError);
  auto b = f;
  b.direction = Direction::backward;
  p = SubstituteProvider::from_distributions({f, b}, cfg);
  EXPECT_EQ(p.get(occ).second.direction, Direction::backward);
  EXPECT_THROW(SubstituteProvider::from_distributions({f, f}, cfg), ValidationError);
}

TEST(Pipeline, RunsAndScores) {
  Fixture fx;
  const auto res = run_pipeline(fx.cfg, fx.inputs());
  EXPECT_FALSE(res.partial());
  ASSERT_TRUE(res.report.has_value());
  EXPECT_EQ(res.report->per_word.size(), 2u);
  for (const auto& w : res.report->per_word) {
    ASSERT_TRUE(w.max_ari.has_value());
    EXPECT_GE(*w.max_ari, w.ari - 1e-12);
  }
  ASSERT_TRUE(res.baselines.has_value());
  EXPECT_EQ(res.baselines->first.aggregate.v_measure, 0.0);
  EXPECT_TRUE(res.nc_differences.has_value());
  EXPECT_EQ(res.analysis_source, "gold");
  EXPECT_EQ(res.manifest["config_hash"], config_hash(fx.cfg));
  for (const auto& r : res.predictions.rows) EXPECT_FALSE(r.predict_sense_id.empty());
}

TEST(Pipeline, AnalysisFromClusters) {
  Fixture fx;
  fx.cfg.eval.analysis_source = "clusters";
  const auto res = run_pipeline(fx.cfg, fx.inputs());
  EXPECT_EQ(res.analysis_source, "clusters");
  ASSERT_FALSE(res.discriminative.empty());
  std::set<std::string> clusters;
  for (const auto& r : res.predictions.rows) clusters.insert(r.predict_sense_id);
  for (const auto& d : res.discriminative) EXPECT_TRUE(clusters.count(d.sense)) << d.sense;
}

TEST(Pipeline, AnalysisFromGoldNeedsGold) {
  Fixture fx;
  Dataset unlabeled = fx.data.dataset;
  for (auto& r : unlabeled.rows) r.occ.gold_sense_id.reset();
  fx.cfg.eval.analysis_source = "gold";
  EXPECT_THROW(run_pipeline(fx.cfg, RunInputs{&unlabeled, &fx.provider, &fx.lem, {}}), ConfigError);
  fx.cfg.eval.analysis_source = "auto";
  EXPECT_EQ(run_pipeline(fx.cfg, RunInputs{&unlabeled, &fx.provider, &fx.lem, {}}).analysis_source, "clusters");
  fx.cfg.eval.analysis_source = "senses";
  EXPECT_THROW(fx.cfg.validate_engine(), ConfigError);
}

TEST(Pipeline, PredictionsReingestAndReproduceReport) {
  Fixture fx;
  const auto res = run_pipeline(fx.cfg, fx.inputs());
  std::stringstream s;
  write_dataset(s, res.predictions);
  const auto back = read_dataset(s);
  const auto rep = evaluate_dataset(back);
  EXPECT_EQ(rep.aggregate.weighted_ari, res.report->aggregate.weighted_ari);
  EXPECT_EQ(rep.aggregate.v_measure, res.report->aggregate.v_measure);
}

TEST(Pipeline, FixncUsesExactCount) {
  Fixture fx;
  fx.cfg.selector = Selector::fixnc;
  fx.cfg.select.fixed_nc = 4;
  const auto res = run_pipeline(fx.cfg, fx.inputs());
  for (const auto& w : res.report->per_word) EXPECT_EQ(w.num_clusters, 4u);
}

TEST(Pipeline, DeterministicAcrossWorkerCounts) {
  Fixture fx;
  fx.cfg.combine.method = CombineMethod::sampling;
  fx.cfg.combine.num_representatives = 5;
  fx.cfg.combine.sample_size = 4;
  fx.cfg.seed = fx.cfg.combine.rng_seed = 17;
  const auto d1 = temp_dir("det1"), d2 = temp_dir("det2");
  write_run_outputs(run_pipeline(fx.cfg, fx.inputs()), fx.cfg, d1);
  fx.cfg.workers = 3;
  auto res = run_pipeline(fx.cfg, fx.inputs());
  fx.cfg.workers = 1;
  write_run_outputs(res, fx.cfg, d2);
  for (const auto& e : fs::directory_iterator(d1))
    EXPECT_EQ(slurp(e.path()), slurp(d2 / e.path().filename())) << e.path().filename();
}

TEST(Pipeline, OutputsWritten) {
  Fixture fx;
  const auto dir = temp_dir("outputs");
  write_run_outputs(run_pipeline(fx.cfg, fx.inputs()), fx.cfg, dir);
  for (const char* f : {"predictions.tsv", "report.json", "report.csv", "baselines.json", "nc_differences.csv",
                        "discriminative.csv", "representatives.jsonl", "manifest.json", "config.toml"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(j["aggregate"].contains("weighted_max_ari"));
}

TEST(Pipeline, FailedWordIsIsolated) {
  Fixture fx;
  // a word whose only substitute is the word itself: empty after exclusion
  DatasetRow row;
  row.occ = {"bad1", "zzz", "s", {0, 3}, "zzz"};
  fx.data.dataset.add(row);
  row.occ.context_id = "bad2";
  fx.data.dataset.add(row);
  SourceConfig sc;
  sc.kind = SourceKind::file;
  std::vector<SubstituteDistribution> dists;
  for (const auto& r : fx.data.dataset.rows)
    for (auto dir : {Direction::forward, Direction::backward}) {
      SubstituteDistribution d;
      d.context_id = r.occ.context_id;
      d.word = r.occ.word;
      d.direction = dir;
      d.entries = {{r.occ.word == "zzz" ? "zzz" : "tok" + r.occ.gold_sense_id.value(), 0.9, 5}};
      dists.push_back(d);
    }
  const auto provider = SubstituteProvider::from_distributions(dists, sc);
  RunInputs in{&fx.data.dataset, &provider, &fx.lem, {}};
  fx.cfg.eval.max_ari = false;
  const auto res = run_pipeline(fx.cfg, in);
  EXPECT_TRUE(res.partial());
  EXPECT_EQ(res.manifest["failed_words"].size(), 1u);
  EXPECT_EQ(res.manifest["failed_words"][0]["word"], "zzz");
  EXPECT_EQ(res.report->per_word.size(), 2u);
  EXPECT_EQ(res.report->failed_words, std::vector<std::string>{"zzz"});
}

TEST(Pipeline, PrevncNeedsCounts) {
  Fixture fx;
  fx.cfg.selector = Selector::prevnc;
  EXPECT_THROW(run_pipeline(fx.cfg, fx.inputs()), ConfigError);
  auto in = fx.inputs();
  for (const auto& [w, _] : fx.data.dataset.by_word) in.prev_nc[w] = 3;
  const auto res = run_pipeline(fx.cfg, in);
  for (const auto& w : res.report->per_word) EXPECT_EQ(w.num_clusters, 3u);
}

TEST(Grid, SinglePointMatchesPlainRun) {
  Fixture fx;
  GridSpec g;
  g.methods = {fx.cfg.combine.method};
  g.top_k = {fx.cfg.combine.top_k};
  g.num_representatives = {fx.cfg.combine.num_representatives};
  g.sample_size = {fx.cfg.combine.sample_size};
  g.zipf_z = {fx.cfg.combine.zipf_z};
  g.beta = {fx.cfg.combine.beta};
  g.exclude_target = {true};
  g.use_tfidf = {false};
  const auto grid = grid_search(fx.cfg, g, fx.inputs());
  ASSERT_EQ(grid.rows.size(), 1u);
  const auto plain = run_pipeline(fx.cfg, fx.inputs());
  EXPECT_EQ(grid.rows[0].scores.weighted_ari, plain.report->aggregate.weighted_ari);
  std::ostringstream csv;
  write_grid_csv(csv, grid);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(Grid, SortedAndMaxAriDominates) {
  Fixture fx;
  GridSpec g;
  g.methods = {CombineMethod::bayes_comb};
  g.top_k = {4, 8};
  g.num_representatives = {1};
  g.sample_size = {1};
  g.zipf_z = {1.0, 2.0, 3.0};
  g.beta = {0.1};
  g.exclude_target = {true};
  g.use_tfidf = {false, true};
  g.objective = GridObjective::max_ari;
  const auto grid = grid_search(fx.cfg, g, fx.inputs());
  ASSERT_EQ(grid.rows.size(), 12u);
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    const auto& r = grid.rows[i];
    EXPECT_TRUE(r.ok) << r.status;
    EXPECT_GE(*r.scores.weighted_max_ari, r.scores.weighted_ari - 1e-12);
    if (i) {
      EXPECT_GE(grid.rows[i - 1].objective, r.objective);
    }
  }
}

TEST(Compare, IdenticalAndOracle) {
  Fixture fx;
  const auto res = run_pipeline(fx.cfg, fx.inputs());
  const auto& gold = fx.data.dataset;
  Dataset oracle_pred = gold;
  for (auto& r : oracle_pred.rows) r.predict_sense_id = *r.occ.gold_sense_id;
  const auto cmp = compare_submissions(oracle_pred, res.predictions, gold);
  for (const auto& w : cmp.per_word) {
    EXPECT_DOUBLE_EQ(w.a.ari, 1.0);
    EXPECT_DOUBLE_EQ(w.a.v_measure, 1.0);
    EXPECT_DOUBLE_EQ(w.a.paired_f, 1.0);
  }
  const auto same = compare_submissions(res.predictions, res.predictions, gold);
  for (const auto& w : same.per_word) EXPECT_EQ(w.a.ari, w.b.ari);
  EXPECT_EQ(same.mse_nc_a, same.mse_nc_b);
}

TEST(Compare, RerunsRespectSubmissionCounts) {
  Fixture fx;
  fx.cfg.selector = Selector::fixnc;
  fx.cfg.select.fixed_nc = 3;
  const auto b = run_pipeline(fx.cfg, fx.inputs());
  RunConfig base = fx.cfg;
  base.selector = Selector::silnc;
  base.select.fixed_nc.reset();
  const auto cmp = compare_submissions(b.predictions, b.predictions, fx.data.dataset,
                                       std::make_pair(base, fx.inputs()));
  ASSERT_TRUE(cmp.prevnc && cmp.prevnc2);
  for (const auto& w : cmp.prevnc->per_word) EXPECT_EQ(w.num_clusters, 3u);
  for (const auto& w : cmp.prevnc2->per_word) EXPECT_EQ(w.num_clusters, 3u);
}

TEST(Compare, IdMismatchListsIds) {
  Fixture fx;
  Dataset short_pred = fx.data.dataset;
  short_pred.rows.pop_back();
  try {
    compare_submissions(fx.data.dataset, short_pred, fx.data.dataset);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(fx.data.dataset.rows.back().occ.context_id), std::string::npos);
  }
}
