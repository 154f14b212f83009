// wsi: command-line front end for the substitute-based sense induction
// pipeline. Exit codes: 0 success, 2 some words or grid points failed,
// 1 fatal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "wsi/wsi.hpp"

namespace fs = std::filesystem;
using namespace wsi;

namespace {

constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kPartial = 2;

// Path and run overrides shared by run, grid and analyze.
struct Overrides {
  std::string config, dataset, corpus, distributions, lemmatizer, prev, output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", config, "run config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--dataset", dataset, "dataset TSV (overrides config)");
    cmd->add_option("--corpus", corpus, "toy LM corpus (overrides config)");
    cmd->add_option("--distributions", distributions, "substitute JSONL (overrides config, selects file source)");
    cmd->add_option("--lemmatizer", lemmatizer, "lemma dictionary (overrides config)");
    cmd->add_option("--prev-predictions", prev, "previous predictions for prevnc/prevnc2");
    cmd->add_option("-o,--output", output, "output directory (overrides config)");
    cmd->add_option("--seed", seed, "random seed (overrides config)");
    cmd->add_option("-j,--workers", workers, "worker threads (overrides config)");
  }

  // relative override paths are taken from the working directory
  static std::string abs(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

  void apply(RunConfig& c) const {
    if (!dataset.empty()) c.dataset_path = abs(dataset);
    if (!corpus.empty()) {
      c.source.kind = SourceKind::toy_lm;
      c.source.corpus_path = abs(corpus);
    }
    if (!distributions.empty()) {
      c.source.kind = SourceKind::file;
      c.source.distributions_path = abs(distributions);
    }
    if (!lemmatizer.empty()) c.lemmatizer_path = abs(lemmatizer);
    if (!prev.empty()) c.prev_predictions_path = abs(prev);
    if (!output.empty()) c.output_dir = abs(output);
    if (seed) c.seed = c.combine.rng_seed = *seed;
    if (workers) c.workers = *workers;
  }
};

ConfigReader open_config(const std::string& path, RunConfig& cfg, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  ConfigReader r(parse_config(in));
  cfg = read_run_config(r, fs::absolute(path).parent_path());
  ov.apply(cfg);
  return r;
}

// A [grid] section is allowed in any config; it is checked and then ignored
// outside the grid command.
RunConfig load_config(const Overrides& ov) {
  RunConfig cfg;
  auto r = open_config(ov.config, cfg, ov);
  GridSpec::from_reader(r, cfg);
  r.expect_consumed();
  cfg.validate();
  return cfg;
}

void print_aggregate(const AggregateScores& a) {
  std::printf("words %zu, examples %zu\n", a.num_words, a.num_examples);
  std::printf("ARI %.4f  V-M %.4f  F-Sc %.4f  AVG %.4f  mean #cl %.2f\n", a.weighted_ari, a.v_measure, a.paired_f,
              a.avg, a.mean_num_clusters);
  if (a.weighted_max_ari) std::printf("maxARI %.4f\n", *a.weighted_max_ari);
}

int report_failures(const RunResult& res) {
  if (!res.partial()) return kOk;
  for (const auto& w : res.words)
    if (!w.ok) std::fprintf(stderr, "word '%s' failed: %s\n", w.word.c_str(), w.error.c_str());
  return kPartial;
}

// --- subcommands ---------------------------------------------------------------

int cmd_ingest_check(const std::string& dataset, const std::string& distributions) {
  const Dataset ds = read_dataset_file(dataset);
  const auto s = ds.summary();
  std::printf("%zu examples, %zu words\n", s.num_examples, s.num_words);
  if (s.words_with_gold) std::printf("%zu words with gold, %.2f senses per word\n", s.words_with_gold, s.mean_senses_per_word);
  if (distributions.empty()) return kOk;
  SourceConfig src;
  src.kind = SourceKind::file;
  const auto provider = SubstituteProvider::from_distributions(read_distribution_file(distributions), src);
  std::size_t missing = 0;
  for (const auto& row : ds.rows) {
    try {
      provider.get(row.occ);
    } catch (const NoSubstitutesError& e) {
      if (++missing <= 10) std::fprintf(stderr, "%s\n", e.what());
    }
  }
  if (missing) {
    std::fprintf(stderr, "%zu examples lack substitutes\n", missing);
    return kPartial;
  }
  std::printf("substitutes present for every example\n");
  return kOk;
}

int cmd_run(const Overrides& ov) {
  const RunConfig cfg = load_config(ov);
  const auto res = run_pipeline(cfg);
  write_run_outputs(res, cfg, cfg.output_dir);
  if (res.report) print_aggregate(res.report->aggregate);
  std::printf("outputs in %s\n", cfg.output_dir.c_str());
  return report_failures(res);
}

int cmd_grid(const Overrides& ov) {
  RunConfig base;
  auto r = open_config(ov.config, base, ov);
  const GridSpec grid = GridSpec::from_reader(r, base);
  r.expect_consumed();
  base.validate();
  const LoadedInputs loaded(base);
  std::fprintf(stderr, "evaluating %zu grid points\n", grid.expand(base).size());
  const auto g = grid_search(base, grid, loaded.inputs());
  fs::create_directories(base.output_dir);
  const fs::path dir(base.output_dir);
  {
    std::ostringstream s;
    write_grid_csv(s, g);
    write_text_file(dir / "grid.csv", s.str());
  }
  int code = kOk;
  for (const auto& row : g.rows)
    if (row.status != "ok") {
      std::fprintf(stderr, "grid point %zu: %s\n", row.index, row.status.c_str());
      code = kPartial;
    }
  if (!g.rows.empty() && g.rows.front().ok) {
    const auto& best = g.rows.front();
    write_text_file(dir / "best_config.toml", format_run_config(best.config));
    std::printf("best point %zu: objective %.4f (%s K=%zu)\n", best.index, best.objective,
                std::string(to_string(best.config.combine.method)).c_str(), best.config.combine.top_k);
  } else {
    std::fprintf(stderr, "no grid point succeeded\n");
    code = kFatal;
  }
  std::printf("outputs in %s\n", base.output_dir.c_str());
  return code;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& gold, const std::string& config,
                const std::string& output) {
  const Dataset da = read_dataset_file(a), db = read_dataset_file(b), dg = read_dataset_file(gold);
  ComparisonReport rep;
  if (config.empty()) {
    rep = compare_submissions(da, db, dg);
  } else {
    Overrides ov;
    ov.config = config;
    RunConfig cfg = load_config(ov);
    cfg.dataset_path = fs::absolute(gold).string();
    const LoadedInputs loaded(cfg);
    rep = compare_submissions(da, db, dg, std::pair{cfg, loaded.inputs()});
  }
  const auto j = to_json(rep);
  if (output.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_text_file(output, j.dump(2) + "\n");
    std::printf("A: ARI %.4f  mse #cl %.3f\nB: ARI %.4f  mse #cl %.3f\n", rep.a.aggregate.weighted_ari, rep.mse_nc_a,
                rep.b.aggregate.weighted_ari, rep.mse_nc_b);
    if (rep.prevnc) std::printf("prevnc rerun ARI %.4f\n", rep.prevnc->aggregate.weighted_ari);
    if (rep.prevnc2) std::printf("prevnc2 rerun ARI %.4f\n", rep.prevnc2->aggregate.weighted_ari);
  }
  return kOk;
}

int cmd_make_synthetic(const SyntheticSpec& spec, const std::string& output) {
  const auto data = make_synthetic(spec);
  const fs::path dir(output);
  fs::create_directories(dir);
  {
    std::ostringstream s;
    write_corpus(s, data.corpus);
    write_text_file(dir / "corpus.txt", s.str());
  }
  write_dataset_file((dir / "dataset.tsv").string(), data.dataset);
  RunConfig cfg;
  cfg.dataset_path = "dataset.tsv";
  cfg.source.corpus_path = "corpus.txt";
  cfg.output_dir = "out";
  cfg.combine.top_k = std::min<std::size_t>(10, spec.nouns_per_class);
  write_text_file(dir / "run.toml", format_run_config(cfg));
  const auto s = data.dataset.summary();
  std::printf("%zu sentences, %zu pseudowords, %zu examples in %s\n", data.corpus.size(), s.num_words,
              s.num_examples, output.c_str());
  return kOk;
}

int cmd_analyze(const Overrides& ov, const std::string& source, std::optional<double> min_count,
                std::optional<std::size_t> top_n) {
  RunConfig cfg = load_config(ov);
  cfg.eval.analysis = true;
  if (!source.empty()) cfg.eval.analysis_source = source;
  if (min_count) cfg.eval.disc_min_count = *min_count;
  if (top_n) cfg.eval.disc_top_n = *top_n;
  cfg.validate();
  const auto res = run_pipeline(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  {
    std::ostringstream s;
    write_discriminative_csv(s, res.discriminative);
    write_text_file(dir / "discriminative.csv", s.str());
  }
  if (res.nc_differences) {
    std::ostringstream s;
    write_nc_difference_csv(s, *res.nc_differences);
    write_text_file(dir / "nc_differences.csv", s.str());
  }
  // per-example substitute listing
  {
    std::ostringstream s;
    csv::write_row(s, {"context_id", "word", "cluster", "gold", "context", "substitutes"});
    for (const auto& w : res.words) {
      if (!w.ok) continue;
      for (std::size_t o = 0; o < w.rows.size(); ++o) {
        const auto& row = res.predictions.rows[w.rows[o]];
        std::string subs;
        for (const auto& r : w.reps[o]) {
          if (!subs.empty()) subs += " | ";
          for (std::size_t i = 0; i < r.substitutes.size(); ++i) subs += (i ? " " : "") + r.substitutes[i];
        }
        csv::write_row(s, {row.occ.context_id, row.occ.word, row.predict_sense_id,
                           row.occ.gold_sense_id.value_or(""), row.occ.context, subs});
      }
    }
    write_text_file(dir / "substitutes.csv", s.str());
  }
  std::printf("%zu discriminative rows from %s senses, outputs in %s\n", res.discriminative.size(),
              res.analysis_source.c_str(), cfg.output_dir.c_str());
  return report_failures(res);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word sense induction from LM substitutes"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string ic_dataset, ic_dist;
  auto* ingest = app.add_subcommand("ingest-check", "validate a dataset TSV and optional substitute file");
  ingest->add_option("dataset", ic_dataset, "dataset TSV")->required();
  ingest->add_option("--distributions", ic_dist, "substitute JSONL to check coverage against");

  Overrides run_ov;
  auto* run = app.add_subcommand("run", "run the pipeline and write predictions and reports");
  run_ov.add_to(run);

  Overrides grid_ov;
  auto* grid = app.add_subcommand("grid", "grid search over the grid.* axes of a config");
  grid_ov.add_to(grid);

  std::string cmp_a, cmp_b, cmp_gold, cmp_config, cmp_out;
  auto* compare = app.add_subcommand("compare", "score two prediction files against gold");
  compare->add_option("a", cmp_a, "first predictions TSV")->required();
  compare->add_option("b", cmp_b, "second predictions TSV")->required();
  compare->add_option("--gold", cmp_gold, "gold TSV")->required();
  compare->add_option("-c,--config", cmp_config, "run config; enables prevnc/prevnc2 reruns with b's counts");
  compare->add_option("-o,--output", cmp_out, "write the JSON report here instead of stdout");

  SyntheticSpec spec;
  std::string syn_out;
  auto* synth = app.add_subcommand("make-synthetic", "write a pseudoword corpus, dataset and config");
  synth->add_option("-o,--output", syn_out, "output directory")->required();
  synth->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
  synth->add_option("--tokens", spec.corpus_tokens, "corpus size in tokens")->capture_default_str();
  synth->add_option("--classes", spec.num_classes, "semantic classes")->capture_default_str();
  synth->add_option("--nouns", spec.nouns_per_class, "nouns per class")->capture_default_str();
  synth->add_option("--cues", spec.cue_words_per_class, "cue words per class and side")->capture_default_str();
  synth->add_option("--pseudowords", spec.num_pseudowords, "pseudowords")->capture_default_str();
  synth->add_option("--examples", spec.examples_per_sense, "examples per sense")->capture_default_str();
  synth->add_option("--neutral-rate", spec.neutral_side_rate, "chance of a class-neutral neighbour")
      ->capture_default_str();

  Overrides an_ov;
  std::string an_source;
  std::optional<double> an_min;
  std::optional<std::size_t> an_top;
  auto* analyze = app.add_subcommand("analyze", "discriminative substitutes, substitute listings, #cl differences");
  an_ov.add_to(analyze);
  analyze->add_option("--source", an_source, "build sense profiles from gold or clusters")
      ->check(CLI::IsMember({"auto", "gold", "clusters"}));
  analyze->add_option("--min-count", an_min, "minimum count in one sense");
  analyze->add_option("--top-n", an_top, "lemmas per sense pair");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kFatal;
  }

  try {
    if (*ingest) return cmd_ingest_check(ic_dataset, ic_dist);
    if (*run) return cmd_run(run_ov);
    if (*grid) return cmd_grid(grid_ov);
    if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_gold, cmp_config, cmp_out);
    if (*synth) return cmd_make_synthetic(spec, syn_out);
    if (*analyze) return cmd_analyze(an_ov, an_source, an_min, an_top);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFatal;
  }
  return kFatal;
}
