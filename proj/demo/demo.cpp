// Builds a small pseudoword dataset in memory, induces senses with two
// combination methods and prints per-word scores plus a few substitutes
// that separate the senses.

#include <cstdio>

#include "wsi/wsi.hpp"

using namespace wsi;

int main() {
  SyntheticSpec spec;
  spec.seed = 7;
  spec.nouns_per_class = 12;
  const SyntheticData data = make_synthetic(spec);

  RunConfig cfg;
  cfg.source.corpus_path = "in-memory";
  cfg.combine.top_k = 10;
  cfg.eval.disc_min_count = 5;
  cfg.eval.disc_top_n = 3;
  cfg.workers = 4;

  const auto provider = SubstituteProvider::from_corpus(data.corpus, cfg.source);
  const Lemmatizer lemmatizer;
  const RunInputs in{&data.dataset, &provider, &lemmatizer, {}};

  for (auto method : {CombineMethod::base_union, CombineMethod::bayes_comb}) {
    cfg.combine.method = method;
    const RunResult res = run_pipeline(cfg, in);
    const auto& agg = res.report->aggregate;
    std::printf("%s: ARI %.3f, AVG %.3f, maxARI %.3f\n", std::string(to_string(method)).c_str(), agg.weighted_ari,
                agg.avg, agg.weighted_max_ari.value_or(0.0));
    for (const auto& w : res.report->per_word)
      std::printf("  %-16s ARI %.3f  #cl %zu (gold %zu)\n", w.word.c_str(), w.ari, w.num_clusters, w.gold_num_senses);
    if (method != CombineMethod::bayes_comb) continue;

    std::printf("discriminative substitutes (%s senses):\n", res.analysis_source.c_str());
    std::string last;
    for (const auto& d : res.discriminative) {
      const std::string key = d.word + "/" + d.sense;
      if (key == last) continue;  // first lemma per sense is enough here
      last = key;
      std::printf("  %-16s %-8s %-10s %.2f/%.2f\n", d.word.c_str(), d.sense.c_str(), d.sub.lemma.c_str(), d.sub.freq1,
                  d.sub.freq2);
    }
  }
}
