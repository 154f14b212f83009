#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsi/error.hpp"
#include "wsi/metrics.hpp"
#include "wsi/vectorize.hpp"

namespace wsi {

// Dense symmetric n x n matrix of pairwise distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }
  double max_entry() const noexcept {
    return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

enum class Affinity { cosine, euclidean };
enum class Linkage { average, complete, single };

inline std::string_view to_string(Affinity a) { return a == Affinity::cosine ? "cosine" : "euclidean"; }
inline std::string_view to_string(Linkage l) {
  switch (l) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
  }
  return "?";
}
inline Affinity parse_affinity(std::string_view s) {
  if (s == "cosine") return Affinity::cosine;
  if (s == "euclidean") return Affinity::euclidean;
  throw ConfigError("unknown affinity '" + std::string(s) + "'");
}
inline Linkage parse_linkage(std::string_view s) {
  if (s == "average") return Linkage::average;
  if (s == "complete") return Linkage::complete;
  if (s == "single") return Linkage::single;
  throw ConfigError("unknown linkage '" + std::string(s) + "'");
}

// 1 - cos(v_i, v_j). Every vector must have a non-zero norm.
inline DistanceMatrix cosine_distance_matrix(const std::vector<SparseVector>& vectors) {
  const std::size_t n = vectors.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = norm(vectors[i]);
    if (norms[i] == 0.0) throw Error("internal: zero-norm vector reached the distance matrix");
  }
  DistanceMatrix dm(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = dot(vectors[i], vectors[j]) / (norms[i] * norms[j]);
      dm.set(i, j, std::clamp(1.0 - c, 0.0, 2.0));
    }
  return dm;
}

inline DistanceMatrix euclidean_distance_matrix(const std::vector<SparseVector>& vectors) {
  const std::size_t n = vectors.size();
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = dot(vectors[i], vectors[i]);
  DistanceMatrix dm(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dm.set(i, j, std::sqrt(std::max(0.0, sq[i] + sq[j] - 2.0 * dot(vectors[i], vectors[j]))));
  return dm;
}

inline DistanceMatrix distance_matrix(const std::vector<SparseVector>& vectors, Affinity a) {
  return a == Affinity::cosine ? cosine_distance_matrix(vectors) : euclidean_distance_matrix(vectors);
}

// Renumbers labels by order of first appearance: item 0 gets 0, the next new
// label 1, and so on.
template <typename L>
std::vector<std::size_t> canonical_labels(const std::vector<L>& labels) {
  std::vector<std::size_t> out(labels.size());
  std::vector<std::pair<L, std::size_t>> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == labels[i]; });
    if (it == seen.end()) {
      seen.emplace_back(labels[i], seen.size());
      out[i] = seen.size() - 1;
    } else {
      out[i] = it->second;
    }
  }
  return out;
}

// One agglomeration step. Clusters are named by their smallest member index,
// so `kept` < `absorbed` and the merged cluster keeps the name `kept`.
struct Merge {
  std::size_t kept = 0;
  std::size_t absorbed = 0;
  double distance = 0.0;
};

// Full merge history of agglomerative clustering; cut it at any k.
class Dendrogram {
 public:
  Dendrogram(std::size_t n, std::vector<Merge> merges) : n_(n), merges_(std::move(merges)) {}

  std::size_t size() const noexcept { return n_; }
  const std::vector<Merge>& merges() const noexcept { return merges_; }

  // Labels after merging down to k clusters, canonically numbered.
  std::vector<std::size_t> labels(std::size_t k) const {
    if (k < 1 || k > n_) throw DomainError("number of clusters must be in [1, n]");
    std::vector<std::size_t> owner(n_);
    std::iota(owner.begin(), owner.end(), 0);
    for (std::size_t m = 0; m < n_ - k; ++m) {
      const auto& mg = merges_[m];
      for (auto& o : owner)
        if (o == mg.absorbed) o = mg.kept;
    }
    return canonical_labels(owner);
  }

 private:
  std::size_t n_;
  std::vector<Merge> merges_;
};

// Greedy agglomeration: each step merges the globally closest pair under the
// linkage, ties going to the lexicographically smallest (kept, absorbed).
// Every cluster caches its nearest neighbour, so a step is O(n) unless a
// merge invalidates a neighbour.
inline Dendrogram build_dendrogram(const DistanceMatrix& dm, Linkage linkage = Linkage::average) {
  const std::size_t n = dm.size();
  std::vector<double> link(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) link[i * n + j] = dm(i, j);
  std::vector<double> size(n, 1.0);
  std::vector<char> active(n, 1);
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> nn(n, n);
  std::vector<double> nn_dist(n, inf);

  // average linkage stores the sum of member distances, the others the value
  auto value = [&](std::size_t a, std::size_t b) {
    const double v = link[a * n + b];
    return linkage == Linkage::average ? v / (size[a] * size[b]) : v;
  };
  auto refresh = [&](std::size_t k) {
    nn[k] = n;
    nn_dist[k] = inf;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k || !active[j]) continue;
      const double v = value(k, j);
      if (v < nn_dist[k]) {
        nn_dist[k] = v;
        nn[k] = j;
      }
    }
  };
  for (std::size_t k = 0; k < n; ++k) refresh(k);

  std::vector<Merge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best_a = n, best_b = n;
    double best = inf;
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || nn[k] == n) continue;
      const std::size_t a = std::min(k, nn[k]), b = std::max(k, nn[k]);
      if (nn_dist[k] < best || (nn_dist[k] == best && (a < best_a || (a == best_a && b < best_b)))) {
        best = nn_dist[k];
        best_a = a;
        best_b = b;
      }
    }
    merges.push_back({best_a, best_b, best});

    const std::size_t i = best_a, j = best_b;
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      double& ik = link[i * n + k];
      const double jk = link[j * n + k];
      switch (linkage) {
        case Linkage::average: ik += jk; break;
        case Linkage::complete: ik = std::max(ik, jk); break;
        case Linkage::single: ik = std::min(ik, jk); break;
      }
      link[k * n + i] = ik;
    }
    size[i] += size[j];
    active[j] = 0;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i) continue;
      if (nn[k] == i || nn[k] == j) {
        refresh(k);
      } else {
        const double v = value(k, i);
        if (v < nn_dist[k] || (v == nn_dist[k] && i < nn[k])) {
          nn_dist[k] = v;
          nn[k] = i;
        }
      }
    }
    refresh(i);
  }
  return Dendrogram(n, std::move(merges));
}

inline std::vector<std::size_t> agglomerative(const DistanceMatrix& dm, std::size_t num_clusters,
                                              Linkage linkage = Linkage::average) {
  if (num_clusters < 1 || num_clusters > dm.size())
    throw DomainError("number of clusters " + std::to_string(num_clusters) + " outside [1, " +
                      std::to_string(dm.size()) + "]");
  return build_dendrogram(dm, linkage).labels(num_clusters);
}

// Mean silhouette. Singleton clusters contribute 0, as does any item with
// a = b = 0.
template <typename L>
double silhouette(const DistanceMatrix& dm, const std::vector<L>& labels) {
  if (labels.size() != dm.size()) throw ValidationError("labels and distance matrix differ in size");
  const auto lab = canonical_labels(labels);
  const std::size_t k = lab.empty() ? 0 : *std::max_element(lab.begin(), lab.end()) + 1;
  if (k < 2) throw DomainError("silhouette needs at least two clusters");
  const std::size_t n = dm.size();
  std::vector<double> count(k, 0.0);
  for (auto l : lab) count[l] += 1.0;
  double total = 0.0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = lab[i];
    if (count[own] < 2.0) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sums[lab[j]] += dm(i, j);
    const double a = sums[own] / (count[own] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != own) b = std::min(b, sums[c] / count[c]);
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

struct ClusterSelectConfig {
  std::size_t nc_min = 2;
  std::size_t nc_max = 12;
  std::optional<std::size_t> fixed_nc;

  void validate() const {
    if (nc_min < 2) throw ConfigError("nc_min must be >= 2");
    if (nc_min > nc_max) throw ConfigError("nc_min must not exceed nc_max");
    if (fixed_nc && *fixed_nc < 1) throw ConfigError("fixed_nc must be >= 1");
  }
};

struct SilhouetteSelection {
  std::size_t num_clusters = 0;
  std::vector<std::size_t> labels;
  std::optional<double> score;
  bool degenerate = false;  // too few points or no structure; nc not chosen by silhouette
};

// Picks the nc in [nc_min, min(nc_max, n-1)] with the highest silhouette,
// smallest nc on ties.
inline SilhouetteSelection select_nc_silhouette(const DistanceMatrix& dm, const ClusterSelectConfig& cfg,
                                                const Dendrogram* precomputed = nullptr) {
  cfg.validate();
  const std::size_t n = dm.size();
  SilhouetteSelection sel;
  if (n == 0) throw DomainError("cannot cluster zero items");
  const std::size_t hi = std::min(cfg.nc_max, n - 1);
  if (n < 3 || dm.max_entry() <= 1e-12 || cfg.nc_min > hi) {
    sel.degenerate = true;
    sel.num_clusters = std::min(n, cfg.nc_min);
    sel.labels = agglomerative(dm, sel.num_clusters);
    return sel;
  }
  std::optional<Dendrogram> own;
  if (!precomputed) own.emplace(build_dendrogram(dm, Linkage::average));
  const Dendrogram& dendro = precomputed ? *precomputed : *own;
  for (std::size_t k = cfg.nc_min; k <= hi; ++k) {
    auto labels = dendro.labels(k);
    const double s = silhouette(dm, labels);
    if (!sel.score || s > *sel.score) {
      sel.score = s;
      sel.num_clusters = k;
      sel.labels = std::move(labels);
    }
  }
  return sel;
}

// Keeps the target_nc largest silhouette clusters and moves every other item
// to the kept cluster with the smallest mean distance to its members. With
// fewer silhouette clusters than target_nc it reclusters directly.
template <typename L>
std::vector<std::size_t> redistribute_prevnc2(const DistanceMatrix& dm, const std::vector<L>& sil_labels,
                                              std::size_t target_nc) {
  const std::size_t n = dm.size();
  if (sil_labels.size() != n) throw ValidationError("labels and distance matrix differ in size");
  if (target_nc < 1 || target_nc > n) throw DomainError("target number of clusters outside [1, n]");
  const auto lab = canonical_labels(sil_labels);
  const std::size_t s = n == 0 ? 0 : *std::max_element(lab.begin(), lab.end()) + 1;
  if (s == target_nc) return lab;
  if (s < target_nc) return agglomerative(dm, target_nc);

  std::vector<std::size_t> sizes(s, 0);
  for (auto l : lab) ++sizes[l];
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sizes[a] > sizes[b]; });
  std::vector<char> kept(s, 0);
  std::vector<std::size_t> kept_ids(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(target_nc));
  std::sort(kept_ids.begin(), kept_ids.end());
  for (auto c : kept_ids) kept[c] = 1;

  std::vector<std::size_t> out = lab;
  for (std::size_t i = 0; i < n; ++i) {
    if (kept[lab[i]]) continue;
    std::size_t best_c = kept_ids.front();
    double best = std::numeric_limits<double>::infinity();
    for (auto c : kept_ids) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (lab[j] == c) sum += dm(i, j);
      const double mean = sum / static_cast<double>(sizes[c]);
      if (mean < best) {
        best = mean;
        best_c = c;
      }
    }
    out[i] = best_c;
  }
  return canonical_labels(out);
}

// --- per-word clustering -----------------------------------------------------

enum class Selector { silnc, fixnc, prevnc, prevnc2, gold_oracle };

inline std::string_view to_string(Selector s) {
  switch (s) {
    case Selector::silnc: return "silnc";
    case Selector::fixnc: return "fixnc";
    case Selector::prevnc: return "prevnc";
    case Selector::prevnc2: return "prevnc2";
    case Selector::gold_oracle: return "gold-oracle";
  }
  return "?";
}

inline Selector parse_selector(std::string_view s) {
  if (s == "silnc") return Selector::silnc;
  if (s == "fixnc") return Selector::fixnc;
  if (s == "prevnc") return Selector::prevnc;
  if (s == "prevnc2") return Selector::prevnc2;
  if (s == "gold-oracle") return Selector::gold_oracle;
  throw ConfigError("unknown selector '" + std::string(s) + "'");
}

struct ClusteringResult {
  std::string word;
  std::vector<std::size_t> labels;               // per occurrence
  std::vector<std::vector<double>> distribution;  // per occurrence, over clusters
  std::vector<std::size_t> rep_labels;           // per representative
  std::size_t num_clusters = 0;
  Selector selector = Selector::silnc;
  std::optional<double> silhouette;
  bool degenerate = false;
  std::size_t empty_vectors = 0;
};

// Per-occurrence cluster distributions from representative labels; the hard
// label is the argmax, lowest cluster id on ties.
inline void aggregate_occurrences(ClusteringResult& r, std::span<const std::size_t> owner,
                                  std::size_t num_occurrences) {
  r.distribution.assign(num_occurrences, std::vector<double>(r.num_clusters, 0.0));
  std::vector<double> totals(num_occurrences, 0.0);
  for (std::size_t i = 0; i < owner.size(); ++i) {
    r.distribution[owner[i]][r.rep_labels[i]] += 1.0;
    totals[owner[i]] += 1.0;
  }
  r.labels.assign(num_occurrences, 0);
  for (std::size_t o = 0; o < num_occurrences; ++o) {
    if (totals[o] == 0.0)
      throw ValidationError("occurrence " + std::to_string(o) + " has no representatives");
    auto& row = r.distribution[o];
    for (auto& x : row) x /= totals[o];
    r.labels[o] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
}

namespace detail {

struct NonEmptySplit {
  std::vector<std::size_t> index;  // positions of non-empty vectors
  std::vector<SparseVector> vectors;
};

inline NonEmptySplit split_non_empty(const std::vector<SparseVector>& vectors) {
  NonEmptySplit s;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    if (!vectors[i].empty()) {
      s.index.push_back(i);
      s.vectors.push_back(vectors[i]);
    }
  return s;
}

// Spreads labels of the non-empty subset back over all vectors; empty ones
// join the largest cluster (lowest id on ties).
inline std::vector<std::size_t> fill_empty(std::size_t total, const NonEmptySplit& split,
                                           const std::vector<std::size_t>& sub_labels, std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : sub_labels) ++sizes[l];
  const auto largest =
      static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<std::size_t> out(total, largest);
  for (std::size_t i = 0; i < split.index.size(); ++i) out[split.index[i]] = sub_labels[i];
  return out;
}

}  // namespace detail

// Clusters one word's representative vectors and maps the result back to
// occurrences. `owner[i]` is the occurrence of vector i. fixnc / prevnc /
// prevnc2 take their count from cfg.fixed_nc; gold_oracle needs `gold`.
inline ClusteringResult cluster_word(const std::vector<SparseVector>& vectors,
                                     const std::vector<std::size_t>& owner, std::size_t num_occurrences,
                                     const ClusterSelectConfig& cfg, Selector selector,
                                     std::span<const std::string> gold = {});

struct MaxAriGrid {
  std::size_t nc_min = 2;
  std::size_t nc_max = 12;
  std::vector<Linkage> linkages{Linkage::average, Linkage::complete, Linkage::single};
  std::vector<Affinity> affinities{Affinity::cosine, Affinity::euclidean};
};

struct MaxAriResult {
  double best_ari = 0.0;
  Affinity affinity = Affinity::cosine;
  Linkage linkage = Linkage::average;
  std::size_t num_clusters = 1;
  std::vector<std::size_t> labels;  // per occurrence, best configuration
  std::size_t evaluated = 0;
};

// Best ARI against gold over every (affinity, linkage, nc) in the grid,
// first configuration in grid order on ties.
inline MaxAriResult max_ari_search(const std::vector<SparseVector>& vectors,
                                   const std::vector<std::size_t>& owner, std::size_t num_occurrences,
                                   std::span<const std::string> gold, const MaxAriGrid& grid) {
  if (gold.size() != num_occurrences || num_occurrences == 0)
    throw ConfigError("maxARI needs a gold label for every occurrence");
  for (const auto& g : gold)
    if (g.empty()) throw ConfigError("maxARI needs a gold label for every occurrence");
  const std::vector<std::string> gold_vec(gold.begin(), gold.end());
  const auto split = detail::split_non_empty(vectors);
  MaxAriResult best;
  bool have = false;
  const std::size_t m = split.vectors.size();
  if (m < 2 || num_occurrences < 2) {
    best.labels.assign(num_occurrences, 0);
    best.best_ari = num_occurrences >= 2 ? ari(gold_vec, best.labels) : 0.0;
    best.evaluated = 1;
    return best;
  }
  for (auto aff : grid.affinities) {
    const DistanceMatrix dm = distance_matrix(split.vectors, aff);
    for (auto link : grid.linkages) {
      const Dendrogram dendro = build_dendrogram(dm, link);
      const std::size_t hi = std::min(grid.nc_max, m);
      for (std::size_t k = std::max<std::size_t>(1, grid.nc_min); k <= hi; ++k) {
        ClusteringResult r;
        r.num_clusters = k;
        r.rep_labels = detail::fill_empty(vectors.size(), split, dendro.labels(k), k);
        aggregate_occurrences(r, owner, num_occurrences);
        const double score = ari(gold_vec, r.labels);
        ++best.evaluated;
        if (!have || score > best.best_ari) {
          have = true;
          best.best_ari = score;
          best.affinity = aff;
          best.linkage = link;
          best.num_clusters = k;
          best.labels = r.labels;
        }
      }
    }
  }
  return best;
}

inline ClusteringResult cluster_word(const std::vector<SparseVector>& vectors,
                                     const std::vector<std::size_t>& owner, std::size_t num_occurrences,
                                     const ClusterSelectConfig& cfg, Selector selector,
                                     std::span<const std::string> gold) {
  cfg.validate();
  if (owner.size() != vectors.size()) throw ValidationError("owner list and vectors differ in size");
  ClusteringResult r;
  r.selector = selector;
  const auto split = detail::split_non_empty(vectors);
  r.empty_vectors = vectors.size() - split.vectors.size();
  const std::size_t m = split.vectors.size();

  auto target = [&]() -> std::size_t {
    if (!cfg.fixed_nc)
      throw ConfigError(std::string("selector ") + std::string(to_string(selector)) + " needs a cluster count");
    return std::min(*cfg.fixed_nc, m);
  };

  std::vector<std::size_t> sub;
  if (m < 2) {
    r.degenerate = true;
    sub.assign(m, 0);
    r.num_clusters = 1;
  } else {
    const DistanceMatrix dm = cosine_distance_matrix(split.vectors);
    switch (selector) {
      case Selector::silnc: {
        auto sel = select_nc_silhouette(dm, cfg);
        sub = std::move(sel.labels);
        r.silhouette = sel.score;
        r.degenerate = sel.degenerate;
        break;
      }
      case Selector::fixnc:
      case Selector::prevnc:
        sub = agglomerative(dm, target());
        break;
      case Selector::prevnc2: {
        const std::size_t t = target();
        auto sel = select_nc_silhouette(dm, cfg);
        r.silhouette = sel.score;
        r.degenerate = sel.degenerate;
        sub = redistribute_prevnc2(dm, sel.labels, t);
        break;
      }
      case Selector::gold_oracle: {
        MaxAriGrid grid;
        grid.nc_min = 1;
        grid.nc_max = std::max(cfg.nc_max, std::size_t{1});
        grid.linkages = {Linkage::average};
        grid.affinities = {Affinity::cosine};
        const auto best = max_ari_search(vectors, owner, num_occurrences, gold, grid);
        sub = agglomerative(dm, std::min(best.num_clusters, m));
        break;
      }
    }
    r.num_clusters = *std::max_element(sub.begin(), sub.end()) + 1;
  }
  if (m == 0) {
    r.rep_labels.assign(vectors.size(), 0);
    r.degenerate = true;
  } else {
    r.rep_labels = detail::fill_empty(vectors.size(), split, sub, r.num_clusters);
  }
  aggregate_occurrences(r, owner, num_occurrences);
  return r;
}

}  // namespace wsi
