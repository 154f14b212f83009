#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wsi/cluster.hpp"
#include "wsi/combine.hpp"
#include "wsi/csv.hpp"
#include "wsi/error.hpp"
#include "wsi/text.hpp"
#include "wsi/vectorize.hpp"

namespace wsi {

// --- flat TOML-style key/value files -----------------------------------------
//
//   # comment
//   seed = 7
//   [combine]          -> keys below are read as "combine.<key>"
//   method = "bayes-comb"
//   z = [1.0, 2.0]     -> arrays of scalars

using ConfigScalar = std::variant<bool, long long, double, std::string>;

struct ConfigValue {
  std::vector<ConfigScalar> items;
  bool is_array = false;
};

using ConfigMap = std::map<std::string, ConfigValue>;

namespace detail {

inline ConfigScalar parse_scalar(std::string_view s, std::size_t line) {
  s = text::trim(s);
  if (s.empty()) throw ParseError(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw ParseError(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char c = s[++i];
        out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
      } else {
        out += s[i];
      }
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  long long iv = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), iv);
  if (ec == std::errc() && p == s.data() + s.size()) return iv;
  double dv = 0;
  auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), dv);
  if (ec2 == std::errc() && q == s.data() + s.size()) return dv;
  throw ParseError(line, "cannot parse value '" + std::string(s) + "' (strings need double quotes)");
}

// Splits on commas that are not inside a quoted string.
inline std::vector<std::string_view> split_items(std::string_view s) {
  std::vector<std::string_view> out;
  bool in_str = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == ',' && !in_str) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (!text::trim(s.substr(start)).empty()) out.push_back(s.substr(start));
  return out;
}

inline std::string_view strip_comment(std::string_view s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

}  // namespace detail

inline ConfigMap parse_config(std::istream& in) {
  ConfigMap map;
  std::string section, raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = text::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "malformed section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    std::string key(text::trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (!section.empty()) key = section + "." + key;
    const std::string_view rhs = text::trim(line.substr(eq + 1));
    ConfigValue v;
    if (!rhs.empty() && rhs.front() == '[') {
      if (rhs.back() != ']') throw ParseError(lineno, "unterminated array");
      v.is_array = true;
      for (auto item : detail::split_items(rhs.substr(1, rhs.size() - 2)))
        v.items.push_back(detail::parse_scalar(item, lineno));
    } else {
      v.items.push_back(detail::parse_scalar(rhs, lineno));
    }
    if (map.count(key)) throw ParseError(lineno, "duplicate key '" + key + "'");
    map.emplace(std::move(key), std::move(v));
  }
  return map;
}

// Typed, consuming access to a ConfigMap. Whatever is left unconsumed at the
// end is reported as unknown.
class ConfigReader {
 public:
  explicit ConfigReader(ConfigMap map) : map_(std::move(map)) {}

  bool has(const std::string& key) const { return map_.count(key) != 0; }

  template <typename T>
  std::optional<T> get(const std::string& key) {
    const auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    ConfigValue v = std::move(it->second);
    map_.erase(it);
    if (v.is_array || v.items.size() != 1) throw ConfigError("key '" + key + "' expects a scalar");
    return convert<T>(key, v.items.front());
  }

  template <typename T>
  std::optional<std::vector<T>> get_list(const std::string& key) {
    const auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    ConfigValue v = std::move(it->second);
    map_.erase(it);
    std::vector<T> out;
    for (const auto& s : v.items) out.push_back(convert<T>(key, s));
    return out;
  }

  void expect_consumed() const {
    if (map_.empty()) return;
    std::string keys;
    for (const auto& [k, _] : map_) keys += (keys.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config keys: " + keys);
  }

 private:
  template <typename T>
  static T convert(const std::string& key, const ConfigScalar& s) {
    if constexpr (std::is_same_v<T, bool>) {
      if (auto b = std::get_if<bool>(&s)) return *b;
      throw ConfigError("key '" + key + "' expects a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto str = std::get_if<std::string>(&s)) return *str;
      throw ConfigError("key '" + key + "' expects a string");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (auto d = std::get_if<double>(&s)) return static_cast<T>(*d);
      if (auto i = std::get_if<long long>(&s)) return static_cast<T>(*i);
      throw ConfigError("key '" + key + "' expects a number");
    } else {
      if (auto i = std::get_if<long long>(&s)) {
        if (*i < 0 && std::is_unsigned_v<T>) throw ConfigError("key '" + key + "' must be non-negative");
        return static_cast<T>(*i);
      }
      throw ConfigError("key '" + key + "' expects an integer");
    }
  }

  ConfigMap map_;
};

// --- run configuration ---------------------------------------------------------

enum class SourceKind { toy_lm, file };

struct SourceConfig {
  SourceKind kind = SourceKind::toy_lm;
  std::string corpus_path;         // toy-lm: one sentence per line
  int order = 2;
  double smoothing_k = 0.01;
  std::size_t top_k = 0;           // substitutes kept per side; 0 = whole vocabulary
  bool use_pattern = false;
  std::string pattern = " and ";
  std::string distributions_path;  // file source
  // Recorded with the run; they describe how external distributions were made.
  bool add_bias = false;
  bool normalize_output = false;
};

struct EvalConfig {
  bool max_ari = true;
  bool baselines = true;
  bool analysis = true;
  std::string analysis_source = "auto";  // auto | gold | clusters
  MaxAriGrid max_ari_grid;
  double disc_min_count = 10;
  std::size_t disc_top_n = 10;
};

struct RunConfig {
  std::string dataset_path;
  SourceConfig source;
  std::string lemmatizer_path;
  CombineConfig combine;
  VectorizeConfig vectorize;
  ClusterSelectConfig select;
  Selector selector = Selector::silnc;
  std::string prev_predictions_path;  // prevnc / prevnc2
  EvalConfig eval;
  std::uint64_t seed = 0;
  std::string output_dir = "wsi-out";
  std::size_t workers = 1;

  // Checks that do not depend on where inputs come from.
  void validate_engine() const {
    combine.validate();
    select.validate();
    if (selector == Selector::fixnc && !select.fixed_nc) throw ConfigError("selector fixnc needs select.fixed_nc");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (eval.max_ari_grid.linkages.empty() || eval.max_ari_grid.affinities.empty())
      throw ConfigError("maxARI grid needs at least one linkage and one affinity");
    if (eval.analysis_source != "auto" && eval.analysis_source != "gold" && eval.analysis_source != "clusters")
      throw ConfigError("eval.analysis_source must be \"auto\", \"gold\" or \"clusters\"");
  }

  void validate() const {
    validate_engine();
    if (source.order < 2) throw ConfigError("source.order must be >= 2");
    if (!(source.smoothing_k > 0)) throw ConfigError("source.smoothing_k must be > 0");
    if (source.kind == SourceKind::file && source.distributions_path.empty())
      throw ConfigError("file source needs source.distributions");
    if (source.kind == SourceKind::toy_lm && source.corpus_path.empty())
      throw ConfigError("toy-lm source needs source.corpus");
    if ((selector == Selector::prevnc || selector == Selector::prevnc2) && prev_predictions_path.empty() &&
        !select.fixed_nc)
      throw ConfigError("selector prevnc/prevnc2 needs select.prev_predictions or select.fixed_nc");
  }
};

inline std::string_view to_string(SourceKind k) { return k == SourceKind::toy_lm ? "toy-lm" : "file"; }

inline SourceKind parse_source_kind(std::string_view s) {
  if (s == "toy-lm") return SourceKind::toy_lm;
  if (s == "file") return SourceKind::file;
  throw ConfigError("unknown substitutes source '" + std::string(s) + "'");
}

namespace detail {
inline std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}
}  // namespace detail

// Reads every RunConfig key it knows; leaves the rest (e.g. grid.*) in the
// reader.
inline RunConfig read_run_config(ConfigReader& r, const std::filesystem::path& base_dir = {}) {
  RunConfig c;
  if (auto v = r.get<std::string>("dataset")) c.dataset_path = detail::resolve(*v, base_dir);
  if (auto v = r.get<std::string>("output_dir")) c.output_dir = detail::resolve(*v, base_dir);
  if (auto v = r.get<std::string>("lemmatizer")) c.lemmatizer_path = detail::resolve(*v, base_dir);
  if (auto v = r.get<long long>("seed")) c.seed = static_cast<std::uint64_t>(*v);
  if (auto v = r.get<std::size_t>("workers")) c.workers = *v;

  if (auto v = r.get<std::string>("source.kind")) c.source.kind = parse_source_kind(*v);
  if (auto v = r.get<std::string>("source.corpus")) c.source.corpus_path = detail::resolve(*v, base_dir);
  if (auto v = r.get<int>("source.order")) c.source.order = *v;
  if (auto v = r.get<double>("source.smoothing_k")) c.source.smoothing_k = *v;
  if (auto v = r.get<std::size_t>("source.top_k")) c.source.top_k = *v;
  if (auto v = r.get<bool>("source.use_pattern")) c.source.use_pattern = *v;
  if (auto v = r.get<std::string>("source.pattern")) c.source.pattern = *v;
  if (auto v = r.get<std::string>("source.distributions"))
    c.source.distributions_path = detail::resolve(*v, base_dir);
  if (auto v = r.get<bool>("source.add_bias")) c.source.add_bias = *v;
  if (auto v = r.get<bool>("source.normalize_output")) c.source.normalize_output = *v;

  if (auto v = r.get<std::string>("combine.method")) c.combine.method = parse_combine_method(*v);
  if (auto v = r.get<std::size_t>("combine.K")) c.combine.top_k = *v;
  if (auto v = r.get<std::size_t>("combine.S")) c.combine.num_representatives = *v;
  if (auto v = r.get<std::size_t>("combine.L")) c.combine.sample_size = *v;
  if (auto v = r.get<double>("combine.z")) c.combine.zipf_z = *v;
  if (auto v = r.get<double>("combine.beta")) c.combine.beta = *v;

  if (auto v = r.get<bool>("vectorize.tfidf")) c.vectorize.use_tfidf = *v;
  if (auto v = r.get<bool>("vectorize.exclude_target")) c.vectorize.exclude_target = *v;

  if (auto v = r.get<std::string>("select.selector")) c.selector = parse_selector(*v);
  if (auto v = r.get<std::size_t>("select.nc_min")) c.select.nc_min = *v;
  if (auto v = r.get<std::size_t>("select.nc_max")) c.select.nc_max = *v;
  if (auto v = r.get<std::size_t>("select.fixed_nc")) c.select.fixed_nc = *v;
  if (auto v = r.get<std::string>("select.prev_predictions"))
    c.prev_predictions_path = detail::resolve(*v, base_dir);

  if (auto v = r.get<bool>("eval.max_ari")) c.eval.max_ari = *v;
  if (auto v = r.get<bool>("eval.baselines")) c.eval.baselines = *v;
  if (auto v = r.get<bool>("eval.analysis")) c.eval.analysis = *v;
  if (auto v = r.get<std::string>("eval.analysis_source")) c.eval.analysis_source = *v;
  if (auto v = r.get<std::size_t>("eval.max_ari_nc_min")) c.eval.max_ari_grid.nc_min = *v;
  if (auto v = r.get<std::size_t>("eval.max_ari_nc_max")) c.eval.max_ari_grid.nc_max = *v;
  if (auto v = r.get_list<std::string>("eval.max_ari_linkages")) {
    c.eval.max_ari_grid.linkages.clear();
    for (const auto& s : *v) c.eval.max_ari_grid.linkages.push_back(parse_linkage(s));
  }
  if (auto v = r.get_list<std::string>("eval.max_ari_affinities")) {
    c.eval.max_ari_grid.affinities.clear();
    for (const auto& s : *v) c.eval.max_ari_grid.affinities.push_back(parse_affinity(s));
  }
  if (auto v = r.get<double>("eval.disc_min_count")) c.eval.disc_min_count = *v;
  if (auto v = r.get<std::size_t>("eval.disc_top_n")) c.eval.disc_top_n = *v;
  c.combine.rng_seed = c.seed;
  return c;
}

inline RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  ConfigReader r(parse_config(in));
  RunConfig c = read_run_config(r, base_dir);
  r.expect_consumed();
  c.validate();
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_run_config(in, std::filesystem::absolute(path).parent_path());
}

namespace detail {
inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}
inline std::string boolstr(bool b) { return b ? "true" : "false"; }
}  // namespace detail

// Canonical text form; parse_run_config(format_run_config(c)) == c.
inline std::string format_run_config(const RunConfig& c) {
  using detail::boolstr;
  using detail::quoted;
  std::ostringstream o;
  o << "dataset = " << quoted(c.dataset_path) << "\n";
  o << "output_dir = " << quoted(c.output_dir) << "\n";
  if (!c.lemmatizer_path.empty()) o << "lemmatizer = " << quoted(c.lemmatizer_path) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "workers = " << c.workers << "\n";
  o << "\n[source]\n";
  o << "kind = " << quoted(std::string(to_string(c.source.kind))) << "\n";
  if (!c.source.corpus_path.empty()) o << "corpus = " << quoted(c.source.corpus_path) << "\n";
  if (!c.source.distributions_path.empty()) o << "distributions = " << quoted(c.source.distributions_path) << "\n";
  o << "order = " << c.source.order << "\n";
  o << "smoothing_k = " << csv::num(c.source.smoothing_k) << "\n";
  o << "top_k = " << c.source.top_k << "\n";
  o << "use_pattern = " << boolstr(c.source.use_pattern) << "\n";
  o << "pattern = " << quoted(c.source.pattern) << "\n";
  o << "add_bias = " << boolstr(c.source.add_bias) << "\n";
  o << "normalize_output = " << boolstr(c.source.normalize_output) << "\n";
  o << "\n[combine]\n";
  o << "method = " << quoted(std::string(to_string(c.combine.method))) << "\n";
  o << "K = " << c.combine.top_k << "\n";
  o << "S = " << c.combine.num_representatives << "\n";
  o << "L = " << c.combine.sample_size << "\n";
  o << "z = " << csv::num(c.combine.zipf_z) << "\n";
  o << "beta = " << csv::num(c.combine.beta) << "\n";
  o << "\n[vectorize]\n";
  o << "tfidf = " << boolstr(c.vectorize.use_tfidf) << "\n";
  o << "exclude_target = " << boolstr(c.vectorize.exclude_target) << "\n";
  o << "\n[select]\n";
  o << "selector = " << quoted(std::string(to_string(c.selector))) << "\n";
  o << "nc_min = " << c.select.nc_min << "\n";
  o << "nc_max = " << c.select.nc_max << "\n";
  if (c.select.fixed_nc) o << "fixed_nc = " << *c.select.fixed_nc << "\n";
  if (!c.prev_predictions_path.empty()) o << "prev_predictions = " << quoted(c.prev_predictions_path) << "\n";
  o << "\n[eval]\n";
  o << "max_ari = " << boolstr(c.eval.max_ari) << "\n";
  o << "baselines = " << boolstr(c.eval.baselines) << "\n";
  o << "analysis = " << boolstr(c.eval.analysis) << "\n";
  o << "analysis_source = " << quoted(c.eval.analysis_source) << "\n";
  o << "max_ari_nc_min = " << c.eval.max_ari_grid.nc_min << "\n";
  o << "max_ari_nc_max = " << c.eval.max_ari_grid.nc_max << "\n";
  o << "max_ari_linkages = [";
  for (std::size_t i = 0; i < c.eval.max_ari_grid.linkages.size(); ++i)
    o << (i ? ", " : "") << quoted(std::string(to_string(c.eval.max_ari_grid.linkages[i])));
  o << "]\nmax_ari_affinities = [";
  for (std::size_t i = 0; i < c.eval.max_ari_grid.affinities.size(); ++i)
    o << (i ? ", " : "") << quoted(std::string(to_string(c.eval.max_ari_grid.affinities[i])));
  o << "]\n";
  o << "disc_min_count = " << csv::num(c.eval.disc_min_count) << "\n";
  o << "disc_top_n = " << c.eval.disc_top_n << "\n";
  return o.str();
}

// --- grid search axes ----------------------------------------------------------

enum class GridObjective { ari, max_ari };

struct GridSpec {
  std::vector<CombineMethod> methods;
  std::vector<std::size_t> top_k;
  std::vector<std::size_t> num_representatives;
  std::vector<std::size_t> sample_size;
  std::vector<double> zipf_z;
  std::vector<double> beta;
  std::vector<bool> exclude_target;
  std::vector<bool> use_tfidf;
  GridObjective objective = GridObjective::ari;

  // Missing axes default to the base config's single value.
  static GridSpec from_reader(ConfigReader& r, const RunConfig& base) {
    GridSpec g;
    auto axis = [&](auto& dst, const std::string& key, auto fallback) {
      using T = typename std::decay_t<decltype(dst)>::value_type;
      if (auto v = r.get_list<T>(key)) {
        if (v->empty()) throw ConfigError("grid axis '" + key + "' is empty");
        dst = *v;
      } else {
        dst = {static_cast<T>(fallback)};
      }
    };
    if (auto v = r.get_list<std::string>("grid.method")) {
      if (v->empty()) throw ConfigError("grid axis 'grid.method' is empty");
      for (const auto& s : *v) g.methods.push_back(parse_combine_method(s));
    } else {
      g.methods = {base.combine.method};
    }
    axis(g.top_k, "grid.K", base.combine.top_k);
    axis(g.num_representatives, "grid.S", base.combine.num_representatives);
    axis(g.sample_size, "grid.L", base.combine.sample_size);
    axis(g.zipf_z, "grid.z", base.combine.zipf_z);
    axis(g.beta, "grid.beta", base.combine.beta);
    axis(g.exclude_target, "grid.exclude_target", base.vectorize.exclude_target);
    axis(g.use_tfidf, "grid.tfidf", base.vectorize.use_tfidf);
    if (auto v = r.get<std::string>("grid.objective")) {
      if (*v == "ari") {
        g.objective = GridObjective::ari;
      } else if (*v == "maxARI" || *v == "max_ari") {
        g.objective = GridObjective::max_ari;
      } else {
        throw ConfigError("grid.objective must be \"ari\" or \"maxARI\"");
      }
    }
    return g;
  }

  std::size_t size() const {
    return methods.size() * top_k.size() * num_representatives.size() * sample_size.size() * zipf_z.size() *
           beta.size() * exclude_target.size() * use_tfidf.size();
  }

  // Every grid point applied to `base`, in a fixed nested order. Axes that a
  // method ignores (S and L outside sampling, z outside bayes-comb, beta
  // outside pos-weight-avg) are not expanded for it.
  std::vector<RunConfig> expand(const RunConfig& base) const {
    std::vector<RunConfig> out;
    for (auto m : methods)
      for (auto k : top_k)
        for (auto s : num_representatives) {
          if (m != CombineMethod::sampling && s != num_representatives.front()) continue;
          for (auto l : sample_size) {
            if (m != CombineMethod::sampling && l != sample_size.front()) continue;
            for (auto z : zipf_z) {
              if (m != CombineMethod::bayes_comb && z != zipf_z.front()) continue;
              for (auto b : beta) {
                if (m != CombineMethod::pos_weight_avg && b != beta.front()) continue;
                for (bool ex : exclude_target)
                  for (bool tf : use_tfidf) {
                    RunConfig c = base;
                    c.combine.method = m;
                    c.combine.top_k = k;
                    c.combine.num_representatives = s;
                    c.combine.sample_size = l;
                    c.combine.zipf_z = z;
                    c.combine.beta = b;
                    c.vectorize.exclude_target = ex;
                    c.vectorize.use_tfidf = tf;
                    out.push_back(std::move(c));
                  }
              }
            }
          }
        }
    return out;
  }
};

}  // namespace wsi
