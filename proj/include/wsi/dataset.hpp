#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "wsi/error.hpp"
#include "wsi/occurrence.hpp"
#include "wsi/text.hpp"

namespace wsi {

struct DatasetRow {
  Occurrence occ;
  std::string predict_sense_id;
  std::string positions;  // as read, re-emitted verbatim
};

struct DatasetSummary {
  std::size_t num_words = 0;
  std::size_t num_examples = 0;
  std::size_t words_with_gold = 0;
  double mean_senses_per_word = 0.0;  // over words with gold labels
};

// Tab-separated dataset: one row per context, grouped by target word.
struct Dataset {
  std::vector<DatasetRow> rows;
  std::map<std::string, std::vector<std::size_t>> by_word;  // word -> row indices, file order

  bool has_gold() const {
    return !rows.empty() &&
           std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.occ.gold_sense_id.has_value(); });
  }

  DatasetSummary summary() const {
    DatasetSummary s;
    s.num_words = by_word.size();
    s.num_examples = rows.size();
    double senses = 0.0;
    for (const auto& [_, idx] : by_word) {
      std::set<std::string> ids;
      bool complete = true;
      for (auto i : idx) {
        if (!rows[i].occ.gold_sense_id) {
          complete = false;
          break;
        }
        ids.insert(*rows[i].occ.gold_sense_id);
      }
      if (!complete) continue;
      ++s.words_with_gold;
      senses += static_cast<double>(ids.size());
    }
    if (s.words_with_gold) s.mean_senses_per_word = senses / static_cast<double>(s.words_with_gold);
    return s;
  }

  void add(DatasetRow row) {
    by_word[row.occ.word].push_back(rows.size());
    rows.push_back(std::move(row));
  }
};

inline const std::vector<std::string>& dataset_columns() {
  static const std::vector<std::string> cols{"context_id", "word",      "gold_sense_id",
                                             "predict_sense_id", "positions", "context"};
  return cols;
}

// "b-e" or "b1-e1,b2-e2"; only the first span is used.
inline CharSpan parse_positions(const std::string& s, std::size_t line) {
  const std::string first = text::split(s, ',').front();
  const auto dash = first.find('-');
  if (dash == std::string::npos) throw ParseError(line, "positions '" + s + "' is not 'begin-end'");
  auto to_num = [&](std::string_view part) {
    part = text::trim(part);
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size() || part.empty())
      throw ParseError(line, "positions '" + s + "' is not 'begin-end'");
    return v;
  };
  return {to_num(std::string_view(first).substr(0, dash)), to_num(std::string_view(first).substr(dash + 1))};
}

inline Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = text::split(line, '\t');
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[std::string(text::trim(header[i]))] = i;
  for (const char* required : {"context_id", "word", "positions", "context"})
    if (!col.count(required)) throw ParseError(1, std::string("missing column '") + required + "'");
  auto opt_col = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = col.find(name);
    return it == col.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  };
  const auto gold_col = opt_col("gold_sense_id");
  const auto pred_col = opt_col("predict_sense_id");

  Dataset ds;
  std::unordered_set<std::string> ids;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = text::split(line, '\t');
    if (cells.size() != header.size())
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " columns, got " +
                                   std::to_string(cells.size()));
    DatasetRow row;
    row.occ.context_id = cells[col["context_id"]];
    row.occ.word = cells[col["word"]];
    row.occ.context = cells[col["context"]];
    row.positions = cells[col["positions"]];
    if (gold_col && !cells[*gold_col].empty()) row.occ.gold_sense_id = cells[*gold_col];
    if (pred_col) row.predict_sense_id = cells[*pred_col];
    if (row.occ.context_id.empty()) throw ValidationError(lineno, "empty context_id");
    if (row.occ.word.empty()) throw ValidationError(lineno, "empty word");
    if (!ids.insert(row.occ.context_id).second)
      throw ValidationError(lineno, "duplicate context_id '" + row.occ.context_id + "'");
    row.occ.target_span = parse_positions(row.positions, lineno);
    try {
      validate(row.occ);
    } catch (const ValidationError& e) {
      throw ValidationError(lineno, e.what());
    }
    ds.add(std::move(row));
  }
  return ds;
}

inline Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path);
  return read_dataset(in);
}

// Same column layout as the input, predict_sense_id filled in.
inline void write_dataset(std::ostream& out, const Dataset& ds) {
  const auto& cols = dataset_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
  out << '\n';
  for (const auto& r : ds.rows) {
    std::string positions = r.positions;
    if (positions.empty())
      positions = std::to_string(r.occ.target_span.begin) + "-" + std::to_string(r.occ.target_span.end);
    out << r.occ.context_id << '\t' << r.occ.word << '\t' << r.occ.gold_sense_id.value_or("") << '\t'
        << r.predict_sense_id << '\t' << positions << '\t' << r.occ.context << '\n';
  }
}

inline void write_dataset_file(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  write_dataset(out, ds);
}

}  // namespace wsi
