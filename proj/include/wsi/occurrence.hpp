#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "wsi/error.hpp"
#include "wsi/text.hpp"

namespace wsi {

// Half-open [begin, end) range in Unicode code points.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

// One dataset row: a context with the first occurrence of the target marked.
struct Occurrence {
  std::string context_id;
  std::string word;
  std::optional<std::string> gold_sense_id;
  CharSpan target_span;
  std::string context;
};

// Throws ValidationError unless the span is non-empty and inside the context.
inline void validate(const Occurrence& occ) {
  const std::size_t len = text::codepoint_count(occ.context);
  if (occ.target_span.begin >= occ.target_span.end)
    throw ValidationError("context " + occ.context_id + ": empty target span");
  if (occ.target_span.end > len)
    throw ValidationError("context " + occ.context_id + ": target span " +
                          std::to_string(occ.target_span.begin) + "-" +
                          std::to_string(occ.target_span.end) + " exceeds context length " +
                          std::to_string(len));
}

// The l / c / r split of an occurrence, as byte views into occ.context.
struct ContextParts {
  std::string_view left;
  std::string_view target;
  std::string_view right;
};

inline ContextParts split_context(const Occurrence& occ) {
  validate(occ);
  const std::string_view ctx = occ.context;
  const std::size_t b = text::byte_offset(ctx, occ.target_span.begin);
  const std::size_t e = text::byte_offset(ctx, occ.target_span.end);
  return {ctx.substr(0, b), ctx.substr(b, e - b), ctx.substr(e)};
}

// Left-context length over total context length with the target itself
// removed, in code points: 0 when the left context is empty, 1 when the
// right one is. A context consisting only of the target sits at 0.5.
inline double normalized_position(const Occurrence& occ) {
  validate(occ);
  const std::size_t len = text::codepoint_count(occ.context);
  const std::size_t rest = len - (occ.target_span.end - occ.target_span.begin);
  if (rest == 0) return 0.5;
  return static_cast<double>(occ.target_span.begin) / static_cast<double>(rest);
}

}  // namespace wsi
