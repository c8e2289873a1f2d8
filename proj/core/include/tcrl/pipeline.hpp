#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcrl/sample.hpp"

namespace tcrl {

// ---------------------------------------------------------------------------
// Filtering

struct FilterReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::size_t dropped_bad_call = 0;
  std::size_t dropped_bad_schema = 0;
  std::size_t dropped_duplicate_id = 0;
  std::size_t dropped_malformed = 0;  // not JSON, or not a sample record at all

  Value to_value() const;
  std::string to_text() const;
};

struct Rejection {
  std::size_t line = 0;
  std::string category;  // bad_call | bad_schema | duplicate_id | malformed
  std::string reason;
};

struct FilterResult {
  std::vector<Sample> kept;
  FilterReport report;
  std::vector<Rejection> rejections;
};

/// Rewrites native xLAM records ({"query", "tools", "answers"}) into the
/// sample schema; other values pass through untouched.
Value normalize_record(const Value& record);

/// Keeps a record iff its reference answer parses (bracketed or JSON) and its
/// candidate tools parse as schemas. The call check runs first, so a record
/// failing both counts as bad_call. Later records repeating a kept id are
/// dropped. Malformed records are counted, never fatal. `line_numbers`
/// labels rejections (defaults to 1..n).
FilterResult filter_corpus(const std::vector<std::string>& lines,
                           const std::vector<std::size_t>& line_numbers = {});

// ---------------------------------------------------------------------------
// Name masking

struct MaskMapping {
  /// original function name -> func_<k>, in assignment order
  std::vector<std::pair<std::string, std::string>> functions;
  /// (original function, original parameter) -> param_<j>
  std::vector<std::pair<std::pair<std::string, std::string>, std::string>> parameters;

  Value to_value() const;
  /// Throws SchemaError on shape problems or a non-injective mapping.
  static MaskMapping from_value(const Value& v);
  /// Masked names back to originals, keyed by the masked function name.
  MaskMapping inverse() const;
};

/// Renames calls under `mapping`; names it does not cover are kept.
AnswerSet mask_answer(const AnswerSet& answer, const MaskMapping& mapping);
/// Same on answer text, editing only name tokens so everything else
/// (spacing, number spelling, quoting) survives byte for byte. Text that does
/// not parse is returned unchanged.
std::string mask_answer_text(std::string_view text, const MaskMapping& mapping);

struct MaskOptions {
  /// Accept an already-masked sample whose names are exactly the identity
  /// mapping and return it unchanged instead of raising MaskCollision.
  bool idempotent = false;
};

struct MaskResult {
  Sample sample;
  MaskMapping mapping;
};

/// Renames functions to func_1..func_n in schema order and each function's
/// parameters to param_1..param_k in schema order. Schemas, reference answer
/// (structured and text), assistant calls and per-turn schemas are rewritten;
/// dialogue text and descriptions are not. Throws MaskCollision when a source
/// name already has the masked form.
MaskResult mask_sample(const Sample& s, MaskOptions options = {});

/// Inverse of mask_sample under `mapping`.
Sample unmask_sample(const Sample& s, const MaskMapping& mapping);

// ---------------------------------------------------------------------------
// Multi-turn augmentation

enum class Strategy { combine, tool_removal, param_clarification, result_validation };

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view s);

struct Skip {
  std::string id;
  std::string reason;
};

struct AugmentResult {
  std::vector<Sample> samples;
  std::vector<Skip> skipped;  // StrategyInapplicable, counted rather than raised
};

AugmentResult augment_multi_turn(const std::vector<Sample>& corpus, Strategy strategy,
                                 std::uint64_t seed);

/// The single-sample strategies; throw StrategyInapplicable.
Sample augment_tool_removal(const Sample& s, std::uint64_t seed);
Sample augment_param_clarification(const Sample& s, std::uint64_t seed);
Sample augment_result_validation(const Sample& s, std::uint64_t seed,
                                 const std::vector<std::string>& string_vocabulary);

/// Whitespace-separated pieces of every string argument value in the
/// corpus's reference answers, sorted and unique.
std::vector<std::string> string_vocabulary(const std::vector<Sample>& corpus);

// ---------------------------------------------------------------------------
// Statistics

struct StatsRow {
  std::string label;
  /// [source][multi_turn]
  std::array<std::array<std::size_t, 2>, 3> counts{};
};

/// Counts by (source, single/multi-turn), one row per pipeline stage.
struct StatsTable {
  std::vector<StatsRow> rows;

  void add_row(std::string label, const std::vector<Sample>& corpus);
  Value to_value() const;
  std::string to_text() const;
};

/// Rows "Raw Data" (no provenance), "Multi-Aug." (augmented) and "After" (all).
StatsTable corpus_stats(const std::vector<Sample>& corpus);

}  // namespace tcrl
