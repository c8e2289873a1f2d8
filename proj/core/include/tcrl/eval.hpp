#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tcrl/toolcall.hpp"
#include "tcrl/value.hpp"

namespace tcrl {

struct EvalRecord {
  std::string id;
  std::string prediction;  // raw completion, tags optional
  AnswerSet gt;
};

/// {"id", "prediction", "gt"} or {"id", "prediction", "gt_text"}. A gt_text
/// that does not parse as calls is taken as a direct response.
EvalRecord eval_record_from_value(const Value& v);

struct EvalOptions {
  /// Parameter F1 over (call, parameter) pairs instead of value triples.
  bool param_f1_names_only = false;
};

struct SampleScore {
  std::string id;
  bool matched = false;
  int value_errors = 0;
};

struct EvalReport {
  double ast_accuracy = 0.0;
  double function_f1 = 0.0;
  double parameter_f1 = 0.0;
  std::vector<SampleScore> per_sample;

  Value to_value() const;
  std::string to_text() const;
};

/// Throws InvalidArgument on a repeated id.
EvalReport evaluate(const std::vector<EvalRecord>& records, EvalOptions options = {});

using ToolSet = std::set<std::string>;

/// |A ∩ B| / min(|A|, |B|) * 100. Throws EmptyToolset.
double overlap_rate(const ToolSet& a, const ToolSet& b);

struct OverlapMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rates;

  std::string to_csv() const;  // two decimals
};

/// Pairwise rates in input order. Needs at least two inventories.
OverlapMatrix overlap_matrix(const std::vector<std::pair<std::string, ToolSet>>& inventories);

/// {"name": ["tool", ...], ...}, keeping key order.
std::vector<std::pair<std::string, ToolSet>> inventories_from_value(const Value& v);

}  // namespace tcrl
