#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>

#include "tcrl/toolcall.hpp"
#include "tcrl/value.hpp"

namespace tcrl {

/// Which text the overlap reward scores.
enum class GeneralScope {
  answer,  // the <answer> segment when present, otherwise the full completion
  full,    // always the full completion
};

struct RewardConfig {
  double kappa = 0.2;
  std::int64_t midpoint = 25;
  double multi_tool_bonus = 0.3;
  double value_error_penalty = 0.3;
  double general_floor = -0.5;
  double strict_clamp_min = -1.0;
  /// Split characters in addition to whitespace.
  std::string delimiters = "()[],.:'\"=";
  double format_weight = 1.0;
  GeneralScope general_reward_scope = GeneralScope::answer;

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  /// Exactly the field names above; unknown keys and wrong types are
  /// ConfigErrors. Missing keys keep their defaults.
  static RewardConfig from_value(const Value& v);
  static RewardConfig from_json(std::string_view text);
  Value to_value() const;
};

struct TokenBag {
  std::set<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

struct StrictResult {
  double reward = 0.0;
  int value_errors = 0;
  bool multi_tool_applied = false;
};

struct RewardBreakdown {
  double format = 0.0;
  double general = 0.0;
  double strict = 0.0;
  double sigma = 0.0;
  double tool = 0.0;
  double final = 0.0;
  int value_errors = 0;
  bool multi_tool_applied = false;

  Value to_value() const;
};

/// Splits on any delimiter or whitespace run; drops empty fragments.
TokenBag tokenize(std::string_view text, std::string_view delimiters);

/// floor + |Y ∩ Y*| / |Y*|. Throws DegenerateGroundTruth when y_star has no
/// tokens.
double general_reward(std::string_view y, std::string_view y_star, const RewardConfig& cfg);

/// Call multisets equal under a bijection; direct responses compared trimmed.
bool ast_equal(const AnswerSet& a, const AnswerSet& b);

/// Base correctness of a response against the reference. Calls must be
/// AST-equal; a direct-response reference is matched by any non-empty answer
/// segment that contains no tool call.
bool answers_match(const StructuredResponse& pred, const AnswerSet& gt);

/// Count of predicted arguments that name the same (call, parameter) as the
/// greedily aligned reference call but carry a different value.
int count_value_errors(const AnswerSet& pred, const AnswerSet& gt);

StrictResult strict_reward(const StructuredResponse& pred, const AnswerSet& gt,
                           const RewardConfig& cfg);

/// 1 / (1 + exp(-kappa (t - m))), kept inside the open interval (0, 1).
double sigma(std::int64_t step, const RewardConfig& cfg);

double format_reward(const StructuredResponse& pred);

RewardBreakdown compute_reward(std::string_view pred_raw, const AnswerSet& gt,
                               std::string_view gt_text, std::int64_t step,
                               const RewardConfig& cfg);

/// Same as compute_reward with the schedule weight supplied directly, for
/// callers that pin it (strict-only or general-only baselines).
RewardBreakdown compute_reward_with_sigma(std::string_view pred_raw, const AnswerSet& gt,
                                          std::string_view gt_text, double sigma_value,
                                          const RewardConfig& cfg);

}  // namespace tcrl
