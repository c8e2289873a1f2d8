#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tcrl/toolcall.hpp"
#include "tcrl/value.hpp"

// Value-in/value-out surface for foreign-language wrappers. Everything here
// crosses the boundary as JSON-compatible data; errors are tcrl::Error
// subclasses whose kind() names them.
namespace tcrl::api {

/// Reference answer from its text: calls when it parses, otherwise the text
/// is a direct response.
AnswerSet reference_answer(std::string_view gt_text);

/// RewardBreakdown fields as an object. `config` is a reward-config object
/// (possibly empty); unknown keys raise ConfigError naming the key.
Value compute_reward(std::string_view pred, std::string_view gt_text, std::int64_t step,
                     const Value& config);

/// Elementwise compute_reward. Throws InvalidArgument on a length mismatch.
List batch_rewards(const std::vector<std::string>& preds, const std::vector<std::string>& gts,
                   std::int64_t step, const Value& config);

Value parse_call_expression(std::string_view text);
Value parse_json_calls(std::string_view text, bool lenient_arguments = false);
/// Both arguments in the answer form {"calls": [...]} or {"direct_response": ...}.
bool ast_equal(const Value& a, const Value& b);
List compute_advantages(const List& rewards, double std_floor = 1e-8);

/// JSON request {"op": name, "args": {...}} to JSON response {"ok": result}
/// or {"error": {"kind": ..., "message": ...}}. Never throws.
std::string call(std::string_view request);

}  // namespace tcrl::api
