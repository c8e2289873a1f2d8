#include "tcrl/reward.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include "tcrl/errors.hpp"
#include "tcrl/json_value.hpp"

namespace tcrl {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

double number_field(const Member& m) {
  if (!m.value.is_number()) throw ConfigError("\"" + m.key + "\" must be a number");
  return m.value.as_number().to_double();
}

}  // namespace

void RewardConfig::validate() const {
  if (!(std::isfinite(kappa) && kappa > 0)) throw ConfigError("kappa must be > 0");
  if (midpoint < 0) throw ConfigError("midpoint must be >= 0");
  if (!(std::isfinite(multi_tool_bonus) && multi_tool_bonus >= 0)) {
    throw ConfigError("multi_tool_bonus must be >= 0");
  }
  if (!(std::isfinite(value_error_penalty) && value_error_penalty >= 0)) {
    throw ConfigError("value_error_penalty must be >= 0");
  }
  if (!(std::isfinite(strict_clamp_min) && strict_clamp_min <= 0)) {
    throw ConfigError("strict_clamp_min must be <= 0");
  }
  if (!std::isfinite(general_floor)) throw ConfigError("general_floor must be finite");
  if (!std::isfinite(format_weight)) throw ConfigError("format_weight must be finite");
}

RewardConfig RewardConfig::from_value(const Value& v) {
  if (!v.is_object()) throw ConfigError("reward config must be a JSON object");
  RewardConfig cfg;
  for (const auto& m : v.as_object()) {
    if (m.key == "kappa") {
      cfg.kappa = number_field(m);
    } else if (m.key == "midpoint") {
      double d = number_field(m);
      if (d != std::floor(d) || std::fabs(d) > 9.0e15) {
        throw ConfigError("\"midpoint\" must be an integer");
      }
      cfg.midpoint = static_cast<std::int64_t>(d);
    } else if (m.key == "multi_tool_bonus") {
      cfg.multi_tool_bonus = number_field(m);
    } else if (m.key == "value_error_penalty") {
      cfg.value_error_penalty = number_field(m);
    } else if (m.key == "general_floor") {
      cfg.general_floor = number_field(m);
    } else if (m.key == "strict_clamp_min") {
      cfg.strict_clamp_min = number_field(m);
    } else if (m.key == "format_weight") {
      cfg.format_weight = number_field(m);
    } else if (m.key == "delimiters") {
      if (!m.value.is_string()) throw ConfigError("\"delimiters\" must be a string");
      cfg.delimiters = m.value.as_string();
    } else if (m.key == "general_reward_scope") {
      if (!m.value.is_string()) throw ConfigError("\"general_reward_scope\" must be a string");
      const auto& s = m.value.as_string();
      if (s == "answer") {
        cfg.general_reward_scope = GeneralScope::answer;
      } else if (s == "full") {
        cfg.general_reward_scope = GeneralScope::full;
      } else {
        throw ConfigError("\"general_reward_scope\" must be \"answer\" or \"full\"");
      }
    } else {
      throw ConfigError("unknown reward config key \"" + m.key + "\"");
    }
  }
  cfg.validate();
  return cfg;
}

RewardConfig RewardConfig::from_json(std::string_view text) {
  Value v;
  try {
    v = parse_json(text);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("invalid reward config JSON: ") + e.what());
  }
  return from_value(v);
}

Value RewardConfig::to_value() const {
  Object o;
  o.push_back(Member{"kappa", Value(Decimal::from_double(kappa, true))});
  o.push_back(Member{"midpoint", Value::integer(midpoint)});
  o.push_back(Member{"multi_tool_bonus", Value(Decimal::from_double(multi_tool_bonus, true))});
  o.push_back(
      Member{"value_error_penalty", Value(Decimal::from_double(value_error_penalty, true))});
  o.push_back(Member{"general_floor", Value(Decimal::from_double(general_floor, true))});
  o.push_back(Member{"strict_clamp_min", Value(Decimal::from_double(strict_clamp_min, true))});
  o.push_back(Member{"delimiters", Value(delimiters)});
  o.push_back(Member{"format_weight", Value(Decimal::from_double(format_weight, true))});
  o.push_back(Member{"general_reward_scope",
                     Value(general_reward_scope == GeneralScope::answer ? "answer" : "full")});
  return Value(std::move(o));
}

Value RewardBreakdown::to_value() const {
  Object o;
  o.push_back(Member{"format", Value(Decimal::from_double(format, false))});
  o.push_back(Member{"general", Value(Decimal::from_double(general, false))});
  o.push_back(Member{"strict", Value(Decimal::from_double(strict, false))});
  o.push_back(Member{"sigma", Value(Decimal::from_double(sigma, false))});
  o.push_back(Member{"tool", Value(Decimal::from_double(tool, false))});
  o.push_back(Member{"final", Value(Decimal::from_double(final, false))});
  o.push_back(Member{"value_errors", Value::integer(value_errors)});
  o.push_back(Member{"multi_tool_applied", Value(multi_tool_applied)});
  return Value(std::move(o));
}

TokenBag tokenize(std::string_view text, std::string_view delimiters) {
  std::array<bool, 256> split{};
  for (char c : delimiters) split[static_cast<unsigned char>(c)] = true;
  for (char c : std::string_view(" \t\n\r\v\f")) split[static_cast<unsigned char>(c)] = true;

  TokenBag bag;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || split[static_cast<unsigned char>(text[i])]) {
      if (i > start) bag.tokens.emplace(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return bag;
}

double general_reward(std::string_view y, std::string_view y_star, const RewardConfig& cfg) {
  TokenBag reference = tokenize(y_star, cfg.delimiters);
  if (reference.empty()) {
    throw DegenerateGroundTruth("ground truth has no tokens after splitting on delimiters");
  }
  TokenBag predicted = tokenize(y, cfg.delimiters);
  std::size_t hits = 0;
  for (const auto& tok : reference.tokens) hits += predicted.tokens.count(tok);
  // One rounding: floor*n is exact for realistic n, so the quotient is the
  // correctly rounded value of floor + hits/n.
  const auto n = static_cast<double>(reference.size());
  return (static_cast<double>(hits) + cfg.general_floor * n) / n;
}

bool ast_equal(const AnswerSet& a, const AnswerSet& b) {
  if (a.direct_response || b.direct_response) {
    return a.direct_response && b.direct_response &&
           trim(*a.direct_response) == trim(*b.direct_response);
  }
  if (a.calls.size() != b.calls.size()) return false;
  // Call equality is an equivalence relation, so first-fit matching finds a
  // bijection whenever one exists.
  std::vector<bool> used(b.calls.size(), false);
  for (const auto& call : a.calls) {
    bool found = false;
    for (std::size_t j = 0; j < b.calls.size(); ++j) {
      if (!used[j] && calls_equal(call, b.calls[j])) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

bool answers_match(const StructuredResponse& pred, const AnswerSet& gt) {
  if (gt.direct_response) {
    if (!pred.answer || trim(*pred.answer).empty()) return false;
    return !(pred.parsed && pred.parsed->has_calls());
  }
  return pred.parsed && ast_equal(*pred.parsed, gt);
}

int count_value_errors(const AnswerSet& pred, const AnswerSet& gt) {
  if (gt.direct_response) return 0;
  struct Candidate {
    int overlap;
    int shared;
    std::size_t pred;
    std::size_t ref;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < pred.calls.size(); ++i) {
    for (std::size_t j = 0; j < gt.calls.size(); ++j) {
      if (pred.calls[i].name != gt.calls[j].name) continue;
      int overlap = 0;
      int shared = 0;
      for (const auto& arg : pred.calls[i].args) {
        if (const Value* ref = find_member(gt.calls[j].args, arg.key)) {
          ++shared;
          if (arg.value == *ref) ++overlap;
        }
      }
      candidates.push_back(Candidate{overlap, shared, i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(y.overlap, y.shared, x.pred, x.ref) < std::tie(x.overlap, x.shared, y.pred, y.ref);
  });
  std::vector<bool> pred_used(pred.calls.size(), false);
  std::vector<bool> ref_used(gt.calls.size(), false);
  int errors = 0;
  for (const auto& c : candidates) {
    if (pred_used[c.pred] || ref_used[c.ref]) continue;
    pred_used[c.pred] = true;
    ref_used[c.ref] = true;
    errors += c.shared - c.overlap;
  }
  return errors;
}

StrictResult strict_reward(const StructuredResponse& pred, const AnswerSet& gt,
                           const RewardConfig& cfg) {
  StrictResult out;
  const bool matched = answers_match(pred, gt);
  double base = matched ? 1.0 : 0.0;
  double bonus = 0.0;
  if (matched && gt.calls.size() >= 2) {
    bonus = cfg.multi_tool_bonus;
    out.multi_tool_applied = true;
  }
  if (!matched && pred.parsed) out.value_errors = count_value_errors(*pred.parsed, gt);
  double raw = base + bonus - cfg.value_error_penalty * out.value_errors;
  out.reward = std::clamp(raw, cfg.strict_clamp_min, 1.0 + cfg.multi_tool_bonus);
  return out;
}

double sigma(std::int64_t step, const RewardConfig& cfg) {
  if (step < 0) throw InvalidArgument("training step must be >= 0");
  const double x = cfg.kappa * static_cast<double>(step - cfg.midpoint);
  double s = 0.0;
  if (x >= 0) {
    // 1 - e/(1+e) keeps resolution just below 1 better than 1/(1+e).
    const double e = std::exp(-x);
    s = 1.0 - e / (1.0 + e);
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  return std::clamp(s, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
}

double format_reward(const StructuredResponse& pred) { return pred.well_formed() ? 1.0 : 0.0; }

RewardBreakdown compute_reward_with_sigma(std::string_view pred_raw, const AnswerSet& gt,
                                          std::string_view gt_text, double sigma_value,
                                          const RewardConfig& cfg) {
  StructuredResponse pred = parse_structured_response(pred_raw);
  RewardBreakdown out;
  out.format = format_reward(pred);
  std::string_view scored = pred_raw;
  if (cfg.general_reward_scope == GeneralScope::answer && pred.answer) scored = *pred.answer;
  out.general = general_reward(scored, gt_text, cfg);
  StrictResult strict = strict_reward(pred, gt, cfg);
  out.strict = strict.reward;
  out.value_errors = strict.value_errors;
  out.multi_tool_applied = strict.multi_tool_applied;
  out.sigma = sigma_value;
  out.tool = sigma_value * out.strict + (1.0 - sigma_value) * out.general;
  out.final = cfg.format_weight * out.format + out.tool;
  return out;
}

RewardBreakdown compute_reward(std::string_view pred_raw, const AnswerSet& gt,
                               std::string_view gt_text, std::int64_t step,
                               const RewardConfig& cfg) {
  return compute_reward_with_sigma(pred_raw, gt, gt_text, sigma(step, cfg), cfg);
}

}  // namespace tcrl
