#include "tcrl/api.hpp"

#include <exception>

#include "tcrl/errors.hpp"
#include "tcrl/grpo.hpp"
#include "tcrl/json_value.hpp"
#include "tcrl/reward.hpp"

namespace tcrl::api {

AnswerSet reference_answer(std::string_view gt_text) {
  auto parsed = try_parse_answer(gt_text);
  return parsed ? std::move(*parsed) : AnswerSet::response(std::string(gt_text));
}

namespace {

RewardConfig config_from(const Value& config) {
  return config.is_null() ? RewardConfig{} : RewardConfig::from_value(config);
}

}  // namespace

Value compute_reward(std::string_view pred, std::string_view gt_text, std::int64_t step,
                     const Value& config) {
  const RewardConfig cfg = config_from(config);
  return tcrl::compute_reward(pred, reference_answer(gt_text), gt_text, step, cfg).to_value();
}

List batch_rewards(const std::vector<std::string>& preds, const std::vector<std::string>& gts,
                   std::int64_t step, const Value& config) {
  if (preds.size() != gts.size()) {
    throw InvalidArgument("batch lengths differ: " + std::to_string(preds.size()) + " predictions, " +
                          std::to_string(gts.size()) + " references");
  }
  const RewardConfig cfg = config_from(config);
  List out;
  out.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out.push_back(
        tcrl::compute_reward(preds[i], reference_answer(gts[i]), gts[i], step, cfg).to_value());
  }
  return out;
}

Value parse_call_expression(std::string_view text) {
  return answer_to_value(tcrl::parse_call_expression(text));
}

Value parse_json_calls(std::string_view text, bool lenient_arguments) {
  return answer_to_value(tcrl::parse_json_calls(text, JsonCallOptions{lenient_arguments}));
}

bool ast_equal(const Value& a, const Value& b) {
  return tcrl::ast_equal(answer_from_value(a), answer_from_value(b));
}

List compute_advantages(const List& rewards, double std_floor) {
  std::vector<double> r;
  for (const auto& v : rewards) {
    if (!v.is_number()) throw InvalidArgument("rewards must be numbers");
    r.push_back(v.as_number().to_double());
  }
  GrpoConfig cfg;
  cfg.std_floor = std_floor;
  cfg.validate();
  List out;
  for (double a : tcrl::compute_advantages(r, cfg)) out.push_back(Value(Decimal::from_double(a, true)));
  return out;
}

namespace {

const Value& arg(const Object& args, std::string_view key) {
  const Value* v = find_member(args, key);
  if (!v) throw InvalidArgument("missing argument \"" + std::string(key) + "\"");
  return *v;
}

const std::string& string_arg(const Object& args, std::string_view key) {
  const Value& v = arg(args, key);
  if (!v.is_string()) throw InvalidArgument("argument \"" + std::string(key) + "\" must be a string");
  return v.as_string();
}

std::vector<std::string> string_list_arg(const Object& args, std::string_view key) {
  const Value& v = arg(args, key);
  if (!v.is_list()) throw InvalidArgument("argument \"" + std::string(key) + "\" must be a list");
  std::vector<std::string> out;
  for (const auto& e : v.as_list()) {
    if (!e.is_string()) throw InvalidArgument("argument \"" + std::string(key) + "\" must hold strings");
    out.push_back(e.as_string());
  }
  return out;
}

std::int64_t int_arg(const Object& args, std::string_view key) {
  const Value& v = arg(args, key);
  if (!v.is_number()) throw InvalidArgument("argument \"" + std::string(key) + "\" must be a number");
  const double d = v.as_number().to_double();
  if (d != static_cast<double>(static_cast<std::int64_t>(d))) {
    throw InvalidArgument("argument \"" + std::string(key) + "\" must be an integer");
  }
  return static_cast<std::int64_t>(d);
}

Value dispatch(const std::string& op, const Object& args) {
  const Value* config = find_member(args, "config");
  const Value none;
  if (op == "compute_reward") {
    return compute_reward(string_arg(args, "pred"), string_arg(args, "gt_text"),
                          int_arg(args, "step"), config ? *config : none);
  }
  if (op == "batch_rewards") {
    return Value(batch_rewards(string_list_arg(args, "preds"), string_list_arg(args, "gts"),
                               int_arg(args, "step"), config ? *config : none));
  }
  if (op == "parse_call_expression") return parse_call_expression(string_arg(args, "text"));
  if (op == "parse_json_calls") {
    const Value* lenient = find_member(args, "lenient_arguments");
    return parse_json_calls(string_arg(args, "text"), lenient && lenient->is_bool() && lenient->as_bool());
  }
  if (op == "ast_equal") return Value(ast_equal(arg(args, "a"), arg(args, "b")));
  if (op == "compute_advantages") {
    const Value& rewards = arg(args, "rewards");
    if (!rewards.is_list()) throw InvalidArgument("argument \"rewards\" must be a list");
    const Value* floor = find_member(args, "std_floor");
    return Value(compute_advantages(rewards.as_list(),
                                    floor && floor->is_number() ? floor->as_number().to_double() : 1e-8));
  }
  throw InvalidArgument("unknown op \"" + op + "\"");
}

}  // namespace

std::string call(std::string_view request) {
  Object response;
  try {
    const Value req = parse_json(request);
    if (!req.is_object()) throw InvalidArgument("request must be a JSON object");
    const Value* op = find_member(req.as_object(), "op");
    if (!op || !op->is_string()) throw InvalidArgument("request needs a string \"op\"");
    const Value* args = find_member(req.as_object(), "args");
    const Object empty;
    if (args && !args->is_object()) throw InvalidArgument("\"args\" must be an object");
    response.push_back(Member{"ok", dispatch(op->as_string(), args ? args->as_object() : empty)});
  } catch (const Error& e) {
    Object err;
    err.push_back(Member{"kind", Value(e.kind())});
    err.push_back(Member{"message", Value(e.what())});
    response.push_back(Member{"error", Value(std::move(err))});
  } catch (const std::exception& e) {
    Object err;
    err.push_back(Member{"kind", Value("InternalError")});
    err.push_back(Member{"message", Value(e.what())});
    response.clear();
    response.push_back(Member{"error", Value(std::move(err))});
  }
  return dump_json(Value(std::move(response)));
}

}  // namespace tcrl::api
