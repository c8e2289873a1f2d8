#include "tcrl/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <unordered_set>

#include "tcrl/errors.hpp"
#include "tcrl/reward.hpp"

namespace tcrl {

EvalRecord eval_record_from_value(const Value& v) {
  if (!v.is_object()) throw SchemaError("eval record must be an object");
  EvalRecord r;
  const Value* id = find_member(v.as_object(), "id");
  const Value* pred = find_member(v.as_object(), "prediction");
  const Value* gt = find_member(v.as_object(), "gt");
  const Value* gt_text = find_member(v.as_object(), "gt_text");
  if (!id || !id->is_string()) throw SchemaError("eval record needs a string \"id\"");
  if (!pred || !pred->is_string()) throw SchemaError("eval record needs a string \"prediction\"");
  r.id = id->as_string();
  r.prediction = pred->as_string();
  if (gt) {
    r.gt = answer_from_value(*gt);
  } else if (gt_text && gt_text->is_string()) {
    auto parsed = try_parse_answer(gt_text->as_string());
    r.gt = parsed ? std::move(*parsed) : AnswerSet::response(gt_text->as_string());
  } else {
    throw SchemaError("eval record needs \"gt\" or \"gt_text\"");
  }
  return r;
}

namespace {

struct ParamInstance {
  const std::string* call;
  const std::string* param;
  const Value* value;
};

std::vector<ParamInstance> param_instances(const AnswerSet& a) {
  std::vector<ParamInstance> out;
  for (const auto& c : a.calls) {
    for (const auto& m : c.args) out.push_back({&c.name, &m.key, &m.value});
  }
  return out;
}

// Size of the multiset intersection under an equivalence relation.
template <typename T, typename Eq>
std::size_t matched_count(const std::vector<T>& pred, const std::vector<T>& gt, Eq eq) {
  std::vector<bool> used(gt.size(), false);
  std::size_t hits = 0;
  for (const auto& p : pred) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (!used[j] && eq(p, gt[j])) {
        used[j] = true;
        ++hits;
        break;
      }
    }
  }
  return hits;
}

double micro_f1(std::size_t tp, std::size_t n_pred, std::size_t n_gt) {
  if (n_pred + n_gt == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(n_pred + n_gt);
}

}  // namespace

EvalReport evaluate(const std::vector<EvalRecord>& records, EvalOptions options) {
  EvalReport rep;
  std::unordered_set<std::string> ids;
  std::size_t matched = 0;
  std::size_t fn_tp = 0, fn_pred = 0, fn_gt = 0;
  std::size_t pa_tp = 0, pa_pred = 0, pa_gt = 0;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw InvalidArgument("duplicate eval id \"" + r.id + "\"");
    StructuredResponse sr = parse_structured_response(r.prediction);
    if (!sr.well_formed()) {
      sr.answer = r.prediction;
      sr.parsed = try_parse_answer(r.prediction);
    }
    SampleScore score{r.id, answers_match(sr, r.gt), 0};
    const AnswerSet empty;
    const AnswerSet& pred = sr.parsed ? *sr.parsed : empty;
    if (!score.matched && sr.parsed) score.value_errors = count_value_errors(pred, r.gt);
    matched += score.matched ? 1 : 0;

    std::vector<std::string> pn, gn;
    for (const auto& c : pred.calls) pn.push_back(c.name);
    for (const auto& c : r.gt.calls) gn.push_back(c.name);
    fn_tp += matched_count(pn, gn, std::equal_to<>{});
    fn_pred += pn.size();
    fn_gt += gn.size();

    const auto pp = param_instances(pred);
    const auto gp = param_instances(r.gt);
    const bool names_only = options.param_f1_names_only;
    pa_tp += matched_count(pp, gp, [names_only](const ParamInstance& a, const ParamInstance& b) {
      return *a.call == *b.call && *a.param == *b.param && (names_only || *a.value == *b.value);
    });
    pa_pred += pp.size();
    pa_gt += gp.size();
    rep.per_sample.push_back(std::move(score));
  }
  rep.ast_accuracy =
      records.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(records.size());
  rep.function_f1 = micro_f1(fn_tp, fn_pred, fn_gt);
  rep.parameter_f1 = micro_f1(pa_tp, pa_pred, pa_gt);
  return rep;
}

Value EvalReport::to_value() const {
  Object o;
  o.push_back(Member{"ast_accuracy", Value(Decimal::from_double(ast_accuracy, true))});
  o.push_back(Member{"function_f1", Value(Decimal::from_double(function_f1, true))});
  o.push_back(Member{"parameter_f1", Value(Decimal::from_double(parameter_f1, true))});
  List rows;
  for (const auto& s : per_sample) {
    Object r;
    r.push_back(Member{"id", Value(s.id)});
    r.push_back(Member{"matched", Value(s.matched)});
    r.push_back(Member{"value_errors", Value::integer(s.value_errors)});
    rows.push_back(Value(std::move(r)));
  }
  o.push_back(Member{"per_sample", Value(std::move(rows))});
  return Value(std::move(o));
}

std::string EvalReport::to_text() const {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "samples       %zu\nast_accuracy  %.4f\nfunction_f1   %.4f\nparameter_f1  %.4f\n",
                per_sample.size(), ast_accuracy, function_f1, parameter_f1);
  return buf;
}

double overlap_rate(const ToolSet& a, const ToolSet& b) {
  if (a.empty() || b.empty()) throw EmptyToolset("overlap rate needs two non-empty toolsets");
  std::size_t shared = 0;
  for (const auto& name : a) shared += b.count(name);
  return static_cast<double>(shared) / static_cast<double>(std::min(a.size(), b.size())) * 100.0;
}

OverlapMatrix overlap_matrix(const std::vector<std::pair<std::string, ToolSet>>& inventories) {
  if (inventories.size() < 2) throw InvalidArgument("overlap matrix needs at least two inventories");
  OverlapMatrix m;
  const std::size_t n = inventories.size();
  m.rates.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m.names.push_back(inventories[i].first);
    for (std::size_t j = 0; j < n; ++j) {
      m.rates[i][j] = overlap_rate(inventories[i].second, inventories[j].second);
    }
  }
  return m;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string OverlapMatrix::to_csv() const {
  std::string out = "dataset";
  for (const auto& n : names) out += "," + csv_field(n);
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += csv_field(names[i]);
    for (double r : rates[i]) {
      std::snprintf(buf, sizeof buf, ",%.2f", r);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::vector<std::pair<std::string, ToolSet>> inventories_from_value(const Value& v) {
  if (!v.is_object()) throw SchemaError("inventories must be a JSON object");
  std::vector<std::pair<std::string, ToolSet>> out;
  for (const auto& m : v.as_object()) {
    if (!m.value.is_list()) throw SchemaError("inventory \"" + m.key + "\" must be an array");
    ToolSet names;
    for (const auto& e : m.value.as_list()) {
      if (!e.is_string()) throw SchemaError("inventory \"" + m.key + "\" holds a non-string");
      names.insert(e.as_string());
    }
    out.emplace_back(m.key, std::move(names));
  }
  return out;
}

}  // namespace tcrl
