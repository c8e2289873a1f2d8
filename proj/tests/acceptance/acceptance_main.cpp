// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tcrl/eval.hpp"
#include "tcrl/grpo.hpp"
#include "tcrl/io.hpp"
#include "tcrl/json_value.hpp"
#include "tcrl/pipeline.hpp"
#include "tcrl/reward.hpp"
#include "tcrl/toolcall.hpp"
#include "tcrl/train_sim.hpp"

using namespace tcrl;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond && failures_.size() < 5) failures_.push_back(what);
    ok_ = ok_ && cond;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  Outcome result() const {
    Outcome o{ok_, notes_};
    for (const auto& f : failures_) o.detail += (o.detail.empty() ? "" : "; ") + std::string("failed: ") + f;
    return o;
  }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const RewardConfig kReward{};
const GrpoConfig kGrpo{};

// --- 1 ----------------------------------------------------------------------

std::string random_prediction(oracle::AnswerGenerator& gen, const AnswerSet& gt) {
  const auto kind = gen.below(5);
  std::string answer;
  if (kind == 0) {
    answer = print_call_expression(gt);
  } else if (kind == 1) {
    AnswerSet p = gt;
    for (auto& c : p.calls) {
      for (auto& a : c.args) {
        if (gen.coin()) a.value = gen.mutate(a.value);
      }
    }
    answer = print_call_expression(p);
  } else if (kind == 2) {
    answer = print_call_expression(gen.answer(3, 3));
  } else if (kind == 3) {
    for (int i = 0, n = static_cast<int>(gen.below(8)); i < n; ++i) answer += gen.word() + " ";
  } else {
    const std::string text = print_call_expression(gt);
    answer = text.substr(0, gen.below(text.size() + 1));
  }
  switch (gen.below(3)) {
    case 0: return wrap_response("thinking", answer);
    case 1: return answer;
    default: return "<think>" + answer;
  }
}

Outcome reward_bounds() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  oracle::AnswerGenerator gen(101);
  for (int i = 0; i < 10000; ++i) {
    const AnswerSet gt = gen.answer(3, 3);
    const std::string gt_text = print_call_expression(gt);
    const std::string pred = random_prediction(gen, gt);
    const auto step = static_cast<std::int64_t>(gen.below(1001));
    const RewardBreakdown b = compute_reward(pred, gt, gt_text, step, kReward);
    const std::string at = " at triple " + std::to_string(i);
    c.expect(b.general >= -0.5 && b.general <= 0.5, "general in [-0.5, 0.5]" + at);
    c.expect(b.strict >= -1.0 && b.strict <= 1.3, "strict in [-1, 1.3]" + at);
    c.expect(b.sigma > 0.0 && b.sigma < 1.0, "sigma in (0, 1)" + at);
    c.expect(std::abs(b.tool - (b.sigma * b.strict + (1 - b.sigma) * b.general)) <= 1e-12,
             "tool identity" + at);
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 10.0, "runtime under 10 s");
  c.note("10000 triples in " + fmt(secs) + " s");
  return c.result();
}

// --- 2 ----------------------------------------------------------------------

Outcome overlap_example() {
  Checker c;
  const char* paris = R"([get_weather(city="Paris", unit="C")])";
  const char* london = R"([get_weather(city="London", unit="C")])";
  const double partial = general_reward(london, paris, kReward);
  const double exact = general_reward(paris, paris, kReward);
  const double disjoint = general_reward("book_flight(origin=NYC)", paris, kReward);
  c.expect(partial == 0.3, "London vs Paris == 0.3 exactly, got " + fmt(partial));
  c.expect(exact == 0.5, "exact match == 0.5, got " + fmt(exact));
  c.expect(disjoint == -0.5, "disjoint == -0.5, got " + fmt(disjoint));
  c.note("0.3 / 0.5 / -0.5");
  return c.result();
}

// --- 3 ----------------------------------------------------------------------

Outcome sigmoid_checkpoints() {
  Checker c;
  for (std::int64_t m : {0, 10, 25, 100}) {
    RewardConfig cfg;
    cfg.midpoint = m;
    c.expect(sigma(m, cfg) == 0.5, "sigma(m) == 0.5 for m=" + std::to_string(m));
  }
  const double s0 = sigma(0, kReward);
  c.expect(std::abs(s0 - 0.00669285) <= 1e-9, "sigma(0) within 1e-9 of 0.00669285, got " + fmt(s0));
  for (std::int64_t t = 1; t <= 200; ++t) {
    c.expect(sigma(t, kReward) > sigma(t - 1, kReward), "strictly increasing at t=" + std::to_string(t));
  }
  c.note("sigma(0)=" + fmt(s0));
  return c.result();
}

// --- 4 ----------------------------------------------------------------------

double strict_of(const std::string& answer, const AnswerSet& gt) {
  return strict_reward(parse_structured_response(wrap_response("", answer)), gt, kReward).reward;
}

Outcome ast_invariance() {
  Checker c;
  oracle::AnswerGenerator gen(404);
  int mutated = 0;
  for (int i = 0; i < 1000; ++i) {
    const AnswerSet gt = gen.answer(3, 3);
    const double expected = gt.calls.size() > 1 ? 1.3 : 1.0;
    const std::string at = " for answer " + std::to_string(i);
    c.expect(strict_of(print_call_expression(gt), gt) == expected, "canonical spelling" + at);

    oracle::Spelling arg_perm;
    for (const auto& call : gt.calls) {
      std::vector<std::size_t> order(call.args.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::shuffle(order.begin(), order.end(), gen.rng());
      arg_perm.arg_order.push_back(order);
    }
    c.expect(strict_of(oracle::print_answer(gt, arg_perm), gt) == expected, "argument permutation" + at);

    oracle::Spelling call_perm;
    for (std::size_t k = 0; k < gt.calls.size(); ++k) call_perm.call_order.push_back(k);
    std::shuffle(call_perm.call_order.begin(), call_perm.call_order.end(), gen.rng());
    c.expect(strict_of(oracle::print_answer(gt, call_perm), gt) == expected, "call permutation" + at);

    oracle::Spelling spaced;
    spaced.whitespace = &gen.rng();
    c.expect(strict_of(oracle::print_answer(gt, spaced), gt) == expected, "whitespace injection" + at);

    oracle::Spelling quotes;
    quotes.single_quotes = true;
    c.expect(strict_of(oracle::print_answer(gt, quotes), gt) == expected, "quote flip" + at);

    oracle::Spelling numbers;
    numbers.flip_integral_numbers = true;
    c.expect(strict_of(oracle::print_answer(gt, numbers), gt) == expected, "2 <-> 2.0" + at);

    // one value mutation
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t k = 0; k < gt.calls.size(); ++k) {
      for (std::size_t j = 0; j < gt.calls[k].args.size(); ++j) slots.push_back({k, j});
    }
    if (slots.empty()) continue;
    const auto [k, j] = slots[gen.below(slots.size())];
    AnswerSet pred = gt;
    pred.calls[k].args[j].value = gen.mutate(pred.calls[k].args[j].value);
    const auto r = strict_reward(parse_structured_response(wrap_response("", print_call_expression(pred))), gt,
                                 kReward);
    c.expect(!ast_equal(pred, gt), "mutation breaks AST equality" + at);
    c.expect(r.value_errors == 1, "value_errors == 1" + at);
    c.expect(r.reward == 0.0 - kReward.value_error_penalty, "strict == base 0 minus one penalty" + at);
    ++mutated;
  }
  c.note("1000 answers, " + std::to_string(mutated) + " mutated");
  return c.result();
}

// --- 5 ----------------------------------------------------------------------

Outcome grpo_oracle() {
  Checker c;
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(-1.5, 2.5);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    std::vector<double> r(2 + rng() % 15);
    for (double& x : r) x = (rng() % 4 == 0) ? std::round(u(rng)) : u(rng);
    const auto a = compute_advantages(r, kGrpo);
    const auto o = oracle::advantages(r, kGrpo.std_floor);
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(a[i] - o[i]));
  }
  c.expect(worst <= 1e-12, "advantages within 1e-12 of oracle, worst " + fmt(worst));

  const std::vector<double> two{1, 0};
  c.expect(compute_advantages(two, kGrpo) == std::vector<double>{1, -1}, "[1,0] -> [1,-1]");
  const std::vector<double> eight{1, 0, 0, 0, 0, 0, 0, 0};
  const auto a8 = compute_advantages(eight, kGrpo);
  c.expect(std::abs(a8[0] - std::sqrt(7.0)) <= 1e-12 && std::abs(a8[0] - 2.6458) <= 5e-5,
           "G=8 single hit: 2.6458, got " + fmt(a8[0]));
  bool rest = true;
  for (std::size_t i = 1; i < 8; ++i) rest = rest && std::abs(a8[i] + 1.0 / std::sqrt(7.0)) <= 1e-12;
  c.expect(rest && std::abs(a8[1] + 0.3780) <= 5e-5, "G=8 others: -0.3780, got " + fmt(a8[1]));

  double fd_worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = oracle::random_gradient_instance(seed, kGrpo.epsilon);
    fd_worst = std::max(fd_worst, oracle::gradient_relative_error(inst, kGrpo, 1e-6));
  }
  c.expect(fd_worst <= 1e-5, "gradient vs central differences within 1e-5 relative, worst " + fmt(fd_worst));
  c.note("advantage err " + fmt(worst) + ", FD rel err " + fmt(fd_worst));
  return c.result();
}

// --- 6 ----------------------------------------------------------------------

RolloutGroup single_token(double old_lp, double new_lp, double advantage) {
  RolloutGroup g;
  g.prompt_id = "p";
  Completion comp;
  comp.tokens = {0};
  comp.old_logprobs = {old_lp};
  comp.new_logprobs = {new_lp};
  g.completions.push_back(comp);
  g.advantages = std::vector<double>{advantage};
  return g;
}

double objective(const RolloutGroup& g) { return grpo_objective(std::span<const RolloutGroup>(&g, 1), kGrpo); }

Outcome clipping() {
  Checker c;
  const double one = objective(single_token(-1, -1, 1.0));
  const double up = objective(single_token(-1, -1 + std::log(1.5), 1.0));
  const double down = objective(single_token(-1, -1 + std::log(0.5), -1.0));
  c.expect(one == 1.0, "rho=1, A=1 -> 1.0, got " + fmt(one));
  c.expect(std::abs(up - 1.2) <= 1e-15, "rho=1.5, A=1 -> 1.2, got " + fmt(up));
  c.expect(std::abs(down + 0.8) <= 1e-15, "rho=0.5, A=-1 -> -0.8, got " + fmt(down));

  // Deadzone: rho > 1+eps with A > 0, rho < 1-eps with A < 0.
  for (double rho : {1.3, 1.5, 2.0, 4.0}) {
    const double base = objective(single_token(-1, -1 + std::log(rho), 1.0));
    for (double d : {1e-6, 1e-3, 0.05}) {
      c.expect(objective(single_token(-1, -1 + std::log(rho + d), 1.0)) == base,
               "upper deadzone unchanged at rho=" + fmt(rho));
    }
  }
  for (double rho : {0.1, 0.5, 0.7}) {
    const double base = objective(single_token(-1, -1 + std::log(rho), -1.0));
    for (double d : {1e-6, 1e-3, 0.05}) {
      c.expect(objective(single_token(-1, -1 + std::log(rho - d), -1.0)) == base,
               "lower deadzone unchanged at rho=" + fmt(rho));
    }
  }
  c.note("1.0 / 1.2 / -0.8");
  return c.result();
}

// --- 7 ----------------------------------------------------------------------

ToyTask load_task(const char* name) { return ToyTask::from_json(read_text(oracle::data_path(name))); }

Outcome simulator() {
  Checker c;
  const ToyTask task = load_task("tasks/default_task.json");
  SimConfig cfg;
  cfg.seed = 7;
  cfg.steps = 300;
  const auto t0 = std::chrono::steady_clock::now();
  const TrainingLog log = train(task, cfg);
  const double secs = seconds_since(t0);
  const std::string first = log.to_jsonl();
  const std::string second = train(task, cfg).to_jsonl();
  const double em = log.records.empty() ? 0.0 : log.records.back().exact_match_rate;
  c.expect(log.records.size() == 300, "300 logged steps");
  c.expect(em >= 0.9, "exact_match_rate >= 0.9 at the last step, got " + fmt(em));
  c.expect(first == second, "byte-identical rerun");
  c.expect(first == read_text(oracle::fixture_path("sim_default_seed7.jsonl")), "matches committed log");
  c.expect(secs < 60.0, "runtime under 60 s");
  c.note("seed 7, final em " + fmt(em) + ", " + fmt(secs) + " s");
  return c.result();
}

// --- 8 ----------------------------------------------------------------------

Outcome schedule_comparison() {
  Checker c;
  const ToyTask task = load_task("tasks/sparse_task.json");
  for (std::uint64_t seed : {1, 2, 3}) {
    SimConfig cfg;
    cfg.seed = seed;
    const double gg = train(task, cfg).records.back().mean_reward;
    cfg.schedule = Schedule::strict_only;
    const double strict = train(task, cfg).records.back().mean_reward;
    c.expect(gg >= strict, "seed " + std::to_string(seed) + ": GG " + fmt(gg) + " >= strict " + fmt(strict));
    c.note("seed " + std::to_string(seed) + " GG " + fmt(gg) + " vs strict " + fmt(strict));
  }
  return c.result();
}

// --- 9 ----------------------------------------------------------------------

Outcome pipeline_fixtures() {
  Checker c;
  const FilterResult filtered = filter_corpus(split_lines(read_text(oracle::fixture_path("filter_10.jsonl"))));
  c.expect(dump_json(filtered.report.to_value()) ==
               dump_json(parse_json(read_text(oracle::fixture_path("filter_10_expected.json")))),
           "filter report equals fixture");
  c.expect(filtered.report.kept == 7, "kept == 7");

  const auto singles =
      filter_corpus(split_lines(read_text(oracle::fixture_path("xlam_singles.jsonl")))).kept;
  std::vector<Sample> corpus = filtered.kept;
  corpus.insert(corpus.end(), singles.begin(), singles.end());
  for (const auto& s : corpus) {
    const MaskResult m = mask_sample(s);
    c.expect(sample_to_json(unmask_sample(m.sample, m.mapping)) == sample_to_json(s), "mask round trip " + s.id);
  }

  oracle::AnswerGenerator gen(909);
  for (int i = 0; i < 500; ++i) {
    const AnswerSet gt = gen.answer(3, 3);
    AnswerSet pred = gen.coin(0.3) ? gen.answer(3, 3) : gt;
    if (gen.coin()) {
      auto& call = pred.calls[gen.below(pred.calls.size())];
      if (!call.args.empty()) call.args[0].value = gen.mutate(call.args[0].value);
    }
    MaskMapping mapping;
    for (std::size_t k = 0; k < gt.calls.size(); ++k) {
      mapping.functions.push_back({gt.calls[k].name, "func_" + std::to_string(k + 1)});
      for (std::size_t j = 0; j < gt.calls[k].args.size(); ++j) {
        mapping.parameters.push_back({{gt.calls[k].name, gt.calls[k].args[j].key}, "param_" + std::to_string(j + 1)});
      }
    }
    const std::string text = print_call_expression(pred);
    const auto plain = strict_reward(parse_structured_response(wrap_response("", text)), gt, kReward);
    const auto masked = strict_reward(parse_structured_response(wrap_response("", mask_answer_text(text, mapping))),
                                      mask_answer(gt, mapping), kReward);
    c.expect(plain.reward == masked.reward && plain.value_errors == masked.value_errors,
             "strict reward invariant under masking, pair " + std::to_string(i));
  }

  std::size_t augmented = 0;
  for (Strategy st : {Strategy::combine, Strategy::tool_removal, Strategy::param_clarification,
                      Strategy::result_validation}) {
    const AugmentResult r = augment_multi_turn(singles, st, 11);
    augmented += r.samples.size();
    const FilterResult again = filter_corpus(split_lines(samples_to_jsonl(r.samples)));
    c.expect(again.report.kept == r.samples.size(), std::string("augmented samples re-pass filter: ") +
                                                        std::string(to_string(st)));
  }
  c.expect(augmented > 0, "augmentation produced samples");

  const auto stats_corpus =
      filter_corpus(split_lines(read_text(oracle::fixture_path("stats_corpus.jsonl")))).kept;
  c.expect(corpus_stats(stats_corpus).to_value() == parse_json(read_text(oracle::fixture_path("stats_expected.json"))),
           "stats grid equals hand census");
  c.note("kept 7, " + std::to_string(corpus.size()) + " round trips, 500 masking pairs, " +
         std::to_string(augmented) + " augmented samples");
  return c.result();
}

// --- 10 ---------------------------------------------------------------------

Outcome eval_metrics() {
  Checker c;
  const EvalReport r = evaluate({EvalRecord{"a", wrap_response("", "[f(a=1)]"), parse_call_expression("[f(a=1), g(b=2)]")}});
  c.expect(r.function_f1 == 2.0 / 3.0, "function F1 == 2/3, got " + fmt(r.function_f1));
  const double ov = overlap_rate({"a", "b", "c"}, {"b", "c", "d", "e"});
  c.expect(std::abs(ov - 66.67) <= 0.01, "overlap 66.67 +- 0.01, got " + fmt(ov));
  c.expect(overlap_rate({"x", "y"}, {"z"}) == 0.0, "disjoint -> 0");
  std::mt19937_64 rng(1010);
  for (int i = 0; i < 1000; ++i) {
    ToolSet a, b;
    while (a.empty()) for (int k = 0; k < 10; ++k) if (rng() % 3 == 0) a.insert("t" + std::to_string(k));
    while (b.empty()) for (int k = 0; k < 10; ++k) if (rng() % 3 == 0) b.insert("t" + std::to_string(k));
    c.expect(overlap_rate(a, b) == overlap_rate(b, a), "symmetry, pair " + std::to_string(i));
  }
  c.note("F1 " + fmt(r.function_f1) + ", overlap " + fmt(ov));
  return c.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"reward-bounds", reward_bounds},
      {"overlap-reward-example", overlap_example},
      {"sigmoid-checkpoints", sigmoid_checkpoints},
      {"ast-invariance", ast_invariance},
      {"grpo-oracle", grpo_oracle},
      {"clipping", clipping},
      {"simulator-regression", simulator},
      {"schedule-comparison", schedule_comparison},
      {"pipeline-fixtures", pipeline_fixtures},
      {"eval-metrics", eval_metrics},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    if (!o.ok) ++failed;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (checks.size() - failed) << "/" << checks.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
