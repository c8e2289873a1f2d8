// tcrl: corpus preparation, reward scoring, simulation and evaluation from the
// command line. Exit status: 0 success, 1 validation error, 2 I/O error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcrl/api.hpp"
#include "tcrl/errors.hpp"
#include "tcrl/eval.hpp"
#include "tcrl/io.hpp"
#include "tcrl/json_value.hpp"
#include "tcrl/pipeline.hpp"
#include "tcrl/reward.hpp"
#include "tcrl/train_sim.hpp"

namespace {

using namespace tcrl;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIoFailure = 2;

// Flag defaults from the --config file. Sections are named after the
// subcommand; "seed" and "quiet" live at the top level.
class ConfigDefaults {
 public:
  void load(const std::string& path) {
    try {
      root_ = parse_json(read_text(path));
    } catch (const ParseError& e) {
      throw ConfigError("config " + path + ": " + e.what());
    }
    if (!root_.is_object()) throw ConfigError("config " + path + " must hold a JSON object");
  }

  const Value* find(std::string_view section, std::string_view key) const {
    if (!root_.is_object()) return nullptr;
    const Value* scope = section.empty() ? &root_ : find_member(root_.as_object(), section);
    if (!scope || !scope->is_object()) return nullptr;
    return find_member(scope->as_object(), key);
  }

  const Value* top(std::string_view key) const { return find("", key); }

  void fill(std::string& out, std::string_view section, std::string_view key) const {
    if (!out.empty()) return;
    if (const Value* v = find(section, key)) {
      if (!v->is_string()) throw ConfigError("config " + std::string(section) + "." + std::string(key) + " must be a string");
      out = v->as_string();
    }
  }

  void fill(bool& out, std::size_t given, std::string_view section, std::string_view key) const {
    if (given) return;
    if (const Value* v = find(section, key)) {
      if (!v->is_bool()) throw ConfigError("config " + std::string(section) + "." + std::string(key) + " must be a boolean");
      out = v->as_bool();
    }
  }

  void fill(std::optional<std::int64_t>& out, std::string_view section, std::string_view key) const {
    if (out) return;
    if (const Value* v = find(section, key)) {
      if (!v->is_number()) throw ConfigError("config " + std::string(section) + "." + std::string(key) + " must be a number");
      out = static_cast<std::int64_t>(v->as_number().to_double());
    }
  }

 private:
  Value root_;
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw InvalidArgument(std::string("missing ") + flag);
}

std::vector<Sample> read_samples(const std::string& path) {
  std::vector<std::size_t> numbers;
  const auto lines = split_lines(read_text(path), &numbers);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(sample_from_value(parse_json(lines[i])));
    } catch (const Error& e) {
      throw SchemaError(path + ":" + std::to_string(numbers[i]) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
std::vector<T> split_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    auto parsed = Decimal::from_text(item);
    if (!parsed) throw InvalidArgument(std::string(flag) + ": \"" + item + "\" is not a number");
    out.push_back(static_cast<T>(parsed->to_double()));
    start = end + 1;
  }
  return out;
}

struct Globals {
  std::string config_path;
  std::optional<std::int64_t> seed;
  bool quiet = false;
  ConfigDefaults config;

  void note(const std::string& line) const {
    if (!quiet) std::cerr << line << '\n';
  }

  std::uint64_t required_seed(const char* command) const {
    if (!seed) throw InvalidArgument(std::string(command) + " needs --seed");
    return static_cast<std::uint64_t>(*seed);
  }

  RewardConfig reward() const {
    const Value* v = config.top("reward");
    return v ? RewardConfig::from_value(*v) : RewardConfig{};
  }

  SimConfig sim() const {
    const Value* v = config.top("sim");
    SimConfig cfg = v ? SimConfig::from_value(*v) : SimConfig{};
    if (config.top("reward")) cfg.reward = reward();
    if (seed) cfg.seed = static_cast<std::uint64_t>(*seed);
    cfg.validate();
    return cfg;
  }
};

struct FilterArgs { std::string in, out, report; };
struct MaskArgs { std::string in, out, mapping; };
struct AugmentArgs { std::string in, out, strategies; };
struct RewardArgs {
  std::string pred, gt;
  std::optional<std::int64_t> step;
  bool breakdown = false;
  std::size_t breakdown_given = 0;
};
struct TrainArgs { std::string task, out_log; };
struct AblateArgs { std::string task, midpoints, kappas, out; };
struct EvalArgs {
  std::string pred, out;
  bool names_only = false;
};
struct OverlapArgs { std::string inventories, out; };
struct StatsArgs {
  std::string in;
  bool json = false;
};

int run_filter(FilterArgs a, const Globals& g) {
  g.config.fill(a.in, "filter", "in");
  g.config.fill(a.out, "filter", "out");
  g.config.fill(a.report, "filter", "report");
  require(a.in, "--in");
  require(a.out, "--out");
  std::vector<std::size_t> numbers;
  const auto lines = split_lines(read_text(a.in), &numbers);
  const FilterResult r = filter_corpus(lines, numbers);
  write_text_atomic(a.out, samples_to_jsonl(r.kept));
  if (!a.report.empty()) write_text_atomic(a.report, dump_json(r.report.to_value()) + "\n");
  for (const auto& rej : r.rejections) {
    g.note("line " + std::to_string(rej.line) + ": " + rej.category + ": " + rej.reason);
  }
  g.note(r.report.to_text());
  return kOk;
}

int run_mask(MaskArgs a, const Globals& g) {
  g.config.fill(a.in, "mask", "in");
  g.config.fill(a.out, "mask", "out");
  g.config.fill(a.mapping, "mask", "mapping");
  require(a.in, "--in");
  require(a.out, "--out");
  std::vector<Sample> masked;
  Object mappings;
  for (const auto& s : read_samples(a.in)) {
    MaskResult r = mask_sample(s);
    mappings.push_back(Member{s.id, r.mapping.to_value()});
    masked.push_back(std::move(r.sample));
  }
  write_text_atomic(a.out, samples_to_jsonl(masked));
  if (!a.mapping.empty()) write_text_atomic(a.mapping, dump_json(Value(std::move(mappings))) + "\n");
  g.note("masked " + std::to_string(masked.size()) + " samples");
  return kOk;
}

int run_augment(AugmentArgs a, const Globals& g) {
  g.config.fill(a.in, "augment", "in");
  g.config.fill(a.out, "augment", "out");
  g.config.fill(a.strategies, "augment", "strategies");
  require(a.in, "--in");
  require(a.out, "--out");
  if (a.strategies.empty()) a.strategies = "combine,tool_removal,param_clarification,result_validation";
  const std::uint64_t seed = g.required_seed("augment");
  std::vector<Strategy> strategies;
  std::size_t start = 0;
  while (start <= a.strategies.size()) {
    std::size_t end = a.strategies.find(',', start);
    if (end == std::string::npos) end = a.strategies.size();
    const std::string name = a.strategies.substr(start, end - start);
    auto st = strategy_from_string(name);
    if (!st) throw InvalidArgument("unknown strategy \"" + name + "\"");
    strategies.push_back(*st);
    start = end + 1;
  }
  const std::vector<Sample> corpus = read_samples(a.in);
  std::vector<Sample> out = corpus;
  for (Strategy st : strategies) {
    AugmentResult r = augment_multi_turn(corpus, st, seed);
    g.note(std::string(to_string(st)) + ": " + std::to_string(r.samples.size()) + " generated, " +
           std::to_string(r.skipped.size()) + " skipped");
    for (auto& s : r.samples) out.push_back(std::move(s));
  }
  write_text_atomic(a.out, samples_to_jsonl(out));
  return kOk;
}

int run_reward(RewardArgs a, const Globals& g) {
  g.config.fill(a.pred, "reward", "pred");
  g.config.fill(a.gt, "reward", "gt");
  g.config.fill(a.step, "reward", "step");
  g.config.fill(a.breakdown, a.breakdown_given, "reward", "breakdown");
  require(a.pred, "--pred");
  require(a.gt, "--gt");
  if (!a.step) throw InvalidArgument("missing --step");
  std::string gt_text = read_text(a.gt);
  while (!gt_text.empty() && (gt_text.back() == '\n' || gt_text.back() == '\r')) gt_text.pop_back();
  const std::string pred = read_text(a.pred);
  const RewardBreakdown b = compute_reward(pred, api::reference_answer(gt_text), gt_text, *a.step, g.reward());
  Value out;
  if (a.breakdown) {
    out = b.to_value();
  } else {
    out = Value(Object{Member{"final", Value(Decimal::from_double(b.final, true))}});
  }
  if (!g.quiet) std::cout << dump_json(out) << '\n';
  return kOk;
}

int run_train(TrainArgs a, const Globals& g) {
  g.config.fill(a.task, "train-sim", "task");
  g.config.fill(a.out_log, "train-sim", "out-log");
  require(a.task, "--task");
  require(a.out_log, "--out-log");
  g.required_seed("train-sim");
  const SimConfig cfg = g.sim();
  const ToyTask task = ToyTask::from_json(read_text(a.task), cfg.emit_tags_as_tokens);
  const TrainingLog log = train(task, cfg);
  write_text_atomic(a.out_log, log.to_jsonl());
  if (!log.records.empty()) {
    const StepRecord& last = log.records.back();
    g.note("step " + std::to_string(last.step) + ": mean_reward " + format_number(last.mean_reward) +
           ", exact_match_rate " + format_number(last.exact_match_rate));
  }
  return kOk;
}

int run_ablate(AblateArgs a, const Globals& g) {
  g.config.fill(a.task, "ablate", "task");
  g.config.fill(a.midpoints, "ablate", "midpoints");
  g.config.fill(a.kappas, "ablate", "kappas");
  g.config.fill(a.out, "ablate", "out");
  require(a.task, "--task");
  require(a.out, "--out");
  if (a.midpoints.empty()) a.midpoints = "0,25,50,100";
  if (a.kappas.empty()) a.kappas = "0.2,1.0";
  g.required_seed("ablate");
  const SimConfig cfg = g.sim();
  const ToyTask task = ToyTask::from_json(read_text(a.task), cfg.emit_tags_as_tokens);
  const auto midpoints = split_list<std::int64_t>(a.midpoints, "--midpoints");
  const auto kappas = split_list<double>(a.kappas, "--kappas");
  const AblationReport report = schedule_ablation(task, midpoints, kappas, cfg);
  write_text_atomic(a.out, report.to_csv());
  g.note("ablation: " + std::to_string(report.cells.size()) + " cells");
  return kOk;
}

int run_eval(EvalArgs a, const Globals& g, std::size_t names_only_given) {
  g.config.fill(a.pred, "eval", "pred");
  g.config.fill(a.out, "eval", "out");
  g.config.fill(a.names_only, names_only_given, "eval", "param-f1-names-only");
  require(a.pred, "--pred");
  require(a.out, "--out");
  std::vector<std::size_t> numbers;
  const auto lines = split_lines(read_text(a.pred), &numbers);
  std::vector<EvalRecord> records;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      records.push_back(eval_record_from_value(parse_json(lines[i])));
    } catch (const Error& e) {
      throw SchemaError(a.pred + ":" + std::to_string(numbers[i]) + ": " + e.what());
    }
  }
  const EvalReport report = evaluate(records, EvalOptions{a.names_only});
  write_text_atomic(a.out, dump_json(report.to_value()) + "\n");
  g.note(report.to_text());
  return kOk;
}

int run_overlap(OverlapArgs a, const Globals& g) {
  g.config.fill(a.inventories, "overlap", "inventories");
  g.config.fill(a.out, "overlap", "out");
  require(a.inventories, "--inventories");
  require(a.out, "--out");
  Value inv;
  try {
    inv = parse_json(read_text(a.inventories));
  } catch (const ParseError& e) {
    throw SchemaError(a.inventories + ": " + e.what());
  }
  const OverlapMatrix m = overlap_matrix(inventories_from_value(inv));
  write_text_atomic(a.out, m.to_csv());
  return kOk;
}

int run_stats(StatsArgs a, const Globals& g, std::size_t json_given) {
  g.config.fill(a.in, "stats", "in");
  g.config.fill(a.json, json_given, "stats", "json");
  require(a.in, "--in");
  const StatsTable t = corpus_stats(read_samples(a.in));
  if (!g.quiet) std::cout << (a.json ? dump_json(t.to_value()) + "\n" : t.to_text());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tool-calling RL toolkit: data pipeline, rewards, GRPO simulator and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tcrl 0.1.0");

  Globals g;
  app.add_option("--config", g.config_path, "JSON file supplying flag defaults");
  app.add_option("--seed", g.seed, "Seed for randomized subcommands");
  auto* quiet = app.add_flag("--quiet", g.quiet, "Suppress non-error output");

  FilterArgs fa;
  auto* filter = app.add_subcommand("filter", "Keep records whose answer and schemas parse");
  filter->add_option("--in", fa.in, "Input JSONL (- for stdin)");
  filter->add_option("--out", fa.out, "Kept samples JSONL (- for stdout)");
  filter->add_option("--report", fa.report, "FilterReport JSON");

  MaskArgs ma;
  auto* mask = app.add_subcommand("mask", "Rename tools to func_k and parameters to param_j");
  mask->add_option("--in", ma.in, "Input samples JSONL");
  mask->add_option("--out", ma.out, "Masked samples JSONL");
  mask->add_option("--mapping", ma.mapping, "Per-sample mappings JSON");

  AugmentArgs aa;
  auto* augment = app.add_subcommand("augment", "Synthesize multi-turn samples");
  augment->add_option("--in", aa.in, "Input samples JSONL");
  augment->add_option("--out", aa.out, "Originals followed by augmented samples");
  augment->add_option("--strategies", aa.strategies,
                      "Comma list of combine, tool_removal, param_clarification, result_validation");

  RewardArgs ra;
  auto* reward = app.add_subcommand("reward", "Score one completion against a reference");
  reward->add_option("--pred", ra.pred, "Completion text file (- for stdin)");
  reward->add_option("--gt", ra.gt, "Reference answer text file");
  reward->add_option("--step", ra.step, "Training step t");
  auto* breakdown = reward->add_flag("--breakdown", ra.breakdown, "Print every reward component");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train-sim", "Run the tabular GRPO simulator");
  train_cmd->add_option("--task", ta.task, "Task JSON");
  train_cmd->add_option("--out-log", ta.out_log, "Per-step JSONL log");

  AblateArgs ba;
  auto* ablate = app.add_subcommand("ablate", "Sweep the schedule midpoint and steepness");
  ablate->add_option("--task", ba.task, "Task JSON");
  ablate->add_option("--midpoints", ba.midpoints, "Comma list of midpoints");
  ablate->add_option("--kappas", ba.kappas, "Comma list of kappas");
  ablate->add_option("--out", ba.out, "CSV output");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "AST accuracy and F1 over predictions");
  eval->add_option("--pred", ea.pred, "EvalRecord JSONL");
  eval->add_option("--out", ea.out, "EvalReport JSON");
  auto* names_only = eval->add_flag("--param-f1-names-only", ea.names_only,
                                    "Parameter F1 over (call, parameter) pairs");

  OverlapArgs oa;
  auto* overlap = app.add_subcommand("overlap", "Pairwise toolset overlap rates");
  overlap->add_option("--inventories", oa.inventories, "JSON object: dataset -> tool names");
  overlap->add_option("--out", oa.out, "CSV output");

  StatsArgs sa;
  auto* stats = app.add_subcommand("stats", "Counts by source and turn type");
  stats->add_option("--in", sa.in, "Samples JSONL");
  auto* json = stats->add_flag("--json", sa.json, "Emit JSON instead of the text grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (!g.config_path.empty()) g.config.load(g.config_path);
    g.config.fill(g.quiet, quiet->count(), "", "quiet");
    g.config.fill(g.seed, "", "seed");

    if (*filter) return run_filter(fa, g);
    if (*mask) return run_mask(ma, g);
    if (*augment) return run_augment(aa, g);
    if (*reward) {
      ra.breakdown_given = breakdown->count();
      return run_reward(ra, g);
    }
    if (*train_cmd) return run_train(ta, g);
    if (*ablate) return run_ablate(ba, g);
    if (*eval) return run_eval(ea, g, names_only->count());
    if (*overlap) return run_overlap(oa, g);
    if (*stats) return run_stats(sa, g, json->count());
  } catch (const IoError& e) {
    std::cerr << "tcrl: " << e.kind() << ": " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    std::cerr << "tcrl: " << e.kind() << ": " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
