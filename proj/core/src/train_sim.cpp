#include "tcrl/train_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "tcrl/errors.hpp"
#include "tcrl/io.hpp"
#include "tcrl/json_value.hpp"
#include "random.hpp"

namespace tcrl {

namespace {

constexpr std::string_view kTagTokens[] = {"<think>", "</think>", "<answer>", "</answer>"};

using detail::mix_seed;
using detail::uniform01;

std::int64_t integer_field(const Member& m) {
  if (!m.value.is_number()) throw ConfigError("\"" + m.key + "\" must be a number");
  double d = m.value.as_number().to_double();
  if (d != std::floor(d) || std::fabs(d) > 9.0e15) {
    throw ConfigError("\"" + m.key + "\" must be an integer");
  }
  return static_cast<std::int64_t>(d);
}

double real_field(const Member& m) {
  if (!m.value.is_number()) throw ConfigError("\"" + m.key + "\" must be a number");
  return m.value.as_number().to_double();
}

}  // namespace

ToyTask ToyTask::from_json(std::string_view text, bool with_tags) {
  Value v;
  try {
    v = parse_json(text);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("invalid task JSON: ") + e.what());
  }
  return from_value(v, with_tags);
}

ToyTask ToyTask::from_value(const Value& v, bool with_tags) {
  if (!v.is_object()) throw ConfigError("task must be a JSON object");
  ToyTask task;
  task.tags_as_tokens_ = with_tags;
  std::string end_token = "<eos>";
  std::int64_t max_len = 0;
  const Value* vocab = nullptr;
  const Value* prompts = nullptr;
  for (const auto& m : v.as_object()) {
    if (m.key == "vocabulary") {
      vocab = &m.value;
    } else if (m.key == "prompts") {
      prompts = &m.value;
    } else if (m.key == "end_token") {
      if (!m.value.is_string()) throw ConfigError("\"end_token\" must be a string");
      end_token = m.value.as_string();
    } else if (m.key == "max_len") {
      max_len = integer_field(m);
      if (max_len < 1) throw ConfigError("\"max_len\" must be >= 1");
    } else if (m.key == "description") {
      continue;
    } else {
      throw ConfigError("unknown task key \"" + m.key + "\"");
    }
  }
  if (vocab == nullptr || !vocab->is_list()) throw ConfigError("task needs a \"vocabulary\" array");
  if (prompts == nullptr || !prompts->is_list()) throw ConfigError("task needs a \"prompts\" array");

  auto add_token = [&task](const std::string& tok) {
    if (tok.empty()) throw ConfigError("vocabulary tokens must be non-empty");
    if (std::find(task.vocabulary_.begin(), task.vocabulary_.end(), tok) != task.vocabulary_.end()) {
      throw ConfigError("duplicate vocabulary token \"" + tok + "\"");
    }
    task.vocabulary_.push_back(tok);
  };
  for (const auto& item : vocab->as_list()) {
    if (!item.is_string()) throw ConfigError("vocabulary entries must be strings");
    if (item.as_string() == end_token) continue;
    add_token(item.as_string());
  }
  if (with_tags) {
    for (auto tag : kTagTokens) {
      if (std::find(task.vocabulary_.begin(), task.vocabulary_.end(), tag) ==
          task.vocabulary_.end()) {
        add_token(std::string(tag));
      }
    }
  }
  task.end_token_ = static_cast<int>(task.vocabulary_.size());
  task.vocabulary_.push_back(end_token);
  if (task.vocabulary_.size() > kMaxVocabulary) {
    throw ConfigError("vocabulary exceeds " + std::to_string(kMaxVocabulary) + " tokens");
  }

  for (const auto& item : prompts->as_list()) {
    if (!item.is_object()) throw ConfigError("prompt entries must be objects");
    ToyPrompt p;
    bool have_gt = false;
    for (const auto& m : item.as_object()) {
      if (m.key == "id") {
        if (!m.value.is_string()) throw ConfigError("prompt \"id\" must be a string");
        p.id = m.value.as_string();
      } else if (m.key == "schemas") {
        p.schemas = schemas_from_value(m.value);
      } else if (m.key == "gt_text") {
        if (!m.value.is_string()) throw ConfigError("prompt \"gt_text\" must be a string");
        p.gt_text = m.value.as_string();
        have_gt = true;
      } else if (m.key == "question") {
        continue;
      } else {
        throw ConfigError("unknown prompt key \"" + m.key + "\"");
      }
    }
    if (p.id.empty() || !have_gt) throw ConfigError("prompt needs \"id\" and \"gt_text\"");
    for (const auto& other : task.prompts_) {
      if (other.id == p.id) throw ConfigError("duplicate prompt id \"" + p.id + "\"");
    }
    auto gt = try_parse_answer(p.gt_text);
    if (!gt || !gt->has_calls()) {
      throw ConfigError("prompt '" + p.id + "' gt_text is not a tool-call answer");
    }
    p.gt = std::move(*gt);
    task.prompts_.push_back(std::move(p));
  }
  if (task.prompts_.empty()) throw ConfigError("task has no prompts");
  if (task.prompts_.size() > kMaxPrompts) {
    throw ConfigError("task exceeds " + std::to_string(kMaxPrompts) + " prompts");
  }

  int longest = 0;  // end token included
  for (std::size_t i = 0; i < task.prompts_.size(); ++i) {
    try {
      longest = std::max(longest, static_cast<int>(task.target_tokens(i).size()));
    } catch (const InvalidArgument& e) {
      throw ConfigError("prompt '" + task.prompts_[i].id + "': " + e.what());
    }
  }
  // A max_len equal to the answer length ends completions by length alone.
  task.max_len_ = max_len > 0 ? static_cast<int>(max_len) : longest + 2;
  if (task.max_len_ < longest - 1) throw ConfigError("max_len is shorter than a reference answer");
  return task;
}

std::vector<int> ToyTask::encode(std::string_view text) const {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < vocabulary_.size(); ++k) {
      if (static_cast<int>(k) == end_token_) continue;
      const auto& tok = vocabulary_[k];
      if (tok.size() > best_len && text.substr(pos, tok.size()) == tok) {
        best = static_cast<int>(k);
        best_len = tok.size();
      }
    }
    if (best < 0) {
      throw InvalidArgument("text is not spellable from the vocabulary at offset " +
                            std::to_string(pos));
    }
    out.push_back(best);
    pos += best_len;
  }
  return out;
}

std::string ToyTask::decode(std::span<const int> tokens) const {
  std::string out;
  for (int t : tokens) {
    if (t == end_token_) continue;
    out += vocabulary_.at(static_cast<std::size_t>(t));
  }
  return out;
}

std::vector<int> ToyTask::target_tokens(std::size_t i) const {
  const auto& p = prompts_.at(i);
  std::string text = tags_as_tokens_ ? wrap_response("", p.gt_text) : p.gt_text;
  auto out = encode(text);
  out.push_back(end_token_);
  return out;
}

std::string ToyTask::completion_text(std::span<const int> tokens) const {
  std::string body = decode(tokens);
  return tags_as_tokens_ ? body : wrap_response("", body);
}

PolicyTable ToyTask::make_policy() const {
  std::vector<std::string> ids;
  ids.reserve(prompts_.size());
  for (const auto& p : prompts_) ids.push_back(p.id);
  return PolicyTable(std::move(ids), static_cast<int>(vocabulary_.size()), max_len_);
}

void SimConfig::validate() const {
  if (group_size < 2) throw ConfigError("group_size must be >= 2");
  if (!(temperature > 0)) throw ConfigError("temperature must be > 0");
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (inner_updates < 1) throw ConfigError("inner_updates must be >= 1");
  reward.validate();
  grpo.validate();
}

SimConfig SimConfig::from_value(const Value& v) {
  if (!v.is_object()) throw ConfigError("simulator config must be a JSON object");
  SimConfig cfg;
  for (const auto& m : v.as_object()) {
    if (m.key == "group_size") {
      cfg.group_size = static_cast<int>(integer_field(m));
    } else if (m.key == "temperature") {
      cfg.temperature = real_field(m);
    } else if (m.key == "steps") {
      cfg.steps = integer_field(m);
    } else if (m.key == "inner_updates") {
      cfg.inner_updates = static_cast<int>(integer_field(m));
    } else if (m.key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(integer_field(m));
    } else if (m.key == "schedule") {
      if (!m.value.is_string()) throw ConfigError("\"schedule\" must be a string");
      const auto& s = m.value.as_string();
      if (s == "sigmoid") {
        cfg.schedule = Schedule::sigmoid;
      } else if (s == "strict_only") {
        cfg.schedule = Schedule::strict_only;
      } else if (s == "general_only") {
        cfg.schedule = Schedule::general_only;
      } else {
        throw ConfigError("\"schedule\" must be sigmoid, strict_only or general_only");
      }
    } else if (m.key == "emit_tags_as_tokens") {
      if (!m.value.is_bool()) throw ConfigError("\"emit_tags_as_tokens\" must be a boolean");
      cfg.emit_tags_as_tokens = m.value.as_bool();
    } else if (m.key == "reward") {
      cfg.reward = RewardConfig::from_value(m.value);
    } else if (m.key == "grpo") {
      if (!m.value.is_object()) throw ConfigError("\"grpo\" must be an object");
      for (const auto& g : m.value.as_object()) {
        if (g.key == "epsilon") {
          cfg.grpo.epsilon = real_field(g);
        } else if (g.key == "std_floor") {
          cfg.grpo.std_floor = real_field(g);
        } else if (g.key == "learning_rate") {
          cfg.grpo.learning_rate = real_field(g);
        } else {
          throw ConfigError("unknown grpo config key \"" + g.key + "\"");
        }
      }
    } else {
      throw ConfigError("unknown simulator config key \"" + m.key + "\"");
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig SimConfig::from_json(std::string_view text) {
  Value v;
  try {
    v = parse_json(text);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("invalid simulator config JSON: ") + e.what());
  }
  return from_value(v);
}

SampledGroup rollout(const PolicyTable& policy, const ToyTask& task, std::size_t prompt, int G,
                     double temperature, std::uint64_t seed) {
  if (prompt >= task.prompts().size() || prompt >= policy.prompt_count()) {
    throw InvalidArgument("prompt index outside the policy");
  }
  if (G < 1 || !(temperature > 0)) throw InvalidArgument("rollout needs G >= 1 and temperature > 0");
  std::mt19937_64 rng(seed);
  SampledGroup out;
  out.group.prompt_id = task.prompts()[prompt].id;
  out.group.completions.reserve(static_cast<std::size_t>(G));
  for (int g = 0; g < G; ++g) {
    Completion c;
    int prev = policy.begin_marker();
    for (int pos = 0; pos < policy.max_len(); ++pos) {
      auto probs = policy.probabilities(prompt, pos, prev, temperature);
      const double u = uniform01(rng);
      double cumulative = 0.0;
      int token = static_cast<int>(probs.size()) - 1;
      for (std::size_t k = 0; k < probs.size(); ++k) {
        cumulative += probs[k];
        if (u < cumulative) {
          token = static_cast<int>(k);
          break;
        }
      }
      c.tokens.push_back(token);
      c.old_logprobs.push_back(policy.log_prob(prompt, pos, prev, token));
      prev = token;
      if (token == task.end_token()) break;
    }
    c.new_logprobs = c.old_logprobs;
    out.texts.push_back(task.completion_text(c.tokens));
    out.group.completions.push_back(std::move(c));
  }
  return out;
}

void set_one_hot(PolicyTable& policy, const ToyTask& task, double gap) {
  for (std::size_t i = 0; i < task.prompts().size(); ++i) {
    auto target = task.target_tokens(i);
    for (std::size_t t = 0; t < target.size() && static_cast<int>(t) < policy.max_len(); ++t) {
      const int pos = static_cast<int>(t);
      auto l = policy.logits(i, pos, previous_token(target, pos, policy.begin_marker()));
      std::fill(l.begin(), l.end(), 0.0);
      l[static_cast<std::size_t>(target[t])] = gap;
    }
  }
}

std::string TrainingLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["step"] = r.step;
    j["mean_reward"] = r.mean_reward;
    j["exact_match_rate"] = r.exact_match_rate;
    j["sigma"] = r.sigma;
    j["policy_entropy"] = r.policy_entropy;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

double schedule_weight(std::int64_t step, const SimConfig& cfg) {
  switch (cfg.schedule) {
    case Schedule::strict_only: return 1.0;
    case Schedule::general_only: return 0.0;
    case Schedule::sigmoid: break;
  }
  return sigma(step, cfg.reward);
}

TrainingLog train(const ToyTask& task, const SimConfig& cfg) {
  PolicyTable policy = task.make_policy();
  return train(task, cfg, policy);
}

TrainingLog train(const ToyTask& task, const SimConfig& cfg, PolicyTable& policy) {
  cfg.validate();
  if (cfg.emit_tags_as_tokens != task.tags_as_tokens()) {
    throw ConfigError("emit_tags_as_tokens must match how the task was loaded");
  }
  TrainingLog log;
  const std::size_t n_prompts = task.prompts().size();
  for (std::int64_t step = 0; step < cfg.steps; ++step) {
    const double weight = schedule_weight(step, cfg);
    std::vector<RolloutGroup> groups;
    groups.reserve(n_prompts);
    double reward_sum = 0.0;
    std::size_t exact = 0;
    std::size_t completions = 0;
    double entropy_sum = 0.0;
    std::size_t entropy_states = 0;
    for (std::size_t p = 0; p < n_prompts; ++p) {
      const ToyPrompt& prompt = task.prompts()[p];
      SampledGroup sampled = rollout(policy, task, p, cfg.group_size, cfg.temperature,
                                     mix_seed(cfg.seed, static_cast<std::uint64_t>(step), p));
      for (std::size_t i = 0; i < sampled.texts.size(); ++i) {
        Completion& c = sampled.group.completions[i];
        RewardBreakdown b =
            compute_reward_with_sigma(sampled.texts[i], prompt.gt, prompt.gt_text, weight, cfg.reward);
        c.reward = b.final;
        reward_sum += b.final;
        if (answers_match(parse_structured_response(sampled.texts[i]), prompt.gt)) ++exact;
        ++completions;
        for (std::size_t t = 0; t < c.tokens.size(); ++t) {
          const int pos = static_cast<int>(t);
          entropy_sum += policy.entropy(p, pos, previous_token(c.tokens, pos, policy.begin_marker()));
          ++entropy_states;
        }
      }
      assign_advantages(sampled.group, cfg.grpo);
      groups.push_back(std::move(sampled.group));
    }
    for (int k = 0; k < cfg.inner_updates; ++k) {
      refresh_new_logprobs(groups, policy);
      PolicyTable grad = grpo_gradient_tabular(groups, policy, cfg.grpo);
      policy.add_scaled(grad, cfg.grpo.learning_rate);
    }
    StepRecord rec;
    rec.step = step;
    rec.mean_reward = reward_sum / static_cast<double>(completions);
    rec.exact_match_rate = static_cast<double>(exact) / static_cast<double>(completions);
    rec.sigma = weight;
    rec.policy_entropy = entropy_states > 0 ? entropy_sum / static_cast<double>(entropy_states) : 0.0;
    log.records.push_back(rec);
  }
  return log;
}

double reward_auc(const TrainingLog& log) {
  double area = 0.0;
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    area += 0.5 * (log.records[i - 1].mean_reward + log.records[i].mean_reward);
  }
  return area;
}

std::string AblationReport::to_csv() const {
  std::string out = "midpoint,kappa,final_exact_match,auc_reward\n";
  for (const auto& c : cells) {
    out += std::to_string(c.midpoint);
    out += ',';
    out += format_number(c.kappa);
    out += ',';
    out += format_number(c.final_exact_match);
    out += ',';
    out += format_number(c.auc_reward);
    out += '\n';
  }
  return out;
}

AblationReport schedule_ablation(const ToyTask& task, std::span<const std::int64_t> midpoints,
                                 std::span<const double> kappas, const SimConfig& cfg) {
  AblationReport report;
  for (std::int64_t m : midpoints) {
    for (double kappa : kappas) {
      SimConfig run = cfg;
      run.schedule = Schedule::sigmoid;
      run.reward.midpoint = m;
      run.reward.kappa = kappa;
      TrainingLog log = train(task, run);
      AblationCell cell;
      cell.midpoint = m;
      cell.kappa = kappa;
      cell.final_exact_match = log.records.empty() ? 0.0 : log.records.back().exact_match_rate;
      cell.auc_reward = reward_auc(log);
      report.cells.push_back(cell);
    }
  }
  return report;
}

}  // namespace tcrl
