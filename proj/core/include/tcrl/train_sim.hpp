#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcrl/grpo.hpp"
#include "tcrl/policy.hpp"
#include "tcrl/reward.hpp"
#include "tcrl/schema.hpp"
#include "tcrl/toolcall.hpp"

namespace tcrl {

struct ToyPrompt {
  std::string id;
  std::vector<ToolSchema> schemas;
  AnswerSet gt;
  std::string gt_text;
};

/// Desk-scale task: a handful of prompts and a small token vocabulary from
/// which every reference answer can be spelled.
class ToyTask {
 public:
  static constexpr std::size_t kMaxVocabulary = 64;
  static constexpr std::size_t kMaxPrompts = 32;

  /// {"vocabulary": [...], "prompts": [{"id", "schemas", "gt_text"}],
  ///  "end_token": "<eos>", "max_len": n}. `end_token` and `max_len` are
  /// optional; max_len defaults to the longest answer plus two and may be as
  /// small as the longest answer without its end token. With `with_tags`, the
  /// four response tags become tokens.
  static ToyTask from_json(std::string_view text, bool with_tags = false);
  static ToyTask from_value(const Value& v, bool with_tags = false);

  const std::vector<ToyPrompt>& prompts() const noexcept { return prompts_; }
  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  int end_token() const noexcept { return end_token_; }
  int max_len() const noexcept { return max_len_; }
  bool tags_as_tokens() const noexcept { return tags_as_tokens_; }

  /// Greedy longest-match spelling; throws InvalidArgument when impossible.
  std::vector<int> encode(std::string_view text) const;
  /// Concatenation of token strings, end token excluded.
  std::string decode(std::span<const int> tokens) const;

  /// Token sequence of the reference completion for prompt `i` (tags when
  /// they are tokens, then the answer, then the end token).
  std::vector<int> target_tokens(std::size_t i) const;
  /// Text scored by the reward for a sampled token sequence.
  std::string completion_text(std::span<const int> tokens) const;

  PolicyTable make_policy() const;

 private:
  std::vector<ToyPrompt> prompts_;
  std::vector<std::string> vocabulary_;
  int end_token_ = 0;
  int max_len_ = 0;
  bool tags_as_tokens_ = false;
};

/// How the strict/general mixing weight evolves over training.
enum class Schedule {
  sigmoid,       // sigma(t, m) from the reward config
  strict_only,   // weight pinned to 1
  general_only,  // weight pinned to 0
};

struct SimConfig {
  int group_size = 8;
  double temperature = 0.8;
  std::int64_t steps = 300;
  int inner_updates = 2;
  std::uint64_t seed = 7;
  Schedule schedule = Schedule::sigmoid;
  bool emit_tags_as_tokens = false;
  RewardConfig reward;
  GrpoConfig grpo{0.2, 1e-8, 3.0};

  void validate() const;
  static SimConfig from_value(const Value& v);
  static SimConfig from_json(std::string_view text);
};

struct SampledGroup {
  RolloutGroup group;
  std::vector<std::string> texts;
};

/// G completions for one prompt. Sampling divides logits by `temperature`;
/// recorded log-probabilities are those of the untempered policy.
SampledGroup rollout(const PolicyTable& policy, const ToyTask& task, std::size_t prompt, int G,
                     double temperature, std::uint64_t seed);

/// Places `gap` on the reference token at every state along the reference
/// path of each prompt, making the policy (near) deterministic.
void set_one_hot(PolicyTable& policy, const ToyTask& task, double gap);

struct StepRecord {
  std::int64_t step = 0;
  double mean_reward = 0.0;
  double exact_match_rate = 0.0;
  double sigma = 0.0;
  double policy_entropy = 0.0;
};

struct TrainingLog {
  std::vector<StepRecord> records;

  std::string to_jsonl() const;
};

double schedule_weight(std::int64_t step, const SimConfig& cfg);

TrainingLog train(const ToyTask& task, const SimConfig& cfg);
/// Trains `policy` in place (initial weights supplied by the caller).
TrainingLog train(const ToyTask& task, const SimConfig& cfg, PolicyTable& policy);

struct AblationCell {
  std::int64_t midpoint = 0;
  double kappa = 0.0;
  double final_exact_match = 0.0;
  double auc_reward = 0.0;
};

struct AblationReport {
  std::vector<AblationCell> cells;

  /// Header `midpoint,kappa,final_exact_match,auc_reward`.
  std::string to_csv() const;
};

/// Trapezoidal area under the per-step mean reward curve.
double reward_auc(const TrainingLog& log);

AblationReport schedule_ablation(const ToyTask& task, std::span<const std::int64_t> midpoints,
                                 std::span<const double> kappas, const SimConfig& cfg);

}  // namespace tcrl
