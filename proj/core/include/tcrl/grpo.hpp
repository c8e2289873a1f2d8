#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcrl/policy.hpp"

namespace tcrl {

/// One sampled completion with per-token log-likelihoods under the sampling
/// policy (old) and the policy being optimized (new).
struct Completion {
  std::vector<int> tokens;
  std::vector<double> old_logprobs;
  std::vector<double> new_logprobs;
  double reward = 0.0;
};

struct RolloutGroup {
  std::string prompt_id;
  std::vector<Completion> completions;
  std::optional<std::vector<double>> advantages;
};

struct GrpoConfig {
  double epsilon = 0.2;
  double std_floor = 1e-8;
  double learning_rate = 1.0;

  void validate() const;
};

/// (r_i - mean) / std with the population standard deviation. A group whose
/// std falls below `std_floor` gets all-zero advantages. Throws GroupTooSmall
/// for fewer than two rewards.
std::vector<double> compute_advantages(std::span<const double> rewards, const GrpoConfig& cfg);

/// Fills `group.advantages` from the completions' rewards.
void assign_advantages(RolloutGroup& group, const GrpoConfig& cfg);

/// exp(new - old) per token.
std::vector<double> importance_ratios(const Completion& c);

/// Clipped surrogate, to be maximized (a loss is its negation):
/// mean over groups of (1/G) sum_i (1/|o_i|) sum_t min(rho A, clip(rho) A).
/// There is no KL term. Throws MissingAdvantages.
double grpo_objective(std::span<const RolloutGroup> groups, const GrpoConfig& cfg);

/// Recomputes every completion's new_logprobs from `policy`.
void refresh_new_logprobs(std::span<RolloutGroup> groups, const PolicyTable& policy);

/// Exact gradient of grpo_objective with respect to the table logits, with
/// the new log-probabilities taken from `policy` (temperature 1). Tokens where
/// the clipped branch is active contribute nothing. Accumulation order follows
/// group, completion and token order.
PolicyTable grpo_gradient_tabular(std::span<const RolloutGroup> groups, const PolicyTable& policy,
                                  const GrpoConfig& cfg);

}  // namespace tcrl
