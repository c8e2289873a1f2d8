#include "tcrl/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "tcrl/errors.hpp"

namespace tcrl {

namespace {

void check_completion(const Completion& c) {
  if (c.tokens.empty() || c.tokens.size() != c.old_logprobs.size() ||
      c.tokens.size() != c.new_logprobs.size()) {
    throw InvalidArgument("completion needs >= 1 token and one old/new log-prob per token");
  }
}

const std::vector<double>& checked_advantages(const RolloutGroup& g) {
  if (!g.advantages || g.advantages->size() != g.completions.size()) {
    throw MissingAdvantages("group '" + g.prompt_id + "' has no advantages for its completions");
  }
  return *g.advantages;
}

// d/d(rho) of min(rho A, clip(rho, 1-eps, 1+eps) A).
double surrogate_slope(double rho, double advantage, double epsilon) {
  if (advantage > 0) return rho <= 1.0 + epsilon ? advantage : 0.0;
  if (advantage < 0) return rho >= 1.0 - epsilon ? advantage : 0.0;
  return 0.0;
}

}  // namespace

void GrpoConfig::validate() const {
  if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("epsilon must be in (0, 1)");
  if (!(std_floor >= 0)) throw ConfigError("std_floor must be >= 0");
  if (!std::isfinite(learning_rate)) throw ConfigError("learning_rate must be finite");
}

std::vector<double> compute_advantages(std::span<const double> rewards, const GrpoConfig& cfg) {
  if (rewards.size() < 2) throw GroupTooSmall("advantages need a group of at least 2 rewards");
  const auto n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> out(rewards.size(), 0.0);
  if (sd < cfg.std_floor) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / sd;
  return out;
}

void assign_advantages(RolloutGroup& group, const GrpoConfig& cfg) {
  std::vector<double> rewards;
  rewards.reserve(group.completions.size());
  for (const auto& c : group.completions) rewards.push_back(c.reward);
  group.advantages = compute_advantages(rewards, cfg);
}

std::vector<double> importance_ratios(const Completion& c) {
  check_completion(c);
  std::vector<double> out(c.tokens.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = std::exp(c.new_logprobs[t] - c.old_logprobs[t]);
  return out;
}

double grpo_objective(std::span<const RolloutGroup> groups, const GrpoConfig& cfg) {
  if (groups.empty()) return 0.0;
  const double lo = 1.0 - cfg.epsilon;
  const double hi = 1.0 + cfg.epsilon;
  double total = 0.0;
  for (const auto& g : groups) {
    const auto& adv = checked_advantages(g);
    double group_sum = 0.0;
    for (std::size_t i = 0; i < g.completions.size(); ++i) {
      auto rho = importance_ratios(g.completions[i]);
      double seq = 0.0;
      for (double r : rho) seq += std::min(r * adv[i], std::clamp(r, lo, hi) * adv[i]);
      group_sum += seq / static_cast<double>(rho.size());
    }
    total += group_sum / static_cast<double>(g.completions.size());
  }
  return total / static_cast<double>(groups.size());
}

void refresh_new_logprobs(std::span<RolloutGroup> groups, const PolicyTable& policy) {
  for (auto& g : groups) {
    auto prompt = policy.prompt_index(g.prompt_id);
    if (!prompt) throw InvalidArgument("policy has no prompt '" + g.prompt_id + "'");
    for (auto& c : g.completions) {
      c.new_logprobs.resize(c.tokens.size());
      for (std::size_t t = 0; t < c.tokens.size(); ++t) {
        const int pos = static_cast<int>(t);
        c.new_logprobs[t] = policy.log_prob(
            *prompt, pos, previous_token(c.tokens, pos, policy.begin_marker()), c.tokens[t]);
      }
    }
  }
}

PolicyTable grpo_gradient_tabular(std::span<const RolloutGroup> groups, const PolicyTable& policy,
                                  const GrpoConfig& cfg) {
  PolicyTable grad = policy.zeros_like();
  if (groups.empty()) return grad;
  const double group_weight = 1.0 / static_cast<double>(groups.size());
  for (const auto& g : groups) {
    const auto& adv = checked_advantages(g);
    auto prompt = policy.prompt_index(g.prompt_id);
    if (!prompt) throw InvalidArgument("policy has no prompt '" + g.prompt_id + "'");
    const double completion_weight = group_weight / static_cast<double>(g.completions.size());
    for (std::size_t i = 0; i < g.completions.size(); ++i) {
      const Completion& c = g.completions[i];
      check_completion(c);
      if (adv[i] == 0.0) continue;
      const double token_weight = completion_weight / static_cast<double>(c.tokens.size());
      for (std::size_t t = 0; t < c.tokens.size(); ++t) {
        const int pos = static_cast<int>(t);
        const int prev = previous_token(c.tokens, pos, policy.begin_marker());
        const double logp = policy.log_prob(*prompt, pos, prev, c.tokens[t]);
        const double rho = std::exp(logp - c.old_logprobs[t]);
        const double slope = surrogate_slope(rho, adv[i], cfg.epsilon);
        if (slope == 0.0) continue;
        // d rho / d logit_k = rho * (1[k == token] - p_k)
        auto probs = policy.probabilities(*prompt, pos, prev);
        auto out = grad.logits(*prompt, pos, prev);
        const double scale = token_weight * slope * rho;
        for (std::size_t k = 0; k < probs.size(); ++k) {
          const double indicator = static_cast<int>(k) == c.tokens[t] ? 1.0 : 0.0;
          out[k] += scale * (indicator - probs[k]);
        }
      }
    }
  }
  return grad;
}

}  // namespace tcrl
