#include "tcrl/policy.hpp"

#include <algorithm>
#include <cmath>

#include "tcrl/errors.hpp"

namespace tcrl {

namespace {

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  std::vector<double> out(logits.size());
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - max_logit) / temperature);
    total += out[i];
  }
  for (auto& p : out) p /= total;
  return out;
}

}  // namespace

PolicyTable::PolicyTable(std::vector<std::string> prompt_ids, int vocab_size, int max_len)
    : prompt_ids_(std::move(prompt_ids)), vocab_size_(vocab_size), max_len_(max_len) {
  if (vocab_size_ < 1 || max_len_ < 1) throw InvalidArgument("policy table needs vocab >= 1 and max_len >= 1");
  const auto per_prompt = static_cast<std::size_t>(max_len_) *
                          static_cast<std::size_t>(vocab_size_ + 1) *
                          static_cast<std::size_t>(vocab_size_);
  data_.assign(per_prompt * prompt_ids_.size(), 0.0);
}

PolicyTable PolicyTable::zeros_like() const {
  PolicyTable out;
  out.prompt_ids_ = prompt_ids_;
  out.vocab_size_ = vocab_size_;
  out.max_len_ = max_len_;
  out.data_.assign(data_.size(), 0.0);
  return out;
}

std::optional<std::size_t> PolicyTable::prompt_index(std::string_view id) const {
  for (std::size_t i = 0; i < prompt_ids_.size(); ++i) {
    if (prompt_ids_[i] == id) return i;
  }
  return std::nullopt;
}

std::size_t PolicyTable::offset(std::size_t prompt, int position, int prev) const {
  if (prompt >= prompt_ids_.size() || position < 0 || position >= max_len_ || prev < 0 ||
      prev > vocab_size_) {
    throw InvalidArgument("policy state out of range");
  }
  const auto v = static_cast<std::size_t>(vocab_size_);
  return ((prompt * static_cast<std::size_t>(max_len_) + static_cast<std::size_t>(position)) *
              (v + 1) +
          static_cast<std::size_t>(prev)) *
         v;
}

std::span<double> PolicyTable::logits(std::size_t prompt, int position, int prev) {
  return std::span<double>(data_).subspan(offset(prompt, position, prev),
                                          static_cast<std::size_t>(vocab_size_));
}

std::span<const double> PolicyTable::logits(std::size_t prompt, int position, int prev) const {
  return std::span<const double>(data_).subspan(offset(prompt, position, prev),
                                                static_cast<std::size_t>(vocab_size_));
}

std::vector<double> PolicyTable::probabilities(std::size_t prompt, int position, int prev,
                                               double temperature) const {
  return softmax(logits(prompt, position, prev), temperature);
}

double PolicyTable::log_prob(std::size_t prompt, int position, int prev, int token) const {
  auto l = logits(prompt, position, prev);
  double max_logit = *std::max_element(l.begin(), l.end());
  double total = 0.0;
  for (double x : l) total += std::exp(x - max_logit);
  return l[static_cast<std::size_t>(token)] - max_logit - std::log(total);
}

double PolicyTable::entropy(std::size_t prompt, int position, int prev) const {
  auto p = probabilities(prompt, position, prev);
  double h = 0.0;
  for (double x : p) {
    if (x > 0) h -= x * std::log(x);
  }
  return h;
}

void PolicyTable::add_scaled(const PolicyTable& other, double scale) {
  if (!same_shape(other)) throw InvalidArgument("policy table shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

bool PolicyTable::same_shape(const PolicyTable& other) const noexcept {
  return vocab_size_ == other.vocab_size_ && max_len_ == other.max_len_ &&
         prompt_ids_ == other.prompt_ids_;
}

}  // namespace tcrl
