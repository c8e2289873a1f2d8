#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tcrl {

/// First-order tabular softmax policy: one logit vector per
/// (prompt, position, previous token). The previous token of position 0 is
/// the begin marker, indexed as `vocab_size()`.
class PolicyTable {
 public:
  PolicyTable() = default;
  PolicyTable(std::vector<std::string> prompt_ids, int vocab_size, int max_len);

  /// Same shape, all logits zero.
  PolicyTable zeros_like() const;

  int vocab_size() const noexcept { return vocab_size_; }
  int max_len() const noexcept { return max_len_; }
  int begin_marker() const noexcept { return vocab_size_; }
  std::size_t prompt_count() const noexcept { return prompt_ids_.size(); }
  const std::vector<std::string>& prompt_ids() const noexcept { return prompt_ids_; }
  std::optional<std::size_t> prompt_index(std::string_view id) const;

  std::span<double> logits(std::size_t prompt, int position, int prev);
  std::span<const double> logits(std::size_t prompt, int position, int prev) const;

  /// Softmax of logits / temperature.
  std::vector<double> probabilities(std::size_t prompt, int position, int prev,
                                    double temperature = 1.0) const;
  /// Log-softmax at temperature 1.
  double log_prob(std::size_t prompt, int position, int prev, int token) const;
  /// Shannon entropy (nats) at temperature 1.
  double entropy(std::size_t prompt, int position, int prev) const;

  /// this += scale * other (shapes must match).
  void add_scaled(const PolicyTable& other, double scale);

  std::span<double> raw() noexcept { return data_; }
  std::span<const double> raw() const noexcept { return data_; }

  bool same_shape(const PolicyTable& other) const noexcept;

 private:
  std::size_t offset(std::size_t prompt, int position, int prev) const;

  std::vector<std::string> prompt_ids_;
  int vocab_size_ = 0;
  int max_len_ = 0;
  std::vector<double> data_;
};

/// The context index the table uses for `tokens[position]`.
inline int previous_token(std::span<const int> tokens, int position, int begin_marker) {
  return position == 0 ? begin_marker : tokens[static_cast<std::size_t>(position - 1)];
}

}  // namespace tcrl
