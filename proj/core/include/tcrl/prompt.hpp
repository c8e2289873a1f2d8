#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcrl/schema.hpp"

namespace tcrl {

/// Template text with exactly one `{{Tool List}}` placeholder.
class PromptTemplate {
 public:
  static constexpr std::string_view kPlaceholder = "{{Tool List}}";

  /// Throws InvalidArgument unless the placeholder occurs exactly once.
  static PromptTemplate from_text(std::string body);
  /// The built-in tool-calling system prompt.
  static const PromptTemplate& standard();

  const std::string& body() const noexcept { return body_; }
  std::string render(const std::vector<ToolSchema>& schemas) const;
  /// The substituted tool list of a prompt rendered from this template.
  std::optional<std::string> extract_tool_list(std::string_view rendered) const;

 private:
  explicit PromptTemplate(std::string body, std::size_t at) : body_(std::move(body)), at_(at) {}

  std::string body_;
  std::size_t at_ = 0;
};

std::string render_system_prompt(const std::vector<ToolSchema>& schemas,
                                 const PromptTemplate& tpl = PromptTemplate::standard());

}  // namespace tcrl
