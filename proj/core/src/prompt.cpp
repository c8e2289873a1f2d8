#include "tcrl/prompt.hpp"

#include "tcrl/errors.hpp"
#include "tcrl/json_value.hpp"

namespace tcrl {

namespace {

constexpr std::string_view kStandard =
    "A conversation between User and Assistant, the user asks a question, and the Assistant "
    "solves it.\n"
    "The assistant first thinks about the reasoning process in the mind and then provides the "
    "user with the answer.\n"
    "The reasoning process and answer are enclosed within <think> </think> and <answer> </answer> "
    "tags, respectively,\n"
    "i.e., <think> reasoning process here </think><answer> answer here </answer>.\n"
    "\n"
    "You are an expert in composing functions, given a question and a set of possible "
    "functions.\n"
    "Based on the question, you will need to make one or more function/tool calls to achieve the "
    "purpose.\n"
    "1. If none of the function can be used, point it out.\n"
    "2. If the given question lacks the parameters required by the function, also point it out.\n"
    "3. You should only return the function call in tools call sections.\n"
    "\n"
    "If you decide to invoke any function(s), MUST use the format:\n"
    "[func_name1(params_name1=params_value1, ...), func_name2(params)]\n"
    "\n"
    "Here is a list of functions in JSON format that you can invoke: {{Tool List}}";

}  // namespace

PromptTemplate PromptTemplate::from_text(std::string body) {
  const std::size_t at = body.find(kPlaceholder);
  if (at == std::string::npos) throw InvalidArgument("template lacks the {{Tool List}} placeholder");
  if (body.find(kPlaceholder, at + 1) != std::string::npos) {
    throw InvalidArgument("template repeats the {{Tool List}} placeholder");
  }
  return PromptTemplate(std::move(body), at);
}

const PromptTemplate& PromptTemplate::standard() {
  static const PromptTemplate tpl = from_text(std::string(kStandard));
  return tpl;
}

std::string PromptTemplate::render(const std::vector<ToolSchema>& schemas) const {
  std::string out = body_;
  out.replace(at_, kPlaceholder.size(), dump_json(schemas_to_value(schemas)));
  return out;
}

std::optional<std::string> PromptTemplate::extract_tool_list(std::string_view rendered) const {
  const std::string_view prefix = std::string_view(body_).substr(0, at_);
  const std::string_view suffix = std::string_view(body_).substr(at_ + kPlaceholder.size());
  if (rendered.size() < prefix.size() + suffix.size()) return std::nullopt;
  if (rendered.substr(0, prefix.size()) != prefix) return std::nullopt;
  if (rendered.substr(rendered.size() - suffix.size()) != suffix) return std::nullopt;
  return std::string(rendered.substr(prefix.size(), rendered.size() - prefix.size() - suffix.size()));
}

std::string render_system_prompt(const std::vector<ToolSchema>& schemas, const PromptTemplate& tpl) {
  return tpl.render(schemas);
}

}  // namespace tcrl
