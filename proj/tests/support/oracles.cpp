#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace oracle {

using tcrl::AnswerSet;
using tcrl::Value;

std::string data_path(std::string_view relative) {
  return std::string(TCRL_DATA_DIR) + "/" + std::string(relative);
}

std::string fixture_path(std::string_view relative) {
  return std::string(TCRL_FIXTURE_DIR) + "/" + std::string(relative);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> word_set(std::string_view text, std::string_view delimiters) {
  const std::string separators = std::string(delimiters) + " \t\n\r\v\f";
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t begin = text.find_first_not_of(separators, pos);
    if (begin == std::string_view::npos) break;
    std::size_t end = text.find_first_of(separators, begin);
    if (end == std::string_view::npos) end = text.size();
    out.emplace(text.substr(begin, end - begin));
    pos = end;
  }
  return out;
}

long double overlap_reward(std::string_view y, std::string_view y_star, long double floor,
                           std::string_view delimiters) {
  const auto ref = word_set(y_star, delimiters);
  const auto got = word_set(y, delimiters);
  std::vector<std::string> common;
  std::set_intersection(ref.begin(), ref.end(), got.begin(), got.end(), std::back_inserter(common));
  return floor + static_cast<long double>(common.size()) / static_cast<long double>(ref.size());
}

long double logistic(std::int64_t t, long double kappa, std::int64_t midpoint) {
  return 1.0L / (1.0L + std::exp(-kappa * static_cast<long double>(t - midpoint)));
}

std::vector<double> advantages(const std::vector<double>& rewards, double std_floor) {
  const long double n = static_cast<long double>(rewards.size());
  long double mean = 0;
  for (double r : rewards) mean += r;
  mean /= n;
  long double var = 0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const long double sd = std::sqrt(var / n);
  std::vector<double> out(rewards.size(), 0.0);
  if (sd < std_floor) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i] = static_cast<double>((rewards[i] - mean) / sd);
  }
  return out;
}

namespace {

double log_softmax_at(std::span<const double> logits, int k) {
  double hi = logits[0];
  for (double l : logits) hi = std::max(hi, l);
  double sum = 0;
  for (double l : logits) sum += std::exp(l - hi);
  return logits[static_cast<std::size_t>(k)] - hi - std::log(sum);
}

}  // namespace

double clipped_objective(const std::vector<tcrl::RolloutGroup>& groups,
                         const tcrl::PolicyTable& policy, double epsilon) {
  double total = 0;
  for (const auto& g : groups) {
    const std::size_t prompt = *policy.prompt_index(g.prompt_id);
    double group_sum = 0;
    for (std::size_t i = 0; i < g.completions.size(); ++i) {
      const auto& c = g.completions[i];
      const double a = (*g.advantages)[i];
      double seq = 0;
      for (std::size_t t = 0; t < c.tokens.size(); ++t) {
        const int prev = t == 0 ? policy.vocab_size() : c.tokens[t - 1];
        const double lp = log_softmax_at(policy.logits(prompt, static_cast<int>(t), prev), c.tokens[t]);
        const double rho = std::exp(lp - c.old_logprobs[t]);
        const double clipped = std::min(std::max(rho, 1 - epsilon), 1 + epsilon);
        seq += std::min(rho * a, clipped * a);
      }
      group_sum += seq / static_cast<double>(c.tokens.size());
    }
    total += group_sum / static_cast<double>(g.completions.size());
  }
  return groups.empty() ? 0.0 : total / static_cast<double>(groups.size());
}

GradientInstance random_gradient_instance(std::uint64_t seed, double epsilon) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int vocab = 2 + static_cast<int>(rng() % 3);
  const int max_len = 1 + static_cast<int>(rng() % 3);
  GradientInstance inst{tcrl::PolicyTable({"p0", "p1"}, vocab, max_len), {}};
  for (double& x : inst.policy.raw()) x = 2.0 * unit(rng);
  const std::size_t n_groups = 1 + rng() % 2;
  for (std::size_t gi = 0; gi < n_groups; ++gi) {
    tcrl::RolloutGroup g;
    g.prompt_id = gi == 0 ? "p0" : "p1";
    const std::size_t prompt = gi;
    const int G = 2 + static_cast<int>(rng() % 3);
    std::vector<double> adv;
    for (int i = 0; i < G; ++i) {
      tcrl::Completion c;
      const int len = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_len));
      for (int t = 0; t < len; ++t) {
        const int tok = static_cast<int>(rng() % static_cast<unsigned>(vocab));
        const int prev = t == 0 ? vocab : c.tokens.back();
        const double lp = inst.policy.log_prob(prompt, t, prev, tok);
        double old = lp;
        for (;;) {
          old = lp + 0.4 * unit(rng);
          const double rho = std::exp(lp - old);
          if (std::abs(rho - (1 - epsilon)) > 1e-3 && std::abs(rho - (1 + epsilon)) > 1e-3) break;
        }
        c.tokens.push_back(tok);
        c.old_logprobs.push_back(old);
      }
      c.new_logprobs = c.old_logprobs;
      adv.push_back(unit(rng));
      g.completions.push_back(std::move(c));
    }
    g.advantages = adv;
    inst.groups.push_back(std::move(g));
  }
  return inst;
}

double gradient_relative_error(const GradientInstance& inst, const tcrl::GrpoConfig& cfg, double h) {
  const tcrl::PolicyTable grad = tcrl::grpo_gradient_tabular(inst.groups, inst.policy, cfg);
  tcrl::PolicyTable probe = inst.policy;
  double worst = 0, scale = 0;
  for (std::size_t k = 0; k < probe.raw().size(); ++k) {
    const double x = probe.raw()[k];
    probe.raw()[k] = x + h;
    const double up = clipped_objective(inst.groups, probe, cfg.epsilon);
    probe.raw()[k] = x - h;
    const double down = clipped_objective(inst.groups, probe, cfg.epsilon);
    probe.raw()[k] = x;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad.raw()[k]));
    scale = std::max(scale, std::abs(fd));
  }
  return scale == 0 ? worst : worst / scale;
}

bool values_equal(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    return std::strtold(a.as_number().to_string().c_str(), nullptr) ==
           std::strtold(b.as_number().to_string().c_str(), nullptr);
  }
  if (a.storage().index() != b.storage().index()) return false;
  if (a.is_null()) return true;
  if (a.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_string()) return a.as_string() == b.as_string();
  if (a.is_list()) {
    const auto& x = a.as_list();
    const auto& y = b.as_list();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!values_equal(x[i], y[i])) return false;
    }
    return true;
  }
  const auto& x = a.as_object();
  const auto& y = b.as_object();
  if (x.size() != y.size()) return false;
  for (const auto& m : x) {
    const auto it = std::find_if(y.begin(), y.end(), [&](const tcrl::Member& n) { return n.key == m.key; });
    if (it == y.end() || !values_equal(m.value, it->value)) return false;
  }
  return true;
}

bool brute_force_calls_equal(const AnswerSet& a, const AnswerSet& b) {
  if (a.calls.size() != b.calls.size()) return false;
  std::vector<std::size_t> perm(b.calls.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool all = true;
    for (std::size_t i = 0; i < perm.size() && all; ++i) {
      const auto& x = a.calls[i];
      const auto& y = b.calls[perm[i]];
      all = x.name == y.name && values_equal(Value(x.args), Value(y.args));
    }
    if (all) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

namespace {

struct Printer {
  const Spelling& sp;
  std::string out;

  void gap() {
    if (!sp.whitespace) return;
    static const char* blanks[] = {"", " ", "  ", "\t", "\n "};
    out += blanks[(*sp.whitespace)() % 5];
  }

  void quoted(const std::string& s) {
    const char q = sp.single_quotes ? '\'' : '"';
    out += q;
    out += s;
    out += q;
  }

  void number(const tcrl::Decimal& d) {
    std::string s = d.to_string();
    if (sp.flip_integral_numbers && s.find_first_of("eE") == std::string::npos) {
      const auto dot = s.find('.');
      if (dot == std::string::npos) {
        s += ".0";
      } else if (s.find_first_not_of('0', dot + 1) == std::string::npos) {
        s.erase(dot);
      }
    }
    out += s;
  }

  void value(const Value& v) {
    if (v.is_null()) {
      out += sp.python_literals ? "None" : "null";
    } else if (v.is_bool()) {
      out += v.as_bool() ? (sp.python_literals ? "True" : "true")
                         : (sp.python_literals ? "False" : "false");
    } else if (v.is_number()) {
      number(v.as_number());
    } else if (v.is_string()) {
      quoted(v.as_string());
    } else if (v.is_list()) {
      out += '[';
      const auto& l = v.as_list();
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) out += ',';
        gap();
        value(l[i]);
        gap();
      }
      out += ']';
    } else {
      out += '{';
      const auto& o = v.as_object();
      for (std::size_t i = 0; i < o.size(); ++i) {
        if (i) out += ',';
        gap();
        quoted(o[i].key);
        gap();
        out += ':';
        gap();
        value(o[i].value);
        gap();
      }
      out += '}';
    }
  }
};

std::vector<std::size_t> order_or_identity(const std::vector<std::size_t>& order, std::size_t n) {
  if (!order.empty()) return order;
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  return id;
}

}  // namespace

std::string print_answer(const AnswerSet& answer, const Spelling& sp) {
  Printer p{sp, {}};
  p.gap();
  p.out += '[';
  const auto calls = order_or_identity(sp.call_order, answer.calls.size());
  for (std::size_t ci = 0; ci < calls.size(); ++ci) {
    if (ci) p.out += ',';
    p.gap();
    const std::size_t c = calls[ci];
    const auto& call = answer.calls[c];
    p.out += call.name;
    p.gap();
    p.out += '(';
    const std::vector<std::size_t> none;
    const auto args = order_or_identity(c < sp.arg_order.size() ? sp.arg_order[c] : none, call.args.size());
    for (std::size_t ai = 0; ai < args.size(); ++ai) {
      if (ai) p.out += ',';
      p.gap();
      const auto& m = call.args[args[ai]];
      p.out += m.key;
      p.gap();
      p.out += '=';
      p.gap();
      p.value(m.value);
      p.gap();
    }
    p.out += ')';
    p.gap();
  }
  p.out += ']';
  p.gap();
  return p.out;
}

std::size_t AnswerGenerator::below(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

bool AnswerGenerator::coin(double p) { return std::bernoulli_distribution(p)(rng_); }

std::string AnswerGenerator::word() {
  static const char* words[] = {"Paris", "London", "Tokyo", "UTC",  "fast", "blue",
                                "north", "alpha",  "beta",  "x-ray", "q_1", "New York"};
  return words[below(std::size(words))];
}

Value AnswerGenerator::scalar() {
  switch (below(6)) {
    case 0: return Value(word());
    case 1: return Value::integer(static_cast<std::int64_t>(below(2001)) - 1000);
    case 2: {
      // one or two fraction digits, sometimes integral ("3.0")
      const auto whole = static_cast<long>(below(500));
      const auto frac = below(3) == 0 ? 0UL : below(99) + 1;
      std::string text = std::to_string(whole) + "." + (frac < 10 ? "0" : "") + std::to_string(frac);
      return Value::number(coin() ? text : "-" + text);
    }
    case 3: return Value(coin());
    case 4: return Value(tcrl::Null{});
    default: return Value(word() + " " + word());
  }
}

Value AnswerGenerator::value(int depth) {
  if (depth <= 0 || below(4) != 0) return scalar();
  if (coin()) {
    tcrl::List l;
    const std::size_t n = below(3);
    for (std::size_t i = 0; i < n; ++i) l.push_back(value(depth - 1));
    return Value(std::move(l));
  }
  tcrl::Object o;
  const std::size_t n = below(3) + 1;
  for (std::size_t i = 0; i < n; ++i) o.push_back({"k" + std::to_string(i), value(depth - 1)});
  return Value(std::move(o));
}

AnswerSet AnswerGenerator::answer(int max_calls, int max_args) {
  AnswerSet a;
  const std::size_t n = below(static_cast<std::size_t>(max_calls)) + 1;
  std::vector<std::string> names = {"get_weather", "search", "book", "convert", "lookup", "f"};
  std::shuffle(names.begin(), names.end(), rng_);
  for (std::size_t i = 0; i < n; ++i) {
    tcrl::ToolCall c;
    c.name = names[i];
    const std::size_t k = below(static_cast<std::size_t>(max_args) + 1);
    for (std::size_t j = 0; j < k; ++j) c.args.push_back({"p" + std::to_string(j), value(2)});
    a.calls.push_back(std::move(c));
  }
  return a;
}

Value AnswerGenerator::mutate(const Value& v) {
  if (v.is_null()) return Value::integer(0);
  if (v.is_bool()) return Value(!v.as_bool());
  if (v.is_number()) {
    const std::string s = v.as_number().to_string();
    return Value::number(s.front() == '-' ? s.substr(1) + "1" : s + "1");
  }
  if (v.is_string()) return Value(v.as_string() + "!");
  if (v.is_list()) {
    tcrl::List l = v.as_list();
    l.push_back(Value(tcrl::Null{}));
    return Value(std::move(l));
  }
  tcrl::Object o = v.as_object();
  o.push_back({"extra", Value(true)});
  return Value(std::move(o));
}

double overlap_percent(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t common = 0;
  for (const auto& x : a) common += b.count(x);
  return 100.0 * static_cast<double>(common) / static_cast<double>(std::min(a.size(), b.size()));
}

}  // namespace oracle
