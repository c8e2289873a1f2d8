#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "tcrl/errors.hpp"
#include "tcrl/io.hpp"
#include "tcrl/json_value.hpp"
#include "tcrl/pipeline.hpp"
#include "tcrl/reward.hpp"

using namespace tcrl;

namespace {

std::vector<std::string> fixture_lines(const char* name) {
  return split_lines(read_text(oracle::fixture_path(name)));
}

std::vector<Sample> fixture_samples(const char* name) {
  return filter_corpus(fixture_lines(name)).kept;
}

Sample weather_sample() {
  return sample_from_value(parse_json(R"({"id":"s1",
    "schemas":[{"name":"get_weather","parameters":{"city":{"type":"string","required":true},"unit":{"type":"string"}}},
               {"name":"get_time","parameters":{"zone":{"type":"string","required":true}}}],
    "turns":[{"role":"user","content":"Weather in Paris, in C please."}],
    "gt_text":"[get_weather(city=\"Paris\", unit=\"C\")]","source":"toolace"})"));
}

}  // namespace

TEST(Filter, FixtureCounts) {
  const FilterResult r = filter_corpus(fixture_lines("filter_10.jsonl"));
  EXPECT_EQ(dump_json(r.report.to_value()),
            dump_json(parse_json(read_text(oracle::fixture_path("filter_10_expected.json")))));
  ASSERT_EQ(r.rejections.size(), 3u);
  EXPECT_EQ(r.rejections[0].line, 4u);
  EXPECT_EQ(r.rejections[0].category, "bad_call");
  EXPECT_EQ(r.rejections[1].line, 5u);
  EXPECT_EQ(r.rejections[2].category, "bad_schema");
}

TEST(Filter, SingleRecords) {
  const std::string good =
      R"({"id":"a","schemas":[],"turns":[{"role":"user","content":"x"}],"gt_text":"[f(a=1)]"})";
  const std::string bad =
      R"({"id":"b","schemas":[],"turns":[{"role":"user","content":"x"}],"gt_text":"f(a="})";
  const FilterResult r = filter_corpus({good, bad, good, "not json", "[1]"});
  EXPECT_EQ(r.report.kept, 1u);
  EXPECT_EQ(r.report.dropped_bad_call, 1u);
  EXPECT_EQ(r.report.dropped_duplicate_id, 1u);
  EXPECT_EQ(r.report.dropped_malformed, 2u);
}

TEST(Filter, GtDisagreeingWithTextIsBadCall) {
  const std::string rec =
      R"({"id":"a","schemas":[],"turns":[{"role":"user","content":"x"}],"gt":{"calls":[{"name":"f","arguments":{"a":2}}]},"gt_text":"[f(a=1)]"})";
  EXPECT_EQ(filter_corpus({rec}).report.dropped_bad_call, 1u);
}

TEST(Filter, NormalizesXlamRecords) {
  const Value rec = parse_json(R"({"id":7,"query":"q","answers":[{"name":"f","arguments":{"a":1}}],"tools":"[]"})");
  const Value norm = normalize_record(rec);
  EXPECT_EQ(dump_json(norm),
            R"({"id":"7","schemas":"[]","turns":[{"role":"user","content":"q"}],"gt_text":"[{\"name\":\"f\",\"arguments\":{\"a\":1}}]","source":"xlam"})");
  const Value other = parse_json(R"({"id":"x"})");
  EXPECT_EQ(normalize_record(other), other);
}

TEST(Filter, ReportText) {
  const FilterResult r = filter_corpus(fixture_lines("filter_10.jsonl"));
  const std::string text = r.report.to_text();
  EXPECT_NE(text.find("kept"), std::string::npos);
  EXPECT_NE(text.find('7'), std::string::npos);
}

TEST(Mask, RenamesSchemaOrder) {
  const MaskResult m = mask_sample(weather_sample());
  EXPECT_EQ(m.sample.schemas[0].name, "func_1");
  EXPECT_EQ(m.sample.schemas[1].name, "func_2");
  EXPECT_EQ(m.sample.schemas[0].parameters[1].first, "param_2");
  EXPECT_EQ(m.sample.gt_text, R"([func_1(param_1="Paris", param_2="C")])");
  EXPECT_EQ(m.sample.turns[0].content, "Weather in Paris, in C please.");
  EXPECT_EQ(m.mapping.functions[0], (std::pair<std::string, std::string>{"get_weather", "func_1"}));
}

TEST(Mask, NoOriginalNamesRemain) {
  const MaskResult m = mask_sample(weather_sample());
  const std::string schemas = dump_json(schemas_to_value(m.sample.schemas));
  for (const char* name : {"get_weather", "get_time", "city", "unit", "zone"}) {
    EXPECT_EQ(schemas.find(name), std::string::npos) << name;
    EXPECT_EQ(m.sample.gt_text.find(name), std::string::npos) << name;
  }
}

TEST(Mask, RoundTripIsByteExact) {
  for (const auto& s : fixture_samples("xlam_singles.jsonl")) {
    const MaskResult m = mask_sample(s);
    EXPECT_EQ(sample_to_json(unmask_sample(m.sample, m.mapping)), sample_to_json(s)) << s.id;
  }
}

TEST(Mask, TextEditsKeepSpelling) {
  MaskMapping mapping;
  mapping.functions = {{"f", "func_1"}};
  mapping.parameters = {{{"f", "a"}, "param_1"}};
  EXPECT_EQ(mask_answer_text("[ f( a = 2.0 ,b='x')]", mapping), "[ func_1( param_1 = 2.0 ,b='x')]");
  EXPECT_EQ(mask_answer_text(R"({"name": "f", "arguments": {"a": 1}})", mapping),
            R"({"name": "func_1", "arguments": {"param_1": 1}})");
  EXPECT_EQ(mask_answer_text("not a call", mapping), "not a call");
}

TEST(Mask, DirectResponseKeepsGt) {
  const Sample s = sample_from_value(parse_json(R"({"id":"d","schemas":[{"name":"f","parameters":{"a":{"type":"int"}}}],
    "turns":[{"role":"user","content":"hi"}],"gt":{"direct_response":"hello"},"gt_text":"hello"})"));
  const MaskResult m = mask_sample(s);
  EXPECT_EQ(m.sample.schemas[0].name, "func_1");
  EXPECT_EQ(m.sample.gt_text, "hello");
  EXPECT_EQ(m.sample.gt.direct_response, "hello");
}

TEST(Mask, DoubleMaskingIsAnError) {
  const MaskResult once = mask_sample(weather_sample());
  EXPECT_THROW(mask_sample(once.sample), MaskCollision);
  const MaskResult again = mask_sample(once.sample, MaskOptions{true});
  EXPECT_EQ(sample_to_json(again.sample), sample_to_json(once.sample));
}

TEST(Mask, MappingValueRoundTripAndInjectivity) {
  const MaskResult m = mask_sample(weather_sample());
  const MaskMapping back = MaskMapping::from_value(m.mapping.to_value());
  EXPECT_EQ(dump_json(back.to_value()), dump_json(m.mapping.to_value()));
  Value v = m.mapping.to_value();
  const std::string text = dump_json(v);
  // two originals onto one masked name
  std::string broken = text;
  broken.replace(broken.find("func_2"), 6, "func_1");
  EXPECT_THROW(MaskMapping::from_value(parse_json(broken)), SchemaError);
}

TEST(Mask, StrictRewardInvariant) {
  oracle::AnswerGenerator gen(77);
  const RewardConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const AnswerSet gt = gen.answer(3, 3);
    AnswerSet pred = gt;
    if (gen.coin()) {
      auto& c = pred.calls[gen.below(pred.calls.size())];
      if (!c.args.empty()) c.args[0].value = gen.mutate(c.args[0].value);
    }
    MaskMapping mapping;
    for (std::size_t k = 0; k < gt.calls.size(); ++k) {
      mapping.functions.push_back({gt.calls[k].name, "func_" + std::to_string(k + 1)});
      for (std::size_t j = 0; j < gt.calls[k].args.size(); ++j) {
        mapping.parameters.push_back({{gt.calls[k].name, gt.calls[k].args[j].key}, "param_" + std::to_string(j + 1)});
      }
    }
    const auto plain = strict_reward(parse_structured_response(wrap_response("", print_call_expression(pred))), gt, cfg);
    const auto masked = strict_reward(
        parse_structured_response(wrap_response("", mask_answer_text(print_call_expression(pred), mapping))),
        mask_answer(gt, mapping), cfg);
    EXPECT_EQ(plain.reward, masked.reward);
    EXPECT_EQ(plain.value_errors, masked.value_errors);
  }
}

TEST(Augment, CombineSharedSchema) {
  const Sample a = weather_sample();
  Sample b = weather_sample();
  b.id = "s2";
  const AugmentResult r = augment_multi_turn({a, b}, Strategy::combine, 1);
  ASSERT_EQ(r.samples.size(), 1u);
  const Sample& c = r.samples[0];
  EXPECT_EQ(c.user_turns(), 2u);
  EXPECT_EQ(c.schemas.size(), 2u);
  EXPECT_TRUE(c.multi_turn);
  EXPECT_FALSE(c.provenance->fallback_pairing);
  EXPECT_EQ(c.provenance->parents.size(), 2u);
}

TEST(Augment, ParamClarification) {
  const Sample s = weather_sample();
  const Sample out = augment_param_clarification(s, 5);
  ASSERT_EQ(out.turns.size(), 3u);
  EXPECT_EQ(out.turns[0].content, "Weather in ___, in C please.");
  ASSERT_TRUE(out.turns[1].calls.has_value());
  EXPECT_TRUE(out.turns[1].calls->is_direct_response());
  EXPECT_EQ(out.turns[2].content, "The city is Paris.");
  EXPECT_EQ(out.gt_text, s.gt_text);
}

TEST(Augment, ToolRemoval) {
  const Sample out = augment_tool_removal(weather_sample(), 5);
  ASSERT_EQ(out.schemas.size(), 1u);
  EXPECT_EQ(out.schemas[0].name, "get_time");
  ASSERT_EQ(out.turns.size(), 3u);
  ASSERT_EQ(out.turns[2].schemas.size(), 1u);
  EXPECT_EQ(out.turns[2].schemas[0].name, "get_weather");
}

TEST(Augment, ResultValidationShowsWrongCall) {
  const Sample s = weather_sample();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Sample out = augment_result_validation(s, seed, {"Paris", "Rome"});
    ASSERT_EQ(out.turns.size(), 3u);
    ASSERT_TRUE(out.turns[1].calls.has_value());
    EXPECT_FALSE(ast_equal(*out.turns[1].calls, s.gt));
    EXPECT_TRUE(ast_equal(out.gt, s.gt));
  }
}

TEST(Augment, InapplicableCases) {
  Sample direct = weather_sample();
  direct.gt = AnswerSet::response("no");
  EXPECT_THROW(augment_tool_removal(direct, 1), StrategyInapplicable);
  Sample vague = weather_sample();
  vague.turns[0].content = "What is it like outside?";
  EXPECT_THROW(augment_param_clarification(vague, 1), StrategyInapplicable);
  Sample multi = weather_sample();
  multi.multi_turn = true;
  EXPECT_THROW(augment_result_validation(multi, 1, {}), StrategyInapplicable);
}

TEST(Augment, Deterministic) {
  const auto corpus = fixture_samples("xlam_singles.jsonl");
  for (Strategy st : {Strategy::combine, Strategy::tool_removal, Strategy::param_clarification,
                      Strategy::result_validation}) {
    EXPECT_EQ(samples_to_jsonl(augment_multi_turn(corpus, st, 9).samples),
              samples_to_jsonl(augment_multi_turn(corpus, st, 9).samples));
  }
}

TEST(Augment, StrategyNames) {
  for (Strategy st : {Strategy::combine, Strategy::tool_removal, Strategy::param_clarification,
                      Strategy::result_validation}) {
    EXPECT_EQ(strategy_from_string(to_string(st)), st);
  }
  EXPECT_FALSE(strategy_from_string("shuffle").has_value());
}

TEST(Augment, StringVocabulary) {
  const auto vocab = string_vocabulary({weather_sample()});
  EXPECT_EQ(vocab, (std::vector<std::string>{"C", "Paris"}));
}

TEST(Stats, EmptyCorpus) {
  const StatsTable t = corpus_stats({});
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& row : t.rows) {
    for (const auto& per : row.counts) EXPECT_EQ(per[0] + per[1], 0u);
  }
}

TEST(Stats, FixtureGrid) {
  const StatsTable t = corpus_stats(fixture_samples("stats_corpus.jsonl"));
  EXPECT_EQ(t.to_value(), parse_json(read_text(oracle::fixture_path("stats_expected.json"))));
  const std::string text = t.to_text();
  EXPECT_NE(text.find("Raw Data"), std::string::npos);
  EXPECT_NE(text.find("Multi-Aug."), std::string::npos);
}

TEST(Sample, JsonRoundTrip) {
  for (const auto& s : fixture_samples("filter_10.jsonl")) {
    EXPECT_EQ(sample_to_json(sample_from_value(parse_json(sample_to_json(s)))), sample_to_json(s));
  }
}

TEST(Sample, RejectsUnknownFields) {
  EXPECT_THROW(sample_from_value(parse_json(
                   R"({"id":"a","schemas":[],"turns":[{"role":"user","content":"x"}],"gt_text":"[f()]","extra":1})")),
               SchemaError);
  EXPECT_THROW(sample_from_value(parse_json(R"({"id":"a","schemas":[],"turns":[],"gt_text":"[f()]"})")),
               SchemaError);
}

TEST(Augment, CensusMatchesGenerator) {
  const auto corpus = fixture_samples("xlam_singles.jsonl");
  ASSERT_EQ(corpus.size(), 100u);
  const Value census = parse_json(read_text(oracle::fixture_path("xlam_singles_census.json")));
  for (const auto& m : census.as_object()) {
    const auto st = strategy_from_string(m.key);
    ASSERT_TRUE(st.has_value()) << m.key;
    const AugmentResult r = augment_multi_turn(corpus, *st, 3);
    EXPECT_EQ(static_cast<double>(r.samples.size()), m.value.as_number().to_double()) << m.key;
  }
}

TEST(Augment, OutputsRepassFilter) {
  const auto corpus = fixture_samples("xlam_singles.jsonl");
  for (Strategy st : {Strategy::combine, Strategy::tool_removal, Strategy::param_clarification,
                      Strategy::result_validation}) {
    const AugmentResult r = augment_multi_turn(corpus, st, 4);
    EXPECT_EQ(filter_corpus(split_lines(samples_to_jsonl(r.samples))).report.kept, r.samples.size())
        << to_string(st);
  }
}
