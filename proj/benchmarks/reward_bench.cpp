#include <benchmark/benchmark.h>

#include "tcrl/reward.hpp"
#include "tcrl/toolcall.hpp"

namespace {

using namespace tcrl;

constexpr const char* kGt = R"([get_weather(city="Paris", unit="C"), get_time(zone="CET")])";
constexpr const char* kPred =
    R"(<think>two lookups</think><answer>[get_time(zone="CET"), get_weather(unit="C", city="London")]</answer>)";

void BM_ParseCallExpression(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_call_expression(kGt));
}
BENCHMARK(BM_ParseCallExpression);

void BM_GeneralReward(benchmark::State& state) {
  const RewardConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(general_reward(kPred, kGt, cfg));
}
BENCHMARK(BM_GeneralReward);

void BM_ComputeReward(benchmark::State& state) {
  const RewardConfig cfg;
  const AnswerSet gt = parse_call_expression(kGt);
  std::int64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(compute_reward(kPred, gt, kGt, t++ % 200, cfg));
}
BENCHMARK(BM_ComputeReward);

}  // namespace
