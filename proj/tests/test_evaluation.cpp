// Copyright 2026 The ZSC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zsc/evaluation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "support/test_support.hpp"
#include "zsc/error.hpp"

namespace zsc {
namespace {

DecisionRecord record(const std::string& id, const std::string& label, double prob) {
  DecisionRecord r;
  r.id = id;
  r.mode = DecisionMode::kImage;
  r.threshold = 0.0;
  r.top = {{label, prob}};
  r.accepted = true;
  return r;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no zsc::Error thrown";
  return ErrorCode::kInvariantViolation;
}

// ---------------------------------------------------------------------------
// Frequency and coverage

TEST(FrequencyReport, Examples) {
  const std::vector<DecisionRecord> d{record("1", "A", 0.5), record("2", "A", 0.6),
                                      record("3", "B", 0.7)};
  EXPECT_EQ(frequency_report(d), (std::vector<LabelCount>{{"A", 2}, {"B", 1}}));
  EXPECT_EQ(code_of([] { frequency_report({}); }), ErrorCode::kEmptyInput);
}

TEST(FrequencyReport, TiesByLabelAndEngineeredCounts) {
  // Known counts laid out in a shuffled order.
  const std::map<std::string, std::size_t> want{
      {"skyscraper", 74}, {"clothing store", 33}, {"art gallery", 33}, {"bridge", 5}, {"zoo", 1}};
  std::vector<DecisionRecord> d;
  for (const auto& [label, n] : want) {
    for (std::size_t i = 0; i < n; ++i) d.push_back(record(label + std::to_string(i), label, 0.3));
  }
  std::mt19937_64 rng(3);
  std::shuffle(d.begin(), d.end(), rng);
  const std::vector<LabelCount> expected{
      {"skyscraper", 74}, {"art gallery", 33}, {"clothing store", 33}, {"bridge", 5}, {"zoo", 1}};
  EXPECT_EQ(frequency_report(d), expected);
  EXPECT_EQ(format_frequency_csv(expected).substr(0, 26), "label,count\nskyscraper,74\n");
}

TEST(CoverageCurve, Examples) {
  const std::vector<double> high{0.9, 0.9, 0.9};
  const std::vector<double> t05{0.5};
  EXPECT_DOUBLE_EQ(coverage_curve(high, t05)[0].fraction, 1.0);
  const std::vector<double> probs{0.1, 0.3, 0.5, 0.7};
  const std::vector<double> t04{0.4};
  EXPECT_DOUBLE_EQ(coverage_curve(probs, t04)[0].fraction, 0.5);
  EXPECT_EQ(code_of([&] { coverage_curve(std::vector<double>{}, t04); }), ErrorCode::kEmptyInput);

  const auto t = default_thresholds();
  ASSERT_EQ(t.size(), 11u);
  EXPECT_EQ(t[3], 0.3);
  EXPECT_EQ(t[10], 1.0);
  EXPECT_EQ(format_coverage_csv(coverage_curve(probs, t04)), "threshold,percent_classified\n0.4000,50.0000\n");
}

TEST(CoverageCurve, MonotoneNonIncreasing) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> probs(1 + trial % 60);
    for (auto& p : probs) p = u(rng);
    std::vector<double> thresholds(12);
    for (auto& t : thresholds) t = u(rng);
    std::sort(thresholds.begin(), thresholds.end());
    const auto curve = coverage_curve(probs, thresholds);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      ASSERT_LE(curve[i].fraction, curve[i - 1].fraction);
    }
  }
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<DecisionRecord> skewed_decisions() {
  std::vector<DecisionRecord> d;
  const std::vector<std::pair<std::string, std::size_t>> sizes{
      {"skyscraper", 500}, {"bridge", 300}, {"bakery shop", 200}, {"hospital", 80}, {"zoo", 20}};
  std::size_t n = 0;
  for (std::size_t round = 0; n < 1100; ++round) {
    for (const auto& [label, size] : sizes) {
      if (round < size) d.push_back(record("img" + std::to_string(n++), label, 0.4));
    }
  }
  return d;
}

TEST(StratifiedSample, DeterministicAndWithoutReplacement) {
  const auto d = skewed_decisions();
  const auto a = stratified_sample(d, 42, 3, 100);
  const auto b = stratified_sample(d, 42, 3, 100);
  EXPECT_EQ(a.items, b.items);
  ASSERT_EQ(a.items.size(), 300u);
  std::set<std::string> ids;
  std::map<std::string, std::size_t> per_label;
  for (const auto& it : a.items) {
    ids.insert(it.id);
    ++per_label[it.predicted_label];
  }
  EXPECT_EQ(ids.size(), 300u);
  EXPECT_EQ(per_label, (std::map<std::string, std::size_t>{
                           {"skyscraper", 100}, {"bridge", 100}, {"bakery shop", 100}}));
  EXPECT_TRUE(a.warnings.empty());
  EXPECT_NE(stratified_sample(d, 43, 3, 100).items, a.items);
}

TEST(StratifiedSample, ExhaustedClassWarns) {
  const auto plan = stratified_sample(skewed_decisions(), 7, 4, 100);
  std::size_t hospital = 0;
  for (const auto& it : plan.items) hospital += it.predicted_label == "hospital";
  EXPECT_EQ(hospital, 80u);
  EXPECT_EQ(plan.items.size(), 380u);
  ASSERT_EQ(plan.warnings.size(), 1u);
  EXPECT_NE(plan.warnings[0].find("hospital"), std::string::npos);
}

TEST(StratifiedSample, TenClassesOfHundredGiveThousand) {
  std::vector<DecisionRecord> d;
  for (std::size_t i = 0; i < 5000; ++i) {
    d.push_back(record("x" + std::to_string(i), "class " + std::to_string(i % 12), 0.2));
  }
  const auto plan = stratified_sample(d, 2024);
  EXPECT_EQ(plan.items.size(), 1000u);
  EXPECT_EQ(plan.top_k_classes, 10u);
  EXPECT_EQ(plan.per_class, 100u);
}

TEST(StratifiedSample, ClassSelectionFollowsFrequencyOrder) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<DecisionRecord> d;
    const std::size_t n = 5 + trial % 40;
    std::uniform_int_distribution<int> label(0, 5);
    for (std::size_t i = 0; i < n; ++i) {
      d.push_back(record("i" + std::to_string(i), std::string(1, char('a' + label(rng))), 0.5));
    }
    const auto freq = frequency_report(d);
    const std::size_t k = std::min<std::size_t>(3, freq.size());
    const std::size_t per = 1 + trial % 4;
    const auto plan = stratified_sample(d, trial, k, per);
    std::map<std::string, std::size_t> got;
    for (const auto& it : plan.items) ++got[it.predicted_label];
    std::map<std::string, std::size_t> want;
    for (std::size_t c = 0; c < k; ++c) want[freq[c].label] = std::min(per, freq[c].count);
    ASSERT_EQ(got, want);
    ASSERT_EQ(plan.items, stratified_sample(d, trial, k, per).items) << trial;
  }
}

TEST(SamplePlanFile, RoundTrip) {
  testing::TempDir dir;
  const auto plan = stratified_sample(skewed_decisions(), 5, 2, 10);
  write_sample_plan(plan, dir.path() / "plan.jsonl");
  const auto back = read_sample_plan(dir.path() / "plan.jsonl");
  EXPECT_EQ(back.seed, 5u);
  EXPECT_EQ(back.top_k_classes, 2u);
  EXPECT_EQ(back.per_class, 10u);
  EXPECT_EQ(back.items, plan.items);

  auto text = testing::slurp(dir.path() / "plan.jsonl");
  text = text.substr(0, text.rfind('\n', text.size() - 2) + 1);  // drop the last item
  testing::spit(dir.path() / "short.jsonl", text);
  EXPECT_EQ(code_of([&] { read_sample_plan(dir.path() / "short.jsonl"); }),
            ErrorCode::kCountMismatch);
}

// ---------------------------------------------------------------------------
// Verdicts and joins

TEST(VerdictRecords, FormatParseAppend) {
  testing::TempDir dir;
  const auto path = dir.path() / "verdicts.jsonl";
  EXPECT_TRUE(read_verdicts(path).empty());
  const std::vector<Verdict> v{{"a", "bridge", VerdictKind::kHit, "ann", 1700000000},
                               {"b", "zoo", VerdictKind::kSkip, "ann", 1700000001}};
  append_verdicts(std::span(v).first(1), path);
  append_verdicts(std::span(v).subspan(1), path);
  EXPECT_EQ(read_verdicts(path), v);
  EXPECT_EQ(parse_verdict(format_verdict(v[0])), v[0]);
  EXPECT_EQ(code_of([] {
              parse_verdict(R"({"id":"a","predicted_label":"x","verdict":"maybe",)"
                            R"("annotator":"n","timestamp":1})");
            }),
            ErrorCode::kMalformedLine);
}

TEST(JoinVerdicts, LatestNonSkipWinsAndSkipsDrop) {
  SamplePlan plan;
  plan.items = {{"a", "bridge"}, {"b", "bridge"}, {"c", "zoo"}};
  const std::vector<DecisionRecord> d{record("a", "bridge", 0.7), record("b", "bridge", 0.4),
                                      record("c", "zoo", 0.9)};
  const std::vector<Verdict> v{{"a", "bridge", VerdictKind::kMiss, "p", 1},
                               {"a", "bridge", VerdictKind::kHit, "q", 2},
                               {"b", "bridge", VerdictKind::kSkip, "p", 3},
                               {"c", "zoo", VerdictKind::kMiss, "p", 4},
                               {"c", "zoo", VerdictKind::kSkip, "q", 5}};
  const auto judged = join_verdicts(plan, d, v);
  ASSERT_EQ(judged.size(), 2u);
  EXPECT_EQ(judged[0].id, "a");
  EXPECT_TRUE(judged[0].hit);
  EXPECT_DOUBLE_EQ(judged[0].max_prob, 0.7);
  EXPECT_EQ(judged[1].id, "c");
  EXPECT_FALSE(judged[1].hit);
}

TEST(JoinVerdicts, MissingVerdictNamesTheCount) {
  SamplePlan plan;
  plan.items = {{"a", "bridge"}, {"b", "bridge"}, {"c", "zoo"}};
  const std::vector<DecisionRecord> d{record("a", "bridge", 0.7), record("b", "bridge", 0.4),
                                      record("c", "zoo", 0.9)};
  const std::vector<Verdict> v{{"a", "bridge", VerdictKind::kHit, "p", 1}};
  try {
    join_verdicts(plan, d, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingVerdict);
    EXPECT_EQ(e.subject(), "b");
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
  plan.items = {{"a", "bridge"}, {"ghost", "zoo"}};
  const std::vector<Verdict> both{{"a", "bridge", VerdictKind::kHit, "p", 1},
                                  {"ghost", "zoo", VerdictKind::kHit, "p", 2}};
  EXPECT_EQ(code_of([&] { join_verdicts(plan, d, both); }), ErrorCode::kInvariantViolation);
}

// ---------------------------------------------------------------------------
// Sweeps

TEST(ThresholdSweep, ReproducesGoldenTable) {
  const auto rows = testing::load_sweep_golden();
  const auto items = testing::sweep_golden_items(rows);
  ASSERT_EQ(items.size(), 1000u);
  const auto sweep = threshold_sweep(items, default_thresholds());
  EXPECT_EQ(sweep.baseline_hits, 460u);
  EXPECT_EQ(sweep.baseline_errors, 540u);
  ASSERT_EQ(sweep.rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& got = sweep.rows[i];
    const auto& want = rows[i];
    SCOPED_TRACE(want.threshold);
    EXPECT_EQ(got.classified, want.classified);
    EXPECT_EQ(got.hits, want.hits);
    EXPECT_EQ(got.errors, want.errors);
    EXPECT_NEAR(got.hit_rate, want.hit_rate, 1e-4);
    EXPECT_NEAR(got.error_rate, want.error_rate, 1e-4);
    ASSERT_EQ(got.ratio.has_value(), want.ratio.has_value());
    if (want.ratio) EXPECT_NEAR(*got.ratio, *want.ratio, 1e-4);
  }
  EXPECT_EQ(sweep.rows[0].hit_rate, 1.0);
  EXPECT_EQ(sweep.rows[0].error_rate, 1.0);
  EXPECT_EQ(sweep.rows[0].ratio, 1.0);
}

TEST(ThresholdSweep, Row05FromCounts) {
  // 460 hits / 540 errors overall, 335 / 309 of them at or above 0.5.
  std::vector<JudgedItem> items;
  for (int i = 0; i < 460; ++i) items.push_back({"h" + std::to_string(i), "x", true, i < 335 ? 0.7 : 0.2});
  for (int i = 0; i < 540; ++i) items.push_back({"e" + std::to_string(i), "x", false, i < 309 ? 0.7 : 0.2});
  const std::vector<double> t{0.5};
  const auto row = threshold_sweep(items, t).rows[0];
  EXPECT_NEAR(row.hit_rate, 0.7282, 1e-4);
  EXPECT_NEAR(row.error_rate, 0.5722, 1e-4);
  EXPECT_NEAR(*row.ratio, 1.2726, 1e-4);
}

TEST(ThresholdSweep, Errors) {
  const std::vector<double> t{0.5};
  EXPECT_EQ(code_of([&] { threshold_sweep(std::vector<JudgedItem>{}, t); }), ErrorCode::kEmptyInput);
}

TEST(OptimalThreshold, GoldenTable) {
  const auto sweep = threshold_sweep(testing::sweep_golden_items(testing::load_sweep_golden()),
                                     default_thresholds());
  const auto& best = optimal_threshold(sweep, 0.3);
  EXPECT_DOUBLE_EQ(best.threshold, 0.6);
  EXPECT_NEAR(*best.ratio, 1.3373, 1e-4);
  EXPECT_DOUBLE_EQ(optimal_threshold(sweep).threshold, 0.6);
  const auto& any = optimal_threshold(sweep, 0.0);
  EXPECT_DOUBLE_EQ(any.threshold, 0.9);
  EXPECT_NEAR(*any.ratio, 1.5141, 1e-4);
  EXPECT_EQ(code_of([&] { optimal_threshold(sweep, 1.01); }), ErrorCode::kNoEligibleRow);
}

TEST(OptimalThreshold, SingleRowAndTies) {
  const std::vector<JudgedItem> items{{"a", "x", true, 0.9}, {"b", "x", false, 0.2}};
  const std::vector<double> one{0.1};
  EXPECT_DOUBLE_EQ(optimal_threshold(threshold_sweep(items, one), 0.0).threshold, 0.1);
  // 0.0 and 0.1 both give ratio 1; the lower threshold wins.
  const std::vector<double> two{0.1, 0.0};
  EXPECT_DOUBLE_EQ(optimal_threshold(threshold_sweep(items, two), 0.0).threshold, 0.0);
}

TEST(ThresholdSweep, MatchesBruteForceRecount) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.45);
  for (int trial = 0; trial < 1500; ++trial) {
    std::vector<JudgedItem> items(1 + trial % 50);
    for (std::size_t i = 0; i < items.size(); ++i) {
      // Coarse grid so some probabilities sit exactly on thresholds.
      const double p = trial % 3 == 0 ? std::round(u(rng) * 10) / 10 : u(rng);
      items[i] = {"i" + std::to_string(i), "x", coin(rng), p};
    }
    const auto thresholds = default_thresholds();
    const auto sweep = threshold_sweep(items, thresholds);
    for (std::size_t r = 0; r < thresholds.size(); ++r) {
      const auto want = testing::oracle_sweep_row(items, thresholds[r]);
      const auto& got = sweep.rows[r];
      ASSERT_EQ(got.classified, want.classified);
      ASSERT_EQ(got.hits, want.hits);
      ASSERT_EQ(got.errors, want.errors);
      ASSERT_EQ(got.classified, got.hits + got.errors);
      ASSERT_NEAR(got.hit_rate, want.hit_rate, 1e-12);
      ASSERT_NEAR(got.error_rate, want.error_rate, 1e-12);
      ASSERT_GE(got.hit_rate, 0.0);
      ASSERT_LE(got.hit_rate, 1.0);
      ASSERT_GE(got.error_rate, 0.0);
      ASSERT_LE(got.error_rate, 1.0);
      ASSERT_EQ(got.ratio.has_value(), want.ratio.has_value());
      if (want.ratio) ASSERT_NEAR(*got.ratio, *want.ratio, 1e-12);
    }
    if (sweep.baseline_hits) ASSERT_EQ(sweep.rows[0].hit_rate, 1.0);
    if (sweep.baseline_errors) ASSERT_EQ(sweep.rows[0].error_rate, 1.0);
  }
}

TEST(SweepCsv, BlankRatioWhenUndefined) {
  const auto sweep = threshold_sweep(testing::sweep_golden_items(testing::load_sweep_golden()),
                                     default_thresholds());
  const auto csv = format_sweep_csv(sweep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "threshold,classified,hits,hit_rate,errors,error_rate,ratio");
  EXPECT_NE(csv.find("\n0.5000,644,335,0.7283,309,0.5722,1.2727\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\n1.0000,0,0,0.0000,0,0.0000,\n"), std::string::npos) << csv;
}

// ---------------------------------------------------------------------------
// Probability means and accuracy

TEST(MeanTopProb, Examples) {
  const std::vector<JudgedItem> items{{"a", "x", true, 0.6}, {"b", "x", true, 0.8},
                                      {"c", "x", false, 0.5}};
  const auto s = mean_top_prob_stats(items);
  EXPECT_NEAR(s.mean_hit, 0.7, 1e-12);
  EXPECT_NEAR(s.mean_miss, 0.5, 1e-12);
  EXPECT_EQ(s.hits, 2u);
  EXPECT_EQ(s.misses, 1u);
  const std::vector<JudgedItem> all_hits{{"a", "x", true, 0.6}};
  EXPECT_EQ(code_of([&] { mean_top_prob_stats(all_hits); }), ErrorCode::kEmptyPartition);
}

TEST(PerClassAccuracy, Examples) {
  std::vector<JudgedItem> items;
  for (int i = 0; i < 100; ++i) items.push_back({"s" + std::to_string(i), "skyscraper", i < 96, 0.5});
  for (int i = 0; i < 100; ++i) items.push_back({"h" + std::to_string(i), "hospital", false, 0.5});
  const auto report = per_class_accuracy(items);
  ASSERT_EQ(report.classes.size(), 2u);
  EXPECT_EQ(report.classes[0].label, "skyscraper");
  EXPECT_DOUBLE_EQ(report.classes[0].accuracy, 0.96);
  EXPECT_DOUBLE_EQ(report.classes[1].accuracy, 0.0);
  EXPECT_DOUBLE_EQ(report.average, 0.48);

  const std::vector<JudgedItem> one{{"a", "bridge", true, 0.5}};
  EXPECT_DOUBLE_EQ(per_class_accuracy(one).classes[0].accuracy, 1.0);

  const std::vector<std::string> expected{"bridge", "zoo"};
  EXPECT_EQ(code_of([&] { per_class_accuracy(one, expected); }), ErrorCode::kEmptyClass);

  const std::vector<LabelCount> freq{{"skyscraper", 7410}, {"hospital", 12}};
  const auto csv = format_accuracy_csv(report, freq);
  EXPECT_NE(csv.find("skyscraper,7410,100,96,0.9600\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("average,"), std::string::npos);
}

}  // namespace
}  // namespace zsc
