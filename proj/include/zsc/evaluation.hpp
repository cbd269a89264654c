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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zsc/embedding_io.hpp"

namespace zsc {

// ---------------------------------------------------------------------------
// Corpus-level reports

struct LabelCount {
  std::string label;
  std::size_t count = 0;

  friend bool operator==(const LabelCount&, const LabelCount&) = default;
};

// Counts of the top-1 label over all decisions (acceptance ignored),
// descending by count, ties by label ascending.
std::vector<LabelCount> frequency_report(std::span<const DecisionRecord> decisions);

struct CoveragePoint {
  double threshold = 0.0;
  double fraction = 0.0;  // share of items whose max probability >= threshold
};

std::vector<CoveragePoint> coverage_curve(std::span<const double> max_probs,
                                          std::span<const double> thresholds);
std::vector<CoveragePoint> coverage_curve(std::span<const DecisionRecord> decisions,
                                          std::span<const double> thresholds);

// 0.0, 0.1, ..., 1.0 computed as i / 10.
std::vector<double> default_thresholds();

// ---------------------------------------------------------------------------
// Stratified validation sample

struct SampleItem {
  std::string id;
  std::string predicted_label;

  friend bool operator==(const SampleItem&, const SampleItem&) = default;
};

struct SamplePlan {
  std::uint64_t seed = 0;
  std::size_t top_k_classes = 10;
  std::size_t per_class = 100;
  std::vector<SampleItem> items;
  std::vector<std::string> warnings;  // not persisted
};

// Picks the top_k_classes most frequent top-1 labels, then draws per_class
// members of each uniformly without replacement. The generator is SplitMix64
// seeded per class with splitmix64(seed ^ splitmix64(fnv1a64(label))); draws
// are the first per_class positions of a Fisher-Yates shuffle of the class
// members (in decision order), using rejection-sampled bounded integers.
SamplePlan stratified_sample(std::span<const DecisionRecord> decisions, std::uint64_t seed,
                             std::size_t top_k_classes = 10, std::size_t per_class = 100);

// Header record {"seed","top_k_classes","per_class","count"} followed by one
// {"id","predicted_label"} record per item.
void write_sample_plan(const SamplePlan& plan, const std::filesystem::path& path);
SamplePlan read_sample_plan(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Verdicts

enum class VerdictKind { kHit, kMiss, kSkip };

std::string_view to_string(VerdictKind kind);
std::optional<VerdictKind> parse_verdict_kind(std::string_view text);

struct Verdict {
  std::string id;
  std::string predicted_label;
  VerdictKind verdict = VerdictKind::kSkip;
  std::string annotator;
  std::int64_t timestamp = 0;  // UTC seconds

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string format_verdict(const Verdict& v);
Verdict parse_verdict(std::string_view line, std::size_t line_number = 0);
void append_verdicts(std::span<const Verdict> verdicts, const std::filesystem::path& path);
// A missing file reads as no verdicts.
std::vector<Verdict> read_verdicts(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Sample statistics

// A sampled prediction with a hit/miss judgment.
struct JudgedItem {
  std::string id;
  std::string predicted_label;
  bool hit = false;
  double max_prob = 0.0;
};

// Pairs each plan item with its latest hit/miss verdict and its decision's
// max probability. Items whose only verdicts are skips are left out. Throws
// MissingVerdict (message carries the count) when an item has no verdict.
std::vector<JudgedItem> join_verdicts(const SamplePlan& plan,
                                      std::span<const DecisionRecord> decisions,
                                      std::span<const Verdict> verdicts);

struct SweepRow {
  double threshold = 0.0;
  std::size_t classified = 0;
  std::size_t hits = 0;
  double hit_rate = 0.0;    // hits / hits at threshold 0
  std::size_t errors = 0;
  double error_rate = 0.0;  // errors / errors at threshold 0
  std::optional<double> ratio;  // hit_rate / error_rate when error_rate > 0
};

struct Sweep {
  std::vector<SweepRow> rows;
  std::size_t total = 0;
  std::size_t baseline_hits = 0;
  std::size_t baseline_errors = 0;
};

Sweep threshold_sweep(std::span<const JudgedItem> items, std::span<const double> thresholds);

// Row with the largest defined ratio among rows with classified / total >=
// min_coverage; ties go to the lower threshold. Throws NoEligibleRow.
const SweepRow& optimal_threshold(const Sweep& sweep, double min_coverage = 0.3);

struct MeanProbStats {
  double mean_hit = 0.0;
  double mean_miss = 0.0;
  std::size_t hits = 0;
  std::size_t misses = 0;
};

// Throws EmptyPartition when either side has no items.
MeanProbStats mean_top_prob_stats(std::span<const JudgedItem> items);

struct ClassAccuracy {
  std::string label;
  std::size_t hits = 0;
  std::size_t judged = 0;
  double accuracy = 0.0;
};

struct AccuracyReport {
  std::vector<ClassAccuracy> classes;
  double average = 0.0;  // unweighted mean of the class accuracies
};

// Classes appear in `expected_classes` order when given (each must have a
// judged item, else EmptyClass), otherwise in order of first appearance.
AccuracyReport per_class_accuracy(std::span<const JudgedItem> items,
                                  std::span<const std::string> expected_classes = {});

// ---------------------------------------------------------------------------
// Comma-separated report tables, header row, 4-decimal reals.

std::string format_frequency_csv(std::span<const LabelCount> counts);
std::string format_coverage_csv(std::span<const CoveragePoint> points);
std::string format_sweep_csv(const Sweep& sweep);
// `frequencies` supplies the corpus-wide count column when non-empty.
std::string format_accuracy_csv(const AccuracyReport& report,
                                std::span<const LabelCount> frequencies = {});

}  // namespace zsc
