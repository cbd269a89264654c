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

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "internal/lines.hpp"
#include "zsc/error.hpp"

namespace zsc {
namespace {

using internal::ordered_json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t reject_under = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= reject_under) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

std::string fixed4(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<LabelCount> frequency_report(std::span<const DecisionRecord> decisions) {
  if (decisions.empty()) throw Error(ErrorCode::kEmptyInput, "no decisions");
  std::map<std::string, std::size_t> counts;
  for (const auto& d : decisions) {
    if (d.top.empty()) throw Error(ErrorCode::kInvariantViolation, "decision without labels", d.id);
    ++counts[d.predicted_label()];
  }
  std::vector<LabelCount> out;
  out.reserve(counts.size());
  for (auto& [label, count] : counts) out.push_back({label, count});
  // std::map already orders labels ascending; stable sort keeps that for ties.
  std::stable_sort(out.begin(), out.end(),
                   [](const LabelCount& a, const LabelCount& b) { return a.count > b.count; });
  return out;
}

std::vector<CoveragePoint> coverage_curve(std::span<const double> max_probs,
                                          std::span<const double> thresholds) {
  if (max_probs.empty()) throw Error(ErrorCode::kEmptyInput, "no items for coverage");
  std::vector<CoveragePoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto n = std::count_if(max_probs.begin(), max_probs.end(),
                                 [t](double p) { return p >= t; });
    out.push_back({t, static_cast<double>(n) / static_cast<double>(max_probs.size())});
  }
  return out;
}

std::vector<CoveragePoint> coverage_curve(std::span<const DecisionRecord> decisions,
                                          std::span<const double> thresholds) {
  std::vector<double> max_probs;
  max_probs.reserve(decisions.size());
  for (const auto& d : decisions) max_probs.push_back(d.max_prob());
  return coverage_curve(max_probs, thresholds);
}

std::vector<double> default_thresholds() {
  std::vector<double> out;
  for (int i = 0; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

// ---------------------------------------------------------------------------

SamplePlan stratified_sample(std::span<const DecisionRecord> decisions, std::uint64_t seed,
                             std::size_t top_k_classes, std::size_t per_class) {
  const auto freq = frequency_report(decisions);
  SamplePlan plan;
  plan.seed = seed;
  plan.top_k_classes = top_k_classes;
  plan.per_class = per_class;
  if (top_k_classes > freq.size()) {
    plan.warnings.push_back("requested " + std::to_string(top_k_classes) + " classes, only " +
                            std::to_string(freq.size()) + " distinct labels predicted");
  }
  const std::size_t n_classes = std::min(top_k_classes, freq.size());

  std::unordered_map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n_classes; ++i) members[freq[i].label];
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    auto it = members.find(decisions[i].predicted_label());
    if (it != members.end()) it->second.push_back(i);
  }

  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::string& label = freq[c].label;
    auto& pool = members[label];
    if (pool.size() < per_class) {
      plan.warnings.push_back("class '" + label + "' has " + std::to_string(pool.size()) +
                              " members, fewer than " + std::to_string(per_class));
    }
    const std::size_t draw = std::min(per_class, pool.size());
    SplitMix64 rng(splitmix64(seed ^ splitmix64(fnv1a64(label))));
    for (std::size_t i = 0; i < draw; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      plan.items.push_back({decisions[pool[i]].id, label});
    }
  }
  return plan;
}

void write_sample_plan(const SamplePlan& plan, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(plan.items.size() + 1);
  ordered_json header;
  header["seed"] = plan.seed;
  header["top_k_classes"] = plan.top_k_classes;
  header["per_class"] = plan.per_class;
  header["count"] = plan.items.size();
  lines.push_back(header.dump());
  for (const auto& item : plan.items) {
    lines.push_back(ordered_json{{"id", item.id}, {"predicted_label", item.predicted_label}}.dump());
  }
  internal::write_lines(path, lines, /*append=*/false);
}

SamplePlan read_sample_plan(const std::filesystem::path& path) {
  const auto lines = internal::read_lines(path);
  if (lines.empty()) throw Error(ErrorCode::kEmptyFile, path.string() + " is empty", path.string());
  SamplePlan plan;
  const auto header = internal::parse_object(lines[0], 1);
  plan.seed = internal::required_field<std::uint64_t>(header, "seed", 1);
  plan.top_k_classes = internal::required_field<std::size_t>(header, "top_k_classes", 1);
  plan.per_class = internal::required_field<std::size_t>(header, "per_class", 1);
  const auto count = internal::required_field<std::size_t>(header, "count", 1);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (internal::is_blank(lines[i])) continue;
    const auto j = internal::parse_object(lines[i], i + 1);
    SampleItem item{internal::required_field<std::string>(j, "id", i + 1),
                    internal::required_field<std::string>(j, "predicted_label", i + 1)};
    if (!seen.insert(item.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate sample id '" + item.id + "'", item.id, i + 1);
    }
    plan.items.push_back(std::move(item));
  }
  if (plan.items.size() != count) {
    throw Error(ErrorCode::kCountMismatch,
                path.string() + ": header declares " + std::to_string(count) + " items, found " +
                    std::to_string(plan.items.size()),
                path.string());
  }
  return plan;
}

// ---------------------------------------------------------------------------

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::kHit: return "hit";
    case VerdictKind::kMiss: return "miss";
    case VerdictKind::kSkip: return "skip";
  }
  return "skip";
}

std::optional<VerdictKind> parse_verdict_kind(std::string_view text) {
  if (text == "hit") return VerdictKind::kHit;
  if (text == "miss") return VerdictKind::kMiss;
  if (text == "skip") return VerdictKind::kSkip;
  return std::nullopt;
}

std::string format_verdict(const Verdict& v) {
  ordered_json j;
  j["id"] = v.id;
  j["predicted_label"] = v.predicted_label;
  j["verdict"] = std::string(to_string(v.verdict));
  j["annotator"] = v.annotator;
  j["timestamp"] = v.timestamp;
  return j.dump();
}

Verdict parse_verdict(std::string_view line, std::size_t line_no) {
  const auto j = internal::parse_object(line, line_no);
  Verdict v;
  v.id = internal::required_field<std::string>(j, "id", line_no);
  v.predicted_label = internal::required_field<std::string>(j, "predicted_label", line_no);
  auto kind = parse_verdict_kind(internal::required_field<std::string>(j, "verdict", line_no));
  if (!kind) {
    throw Error(ErrorCode::kMalformedLine,
                "line " + std::to_string(line_no) + " has an unknown verdict", v.id, line_no);
  }
  v.verdict = *kind;
  v.annotator = internal::required_field<std::string>(j, "annotator", line_no);
  v.timestamp = internal::required_field<std::int64_t>(j, "timestamp", line_no);
  return v;
}

void append_verdicts(std::span<const Verdict> verdicts, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(verdicts.size());
  for (const auto& v : verdicts) lines.push_back(format_verdict(v));
  internal::write_lines(path, lines, /*append=*/true);
}

std::vector<Verdict> read_verdicts(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  const auto lines = internal::read_lines(path);
  std::vector<Verdict> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (internal::is_blank(lines[i])) continue;
    out.push_back(parse_verdict(lines[i], i + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<JudgedItem> join_verdicts(const SamplePlan& plan,
                                      std::span<const DecisionRecord> decisions,
                                      std::span<const Verdict> verdicts) {
  std::unordered_map<std::string, double> max_prob;
  for (const auto& d : decisions) max_prob.emplace(d.id, d.max_prob());

  // Latest judgment per id; skips only mark the item as seen.
  std::unordered_map<std::string, std::optional<bool>> judged;
  for (const auto& v : verdicts) {
    auto& slot = judged[v.id];
    if (v.verdict != VerdictKind::kSkip) slot = v.verdict == VerdictKind::kHit;
  }

  std::vector<JudgedItem> out;
  std::size_t missing = 0;
  std::string first_missing;
  for (const auto& item : plan.items) {
    auto j = judged.find(item.id);
    if (j == judged.end()) {
      if (missing++ == 0) first_missing = item.id;
      continue;
    }
    if (!j->second) continue;
    auto p = max_prob.find(item.id);
    if (p == max_prob.end()) {
      throw Error(ErrorCode::kInvariantViolation,
                  "sample item '" + item.id + "' has no decision record", item.id);
    }
    out.push_back({item.id, item.predicted_label, *j->second, p->second});
  }
  if (missing > 0) {
    throw Error(ErrorCode::kMissingVerdict,
                std::to_string(missing) + " of " + std::to_string(plan.items.size()) +
                    " sample items have no verdict (first: '" + first_missing + "')",
                first_missing);
  }
  return out;
}

Sweep threshold_sweep(std::span<const JudgedItem> items, std::span<const double> thresholds) {
  if (items.empty()) throw Error(ErrorCode::kEmptyInput, "no judged items");
  Sweep sweep;
  sweep.total = items.size();
  for (const auto& it : items) (it.hit ? sweep.baseline_hits : sweep.baseline_errors)++;

  auto rate = [](std::size_t n, std::size_t base) {
    return base == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(base);
  };
  for (double t : thresholds) {
    SweepRow row;
    row.threshold = t;
    for (const auto& it : items) {
      if (it.max_prob >= t) (it.hit ? row.hits : row.errors)++;
    }
    row.classified = row.hits + row.errors;
    row.hit_rate = rate(row.hits, sweep.baseline_hits);
    row.error_rate = rate(row.errors, sweep.baseline_errors);
    if (row.error_rate > 0.0) row.ratio = row.hit_rate / row.error_rate;
    sweep.rows.push_back(row);
  }
  return sweep;
}

const SweepRow& optimal_threshold(const Sweep& sweep, double min_coverage) {
  const SweepRow* best = nullptr;
  for (const auto& row : sweep.rows) {
    if (!row.ratio) continue;
    const double coverage =
        static_cast<double>(row.classified) / static_cast<double>(sweep.total);
    if (coverage < min_coverage) continue;
    if (best == nullptr || *row.ratio > *best->ratio ||
        (*row.ratio == *best->ratio && row.threshold < best->threshold)) {
      best = &row;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorCode::kNoEligibleRow,
                "no sweep row with a defined ratio reaches coverage " + fixed4(min_coverage));
  }
  return *best;
}

MeanProbStats mean_top_prob_stats(std::span<const JudgedItem> items) {
  MeanProbStats s;
  double hit_sum = 0.0, miss_sum = 0.0;
  for (const auto& it : items) {
    if (it.hit) {
      hit_sum += it.max_prob;
      ++s.hits;
    } else {
      miss_sum += it.max_prob;
      ++s.misses;
    }
  }
  if (s.hits == 0) throw Error(ErrorCode::kEmptyPartition, "no hit verdicts");
  if (s.misses == 0) throw Error(ErrorCode::kEmptyPartition, "no miss verdicts");
  s.mean_hit = hit_sum / static_cast<double>(s.hits);
  s.mean_miss = miss_sum / static_cast<double>(s.misses);
  return s;
}

AccuracyReport per_class_accuracy(std::span<const JudgedItem> items,
                                  std::span<const std::string> expected_classes) {
  AccuracyReport report;
  std::unordered_map<std::string, std::size_t> slot;
  auto add_class = [&](const std::string& label) {
    auto [it, inserted] = slot.emplace(label, report.classes.size());
    if (inserted) report.classes.push_back({label, 0, 0, 0.0});
    return it->second;
  };
  for (const auto& label : expected_classes) add_class(label);
  for (const auto& it : items) {
    if (!expected_classes.empty() && !slot.contains(it.predicted_label)) continue;
    auto& c = report.classes[add_class(it.predicted_label)];
    ++c.judged;
    if (it.hit) ++c.hits;
  }
  if (report.classes.empty()) throw Error(ErrorCode::kEmptyInput, "no judged items");
  double sum = 0.0;
  for (auto& c : report.classes) {
    if (c.judged == 0) {
      throw Error(ErrorCode::kEmptyClass, "class '" + c.label + "' has no judged items", c.label);
    }
    c.accuracy = static_cast<double>(c.hits) / static_cast<double>(c.judged);
    sum += c.accuracy;
  }
  report.average = sum / static_cast<double>(report.classes.size());
  return report;
}

// ---------------------------------------------------------------------------

std::string format_frequency_csv(std::span<const LabelCount> counts) {
  std::string out = "label,count\n";
  for (const auto& c : counts) out += c.label + "," + std::to_string(c.count) + "\n";
  return out;
}

std::string format_coverage_csv(std::span<const CoveragePoint> points) {
  std::string out = "threshold,percent_classified\n";
  for (const auto& p : points) out += fixed4(p.threshold) + "," + fixed4(100.0 * p.fraction) + "\n";
  return out;
}

std::string format_sweep_csv(const Sweep& sweep) {
  std::string out = "threshold,classified,hits,hit_rate,errors,error_rate,ratio\n";
  for (const auto& r : sweep.rows) {
    out += fixed4(r.threshold) + "," + std::to_string(r.classified) + "," +
           std::to_string(r.hits) + "," + fixed4(r.hit_rate) + "," + std::to_string(r.errors) +
           "," + fixed4(r.error_rate) + "," + (r.ratio ? fixed4(*r.ratio) : std::string()) + "\n";
  }
  return out;
}

std::string format_accuracy_csv(const AccuracyReport& report,
                                std::span<const LabelCount> frequencies) {
  std::unordered_map<std::string, std::size_t> freq;
  std::size_t freq_total = 0;
  for (const auto& f : frequencies) freq.emplace(f.label, f.count);
  std::string out = "label,frequency,judged,hits,accuracy\n";
  std::size_t judged = 0, hits = 0;
  for (const auto& c : report.classes) {
    std::string f;
    if (!frequencies.empty()) {
      auto it = freq.find(c.label);
      const std::size_t n = it == freq.end() ? 0 : it->second;
      freq_total += n;
      f = std::to_string(n);
    }
    out += c.label + "," + f + "," + std::to_string(c.judged) + "," + std::to_string(c.hits) +
           "," + fixed4(c.accuracy) + "\n";
    judged += c.judged;
    hits += c.hits;
  }
  out += "average," + (frequencies.empty() ? std::string() : std::to_string(freq_total)) + "," +
         std::to_string(judged) + "," + std::to_string(hits) + "," + fixed4(report.average) + "\n";
  return out;
}

}  // namespace zsc
