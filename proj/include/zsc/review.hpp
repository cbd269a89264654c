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

// State behind the annotation service: hands out sampled predictions to
// annotators and durably records their verdicts.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "zsc/embedding_io.hpp"
#include "zsc/evaluation.hpp"

namespace zsc {

// Append-only verdict file. Each append is one write(2) of a whole line
// followed by fsync, so a returned append survives a crash.
class VerdictLog {
 public:
  explicit VerdictLog(std::filesystem::path path);
  ~VerdictLog();
  VerdictLog(const VerdictLog&) = delete;
  VerdictLog& operator=(const VerdictLog&) = delete;

  void append(const Verdict& v);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

struct ReviewItem {
  std::string id;
  std::string image_url;
  std::string predicted_label;
  std::vector<LabelProb> top;
  std::size_t remaining = 0;  // items without any verdict, this one included
};

struct VerdictSubmission {
  std::string id;
  std::string predicted_label;
  std::string verdict;
  std::string annotator;
};

enum class SubmitStatus { kAccepted, kDuplicate, kUnknownId, kInvalid };

struct ClassProgress {
  std::string label;
  std::size_t labeled = 0;
  std::size_t total = 0;
};

struct Progress {
  std::size_t labeled = 0;
  std::size_t total = 0;
  std::vector<ClassProgress> per_class;
};

struct ReviewReport {
  std::size_t judged = 0;  // hit/miss verdicts counted
  std::optional<AccuracyReport> accuracy;
  std::optional<MeanProbStats> means;
};

class ReviewSession {
 public:
  using Clock = std::function<std::int64_t()>;

  // `image_paths` maps ids to paths under the image root; ids without one
  // are served as "/images/<id>". Existing verdicts in `verdict_path` are
  // replayed so a restarted session resumes where it stopped.
  ReviewSession(SamplePlan plan, std::span<const DecisionRecord> decisions,
                std::unordered_map<std::string, std::string> image_paths,
                std::filesystem::path verdict_path, Clock clock = {});

  // The annotator's current item, or the first pending item nobody holds.
  // Repeated calls without a verdict return the same item.
  std::optional<ReviewItem> next(const std::string& annotator);

  // Invalid and unknown submissions leave the verdict file untouched. A
  // repeat (id, annotator) pair is acknowledged without a second append.
  SubmitStatus submit(const VerdictSubmission& submission);

  Progress progress() const;
  ReviewReport report() const;

 private:
  ReviewItem make_item(std::size_t index) const;
  std::size_t pending_count() const;
  void record(const Verdict& v);

  SamplePlan plan_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, DecisionRecord> decisions_;
  std::unordered_map<std::string, std::string> image_paths_;
  VerdictLog log_;
  Clock clock_;

  mutable std::mutex mu_;
  std::vector<bool> labeled_;
  std::vector<std::optional<bool>> judgment_;  // latest hit/miss per item
  std::set<std::pair<std::string, std::string>> seen_;  // (id, annotator)
  std::unordered_map<std::string, std::size_t> held_by_annotator_;
  std::unordered_map<std::size_t, std::string> holder_of_item_;
};

}  // namespace zsc
