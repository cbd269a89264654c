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

#include "zsc/review.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstring>

#include "zsc/error.hpp"

namespace zsc {
namespace {

std::int64_t utc_seconds() {
  using namespace std::chrono;
  return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

bool url_safe(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/';
}

std::string url_encode_path(const std::string& path) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : path) {
    if (url_safe(c)) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

}  // namespace

VerdictLog::VerdictLog(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorCode::kIoError,
                "cannot open " + path_.string() + ": " + std::strerror(errno), path_.string());
  }
}

VerdictLog::~VerdictLog() {
  if (fd_ >= 0) ::close(fd_);
}

void VerdictLog::append(const Verdict& v) {
  const std::string line = format_verdict(v) + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIoError, "append to " + path_.string() + " failed", path_.string());
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) {
    throw Error(ErrorCode::kIoError, "fsync of " + path_.string() + " failed", path_.string());
  }
}

ReviewSession::ReviewSession(SamplePlan plan, std::span<const DecisionRecord> decisions,
                             std::unordered_map<std::string, std::string> image_paths,
                             std::filesystem::path verdict_path, Clock clock)
    : plan_(std::move(plan)),
      image_paths_(std::move(image_paths)),
      log_(verdict_path),
      clock_(clock ? std::move(clock) : Clock(utc_seconds)) {
  for (std::size_t i = 0; i < plan_.items.size(); ++i) index_.emplace(plan_.items[i].id, i);
  for (const auto& d : decisions) {
    if (index_.contains(d.id)) decisions_.emplace(d.id, d);
  }
  for (const auto& item : plan_.items) {
    if (!decisions_.contains(item.id)) {
      throw Error(ErrorCode::kInvariantViolation,
                  "sample item '" + item.id + "' has no decision record", item.id);
    }
  }
  labeled_.assign(plan_.items.size(), false);
  judgment_.assign(plan_.items.size(), std::nullopt);
  for (const auto& v : read_verdicts(verdict_path)) {
    if (index_.contains(v.id)) record(v);
  }
}

void ReviewSession::record(const Verdict& v) {
  const std::size_t i = index_.at(v.id);
  labeled_[i] = true;
  if (v.verdict != VerdictKind::kSkip) judgment_[i] = v.verdict == VerdictKind::kHit;
  seen_.emplace(v.id, v.annotator);
  auto holder = holder_of_item_.find(i);
  if (holder != holder_of_item_.end()) {
    held_by_annotator_.erase(holder->second);
    holder_of_item_.erase(holder);
  }
}

std::size_t ReviewSession::pending_count() const {
  return static_cast<std::size_t>(std::count(labeled_.begin(), labeled_.end(), false));
}

ReviewItem ReviewSession::make_item(std::size_t i) const {
  const auto& item = plan_.items[i];
  ReviewItem out;
  out.id = item.id;
  auto path = image_paths_.find(item.id);
  out.image_url = "/images/" + url_encode_path(path == image_paths_.end() ? item.id : path->second);
  out.predicted_label = item.predicted_label;
  out.top = decisions_.at(item.id).top;
  out.remaining = pending_count();
  return out;
}

std::optional<ReviewItem> ReviewSession::next(const std::string& annotator) {
  std::lock_guard lock(mu_);
  auto held = held_by_annotator_.find(annotator);
  if (held != held_by_annotator_.end()) return make_item(held->second);
  // TODO: release items held by annotators who go idle, so an abandoned
  // browser session cannot park an item forever.
  for (std::size_t i = 0; i < labeled_.size(); ++i) {
    if (labeled_[i] || holder_of_item_.contains(i)) continue;
    if (seen_.contains({plan_.items[i].id, annotator})) continue;
    held_by_annotator_.emplace(annotator, i);
    holder_of_item_.emplace(i, annotator);
    return make_item(i);
  }
  return std::nullopt;
}

SubmitStatus ReviewSession::submit(const VerdictSubmission& s) {
  const auto kind = parse_verdict_kind(s.verdict);
  if (!kind || s.annotator.empty() || s.id.empty()) return SubmitStatus::kInvalid;
  std::lock_guard lock(mu_);
  auto it = index_.find(s.id);
  if (it == index_.end()) return SubmitStatus::kUnknownId;
  if (plan_.items[it->second].predicted_label != s.predicted_label) return SubmitStatus::kInvalid;
  if (seen_.contains({s.id, s.annotator})) return SubmitStatus::kDuplicate;

  Verdict v{s.id, s.predicted_label, *kind, s.annotator, clock_()};
  log_.append(v);
  record(v);
  return SubmitStatus::kAccepted;
}

Progress ReviewSession::progress() const {
  std::lock_guard lock(mu_);
  Progress p;
  p.total = plan_.items.size();
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < plan_.items.size(); ++i) {
    const auto& label = plan_.items[i].predicted_label;
    auto [pos, inserted] = slot.emplace(label, p.per_class.size());
    if (inserted) p.per_class.push_back({label, 0, 0});
    auto& c = p.per_class[pos->second];
    ++c.total;
    if (labeled_[i]) {
      ++c.labeled;
      ++p.labeled;
    }
  }
  return p;
}

ReviewReport ReviewSession::report() const {
  std::vector<JudgedItem> items;
  {
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < plan_.items.size(); ++i) {
      if (!judgment_[i]) continue;
      const auto& item = plan_.items[i];
      items.push_back({item.id, item.predicted_label, *judgment_[i],
                       decisions_.at(item.id).max_prob()});
    }
  }
  ReviewReport r;
  r.judged = items.size();
  if (items.empty()) return r;
  r.accuracy = per_class_accuracy(items);
  bool has_hit = false, has_miss = false;
  for (const auto& it : items) (it.hit ? has_hit : has_miss) = true;
  if (has_hit && has_miss) r.means = mean_top_prob_stats(items);
  return r;
}

}  // namespace zsc
