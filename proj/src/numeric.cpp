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

#include "zsc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zsc/error.hpp"

namespace zsc {
namespace {

// Four independent lanes; the fixed lane assignment keeps results
// bit-identical no matter which thread evaluates them.
template <typename T>
double dot_impl(std::span<const T> a, std::span<const T> b) {
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return (s0 + s1) + (s2 + s3);
}

template <typename T>
void check_same_dim(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vectors of dimension " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
}

template <typename T>
std::vector<T> normalize_impl(std::span<const T> v) {
  const double norm = std::sqrt(dot_impl(v, v));
  if (!(norm > kZeroNormEpsilon)) {
    throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  }
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<T>(static_cast<double>(v[i]) / norm);
  }
  return out;
}

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  check_same_dim(a, b);
  const double na = std::sqrt(dot_impl(a, a));
  const double nb = std::sqrt(dot_impl(b, b));
  if (!(na > kZeroNormEpsilon) || !(nb > kZeroNormEpsilon)) {
    throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  }
  return std::clamp(dot_impl(a, b) / (na * nb), -1.0, 1.0);
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a, b);
  return dot_impl(a, b);
}

double dot(std::span<const float> a, std::span<const float> b) {
  check_same_dim(a, b);
  return dot_impl(a, b);
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot_impl(v, v)); }
double l2_norm(std::span<const float> v) { return std::sqrt(dot_impl(v, v)); }

bool is_unit_norm(std::span<const float> v, double tolerance) {
  return std::abs(l2_norm(v) - 1.0) <= tolerance;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool all_finite(std::span<const float> v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
}

EmbeddingVector l2_normalize(std::span<const double> v) { return normalize_impl(v); }
std::vector<float> l2_normalize(std::span<const float> v) { return normalize_impl(v); }

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  return cosine_impl(a, b);
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  return cosine_impl(a, b);
}

ProbVector softmax_scaled(std::span<const double> logits, double scale) {
  if (logits.empty()) throw Error(ErrorCode::kEmptyInput, "softmax of no logits");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument,
                "softmax scale must be positive, got " + std::to_string(scale));
  }
  if (!all_finite(logits)) throw Error(ErrorCode::kNonFinite, "non-finite logit");

  ProbVector out(logits.size());
  double m = scale * logits[0];
  for (double x : logits) m = std::max(m, scale * x);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(scale * logits[i] - m);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

std::vector<ScoredIndex> top_k(std::span<const double> p, std::size_t k) {
  if (k == 0 || k > p.size()) {
    throw Error(ErrorCode::kKOutOfRange, "k=" + std::to_string(k) +
                                             " for a vector of length " +
                                             std::to_string(p.size()));
  }
  std::vector<ScoredIndex> all(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) all[i] = {i, p[i]};
  auto before = [](const ScoredIndex& a, const ScoredIndex& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.index < b.index;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                    all.end(), before);
  all.resize(k);
  return all;
}

std::size_t argmax(std::span<const double> p) {
  if (p.empty()) throw Error(ErrorCode::kEmptyInput, "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

ProbVector convex_blend(std::span<const double> p, std::span<const double> q,
                        double w) {
  check_same_dim(p, q);
  if (!(w >= 0.0 && w <= 1.0)) {
    throw Error(ErrorCode::kWeightOutOfRange,
                "blend weight must lie in [0,1], got " + std::to_string(w));
  }
  ProbVector out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = w * p[i] + (1.0 - w) * q[i];
  return out;
}

void validate_prob_vector(std::span<const double> p) {
  if (p.empty()) throw Error(ErrorCode::kEmptyInput, "empty probability vector");
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorCode::kInvariantViolation, "probability entry out of range");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    throw Error(ErrorCode::kInvariantViolation,
                "probabilities sum to " + std::to_string(total));
  }
}

}  // namespace zsc
