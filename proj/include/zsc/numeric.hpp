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

// Stateless vector math shared by the classifier, the ensemble and the
// evaluation code. Every reduction accumulates in double, including the
// float overloads used against stored 32-bit embeddings.

#include <cstddef>
#include <span>
#include <vector>

namespace zsc {

using EmbeddingVector = std::vector<double>;

// Probability vector over the taxonomy axis. Entries are non-negative and
// sum to 1 within kProbSumTolerance.
using ProbVector = std::vector<double>;

inline constexpr double kProbSumTolerance = 1e-6;
inline constexpr double kUnitNormTolerance = 1e-3;
inline constexpr double kZeroNormEpsilon = 1e-12;

struct ScoredIndex {
  std::size_t index = 0;
  double prob = 0.0;

  friend bool operator==(const ScoredIndex&, const ScoredIndex&) = default;
};

double dot(std::span<const double> a, std::span<const double> b);
double dot(std::span<const float> a, std::span<const float> b);
double l2_norm(std::span<const double> v);
double l2_norm(std::span<const float> v);

bool is_unit_norm(std::span<const float> v, double tolerance = kUnitNormTolerance);
bool all_finite(std::span<const double> v);
bool all_finite(std::span<const float> v);

// Throws ZeroVector when the norm is at or below kZeroNormEpsilon.
EmbeddingVector l2_normalize(std::span<const double> v);
std::vector<float> l2_normalize(std::span<const float> v);

// dot(a, b) / (|a| |b|), clamped to [-1, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const float> a, std::span<const float> b);

// probs[i] = exp(scale * logits[i] - m) / sum_j exp(scale * logits[j] - m),
// m = max_j scale * logits[j].
ProbVector softmax_scaled(std::span<const double> logits, double scale);

// The k largest entries, descending; equal probabilities keep ascending
// index order.
std::vector<ScoredIndex> top_k(std::span<const double> p, std::size_t k);

std::size_t argmax(std::span<const double> p);

// w * p + (1 - w) * q.
ProbVector convex_blend(std::span<const double> p, std::span<const double> q,
                        double w);

// Throws InvariantViolation unless p is a probability vector.
void validate_prob_vector(std::span<const double> p);

}  // namespace zsc
