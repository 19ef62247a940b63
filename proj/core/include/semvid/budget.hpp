// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "semvid/tensor.hpp"

namespace semvid {

// Selection hyperparameters. alpha mixes relevance against variation when
// weighting frames and also splits each frame budget between object and
// motion roles; lambda_mmr trades relevance against diversity inside the
// object role; beta trades motion magnitude against query alignment;
// k_ctx is the per-frame context floor.
struct HyperParams {
  double alpha = 0.6;
  double lambda_mmr = 0.8;
  double beta = 0.5;
  std::size_t k_ctx = 3;
  double retention_ratio = 1.0;

  void validate() const;
};

struct BudgetVector {
  std::vector<std::size_t> per_frame;  // k(t), each in [k_ctx, P]
  std::size_t total = 0;               // K = sum of per_frame
};

struct RoleQuota {
  std::vector<std::size_t> object;
  std::vector<std::size_t> motion;
  std::vector<std::size_t> context;
};

// K = floor(ratio * T * P). ratio outside (0, 1] is a validation error.
std::size_t global_budget(double ratio, std::size_t frames, std::size_t patches);

// Cosine between each normalized frame-mean feature and the normalized mean
// query embedding. Inputs are raw; normalization happens internally.
std::vector<double> frame_relevance(const Matrix& global_features, const Matrix& query);

// L2 distance between consecutive normalized frame-mean features; the first
// frame copies the second frame's score. A single frame scores 0.
std::vector<double> frame_variation(const Matrix& global_features);

// Min-max normalizes both score streams, then blends:
// w = alpha * rel + (1 - alpha) * var. If every blended weight is zero the
// result falls back to uniform.
std::vector<double> mix_weights(std::span<const double> relevance,
                                std::span<const double> variation, double alpha);

// Largest-remainder apportionment of K - T*k_ctx tokens proportional to w,
// plus the k_ctx floor, with iterative redistribution away from frames
// clamped at P. K < T*k_ctx throws BudgetError naming the smallest feasible
// ratio.
BudgetVector allocate_budgets(std::span<const double> weights, double ratio,
                              std::size_t frames, std::size_t patches,
                              std::size_t k_ctx);

// Per-frame split of k(t) into roles: context gets min(k_ctx, k), object
// gets round(alpha * k) clamped to what remains, motion gets the rest.
RoleQuota partition_roles(const BudgetVector& budgets, double alpha,
                          std::size_t k_ctx);

}  // namespace semvid
