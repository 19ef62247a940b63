// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semvid/budget.hpp"
#include "semvid/selector.hpp"
#include "semvid/synth.hpp"

namespace semvid {

enum class Strategy { semvid, uniform, random, relevance_topk, saliency_topk };

// Strategy plus the seed the random baseline samples with. The seed is
// ignored by every other strategy.
struct StrategyId {
  Strategy kind = Strategy::semvid;
  std::uint64_t seed = 0;
};

std::string strategy_name(Strategy s);
// Accepts the canonical names and the short CLI aliases
// (relevance/saliency). Unknown names are a validation error.
Strategy parse_strategy(const std::string& name);

// Full method: frame budgets from relevance and variation, role split,
// then role-aware within-frame selection. retention_ratio == 1 keeps every
// token and skips the scoring entirely (roles are then assigned in index
// order to honor the quota invariants).
Selection run_semvid(const Tensor3& patches, const Matrix& query,
                     const HyperParams& params);

// Reference strategies. All tag their picks as object tokens: roles are a
// concept of the main method, not of the baselines. Every baseline keeps
// exactly floor(ratio * T * P) tokens.
Selection run_baseline(const Tensor3& patches, const Matrix& query,
                       const StrategyId& strategy, double ratio);

struct BenchRow {
  std::string strategy;
  std::uint64_t seed = 0;  // scenario seed
  double ratio = 0.0;
  std::size_t budget = 0;  // K
  double er_raw = 0.0;
  double er_rel = 0.0;
  double cs = 0.0;
  double recall = 0.0;
  double prune_ms = 0.0;
  std::string error;  // empty on success; failed rows carry NaN metrics
};

// One row per (strategy, scenario, ratio), ordered by (strategy, spec,
// ratio) list positions. Each scenario is generated and propagated once
// and shared across strategies. Metrics use the reweighted restriction.
// A row whose pipeline throws is recorded with the error message and the
// run continues. hp supplies the semvid hyperparameters (its
// retention_ratio is overridden by each ratio).
std::vector<BenchRow> run_bench(const std::vector<ScenarioSpec>& specs,
                                const std::vector<StrategyId>& strategies,
                                const std::vector<double>& ratios,
                                const HyperParams& hp);

struct IntervalPair {
  double pred_start = 0.0, pred_end = 0.0;
  double gt_start = 0.0, gt_end = 0.0;
};

// Temporal IoU of two [start, end] intervals; 0 when the union is empty.
// An inverted interval is a validation error.
double interval_iou(double pred_start, double pred_end, double gt_start,
                    double gt_end);
double mean_iou(const std::vector<IntervalPair>& pairs);
// Fraction of pairs with IoU >= threshold.
double recall_at(const std::vector<IntervalPair>& pairs, double threshold);

}  // namespace semvid
