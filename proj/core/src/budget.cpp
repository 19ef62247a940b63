// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/budget.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "semvid/errors.hpp"
#include "semvid/log.hpp"

namespace semvid {

namespace {

void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " must be in [0, 1], got " +
                          std::to_string(v));
  }
}

}  // namespace

void HyperParams::validate() const {
  require_unit_interval(alpha, "alpha");
  require_unit_interval(lambda_mmr, "lambda_mmr");
  require_unit_interval(beta, "beta");
  if (!(retention_ratio > 0.0 && retention_ratio <= 1.0)) {
    throw ValidationError("retention_ratio must be in (0, 1], got " +
                          std::to_string(retention_ratio));
  }
}

std::size_t global_budget(double ratio, std::size_t frames, std::size_t patches) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ValidationError("retention_ratio must be in (0, 1], got " +
                          std::to_string(ratio));
  }
  if (frames == 0 || patches == 0) {
    throw ValidationError("global_budget: frames and patches must be >= 1");
  }
  // The epsilon absorbs representation error in ratio * T * P so that
  // exactly representable products (0.25 * 64, ...) do not floor short.
  double product = ratio * static_cast<double>(frames) * static_cast<double>(patches);
  return static_cast<std::size_t>(std::floor(product + 1e-9));
}

std::vector<double> frame_relevance(const Matrix& global_features, const Matrix& query) {
  if (global_features.rows == 0) {
    throw ValidationError("frame_relevance: no frames");
  }
  if (query.rows == 0) throw ValidationError("frame_relevance: empty query");
  if (global_features.cols != query.cols) {
    throw ValidationError("frame_relevance: dim mismatch (" +
                          std::to_string(global_features.cols) + " vs " +
                          std::to_string(query.cols) + ")");
  }
  require_finite(query, "frame_relevance");
  Matrix unit = normalize_rows_l2(global_features);

  std::vector<double> mean_q(query.cols, 0.0);
  for (std::size_t n = 0; n < query.rows; ++n) {
    for (std::size_t c = 0; c < query.cols; ++c) mean_q[c] += query.at(n, c);
  }
  double norm = 0.0;
  for (double v : mean_q) norm += v * v;
  norm = std::sqrt(norm);

  std::vector<double> scores(unit.rows, 0.0);
  if (norm == 0.0) return scores;
  for (std::size_t t = 0; t < unit.rows; ++t) {
    double acc = 0.0;
    for (std::size_t c = 0; c < unit.cols; ++c) {
      acc += static_cast<double>(unit.at(t, c)) * mean_q[c];
    }
    scores[t] = acc / norm;
  }
  return scores;
}

std::vector<double> frame_variation(const Matrix& global_features) {
  if (global_features.rows == 0) {
    throw ValidationError("frame_variation: no frames");
  }
  Matrix unit = normalize_rows_l2(global_features);
  std::size_t frames = unit.rows;
  std::vector<double> scores(frames, 0.0);
  if (frames == 1) return scores;
  for (std::size_t t = 1; t < frames; ++t) {
    double acc = 0.0;
    for (std::size_t c = 0; c < unit.cols; ++c) {
      double d = static_cast<double>(unit.at(t, c)) -
                 static_cast<double>(unit.at(t - 1, c));
      acc += d * d;
    }
    scores[t] = std::sqrt(acc);
  }
  scores[0] = scores[1];  // no predecessor: copy the first transition
  return scores;
}

std::vector<double> mix_weights(std::span<const double> relevance,
                                std::span<const double> variation, double alpha) {
  if (relevance.size() != variation.size()) {
    throw ValidationError("mix_weights: stream lengths differ (" +
                          std::to_string(relevance.size()) + " vs " +
                          std::to_string(variation.size()) + ")");
  }
  if (relevance.empty()) throw ValidationError("mix_weights: no frames");
  require_unit_interval(alpha, "alpha");

  std::vector<double> rel = min_max_normalize(relevance);
  std::vector<double> var = min_max_normalize(variation);
  std::vector<double> w(rel.size());
  bool all_zero = true;
  for (std::size_t t = 0; t < w.size(); ++t) {
    w[t] = alpha * rel[t] + (1.0 - alpha) * var[t];
    if (w[t] != 0.0) all_zero = false;
  }
  if (all_zero) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    log_debug("mix_weights: all-zero blend, using uniform weights");
  }
  return w;
}

BudgetVector allocate_budgets(std::span<const double> weights, double ratio,
                              std::size_t frames, std::size_t patches,
                              std::size_t k_ctx) {
  if (weights.size() != frames) {
    throw ValidationError("allocate_budgets: got " +
                          std::to_string(weights.size()) + " weights for " +
                          std::to_string(frames) + " frames");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("allocate_budgets: weights must be finite and >= 0");
    }
  }
  std::size_t total = global_budget(ratio, frames, patches);
  if (k_ctx > patches) {
    throw BudgetError("context floor k_ctx=" + std::to_string(k_ctx) +
                      " exceeds patches per frame P=" + std::to_string(patches));
  }
  if (total < frames * k_ctx) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g",
                  static_cast<double>(k_ctx) / static_cast<double>(patches));
    throw BudgetError("budget infeasible: K=" + std::to_string(total) +
                      " is below the context floor T*k_ctx=" +
                      std::to_string(frames * k_ctx) +
                      "; smallest feasible retention_ratio is " + buf);
  }

  std::vector<std::size_t> alloc(frames, 0);
  std::vector<std::size_t> cap(frames, patches - k_ctx);
  std::vector<bool> active(frames, true);
  std::size_t remaining = total - frames * k_ctx;

  // Largest-remainder apportionment; frames that would exceed their
  // capacity are pinned at it and the surplus is re-apportioned among the
  // rest. Each pass pins at least one frame, so this terminates.
  while (remaining > 0) {
    double weight_sum = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      if (active[t]) weight_sum += weights[t];
    }
    std::vector<double> share(frames, 0.0);
    std::size_t active_count = 0;
    for (std::size_t t = 0; t < frames; ++t) {
      if (!active[t]) continue;
      ++active_count;
      share[t] = weight_sum > 0.0 ? weights[t] / weight_sum : 0.0;
    }
    if (weight_sum == 0.0) {
      for (std::size_t t = 0; t < frames; ++t) {
        if (active[t]) share[t] = 1.0 / static_cast<double>(active_count);
      }
    }

    std::vector<std::size_t> base(frames, 0);
    std::vector<double> remainder(frames, 0.0);
    std::size_t assigned = 0;
    for (std::size_t t = 0; t < frames; ++t) {
      if (!active[t]) continue;
      double target = static_cast<double>(remaining) * share[t];
      base[t] = static_cast<std::size_t>(std::floor(target));
      remainder[t] = target - static_cast<double>(base[t]);
      assigned += base[t];
    }
    std::size_t leftover = remaining - assigned;
    std::vector<std::size_t> order;
    for (std::size_t t = 0; t < frames; ++t) {
      if (active[t]) order.push_back(t);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return remainder[a] > remainder[b];
    });
    for (std::size_t i = 0; i < leftover; ++i) base[order[i]] += 1;

    bool clamped = false;
    for (std::size_t t = 0; t < frames; ++t) {
      if (!active[t]) continue;
      if (base[t] > cap[t]) {
        alloc[t] = cap[t];
        active[t] = false;
        remaining -= cap[t];
        clamped = true;
      }
    }
    if (!clamped) {
      for (std::size_t t = 0; t < frames; ++t) {
        if (active[t]) alloc[t] = base[t];
      }
      remaining = 0;
    }
  }

  BudgetVector out;
  out.per_frame.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) out.per_frame[t] = k_ctx + alloc[t];
  out.total = total;
  return out;
}

RoleQuota partition_roles(const BudgetVector& budgets, double alpha,
                          std::size_t k_ctx) {
  require_unit_interval(alpha, "alpha");
  RoleQuota quota;
  std::size_t frames = budgets.per_frame.size();
  quota.object.resize(frames);
  quota.motion.resize(frames);
  quota.context.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    std::size_t k = budgets.per_frame[t];
    std::size_t n_ctx = std::min(k_ctx, k);
    std::size_t n_obj = static_cast<std::size_t>(
        std::llround(alpha * static_cast<double>(k)));
    n_obj = std::min(n_obj, k - n_ctx);
    quota.context[t] = n_ctx;
    quota.object[t] = n_obj;
    quota.motion[t] = k - n_ctx - n_obj;
  }
  return quota;
}

}  // namespace semvid
