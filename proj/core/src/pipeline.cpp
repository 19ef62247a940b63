// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "semvid/errors.hpp"
#include "semvid/graph.hpp"
#include "semvid/rng.hpp"

namespace semvid {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::semvid: return "semvid";
    case Strategy::uniform: return "uniform";
    case Strategy::random: return "random";
    case Strategy::relevance_topk: return "relevance_topk";
    case Strategy::saliency_topk: return "saliency_topk";
  }
  throw ValidationError("strategy_name: unknown strategy");
}

Strategy parse_strategy(const std::string& name) {
  if (name == "semvid") return Strategy::semvid;
  if (name == "uniform") return Strategy::uniform;
  if (name == "random") return Strategy::random;
  if (name == "relevance" || name == "relevance_topk") return Strategy::relevance_topk;
  if (name == "saliency" || name == "saliency_topk") return Strategy::saliency_topk;
  throw ValidationError("unknown strategy '" + name + "'");
}

namespace {

Selection identity_selection(const Tensor3& patches, const HyperParams& params) {
  std::size_t T = patches.frames, P = patches.patches;
  BudgetVector budget;
  budget.per_frame.assign(T, P);
  budget.total = T * P;
  RoleQuota quota = partition_roles(budget, params.alpha, params.k_ctx);

  Selection sel;
  sel.budget = budget;
  sel.params = params;
  sel.frames.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t p = 0;
    for (std::size_t i = 0; i < quota.object[t]; ++i) sel.frames[t].object.push_back(p++);
    for (std::size_t i = 0; i < quota.motion[t]; ++i) sel.frames[t].motion.push_back(p++);
    for (std::size_t i = 0; i < quota.context[t]; ++i) sel.frames[t].context.push_back(p++);
  }
  return sel;
}

// Shared baseline scaffolding: a Selection whose picks all carry the
// object role.
Selection object_only_selection(std::size_t frames, FrameIndexLists lists,
                                double ratio, std::size_t total) {
  Selection sel;
  sel.params = HyperParams{};
  sel.params.retention_ratio = ratio;
  sel.frames.resize(frames);
  sel.budget.per_frame.resize(frames);
  sel.budget.total = total;
  for (std::size_t t = 0; t < frames; ++t) {
    sel.frames[t].object = std::move(lists[t]);
    sel.budget.per_frame[t] = sel.frames[t].object.size();
  }
  return sel;
}

FrameIndexLists group_flat_by_frame(const std::vector<std::size_t>& flat,
                                    std::size_t frames, std::size_t patches) {
  FrameIndexLists lists(frames);
  for (std::size_t id : flat) {
    lists[id / patches].push_back(id % patches);
  }
  return lists;
}

}  // namespace

Selection run_semvid(const Tensor3& patches, const Matrix& query,
                     const HyperParams& params) {
  params.validate();
  require_finite(patches, "run_semvid patches");
  if (patches.frames == 0 || patches.patches == 0 || patches.dim == 0) {
    throw ValidationError("run_semvid: empty patch tensor");
  }
  if (params.retention_ratio == 1.0) return identity_selection(patches, params);

  Matrix global = pool_global(patches);
  std::vector<double> relevance = frame_relevance(global, query);
  std::vector<double> variation = frame_variation(global);
  std::vector<double> weights = mix_weights(relevance, variation, params.alpha);
  BudgetVector budget =
      allocate_budgets(weights, params.retention_ratio, patches.frames,
                       patches.patches, params.k_ctx);
  RoleQuota quota = partition_roles(budget, params.alpha, params.k_ctx);
  return assemble_selection(patches, query, budget, quota, params);
}

Selection run_baseline(const Tensor3& patches, const Matrix& query,
                       const StrategyId& strategy, double ratio) {
  if (strategy.kind == Strategy::semvid) {
    HyperParams hp;
    hp.retention_ratio = ratio;
    return run_semvid(patches, query, hp);
  }
  require_finite(patches, "run_baseline patches");
  std::size_t T = patches.frames, P = patches.patches;
  if (T == 0 || P == 0 || patches.dim == 0) {
    throw ValidationError("run_baseline: empty patch tensor");
  }
  std::size_t total = global_budget(ratio, T, P);

  FrameIndexLists lists(T);
  switch (strategy.kind) {
    case Strategy::uniform: {
      // As equal as possible per frame, fixed-stride indices within each
      // frame: quota m keeps patches floor(j * P / m).
      std::size_t base = total / T, extra = total % T;
      for (std::size_t t = 0; t < T; ++t) {
        std::size_t m = base + (t < extra ? 1 : 0);
        for (std::size_t j = 0; j < m; ++j) lists[t].push_back(j * P / m);
      }
      break;
    }
    case Strategy::random: {
      Rng rng(mix_seed(strategy.seed));
      std::vector<std::size_t> flat = rng.sample_without_replacement(T * P, total);
      std::sort(flat.begin(), flat.end());
      lists = group_flat_by_frame(flat, T, P);
      break;
    }
    case Strategy::relevance_topk: {
      Matrix s_evi = patch_relevance(patches, query);
      std::vector<std::size_t> flat =
          topk(std::span<const float>(s_evi.data), total);
      lists = group_flat_by_frame(flat, T, P);
      break;
    }
    case Strategy::saliency_topk: {
      std::vector<double> norms(T * P);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t p = 0; p < P; ++p) {
          norms[t * P + p] = norm_l2(patches.patch(t, p), patches.dim);
        }
      }
      std::vector<std::size_t> flat = topk(std::span<const double>(norms), total);
      lists = group_flat_by_frame(flat, T, P);
      break;
    }
    case Strategy::semvid:
      break;  // handled above
  }
  return object_only_selection(T, std::move(lists), ratio, total);
}

std::vector<BenchRow> run_bench(const std::vector<ScenarioSpec>& specs,
                                const std::vector<StrategyId>& strategies,
                                const std::vector<double>& ratios,
                                const HyperParams& hp) {
  if (specs.empty() || strategies.empty() || ratios.empty()) {
    throw ValidationError("run_bench: specs, strategies and ratios must be"
                          " nonempty");
  }
  double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<BenchRow> rows;
  rows.reserve(specs.size() * strategies.size() * ratios.size());

  // Scenario-major execution (one generation + one full propagation per
  // spec), then a stable sort back to strategy-major row order so the
  // output bytes never depend on the execution schedule.
  std::vector<std::size_t> strategy_rank;
  for (std::size_t spec_idx = 0; spec_idx < specs.size(); ++spec_idx) {
    Scenario sc;
    std::vector<double> pi_full;
    bool scenario_ok = true;
    std::string scenario_error;
    try {
      sc = generate_scenario(specs[spec_idx]);
      pi_full = propagate_evidence(sc.attention);
    } catch (const std::exception& e) {
      scenario_ok = false;
      scenario_error = e.what();
    }

    for (std::size_t s = 0; s < strategies.size(); ++s) {
      for (double ratio : ratios) {
        BenchRow row;
        row.strategy = strategy_name(strategies[s].kind);
        row.seed = specs[spec_idx].seed;
        row.ratio = ratio;
        row.er_raw = row.er_rel = row.cs = row.recall = row.prune_ms = nan;
        strategy_rank.push_back(s);
        if (!scenario_ok) {
          row.error = scenario_error;
          rows.push_back(std::move(row));
          continue;
        }
        try {
          StrategyId strat = strategies[s];
          if (strat.kind == Strategy::random) {
            strat.seed = mix_seed(strat.seed ^ specs[spec_idx].seed);
          }
          auto t0 = std::chrono::steady_clock::now();
          Selection sel;
          if (strat.kind == Strategy::semvid) {
            HyperParams row_hp = hp;
            row_hp.retention_ratio = ratio;
            sel = run_semvid(sc.patches, sc.query, row_hp);
          } else {
            sel = run_baseline(sc.patches, sc.query, strat, ratio);
          }
          auto t1 = std::chrono::steady_clock::now();
          row.prune_ms =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
          row.budget = sel.budget.total;

          std::vector<std::size_t> kept = sel.flat_indices(sc.patches.patches);
          AttentionStack pruned =
              restrict_graph(sc.attention, kept, RestrictMode::reweighted);
          std::vector<double> pi_pruned = propagate_evidence(pruned);
          RetentionMetrics er = evidence_retention(pi_full, pi_pruned, kept);
          row.er_raw = er.er_raw;
          row.er_rel = er.er_rel;
          row.cs = connectivity_strength(cross_frame_mass(pruned));
          row.recall = evidence_recall(sel, sc);
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }

  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return strategy_rank[a] < strategy_rank[b];
  });
  std::vector<BenchRow> sorted;
  sorted.reserve(rows.size());
  for (std::size_t i : order) sorted.push_back(std::move(rows[i]));
  return sorted;
}

double interval_iou(double pred_start, double pred_end, double gt_start,
                    double gt_end) {
  if (pred_start > pred_end || gt_start > gt_end) {
    throw ValidationError("interval_iou: interval start exceeds end");
  }
  double inter = std::min(pred_end, gt_end) - std::max(pred_start, gt_start);
  inter = std::max(0.0, inter);
  double uni = (pred_end - pred_start) + (gt_end - gt_start) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double mean_iou(const std::vector<IntervalPair>& pairs) {
  if (pairs.empty()) return 0.0;
  double acc = 0.0;
  for (const IntervalPair& p : pairs) {
    acc += interval_iou(p.pred_start, p.pred_end, p.gt_start, p.gt_end);
  }
  return acc / static_cast<double>(pairs.size());
}

double recall_at(const std::vector<IntervalPair>& pairs, double threshold) {
  if (pairs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const IntervalPair& p : pairs) {
    if (interval_iou(p.pred_start, p.pred_end, p.gt_start, p.gt_end) >= threshold) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

}  // namespace semvid
