// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/selector.hpp"

#include <algorithm>
#include <cmath>

#include "semvid/errors.hpp"

namespace semvid {

namespace {

// excluded may be empty (no exclusions) or hold one list per frame.
std::vector<char> exclusion_mask(const FrameIndexLists& excluded, std::size_t t,
                                 std::size_t patches, const char* who) {
  std::vector<char> mask(patches, 0);
  if (excluded.empty()) return mask;
  for (std::size_t p : excluded[t]) {
    if (p >= patches) {
      throw ValidationError(std::string(who) + ": excluded index " +
                            std::to_string(p) + " out of range");
    }
    mask[p] = 1;
  }
  return mask;
}

void check_frame_lists(const FrameIndexLists& excluded, std::size_t frames,
                       const char* who) {
  if (!excluded.empty() && excluded.size() != frames) {
    throw ValidationError(std::string(who) + ": excluded has " +
                          std::to_string(excluded.size()) + " frames, need " +
                          std::to_string(frames));
  }
}

void check_quota_feasible(std::size_t quota, std::size_t candidates,
                          std::size_t t, const char* who) {
  if (quota > candidates) {
    throw ValidationError(std::string(who) + ": quota " + std::to_string(quota) +
                          " exceeds " + std::to_string(candidates) +
                          " candidates in frame " + std::to_string(t));
  }
}

// Top-quota indices of scores among unmasked patches, ties ascending.
std::vector<std::size_t> topk_masked(std::span<const double> scores,
                                     const std::vector<char>& mask,
                                     std::size_t quota) {
  std::vector<std::size_t> candidates;
  std::vector<double> compact;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (mask[p]) continue;
    candidates.push_back(p);
    compact.push_back(scores[p]);
  }
  std::vector<std::size_t> picked = topk(std::span<const double>(compact), quota);
  std::vector<std::size_t> out(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) out[i] = candidates[picked[i]];
  return out;
}

}  // namespace

std::size_t Selection::total_selected() const {
  std::size_t n = 0;
  for (const FramePicks& f : frames) {
    n += f.object.size() + f.motion.size() + f.context.size();
  }
  return n;
}

std::vector<std::size_t> Selection::flat_indices(std::size_t patches) const {
  std::vector<std::size_t> out;
  out.reserve(total_selected());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t p : frames[t].object) out.push_back(t * patches + p);
    for (std::size_t p : frames[t].motion) out.push_back(t * patches + p);
    for (std::size_t p : frames[t].context) out.push_back(t * patches + p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Matrix patch_relevance(const Tensor3& patches, const Matrix& query) {
  if (patches.dim != query.cols) {
    throw ValidationError("patch_relevance: dim mismatch (" +
                          std::to_string(patches.dim) + " vs " +
                          std::to_string(query.cols) + ")");
  }
  if (query.rows == 0) throw ValidationError("patch_relevance: empty query");
  Tensor3 unit = normalize_rows_l2(patches);
  Matrix unit_q = normalize_rows_l2(query);
  Matrix out(patches.frames, patches.patches);
  for (std::size_t t = 0; t < unit.frames; ++t) {
    for (std::size_t p = 0; p < unit.patches; ++p) {
      double acc = 0.0;
      for (std::size_t n = 0; n < unit_q.rows; ++n) {
        acc += dot(unit.patch(t, p), unit_q.row(n), unit.dim);
      }
      out.at(t, p) = static_cast<float>(acc / static_cast<double>(unit_q.rows));
    }
  }
  return out;
}

FrameIndexLists mmr_select_objects(const Tensor3& unit_patches,
                                   const Matrix& relevance,
                                   std::span<const std::size_t> quota,
                                   double lambda,
                                   const FrameIndexLists& excluded) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda_mmr must be in [0, 1], got " +
                          std::to_string(lambda));
  }
  std::size_t frames = unit_patches.frames;
  std::size_t patches = unit_patches.patches;
  if (relevance.rows != frames || relevance.cols != patches) {
    throw ValidationError("mmr_select_objects: relevance map shape mismatch");
  }
  if (quota.size() != frames) {
    throw ValidationError("mmr_select_objects: quota length mismatch");
  }
  check_frame_lists(excluded, frames, "mmr_select_objects");

  FrameIndexLists out(frames);
  std::vector<double> max_sim(patches);
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<char> taken = exclusion_mask(excluded, t, patches, "mmr_select_objects");
    std::size_t available = 0;
    for (char m : taken) available += (m == 0);
    check_quota_feasible(quota[t], available, t, "mmr_select_objects");

    std::fill(max_sim.begin(), max_sim.end(), 0.0);
    out[t].reserve(quota[t]);
    for (std::size_t pick = 0; pick < quota[t]; ++pick) {
      std::size_t best = patches;
      double best_score = 0.0;
      for (std::size_t p = 0; p < patches; ++p) {
        if (taken[p]) continue;
        double score = lambda * static_cast<double>(relevance.at(t, p)) -
                       (1.0 - lambda) * max_sim[p];
        if (best == patches || score > best_score) {
          best = p;
          best_score = score;
        }
      }
      taken[best] = 1;
      out[t].push_back(best);
      // One similarity column per pick keeps the greedy step O(P) while
      // matching the rescan-everything formulation exactly: max over picks
      // commutes with incremental max.
      for (std::size_t p = 0; p < patches; ++p) {
        if (taken[p]) continue;
        max_sim[p] = std::max(
            max_sim[p], dot(unit_patches.patch(t, p), unit_patches.patch(t, best),
                            unit_patches.dim));
      }
    }
  }
  return out;
}

Matrix motion_magnitude(const Tensor3& unit_patches) {
  std::size_t frames = unit_patches.frames;
  std::size_t patches = unit_patches.patches;
  Matrix out(frames, patches, 0.0f);
  if (frames < 2) return out;
  auto diff_norm = [&](std::size_t ta, std::size_t tb, std::size_t p) {
    double acc = 0.0;
    const float* a = unit_patches.patch(ta, p);
    const float* b = unit_patches.patch(tb, p);
    for (std::size_t d = 0; d < unit_patches.dim; ++d) {
      double delta = static_cast<double>(a[d]) - static_cast<double>(b[d]);
      acc += delta * delta;
    }
    return std::sqrt(acc);
  };
  for (std::size_t p = 0; p < patches; ++p) {
    out.at(0, p) = static_cast<float>(diff_norm(1, 0, p));
    out.at(frames - 1, p) = static_cast<float>(diff_norm(frames - 1, frames - 2, p));
  }
  for (std::size_t t = 1; t + 1 < frames; ++t) {
    for (std::size_t p = 0; p < patches; ++p) {
      double fwd = diff_norm(t + 1, t, p);
      double bwd = diff_norm(t, t - 1, p);
      out.at(t, p) = static_cast<float>(0.5 * (fwd + bwd));
    }
  }
  return out;
}

FrameIndexLists select_motion_tokens(const Tensor3& unit_patches,
                                     const Matrix& unit_query,
                                     const Matrix& motion,
                                     std::span<const std::size_t> quota,
                                     double beta,
                                     const FrameIndexLists& excluded) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ValidationError("beta must be in [0, 1], got " + std::to_string(beta));
  }
  std::size_t frames = unit_patches.frames;
  std::size_t patches = unit_patches.patches;
  if (motion.rows != frames || motion.cols != patches) {
    throw ValidationError("select_motion_tokens: motion map shape mismatch");
  }
  if (quota.size() != frames) {
    throw ValidationError("select_motion_tokens: quota length mismatch");
  }
  check_frame_lists(excluded, frames, "select_motion_tokens");

  FrameIndexLists out(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<char> taken = exclusion_mask(excluded, t, patches, "select_motion_tokens");
    std::size_t available = 0;
    for (char m : taken) available += (m == 0);
    check_quota_feasible(quota[t], available, t, "select_motion_tokens");
    if (quota[t] == 0) continue;

    std::vector<double> mot(patches), rel(patches);
    for (std::size_t p = 0; p < patches; ++p) {
      mot[p] = static_cast<double>(motion.at(t, p));
      double best = dot(unit_patches.patch(t, p), unit_query.row(0), unit_patches.dim);
      for (std::size_t n = 1; n < unit_query.rows; ++n) {
        best = std::max(best, dot(unit_patches.patch(t, p), unit_query.row(n),
                                  unit_patches.dim));
      }
      rel[p] = best;
    }
    std::vector<double> mot_n = min_max_normalize(mot);
    std::vector<double> rel_n = min_max_normalize(rel);
    std::vector<double> score(patches);
    for (std::size_t p = 0; p < patches; ++p) {
      score[p] = (1.0 - beta) * mot_n[p] + beta * rel_n[p];
    }
    out[t] = topk_masked(score, taken, quota[t]);
  }
  return out;
}

FrameIndexLists select_context_tokens(const Tensor3& raw_patches,
                                      const Tensor3& unit_patches,
                                      const Matrix& unit_global,
                                      std::span<const std::size_t> quota,
                                      const FrameIndexLists& excluded) {
  std::size_t frames = raw_patches.frames;
  std::size_t patches = raw_patches.patches;
  if (unit_global.rows != frames || unit_global.cols != raw_patches.dim) {
    throw ValidationError("select_context_tokens: global feature shape mismatch");
  }
  if (quota.size() != frames) {
    throw ValidationError("select_context_tokens: quota length mismatch");
  }
  check_frame_lists(excluded, frames, "select_context_tokens");

  FrameIndexLists out(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<char> taken = exclusion_mask(excluded, t, patches, "select_context_tokens");
    std::size_t available = 0;
    for (char m : taken) available += (m == 0);
    check_quota_feasible(quota[t], available, t, "select_context_tokens");
    if (quota[t] == 0) continue;

    std::size_t proto = patches;
    double best = 0.0;
    for (std::size_t p = 0; p < patches; ++p) {
      if (taken[p]) continue;
      double s = dot(unit_patches.patch(t, p), unit_global.row(t), unit_patches.dim);
      if (proto == patches || s > best) {
        proto = p;
        best = s;
      }
    }
    out[t].push_back(proto);
    taken[proto] = 1;

    if (quota[t] > 1) {
      std::vector<double> norms(patches);
      for (std::size_t p = 0; p < patches; ++p) {
        norms[p] = norm_l2(raw_patches.patch(t, p), raw_patches.dim);
      }
      std::vector<std::size_t> salient = topk_masked(norms, taken, quota[t] - 1);
      out[t].insert(out[t].end(), salient.begin(), salient.end());
    }
  }
  return out;
}

Selection assemble_selection(const Tensor3& patches, const Matrix& query,
                             const BudgetVector& budget, const RoleQuota& quota,
                             const HyperParams& params) {
  params.validate();
  std::size_t frames = patches.frames;
  std::size_t P = patches.patches;
  if (budget.per_frame.size() != frames || quota.object.size() != frames ||
      quota.motion.size() != frames || quota.context.size() != frames) {
    throw ValidationError("assemble_selection: frame count mismatch");
  }
  for (std::size_t t = 0; t < frames; ++t) {
    std::size_t k = budget.per_frame[t];
    if (k > P) {
      throw ValidationError("assemble_selection: frame " + std::to_string(t) +
                            " budget " + std::to_string(k) + " exceeds P=" +
                            std::to_string(P));
    }
    if (quota.object[t] + quota.motion[t] + quota.context[t] != k) {
      throw ValidationError("assemble_selection: role quotas do not sum to the"
                            " frame budget at frame " + std::to_string(t));
    }
  }

  Tensor3 unit = normalize_rows_l2(patches);
  Matrix unit_query = normalize_rows_l2(query);
  Matrix relevance = patch_relevance(patches, query);
  Matrix unit_global = normalize_rows_l2(pool_global(patches));
  Matrix motion = motion_magnitude(unit);

  FrameIndexLists objects =
      mmr_select_objects(unit, relevance, quota.object, params.lambda_mmr, {});

  // Later roles can never exceed what exclusions leave behind; clamp their
  // quotas to the pool and make up any difference in the backfill below.
  std::vector<std::size_t> mot_quota(frames), ctx_quota(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    mot_quota[t] = std::min(quota.motion[t], P - objects[t].size());
  }
  FrameIndexLists motion_picks = select_motion_tokens(
      unit, unit_query, motion, mot_quota, params.beta, objects);

  FrameIndexLists both(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    both[t] = objects[t];
    both[t].insert(both[t].end(), motion_picks[t].begin(), motion_picks[t].end());
    ctx_quota[t] = std::min(quota.context[t], P - both[t].size());
  }
  FrameIndexLists context =
      select_context_tokens(patches, unit, unit_global, ctx_quota, both);

  Selection sel;
  sel.budget = budget;
  sel.params = params;
  sel.frames.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    sel.frames[t].object = objects[t];
    sel.frames[t].motion = motion_picks[t];
    sel.frames[t].context = context[t];

    // Exclusions cannot starve a feasible quota set (role quotas sum to at
    // most P), but keep the frame total exact even if a selector shorted:
    // refill from the best unselected patches by relevance.
    std::size_t have = sel.frames[t].object.size() + sel.frames[t].motion.size() +
                       sel.frames[t].context.size();
    if (have < budget.per_frame[t]) {
      std::vector<char> taken(P, 0);
      for (std::size_t p : sel.frames[t].object) taken[p] = 1;
      for (std::size_t p : sel.frames[t].motion) taken[p] = 1;
      for (std::size_t p : sel.frames[t].context) taken[p] = 1;
      std::vector<double> rel(P);
      for (std::size_t p = 0; p < P; ++p) {
        rel[p] = static_cast<double>(relevance.at(t, p));
      }
      std::vector<std::size_t> fill =
          topk_masked(rel, taken, budget.per_frame[t] - have);
      sel.frames[t].context.insert(sel.frames[t].context.end(), fill.begin(),
                                   fill.end());
    }
  }
  return sel;
}

}  // namespace semvid
