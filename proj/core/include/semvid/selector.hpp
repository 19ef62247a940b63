// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "semvid/budget.hpp"
#include "semvid/tensor.hpp"

namespace semvid {

// Per-frame patch index lists; the outer vector has one entry per frame.
using FrameIndexLists = std::vector<std::vector<std::size_t>>;

// Role-tagged token selection for one video. Within a frame an index
// appears in at most one role list; role sizes match the RoleQuota the
// selection was built from. Lists are in pick order (objects: MMR order;
// motion and context: descending score).
struct Selection {
  struct FramePicks {
    std::vector<std::size_t> object;
    std::vector<std::size_t> motion;
    std::vector<std::size_t> context;
  };
  std::vector<FramePicks> frames;
  BudgetVector budget;
  HyperParams params;

  std::size_t total_selected() const;
  // All kept flat token ids (frame * patches + patch), sorted ascending.
  std::vector<std::size_t> flat_indices(std::size_t patches) const;
};

// Mean-over-query-tokens cosine for every patch; both sides normalized
// internally. Values lie in [-1, 1].
Matrix patch_relevance(const Tensor3& patches, const Matrix& query);

// Greedy maximal-marginal-relevance pick of quota[t] object tokens per
// frame: argmax over remaining candidates of
//   lambda * relevance - (1 - lambda) * max-similarity-to-selected,
// ties by ascending index. The max-similarity term is maintained as a
// running vector updated with one similarity column per pick, so a frame
// costs O(n * P) dot products instead of O(n^2 * P).
FrameIndexLists mmr_select_objects(const Tensor3& unit_patches,
                                   const Matrix& relevance,
                                   std::span<const std::size_t> quota,
                                   double lambda,
                                   const FrameIndexLists& excluded);

// Temporal feature change per patch: forward difference at the first
// frame, backward at the last, the average of both in between. A single
// frame yields all zeros.
Matrix motion_magnitude(const Tensor3& unit_patches);

// Motion-role pick: (1 - beta) * motion + beta * max-query cosine, both
// streams min-max normalized within the frame, top quota[t] among
// non-excluded patches.
FrameIndexLists select_motion_tokens(const Tensor3& unit_patches,
                                     const Matrix& unit_query,
                                     const Matrix& motion,
                                     std::span<const std::size_t> quota,
                                     double beta,
                                     const FrameIndexLists& excluded);

// Context-role pick: first the proto token (best cosine against the
// frame-global unit feature among non-excluded patches), then the largest
// raw embedding norms. quota[t] == 0 selects nothing.
FrameIndexLists select_context_tokens(const Tensor3& raw_patches,
                                      const Tensor3& unit_patches,
                                      const Matrix& unit_global,
                                      std::span<const std::size_t> quota,
                                      const FrameIndexLists& excluded);

// Full within-frame selection: objects, then motion excluding objects,
// then context excluding both. If exclusions leave a later role short of
// its quota, the gap is backfilled with the best unselected patches by
// relevance so that each frame keeps exactly budget.per_frame[t] tokens.
Selection assemble_selection(const Tensor3& patches, const Matrix& query,
                             const BudgetVector& budget, const RoleQuota& quota,
                             const HyperParams& params);

}  // namespace semvid
