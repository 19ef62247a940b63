// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "semvid/tensor.hpp"

namespace semvid {

enum class RestrictMode { restricted, reweighted };

// Layered attention graph over T*P tokens (flat id = frame * P + patch).
// layers[l] holds the row-stochastic transition matrix of self-attention
// layer l+1; injection is the probability mass the query places on each
// token at the top layer. frame_of maps token id to its original frame so
// restricted stacks keep their temporal structure.
struct AttentionStack {
  std::vector<Matrix> layers;
  std::vector<double> injection;
  std::vector<std::size_t> frame_of;
  std::size_t num_frames = 0;
  // Restricted-mode pruning leaves rows sub-stochastic; propagation is
  // only defined while this is true.
  bool rows_stochastic = true;

  std::size_t size() const { return injection.size(); }
  void validate() const;
};

// Builds a stack over frames*patches tokens with the canonical flat-index
// frame map. Layers must already be row-stochastic.
AttentionStack make_attention_stack(std::vector<Matrix> layers,
                                    std::vector<double> injection,
                                    std::size_t frames, std::size_t patches);

// Divides each row by its sum; an all-zero row becomes uniform. Negative
// entries are a validation error.
std::vector<Matrix> row_normalize_attention(const std::vector<Matrix>& raw);

// Backward evidence flow: starting from the injection at the top layer,
// repeatedly applies the transpose of each lower layer's transition matrix
// and returns the landing distribution at layer 1.
std::vector<double> propagate_evidence(const AttentionStack& stack);

// Landing distribution after each step, top layer first (the first entry
// is the injection itself). Exposed for oracle tests.
std::vector<std::vector<double>> propagate_trajectory(const AttentionStack& stack);

// Sub-graph over the kept tokens (sorted, unique flat ids). The injection
// is renormalized over kept tokens, falling back to uniform when it has no
// mass there. reweighted renormalizes each row (uniform fallback for empty
// rows); restricted leaves rows as partial sums. Keeping every token
// returns the stack unchanged. fallback_used, when given, reports whether
// any uniform fallback fired.
AttentionStack restrict_graph(const AttentionStack& stack,
                              const std::vector<std::size_t>& kept,
                              RestrictMode mode, bool* fallback_used = nullptr);

struct RetentionMetrics {
  double er_raw = 0.0;        // exp of negative cross-entropy, in (0, 1]
  double er_rel = 0.0;        // er_raw / unpruned value, 1.0 when nothing was pruned
  double retained_mass = 0.0; // full-graph landing mass on the kept set
};

// Compares the full landing distribution against the pruned one. pi_pruned
// is indexed over the kept set (same order as kept). The pruned
// distribution is blended back onto the full token set: kept tokens get
// retained_mass * pi_pruned, dropped tokens split the remainder evenly;
// the exponentiated negative cross-entropy of that blend against pi_full
// is er_raw. Logs are floored at 1e-12 and 0 * log 0 counts as 0.
RetentionMetrics evidence_retention(std::span<const double> pi_full,
                                    std::span<const double> pi_pruned,
                                    const std::vector<std::size_t>& kept);

// Per layer and frame boundary: total transition mass from tokens of frame
// t into tokens of frame t+1. Shape L x (T-1); empty when T == 1.
std::vector<std::vector<double>> cross_frame_mass(const AttentionStack& stack);

// Layer-averaged total cross-frame mass.
double connectivity_strength(const std::vector<std::vector<double>>& gamma);

struct MetricReport {
  double er_raw = 0.0;
  double er_rel = 0.0;
  double retained_mass = 0.0;
  double cs = 0.0;
  std::vector<std::vector<double>> gamma;
  RestrictMode mode = RestrictMode::reweighted;
  bool uniform_fallback = false;
};

// Full diagnostic pass: propagate the full stack, restrict to the kept
// set, propagate again, and report retention plus connectivity. Evidence
// retention always uses the reweighted restriction (propagation needs
// stochastic rows); connectivity uses the requested mode.
MetricReport compute_metrics(const AttentionStack& full,
                             const std::vector<std::size_t>& kept,
                             RestrictMode mode);

}  // namespace semvid
