// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "semvid/graph.hpp"
#include "semvid/selector.hpp"
#include "semvid/tensor.hpp"

namespace semvid {

// Recipe for a seeded synthetic scenario: background patches drift around
// per-scene bases (scenes switch at boundary_frames), while each evidence
// frame hides n_evidence patches pulled toward the query direction by
// `align`. Everything downstream (attention, injection, ground truth) is a
// pure function of this struct.
struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t frames = 16;       // T
  std::size_t patches = 64;      // P per frame
  std::size_t dim = 32;          // D embedding width
  std::size_t query_tokens = 8;  // N
  std::size_t layers = 4;        // L attention layers
  std::size_t n_evidence = 16;   // evidence patches per evidence frame
  std::vector<std::size_t> evidence_frames = {4, 8, 12};
  std::vector<std::size_t> boundary_frames = {5, 9};  // scene cut before frame t
  double jitter = 0.2;   // background motion amplitude
  double align = 0.9;    // evidence-to-query alignment in (0, 1]
  double temp = 0.05;    // injection softmax temperature

  void validate() const;
};

struct Scenario {
  Tensor3 patches;
  Matrix query;
  AttentionStack attention;
  std::vector<std::uint8_t> evidence_mask;  // frames * patches cells
  std::vector<std::size_t> boundaries;
  ScenarioSpec spec;
};

// Seeded random attention: per layer a random projection of the normalized
// patch features keyed by (seed, layer), scaled-dot-product softmax rows;
// injection = softmax of max-query cosine over all tokens at temperature
// `temp`.
AttentionStack synth_attention(const Tensor3& patches, const Matrix& query,
                               std::size_t layers, double temp,
                               std::uint64_t seed);

// Deterministic in spec; regenerating yields byte-identical contents.
Scenario generate_scenario(const ScenarioSpec& spec);

// Fraction of ground-truth evidence cells the selection kept (any role).
// A scenario without evidence cells counts as fully recalled.
double evidence_recall(const Selection& sel, const Scenario& sc);

}  // namespace semvid
