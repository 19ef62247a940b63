// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "semvid/budget.hpp"
#include "semvid/graph.hpp"
#include "semvid/pipeline.hpp"
#include "semvid/rng.hpp"
#include "semvid/selector.hpp"
#include "semvid/synth.hpp"
#include "semvid/tensor.hpp"

using namespace semvid;

namespace {

struct MmrCase {
  Tensor3 patches;
  Matrix relevance;
  std::vector<std::size_t> quota;
  FrameIndexLists excluded;
};

MmrCase make_mmr_case(std::size_t patches_per_frame, std::size_t quota) {
  Rng rng(7);
  MmrCase c;
  c.patches = Tensor3(1, patches_per_frame, 64);
  for (auto& x : c.patches.data) x = static_cast<float>(rng.normal());
  c.patches = normalize_rows_l2(c.patches);
  c.relevance = Matrix(1, patches_per_frame);
  for (auto& x : c.relevance.data)
    x = static_cast<float>(rng.uniform() * 2.0 - 1.0);
  c.quota = {quota};
  c.excluded.resize(1);
  return c;
}

// Naive MMR used as the comparison point: rescans all selected tokens.
std::vector<std::size_t> naive_mmr(const MmrCase& c, double lambda) {
  const std::size_t p = c.patches.patches;
  std::vector<bool> taken(p, false);
  std::vector<std::size_t> picked;
  while (picked.size() < c.quota[0]) {
    bool found = false;
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t cand = 0; cand < p; ++cand) {
      if (taken[cand]) continue;
      double max_sim = 0.0;
      for (std::size_t s : picked)
        max_sim = std::max(max_sim, dot(c.patches.patch(0, cand),
                                        c.patches.patch(0, s), c.patches.dim));
      double score =
          lambda * c.relevance.at(0, cand) - (1.0 - lambda) * max_sim;
      if (!found || score > best_score) {
        found = true;
        best = cand;
        best_score = score;
      }
    }
    taken[best] = true;
    picked.push_back(best);
  }
  return picked;
}

void BM_mmr_incremental(benchmark::State& state) {
  auto c = make_mmr_case(static_cast<std::size_t>(state.range(0)),
                         static_cast<std::size_t>(state.range(0)) / 4);
  for (auto _ : state) {
    auto picks = mmr_select_objects(c.patches, c.relevance, c.quota, 0.8,
                                    c.excluded);
    benchmark::DoNotOptimize(picks);
  }
}
BENCHMARK(BM_mmr_incremental)->Arg(64)->Arg(256)->Arg(1024);

void BM_mmr_naive(benchmark::State& state) {
  auto c = make_mmr_case(static_cast<std::size_t>(state.range(0)),
                         static_cast<std::size_t>(state.range(0)) / 4);
  for (auto _ : state) {
    auto picks = naive_mmr(c, 0.8);
    benchmark::DoNotOptimize(picks);
  }
}
BENCHMARK(BM_mmr_naive)->Arg(64)->Arg(256)->Arg(1024);

void BM_propagate(benchmark::State& state) {
  ScenarioSpec spec;
  spec.seed = 11;
  spec.frames = static_cast<std::size_t>(state.range(0));
  spec.evidence_frames = {spec.frames / 2};
  spec.boundary_frames = {spec.frames / 3, 2 * spec.frames / 3};
  Scenario sc = generate_scenario(spec);
  for (auto _ : state) {
    auto pi = propagate_evidence(sc.attention);
    benchmark::DoNotOptimize(pi);
  }
}
BENCHMARK(BM_propagate)->Arg(8)->Arg(16);

void BM_full_prune(benchmark::State& state) {
  ScenarioSpec spec;
  spec.seed = 13;
  Scenario sc = generate_scenario(spec);
  HyperParams hp;
  hp.retention_ratio = 0.125;
  for (auto _ : state) {
    Selection sel = run_semvid(sc.patches, sc.query, hp);
    benchmark::DoNotOptimize(sel);
  }
}
BENCHMARK(BM_full_prune);

}  // namespace

BENCHMARK_MAIN();
