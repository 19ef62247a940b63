// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/synth.hpp"

#include <algorithm>
#include <cmath>

#include "semvid/errors.hpp"
#include "semvid/rng.hpp"

namespace semvid {

namespace {

// Purpose tags for sub-stream seeds. Draw order within each stream is
// frozen: changing one consumer must never perturb another's values.
constexpr std::uint64_t kPatchStream = 0xA1;
constexpr std::uint64_t kQueryStream = 0xB2;
constexpr std::uint64_t kAttnStream = 0xC3;
constexpr std::uint64_t kEvidenceStream = 0xD4;

constexpr double kQuerySpread = 0.25;

void check_frame_set(const std::vector<std::size_t>& set, std::size_t lo,
                     std::size_t hi, const char* name) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] < lo || set[i] >= hi) {
      throw ValidationError(std::string("ScenarioSpec: ") + name + " entry " +
                            std::to_string(set[i]) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
    if (i > 0 && set[i] <= set[i - 1]) {
      throw ValidationError(std::string("ScenarioSpec: ") + name +
                            " must be strictly ascending");
    }
  }
}

std::vector<double> draw_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

void normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (frames < 1 || patches < 1 || dim < 1 || query_tokens < 1 || layers < 1 ||
      n_evidence < 1) {
    throw ValidationError("ScenarioSpec: all counts must be >= 1");
  }
  if (n_evidence > patches) {
    throw ValidationError("ScenarioSpec: n_evidence exceeds patches per frame");
  }
  check_frame_set(evidence_frames, 0, frames, "evidence_frames");
  check_frame_set(boundary_frames, 1, frames, "boundary_frames");
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) {
    throw ValidationError("ScenarioSpec: jitter must be finite and >= 0");
  }
  if (!(align > 0.0 && align <= 1.0)) {
    throw ValidationError("ScenarioSpec: align must be in (0, 1]");
  }
  if (!(temp > 0.0) || !std::isfinite(temp)) {
    throw ValidationError("ScenarioSpec: temp must be positive");
  }
}

AttentionStack synth_attention(const Tensor3& patches, const Matrix& query,
                               std::size_t layers, double temp,
                               std::uint64_t seed) {
  if (layers < 1) throw ValidationError("synth_attention: layers must be >= 1");
  if (!(temp > 0.0)) throw ValidationError("synth_attention: temp must be positive");
  Tensor3 unit = normalize_rows_l2(patches);
  Matrix unit_q = normalize_rows_l2(query);
  std::size_t n = patches.frames * patches.patches;
  std::size_t dim = patches.dim;
  double scale = 1.0 / std::sqrt(static_cast<double>(dim));

  std::vector<Matrix> stack_layers;
  stack_layers.reserve(layers);
  std::vector<double> projected(n * dim);
  for (std::size_t l = 0; l < layers; ++l) {
    Rng rng(mix_seed(mix_seed(seed ^ kAttnStream) + l));
    std::vector<double> w(dim * dim);
    for (double& x : w) x = rng.normal();

    for (std::size_t i = 0; i < n; ++i) {
      const float* row = unit.data.data() + i * dim;
      for (std::size_t c = 0; c < dim; ++c) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          acc += static_cast<double>(row[d]) * w[d * dim + c];
        }
        projected[i * dim + c] = acc;
      }
    }

    Matrix layer(n, n);
    std::vector<double> logits(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* yi = projected.data() + i * dim;
      double max_logit = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double* yj = projected.data() + j * dim;
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) acc += yi[d] * yj[d];
        logits[j] = acc * scale;
        if (j == 0 || logits[j] > max_logit) max_logit = logits[j];
      }
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        logits[j] = std::exp(logits[j] - max_logit);
        sum += logits[j];
      }
      float* out = layer.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        out[j] = static_cast<float>(logits[j] / sum);
      }
    }
    stack_layers.push_back(std::move(layer));
  }

  std::vector<double> injection(n);
  double max_score = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const float* row = unit.data.data() + i * dim;
    double best = dot(row, unit_q.row(0), dim);
    for (std::size_t q = 1; q < unit_q.rows; ++q) {
      best = std::max(best, dot(row, unit_q.row(q), dim));
    }
    injection[i] = best / temp;
    if (i == 0 || injection[i] > max_score) max_score = injection[i];
  }
  double sum = 0.0;
  for (double& v : injection) {
    v = std::exp(v - max_score);
    sum += v;
  }
  for (double& v : injection) v /= sum;

  return make_attention_stack(std::move(stack_layers), std::move(injection),
                              patches.frames, patches.patches);
}

Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::size_t T = spec.frames, P = spec.patches, D = spec.dim;

  Scenario sc;
  sc.spec = spec;
  sc.boundaries = spec.boundary_frames;

  // Query tokens scatter around one common unit direction.
  Rng query_rng(mix_seed(spec.seed ^ kQueryStream));
  std::vector<double> common = draw_vector(query_rng, D);
  normalize(common);
  sc.query = Matrix(spec.query_tokens, D);
  for (std::size_t nq = 0; nq < spec.query_tokens; ++nq) {
    std::vector<double> tok = draw_vector(query_rng, D);
    for (std::size_t d = 0; d < D; ++d) tok[d] = common[d] + kQuerySpread * tok[d];
    normalize(tok);
    for (std::size_t d = 0; d < D; ++d) {
      sc.query.at(nq, d) = static_cast<float>(tok[d]);
    }
  }

  // The evidence direction maximizes the mean-over-query-tokens cosine by
  // construction: the normalized resultant of the unit query tokens.
  Matrix unit_q = normalize_rows_l2(sc.query);
  std::vector<double> evidence_dir(D, 0.0);
  for (std::size_t nq = 0; nq < unit_q.rows; ++nq) {
    for (std::size_t d = 0; d < D; ++d) {
      evidence_dir[d] += static_cast<double>(unit_q.at(nq, d));
    }
  }
  normalize(evidence_dir);

  // Background: per-scene patch bases plus per-frame jitter.
  Rng patch_rng(mix_seed(spec.seed ^ kPatchStream));
  std::size_t scenes = spec.boundary_frames.size() + 1;
  std::vector<std::vector<double>> base(scenes * P);
  for (std::size_t s = 0; s < scenes; ++s) {
    for (std::size_t p = 0; p < P; ++p) {
      base[s * P + p] = draw_vector(patch_rng, D);
    }
  }
  std::vector<std::size_t> scene_of(T, 0);
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t s = 0;
    for (std::size_t b : spec.boundary_frames) {
      if (b <= t) ++s;
    }
    scene_of[t] = s;
  }
  sc.patches = Tensor3(T, P, D);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t p = 0; p < P; ++p) {
      const std::vector<double>& b = base[scene_of[t] * P + p];
      std::vector<double> noise = draw_vector(patch_rng, D);
      float* out = sc.patches.patch(t, p);
      for (std::size_t d = 0; d < D; ++d) {
        out[d] = static_cast<float>(b[d] + spec.jitter * noise[d]);
      }
    }
  }

  // Evidence overwrites seeded patch slots in the evidence frames.
  Rng evidence_rng(mix_seed(spec.seed ^ kEvidenceStream));
  sc.evidence_mask.assign(T * P, 0);
  for (std::size_t t : spec.evidence_frames) {
    std::vector<std::size_t> slots =
        evidence_rng.sample_without_replacement(P, spec.n_evidence);
    for (std::size_t slot : slots) {
      std::vector<double> noise = draw_vector(evidence_rng, D);
      std::vector<double> e(D);
      for (std::size_t d = 0; d < D; ++d) {
        e[d] = spec.align * evidence_dir[d] + (1.0 - spec.align) * noise[d];
      }
      normalize(e);
      float* out = sc.patches.patch(t, slot);
      for (std::size_t d = 0; d < D; ++d) out[d] = static_cast<float>(e[d]);
      sc.evidence_mask[t * P + slot] = 1;
    }
  }

  sc.attention =
      synth_attention(sc.patches, sc.query, spec.layers, spec.temp, spec.seed);
  return sc;
}

double evidence_recall(const Selection& sel, const Scenario& sc) {
  std::size_t P = sc.patches.patches;
  std::vector<char> kept(sc.patches.frames * P, 0);
  for (std::size_t id : sel.flat_indices(P)) {
    if (id >= kept.size()) {
      throw ValidationError("evidence_recall: selection index out of range");
    }
    kept[id] = 1;
  }
  std::size_t cells = 0, hit = 0;
  for (std::size_t i = 0; i < sc.evidence_mask.size(); ++i) {
    if (!sc.evidence_mask[i]) continue;
    ++cells;
    hit += kept[i];
  }
  if (cells == 0) return 1.0;
  return static_cast<double>(hit) / static_cast<double>(cells);
}

}  // namespace semvid
