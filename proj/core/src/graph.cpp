// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/graph.hpp"

#include <algorithm>
#include <cmath>

#include "semvid/errors.hpp"
#include "semvid/log.hpp"

namespace semvid {

namespace {

constexpr double kRowSumTol = 1e-5;
constexpr double kInjectionTol = 1e-6;
constexpr double kLogFloor = 1e-12;

void check_distribution(std::span<const double> pi, const char* what) {
  double sum = 0.0;
  for (double v : pi) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string(what) +
                            ": entries must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kInjectionTol) {
    throw ValidationError(std::string(what) + ": sums to " +
                          std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

void AttentionStack::validate() const {
  std::size_t n = size();
  if (n == 0) throw ValidationError("AttentionStack: empty token set");
  if (layers.empty()) throw ValidationError("AttentionStack: no layers");
  if (frame_of.size() != n) {
    throw ValidationError("AttentionStack: frame map length mismatch");
  }
  if (num_frames == 0) throw ValidationError("AttentionStack: num_frames is 0");
  for (std::size_t f : frame_of) {
    if (f >= num_frames) {
      throw ValidationError("AttentionStack: frame map entry out of range");
    }
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Matrix& m = layers[l];
    if (m.rows != n || m.cols != n) {
      throw ValidationError("AttentionStack: layer " + std::to_string(l) +
                            " is " + std::to_string(m.rows) + "x" +
                            std::to_string(m.cols) + ", expected " +
                            std::to_string(n) + "x" + std::to_string(n));
    }
    for (std::size_t r = 0; r < n; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        float v = m.at(r, c);
        if (!(v >= 0.0f) || !std::isfinite(v)) {
          throw ValidationError("AttentionStack: negative or non-finite entry"
                                " in layer " + std::to_string(l));
        }
        sum += static_cast<double>(v);
      }
      if (rows_stochastic && std::abs(sum - 1.0) > kRowSumTol) {
        throw ValidationError("AttentionStack: layer " + std::to_string(l) +
                              " row " + std::to_string(r) + " sums to " +
                              std::to_string(sum));
      }
    }
  }
  check_distribution(injection, "AttentionStack injection");
}

AttentionStack make_attention_stack(std::vector<Matrix> layers,
                                    std::vector<double> injection,
                                    std::size_t frames, std::size_t patches) {
  AttentionStack stack;
  stack.layers = std::move(layers);
  stack.injection = std::move(injection);
  stack.num_frames = frames;
  stack.frame_of.resize(frames * patches);
  for (std::size_t i = 0; i < stack.frame_of.size(); ++i) {
    stack.frame_of[i] = i / patches;
  }
  stack.validate();
  return stack;
}

std::vector<Matrix> row_normalize_attention(const std::vector<Matrix>& raw) {
  std::vector<Matrix> out;
  out.reserve(raw.size());
  for (std::size_t l = 0; l < raw.size(); ++l) {
    const Matrix& m = raw[l];
    Matrix norm(m.rows, m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < m.cols; ++c) {
        float v = m.at(r, c);
        if (v < 0.0f || !std::isfinite(v)) {
          throw ValidationError("row_normalize_attention: negative or"
                                " non-finite weight in layer " +
                                std::to_string(l) + ", row " + std::to_string(r));
        }
        sum += static_cast<double>(v);
      }
      if (sum == 0.0) {
        float u = static_cast<float>(1.0 / static_cast<double>(m.cols));
        for (std::size_t c = 0; c < m.cols; ++c) norm.at(r, c) = u;
      } else {
        for (std::size_t c = 0; c < m.cols; ++c) {
          norm.at(r, c) = static_cast<float>(static_cast<double>(m.at(r, c)) / sum);
        }
      }
    }
    out.push_back(std::move(norm));
  }
  return out;
}

std::vector<std::vector<double>> propagate_trajectory(const AttentionStack& stack) {
  if (!stack.rows_stochastic) {
    throw ValidationError("propagate_evidence: rows are sub-stochastic;"
                          " reweight the restricted graph first");
  }
  stack.validate();
  std::size_t n = stack.size();
  std::vector<std::vector<double>> trajectory;
  trajectory.push_back(stack.injection);
  // Backward pass: the layer-1 matrix never multiplies (evidence lands at
  // the layer-1 token states).
  for (std::size_t l = stack.layers.size(); l >= 2; --l) {
    const Matrix& p = stack.layers[l - 1];
    const std::vector<double>& pi = trajectory.back();
    std::vector<double> next(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double mass = pi[r];
      if (mass == 0.0) continue;
      const float* row = p.row(r);
      for (std::size_t c = 0; c < n; ++c) {
        next[c] += mass * static_cast<double>(row[c]);
      }
    }
    trajectory.push_back(std::move(next));
  }
  return trajectory;
}

std::vector<double> propagate_evidence(const AttentionStack& stack) {
  return propagate_trajectory(stack).back();
}

AttentionStack restrict_graph(const AttentionStack& stack,
                              const std::vector<std::size_t>& kept,
                              RestrictMode mode, bool* fallback_used) {
  if (fallback_used != nullptr) *fallback_used = false;
  if (kept.empty()) throw ValidationError("restrict_graph: empty kept set");
  std::size_t n = stack.size();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] >= n) {
      throw ValidationError("restrict_graph: kept index " +
                            std::to_string(kept[i]) + " out of range");
    }
    if (i > 0 && kept[i] <= kept[i - 1]) {
      throw ValidationError("restrict_graph: kept indices must be strictly"
                            " ascending");
    }
  }
  if (kept.size() == n) return stack;  // identity pruning: bit-exact copy

  std::size_t m = kept.size();
  AttentionStack out;
  out.num_frames = stack.num_frames;
  out.frame_of.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.frame_of[i] = stack.frame_of[kept[i]];

  out.layers.reserve(stack.layers.size());
  bool fallback = false;
  for (const Matrix& layer : stack.layers) {
    Matrix sub(m, m);
    for (std::size_t r = 0; r < m; ++r) {
      const float* src = layer.row(kept[r]);
      double sum = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        float v = src[kept[c]];
        sub.at(r, c) = v;
        sum += static_cast<double>(v);
      }
      if (mode == RestrictMode::reweighted) {
        if (sum == 0.0) {
          fallback = true;
          float u = static_cast<float>(1.0 / static_cast<double>(m));
          for (std::size_t c = 0; c < m; ++c) sub.at(r, c) = u;
        } else {
          for (std::size_t c = 0; c < m; ++c) {
            sub.at(r, c) = static_cast<float>(static_cast<double>(sub.at(r, c)) / sum);
          }
        }
      }
    }
    out.layers.push_back(std::move(sub));
  }

  out.injection.resize(m);
  double mass = 0.0;
  for (std::size_t i = 0; i < m; ++i) mass += stack.injection[kept[i]];
  if (mass == 0.0) {
    fallback = true;
    std::fill(out.injection.begin(), out.injection.end(),
              1.0 / static_cast<double>(m));
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      out.injection[i] = stack.injection[kept[i]] / mass;
    }
  }

  out.rows_stochastic = (mode == RestrictMode::reweighted);
  if (fallback) {
    log_debug("restrict_graph: uniform fallback triggered");
    if (fallback_used != nullptr) *fallback_used = true;
  }
  return out;
}

RetentionMetrics evidence_retention(std::span<const double> pi_full,
                                    std::span<const double> pi_pruned,
                                    const std::vector<std::size_t>& kept) {
  check_distribution(pi_full, "evidence_retention pi_full");
  check_distribution(pi_pruned, "evidence_retention pi_pruned");
  if (kept.size() != pi_pruned.size()) {
    throw ValidationError("evidence_retention: kept set and pruned"
                          " distribution sizes differ");
  }
  std::size_t n = pi_full.size();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] >= n || (i > 0 && kept[i] <= kept[i - 1])) {
      throw ValidationError("evidence_retention: kept indices must be strictly"
                            " ascending and in range");
    }
  }

  RetentionMetrics out;
  // Retaining everything keeps the whole unit of mass by definition; the
  // exactness matters because er_rel must be exactly 1 in that case.
  if (kept.size() == n) {
    out.retained_mass = 1.0;
  } else {
    double rho = 0.0;
    for (std::size_t k : kept) rho += pi_full[k];
    out.retained_mass = std::min(1.0, std::max(0.0, rho));
  }

  std::vector<double> blended(n, 0.0);
  if (kept.size() < n) {
    double off_mass = (1.0 - out.retained_mass) / static_cast<double>(n - kept.size());
    std::fill(blended.begin(), blended.end(), off_mass);
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    blended[kept[i]] = out.retained_mass * pi_pruned[i];
  }

  double cross = 0.0;
  double self = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    if (pi_full[v] == 0.0) continue;  // 0 * log 0 := 0
    cross += pi_full[v] * std::log(std::max(blended[v], kLogFloor));
    self += pi_full[v] * std::log(std::max(pi_full[v], kLogFloor));
  }
  out.er_raw = std::exp(cross);
  out.er_rel = std::exp(cross) / std::exp(self);
  return out;
}

std::vector<std::vector<double>> cross_frame_mass(const AttentionStack& stack) {
  std::size_t frames = stack.num_frames;
  std::size_t layer_count = stack.layers.size();
  if (frames <= 1) return std::vector<std::vector<double>>(layer_count);

  std::vector<std::vector<double>> gamma(
      layer_count, std::vector<double>(frames - 1, 0.0));
  std::size_t n = stack.size();
  for (std::size_t l = 0; l < layer_count; ++l) {
    const Matrix& p = stack.layers[l];
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t ft = stack.frame_of[r];
      const float* row = p.row(r);
      for (std::size_t c = 0; c < n; ++c) {
        if (stack.frame_of[c] == ft + 1) {
          gamma[l][ft] += static_cast<double>(row[c]);
        }
      }
    }
  }
  return gamma;
}

double connectivity_strength(const std::vector<std::vector<double>>& gamma) {
  if (gamma.empty()) return 0.0;
  double total = 0.0;
  for (const std::vector<double>& layer : gamma) {
    for (double g : layer) total += g;
  }
  return total / static_cast<double>(gamma.size());
}

MetricReport compute_metrics(const AttentionStack& full,
                             const std::vector<std::size_t>& kept,
                             RestrictMode mode) {
  full.validate();
  std::vector<double> pi_full = propagate_evidence(full);

  bool fallback = false;
  AttentionStack reweighted =
      restrict_graph(full, kept, RestrictMode::reweighted, &fallback);
  std::vector<double> pi_pruned = propagate_evidence(reweighted);

  MetricReport report;
  RetentionMetrics er = evidence_retention(pi_full, pi_pruned, kept);
  report.er_raw = er.er_raw;
  report.er_rel = er.er_rel;
  report.retained_mass = er.retained_mass;
  report.mode = mode;
  report.uniform_fallback = fallback;

  if (mode == RestrictMode::reweighted) {
    report.gamma = cross_frame_mass(reweighted);
  } else {
    bool restricted_fallback = false;
    AttentionStack restricted =
        restrict_graph(full, kept, RestrictMode::restricted, &restricted_fallback);
    report.gamma = cross_frame_mass(restricted);
    report.uniform_fallback = report.uniform_fallback || restricted_fallback;
  }
  report.cs = connectivity_strength(report.gamma);
  return report;
}

}  // namespace semvid
