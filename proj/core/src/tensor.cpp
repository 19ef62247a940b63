// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semvid/errors.hpp"

namespace semvid {

namespace {

void require_finite_span(const float* data, std::size_t n, std::size_t cols,
                         const std::string& what) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(data[i])) {
      throw ValidationError(what + ": non-finite value at row " +
                            std::to_string(i / cols) + ", col " +
                            std::to_string(i % cols));
    }
  }
}

void normalize_rows_inplace(float* data, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    float* row = data + r * cols;
    double norm = norm_l2(row, cols);
    if (norm == 0.0) continue;  // zero rows pass through unchanged
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = static_cast<float>(row[c] / norm);
    }
  }
}

}  // namespace

void require_finite(const Matrix& x, const std::string& what) {
  require_finite_span(x.data.data(), x.data.size(), std::max<std::size_t>(x.cols, 1), what);
}

void require_finite(const Tensor3& x, const std::string& what) {
  require_finite_span(x.data.data(), x.data.size(), std::max<std::size_t>(x.dim, 1), what);
}

double dot(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double norm_l2(const float* a, std::size_t n) {
  return std::sqrt(dot(a, a, n));
}

Matrix normalize_rows_l2(const Matrix& x) {
  require_finite(x, "normalize_rows_l2");
  Matrix out = x;
  normalize_rows_inplace(out.data.data(), out.rows, out.cols);
  return out;
}

Tensor3 normalize_rows_l2(const Tensor3& x) {
  require_finite(x, "normalize_rows_l2");
  Tensor3 out = x;
  normalize_rows_inplace(out.data.data(), out.frames * out.patches, out.dim);
  return out;
}

Matrix pool_global(const Tensor3& v) {
  if (v.frames == 0 || v.patches == 0 || v.dim == 0) {
    throw ValidationError("pool_global: empty tensor");
  }
  require_finite(v, "pool_global");
  Matrix out(v.frames, v.dim);
  std::vector<double> acc(v.dim);
  for (std::size_t t = 0; t < v.frames; ++t) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t p = 0; p < v.patches; ++p) {
      const float* patch = v.patch(t, p);
      for (std::size_t d = 0; d < v.dim; ++d) acc[d] += patch[d];
    }
    for (std::size_t d = 0; d < v.dim; ++d) {
      out.at(t, d) = static_cast<float>(acc[d] / static_cast<double>(v.patches));
    }
  }
  return out;
}

std::vector<double> query_similarity(const Matrix& x, const Matrix& q,
                                     SimilarityMode mode) {
  if (q.rows == 0) throw ValidationError("query_similarity: empty query");
  if (x.cols != q.cols) {
    throw ValidationError("query_similarity: dim mismatch (" +
                          std::to_string(x.cols) + " vs " +
                          std::to_string(q.cols) + ")");
  }
  std::vector<double> scores(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (mode == SimilarityMode::mean) {
      double acc = 0.0;
      for (std::size_t n = 0; n < q.rows; ++n) {
        acc += dot(x.row(i), q.row(n), x.cols);
      }
      scores[i] = acc / static_cast<double>(q.rows);
    } else {
      double best = dot(x.row(i), q.row(0), x.cols);
      for (std::size_t n = 1; n < q.rows; ++n) {
        best = std::max(best, dot(x.row(i), q.row(n), x.cols));
      }
      scores[i] = best;
    }
  }
  return scores;
}

namespace {

template <typename T>
std::vector<std::size_t> topk_impl(std::span<const T> scores, std::size_t k) {
  if (k > scores.size()) {
    throw ValidationError("topk: k=" + std::to_string(k) + " exceeds " +
                          std::to_string(scores.size()) + " candidates");
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Stable sort keeps equal scores in ascending index order.
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  idx.resize(k);
  return idx;
}

}  // namespace

std::vector<std::size_t> topk(std::span<const double> scores, std::size_t k) {
  return topk_impl(scores, k);
}

std::vector<std::size_t> topk(std::span<const float> scores, std::size_t k) {
  return topk_impl(scores, k);
}

std::vector<double> min_max_normalize(std::span<const double> x) {
  std::vector<double> out(x.size(), 0.0);
  if (x.empty()) return out;
  auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - lo) / (hi - lo);
  return out;
}

}  // namespace semvid
