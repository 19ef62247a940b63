// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace semvid {

// Dense row-major float32 matrix. Accumulations over elements are done in
// double; storage stays float32 so file round-trips are bit-exact.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, float fill = 0.0f)
      : rows(r), cols(c), data(r * c, fill) {}

  float* row(std::size_t r) { return data.data() + r * cols; }
  const float* row(std::size_t r) const { return data.data() + r * cols; }
  float& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Row-major (frames, patches, dim) float32 tensor of visual tokens.
struct Tensor3 {
  std::size_t frames = 0;
  std::size_t patches = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  Tensor3() = default;
  Tensor3(std::size_t t, std::size_t p, std::size_t d, float fill = 0.0f)
      : frames(t), patches(p), dim(d), data(t * p * d, fill) {}

  float* patch(std::size_t t, std::size_t p) {
    return data.data() + (t * patches + p) * dim;
  }
  const float* patch(std::size_t t, std::size_t p) const {
    return data.data() + (t * patches + p) * dim;
  }
};

enum class SimilarityMode { mean, max };

// Throws ValidationError when a value is not finite; the message names the
// offending position. `what` labels the tensor in error messages.
void require_finite(const Matrix& x, const std::string& what);
void require_finite(const Tensor3& x, const std::string& what);

double dot(const float* a, const float* b, std::size_t n);
double norm_l2(const float* a, std::size_t n);

// Row-wise L2 normalization. Zero rows pass through unchanged; non-finite
// input is a validation error.
Matrix normalize_rows_l2(const Matrix& x);
Tensor3 normalize_rows_l2(const Tensor3& x);

// Mean over the patch axis: (T, P, D) -> (T, D).
Matrix pool_global(const Tensor3& v);

// One score per row of x: mean or max of <x_i, q_n> over query rows.
// x and q must share the feature dimension.
std::vector<double> query_similarity(const Matrix& x, const Matrix& q,
                                     SimilarityMode mode);

// Indices of the k largest scores, in descending score order; equal scores
// are taken in ascending index order. k > scores.size() is an error.
std::vector<std::size_t> topk(std::span<const double> scores, std::size_t k);
std::vector<std::size_t> topk(std::span<const float> scores, std::size_t k);

// (x_i - x_min) / (x_max - x_min) per element; a constant input collapses
// to all zeros.
std::vector<double> min_max_normalize(std::span<const double> x);

}  // namespace semvid
