// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semvid/tensor.hpp"

namespace semvid {

// A float32 array as stored in a .npy file (format version 1.0,
// dtype '<f4', C order). Reading rejects anything else with an IoError
// that names the offending header field.
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return shape.empty() ? 1 : n;
  }
};

NpyArray read_npy(const std::string& path);
void write_npy(const std::string& path, const std::vector<std::size_t>& shape,
               const std::vector<float>& data);

// Rank-checked conversions; the error message names the expected and the
// actual rank.
Matrix as_matrix(const NpyArray& a, const std::string& what);
Tensor3 as_tensor3(const NpyArray& a, const std::string& what);

void write_npy(const std::string& path, const Matrix& m);
void write_npy(const std::string& path, const Tensor3& t);

}  // namespace semvid
