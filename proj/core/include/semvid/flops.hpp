// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace semvid {

// Decoder prefill cost model. tokens is the sequence length after pruning;
// hidden/ffn are the model width and feed-forward intermediate width;
// kv_heads and head_dim describe the grouped key/value projection.
struct FlopsSpec {
  std::uint64_t tokens = 0;    // n
  std::uint64_t hidden = 0;    // D
  std::uint64_t ffn = 0;       // D'
  std::uint64_t kv_heads = 0;  // h_kv
  std::uint64_t head_dim = 0;  // d
  std::uint64_t layers = 1;

  void validate() const;
};

struct FlopsEstimate {
  std::uint64_t per_layer = 0;
  std::uint64_t total = 0;

  double total_tflops() const { return static_cast<double>(total) / 1e12; }
  // One decimal place, e.g. "59.4".
  std::string total_tflops_str() const;
};

// per_layer = 2nD(h_kv * d) + 2nD^2 + 2n^2 D + 3nDD', exact in 64-bit
// integer arithmetic; total = layers * per_layer.
FlopsEstimate estimate_flops(const FlopsSpec& spec);

}  // namespace semvid
