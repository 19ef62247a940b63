// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/flops.hpp"

#include <cstdio>

#include "semvid/errors.hpp"

namespace semvid {

void FlopsSpec::validate() const {
  auto positive = [](std::uint64_t v, const char* name) {
    if (v == 0) {
      throw ValidationError(std::string("flops spec: ") + name +
                            " must be positive");
    }
  };
  positive(tokens, "tokens");
  positive(hidden, "hidden");
  positive(ffn, "ffn");
  positive(kv_heads, "kv_heads");
  positive(head_dim, "head_dim");
  positive(layers, "layers");
}

std::string FlopsEstimate::total_tflops_str() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", total_tflops());
  return buf;
}

FlopsEstimate estimate_flops(const FlopsSpec& spec) {
  spec.validate();
  std::uint64_t n = spec.tokens, d = spec.hidden;
  FlopsEstimate out;
  out.per_layer = 2 * n * d * (spec.kv_heads * spec.head_dim) +
                  2 * n * d * d + 2 * n * n * d + 3 * n * d * spec.ffn;
  out.total = spec.layers * out.per_layer;
  return out;
}

}  // namespace semvid
