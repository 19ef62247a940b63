// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "semvid/budget.hpp"
#include "semvid/graph.hpp"
#include "semvid/pipeline.hpp"
#include "semvid/selector.hpp"
#include "semvid/synth.hpp"

namespace semvid {

// Serialization layer. All emitters are deterministic: the same value
// always yields the same bytes, and object keys appear in a fixed order.
// Parsers raise IoError for malformed JSON and ValidationError for content
// that parses but violates a schema or range.

std::string hyperparams_to_json(const HyperParams& hp);
// Accepts a JSON object with any subset of the parameter keys; missing
// keys keep the values in `base`. Unknown keys are an error.
HyperParams hyperparams_from_json(const std::string& text,
                                  const HyperParams& base = HyperParams{});

// Selection schema: {"frames": [{"frame": t, "object": [...], "motion":
// [...], "context": [...], "order": {...}}], "budget": [...], "params":
// {...}}. Role lists are serialized ascending; "order" preserves the
// original pick order per role.
std::string selection_to_json(const Selection& sel);
Selection selection_from_json(const std::string& text);

std::string metric_report_to_json(const MetricReport& report);

// Attention stack file layout: array files per layer plus the injection
// vector, tied together by a manifest.
struct StackManifest {
  std::vector<std::string> layers;
  std::string injection;
  std::size_t frames = 0;   // T
  std::size_t patches = 0;  // P
  // Optional companions written by the scenario generator.
  std::string patches_path;
  std::string query_path;
  std::string evidence_mask_path;
};

std::string manifest_to_json(const StackManifest& m);
StackManifest manifest_from_json(const std::string& text);

std::string scenario_spec_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_spec_from_json(const std::string& text);
// Accepts either a single spec object or an array of them.
std::vector<ScenarioSpec> scenario_specs_from_json(const std::string& text);

// CSV columns: strategy,seed,ratio,K,er_raw,er_rel,cs,recall,prune_ms.
// Failed rows carry nan metrics; their error strings appear only in the
// JSON mirror.
std::string bench_rows_to_csv(const std::vector<BenchRow>& rows);
std::string bench_rows_to_json(const std::vector<BenchRow>& rows,
                               const HyperParams& hp);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace semvid
