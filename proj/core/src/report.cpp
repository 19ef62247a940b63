// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include "semvid/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "semvid/errors.hpp"

namespace semvid {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

void reject_unknown_keys(const ordered_json& obj,
                         const std::vector<std::string>& known,
                         const char* what) {
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ValidationError(std::string(what) + ": unknown key '" +
                            item.key() + "'");
    }
  }
}

ordered_json hyperparams_json(const HyperParams& hp) {
  ordered_json j;
  j["alpha"] = hp.alpha;
  j["lambda_mmr"] = hp.lambda_mmr;
  j["beta"] = hp.beta;
  j["k_ctx"] = hp.k_ctx;
  j["retention_ratio"] = hp.retention_ratio;
  return j;
}

HyperParams hyperparams_from(const ordered_json& j, const HyperParams& base) {
  if (!j.is_object()) {
    throw ValidationError("hyperparameters: expected a JSON object");
  }
  reject_unknown_keys(
      j, {"alpha", "lambda_mmr", "beta", "k_ctx", "retention_ratio"},
      "hyperparameters");
  HyperParams hp = base;
  if (j.contains("alpha")) hp.alpha = j.at("alpha").get<double>();
  if (j.contains("lambda_mmr")) hp.lambda_mmr = j.at("lambda_mmr").get<double>();
  if (j.contains("beta")) hp.beta = j.at("beta").get<double>();
  if (j.contains("k_ctx")) hp.k_ctx = j.at("k_ctx").get<std::size_t>();
  if (j.contains("retention_ratio")) {
    hp.retention_ratio = j.at("retention_ratio").get<double>();
  }
  hp.validate();
  return hp;
}

std::vector<std::size_t> sorted_copy(const std::vector<std::size_t>& v) {
  std::vector<std::size_t> out = v;
  std::sort(out.begin(), out.end());
  return out;
}

ordered_json role_order(const Selection::FramePicks& picks) {
  ordered_json order;
  order["object"] = picks.object;
  order["motion"] = picks.motion;
  order["context"] = picks.context;
  return order;
}

std::vector<std::size_t> read_role(const ordered_json& frame, const char* role,
                                   const ordered_json* order) {
  std::vector<std::size_t> ascending =
      frame.at(role).get<std::vector<std::size_t>>();
  if (!std::is_sorted(ascending.begin(), ascending.end())) {
    throw ValidationError(std::string("selection: '") + role +
                          "' list is not ascending");
  }
  if (order == nullptr || !order->contains(role)) return ascending;
  std::vector<std::size_t> picked =
      order->at(role).get<std::vector<std::size_t>>();
  if (sorted_copy(picked) != ascending) {
    throw ValidationError(std::string("selection: 'order.") + role +
                          "' is not a permutation of '" + role + "'");
  }
  return picked;
}

const char* mode_name(RestrictMode mode) {
  return mode == RestrictMode::reweighted ? "reweighted" : "restricted";
}

}  // namespace

std::string hyperparams_to_json(const HyperParams& hp) {
  return hyperparams_json(hp).dump(2) + "\n";
}

HyperParams hyperparams_from_json(const std::string& text,
                                  const HyperParams& base) {
  return hyperparams_from(parse(text, "hyperparameters"), base);
}

std::string selection_to_json(const Selection& sel) {
  ordered_json j;
  j["frames"] = ordered_json::array();
  for (std::size_t t = 0; t < sel.frames.size(); ++t) {
    const Selection::FramePicks& picks = sel.frames[t];
    ordered_json frame;
    frame["frame"] = t;
    frame["object"] = sorted_copy(picks.object);
    frame["motion"] = sorted_copy(picks.motion);
    frame["context"] = sorted_copy(picks.context);
    frame["order"] = role_order(picks);
    j["frames"].push_back(std::move(frame));
  }
  j["budget"] = sel.budget.per_frame;
  j["params"] = hyperparams_json(sel.params);
  return j.dump(2) + "\n";
}

Selection selection_from_json(const std::string& text) {
  ordered_json j = parse(text, "selection");
  if (!j.is_object() || !j.contains("frames") || !j.contains("budget") ||
      !j.contains("params")) {
    throw ValidationError("selection: expected keys frames, budget, params");
  }
  Selection sel;
  sel.params = hyperparams_from(j.at("params"), HyperParams{});
  sel.budget.per_frame = j.at("budget").get<std::vector<std::size_t>>();
  sel.budget.total = 0;
  for (std::size_t k : sel.budget.per_frame) sel.budget.total += k;

  const ordered_json& frames = j.at("frames");
  if (!frames.is_array() || frames.size() != sel.budget.per_frame.size()) {
    throw ValidationError("selection: frames and budget lengths differ");
  }
  sel.frames.resize(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const ordered_json& frame = frames[t];
    if (frame.at("frame").get<std::size_t>() != t) {
      throw ValidationError("selection: frame entries must appear in order");
    }
    const ordered_json* order =
        frame.contains("order") ? &frame.at("order") : nullptr;
    sel.frames[t].object = read_role(frame, "object", order);
    sel.frames[t].motion = read_role(frame, "motion", order);
    sel.frames[t].context = read_role(frame, "context", order);

    std::vector<std::size_t> all;
    for (std::size_t p : sel.frames[t].object) all.push_back(p);
    for (std::size_t p : sel.frames[t].motion) all.push_back(p);
    for (std::size_t p : sel.frames[t].context) all.push_back(p);
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
      throw ValidationError("selection: duplicate index in frame " +
                            std::to_string(t));
    }
    if (all.size() != sel.budget.per_frame[t]) {
      throw ValidationError("selection: frame " + std::to_string(t) + " keeps " +
                            std::to_string(all.size()) + " tokens, budget says " +
                            std::to_string(sel.budget.per_frame[t]));
    }
  }
  return sel;
}

std::string metric_report_to_json(const MetricReport& report) {
  ordered_json j;
  j["er_raw"] = report.er_raw;
  j["er_rel"] = report.er_rel;
  j["retained_mass"] = report.retained_mass;
  j["cs"] = report.cs;
  j["gamma"] = report.gamma;
  j["mode"] = mode_name(report.mode);
  j["uniform_fallback"] = report.uniform_fallback;
  return j.dump(2) + "\n";
}

std::string manifest_to_json(const StackManifest& m) {
  ordered_json j;
  j["layers"] = m.layers;
  j["injection"] = m.injection;
  j["T"] = m.frames;
  j["P"] = m.patches;
  if (!m.patches_path.empty()) j["patches"] = m.patches_path;
  if (!m.query_path.empty()) j["query"] = m.query_path;
  if (!m.evidence_mask_path.empty()) j["evidence_mask"] = m.evidence_mask_path;
  return j.dump(2) + "\n";
}

StackManifest manifest_from_json(const std::string& text) {
  ordered_json j = parse(text, "manifest");
  StackManifest m;
  if (!j.is_object() || !j.contains("layers") || !j.contains("injection") ||
      !j.contains("T") || !j.contains("P")) {
    throw ValidationError("manifest: expected keys layers, injection, T, P");
  }
  m.layers = j.at("layers").get<std::vector<std::string>>();
  m.injection = j.at("injection").get<std::string>();
  m.frames = j.at("T").get<std::size_t>();
  m.patches = j.at("P").get<std::size_t>();
  if (j.contains("patches")) m.patches_path = j.at("patches").get<std::string>();
  if (j.contains("query")) m.query_path = j.at("query").get<std::string>();
  if (j.contains("evidence_mask")) {
    m.evidence_mask_path = j.at("evidence_mask").get<std::string>();
  }
  return m;
}

namespace {

ordered_json scenario_spec_json(const ScenarioSpec& spec) {
  ordered_json j;
  j["seed"] = spec.seed;
  j["frames"] = spec.frames;
  j["patches"] = spec.patches;
  j["dim"] = spec.dim;
  j["query_tokens"] = spec.query_tokens;
  j["layers"] = spec.layers;
  j["n_evidence"] = spec.n_evidence;
  j["evidence_frames"] = spec.evidence_frames;
  j["boundary_frames"] = spec.boundary_frames;
  j["jitter"] = spec.jitter;
  j["align"] = spec.align;
  j["temp"] = spec.temp;
  return j;
}

ScenarioSpec scenario_spec_from(const ordered_json& j) {
  if (!j.is_object()) {
    throw ValidationError("scenario spec: expected a JSON object");
  }
  reject_unknown_keys(j,
                      {"seed", "frames", "patches", "dim", "query_tokens",
                       "layers", "n_evidence", "evidence_frames",
                       "boundary_frames", "jitter", "align", "temp"},
                      "scenario spec");
  ScenarioSpec spec;
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("frames")) spec.frames = j.at("frames").get<std::size_t>();
  if (j.contains("patches")) spec.patches = j.at("patches").get<std::size_t>();
  if (j.contains("dim")) spec.dim = j.at("dim").get<std::size_t>();
  if (j.contains("query_tokens")) {
    spec.query_tokens = j.at("query_tokens").get<std::size_t>();
  }
  if (j.contains("layers")) spec.layers = j.at("layers").get<std::size_t>();
  if (j.contains("n_evidence")) {
    spec.n_evidence = j.at("n_evidence").get<std::size_t>();
  }
  if (j.contains("evidence_frames")) {
    spec.evidence_frames =
        j.at("evidence_frames").get<std::vector<std::size_t>>();
  }
  if (j.contains("boundary_frames")) {
    spec.boundary_frames =
        j.at("boundary_frames").get<std::vector<std::size_t>>();
  }
  if (j.contains("jitter")) spec.jitter = j.at("jitter").get<double>();
  if (j.contains("align")) spec.align = j.at("align").get<double>();
  if (j.contains("temp")) spec.temp = j.at("temp").get<double>();
  spec.validate();
  return spec;
}

}  // namespace

std::string scenario_spec_to_json(const ScenarioSpec& spec) {
  return scenario_spec_json(spec).dump(2) + "\n";
}

ScenarioSpec scenario_spec_from_json(const std::string& text) {
  return scenario_spec_from(parse(text, "scenario spec"));
}

std::vector<ScenarioSpec> scenario_specs_from_json(const std::string& text) {
  ordered_json j = parse(text, "scenario specs");
  std::vector<ScenarioSpec> specs;
  if (j.is_array()) {
    for (const ordered_json& item : j) specs.push_back(scenario_spec_from(item));
  } else {
    specs.push_back(scenario_spec_from(j));
  }
  if (specs.empty()) {
    throw ValidationError("scenario specs: empty list");
  }
  return specs;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

ordered_json bench_row_json(const BenchRow& row) {
  ordered_json j;
  j["strategy"] = row.strategy;
  j["seed"] = row.seed;
  j["ratio"] = row.ratio;
  j["K"] = row.budget;
  j["er_raw"] = row.er_raw;
  j["er_rel"] = row.er_rel;
  j["cs"] = row.cs;
  j["recall"] = row.recall;
  j["prune_ms"] = row.prune_ms;
  if (!row.error.empty()) j["error"] = row.error;
  return j;
}

}  // namespace

std::string bench_rows_to_csv(const std::vector<BenchRow>& rows) {
  std::string out = "strategy,seed,ratio,K,er_raw,er_rel,cs,recall,prune_ms\n";
  for (const BenchRow& row : rows) {
    out += row.strategy;
    out += ',';
    out += std::to_string(row.seed);
    out += ',';
    out += format_double(row.ratio);
    out += ',';
    out += std::to_string(row.budget);
    out += ',';
    out += format_double(row.er_raw);
    out += ',';
    out += format_double(row.er_rel);
    out += ',';
    out += format_double(row.cs);
    out += ',';
    out += format_double(row.recall);
    out += ',';
    out += format_double(row.prune_ms);
    out += '\n';
  }
  return out;
}

std::string bench_rows_to_json(const std::vector<BenchRow>& rows,
                               const HyperParams& hp) {
  ordered_json j;
  j["params"] = hyperparams_json(hp);
  j["rows"] = ordered_json::array();
  for (const BenchRow& row : rows) j["rows"].push_back(bench_row_json(row));
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path + ": read failed");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace semvid
