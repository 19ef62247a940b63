// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: prune | metrics | synth | bench | flops.
// Data outputs go to files or stdout; diagnostics go to stderr (SEMVID_LOG).
// Exit codes: 0 ok, 2 validation, 3 I/O or format, 4 infeasible budget.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semvid/budget.hpp"
#include "semvid/errors.hpp"
#include "semvid/flops.hpp"
#include "semvid/graph.hpp"
#include "semvid/log.hpp"
#include "semvid/npy.hpp"
#include "semvid/pipeline.hpp"
#include "semvid/report.hpp"
#include "semvid/selector.hpp"
#include "semvid/synth.hpp"

namespace {

struct PruneArgs {
  std::string patches_path;
  std::string query_path;
  std::string out_path;
  std::string config_path;
  std::string strategy = "semvid";
  std::optional<double> ratio;
  std::optional<double> alpha;
  std::optional<double> lambda_mmr;
  std::optional<double> beta;
  std::optional<std::size_t> k_ctx;
  std::uint64_t seed = 0;
};

// CLI flag > config file > built-in default.
semvid::HyperParams effective_params(const PruneArgs& args) {
  semvid::HyperParams hp;
  if (!args.config_path.empty()) {
    hp = semvid::hyperparams_from_json(semvid::read_text_file(args.config_path), hp);
  }
  if (args.alpha) hp.alpha = *args.alpha;
  if (args.lambda_mmr) hp.lambda_mmr = *args.lambda_mmr;
  if (args.beta) hp.beta = *args.beta;
  if (args.k_ctx) hp.k_ctx = *args.k_ctx;
  if (args.ratio) hp.retention_ratio = *args.ratio;
  hp.validate();
  return hp;
}

int run_prune(const PruneArgs& args) {
  semvid::HyperParams hp = effective_params(args);
  semvid::Tensor3 patches =
      semvid::as_tensor3(semvid::read_npy(args.patches_path), args.patches_path);
  semvid::Matrix query =
      semvid::as_matrix(semvid::read_npy(args.query_path), args.query_path);

  semvid::Strategy kind = semvid::parse_strategy(args.strategy);
  semvid::Selection sel;
  if (kind == semvid::Strategy::semvid) {
    sel = semvid::run_semvid(patches, query, hp);
  } else {
    sel = semvid::run_baseline(patches, query, {kind, args.seed},
                               hp.retention_ratio);
    sel.params = hp;  // echo the effective config even for baselines
  }
  semvid::write_text_file(args.out_path, semvid::selection_to_json(sel));
  semvid::log_info("prune: kept " + std::to_string(sel.total_selected()) +
                   " of " + std::to_string(patches.frames * patches.patches) +
                   " tokens");
  return semvid::kExitOk;
}

struct MetricsArgs {
  std::string manifest_path;
  std::string selection_path;
  std::string out_path;
  std::string mode = "reweighted";
};

std::vector<double> read_injection(const std::string& path) {
  semvid::NpyArray arr = semvid::read_npy(path);
  if (arr.shape.size() != 1) {
    throw semvid::IoError(path + ": expected rank-1 array, got rank " +
                          std::to_string(arr.shape.size()));
  }
  return std::vector<double>(arr.data.begin(), arr.data.end());
}

int run_metrics(const MetricsArgs& args) {
  if (args.mode != "reweighted" && args.mode != "restricted") {
    throw semvid::ValidationError("--mode must be reweighted or restricted");
  }
  semvid::StackManifest manifest =
      semvid::manifest_from_json(semvid::read_text_file(args.manifest_path));
  std::filesystem::path base =
      std::filesystem::path(args.manifest_path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  std::vector<semvid::Matrix> layers;
  layers.reserve(manifest.layers.size());
  for (const std::string& path : manifest.layers) {
    layers.push_back(
        semvid::as_matrix(semvid::read_npy(resolve(path)), path));
  }
  std::vector<double> injection = read_injection(resolve(manifest.injection));
  semvid::AttentionStack stack = semvid::make_attention_stack(
      std::move(layers), std::move(injection), manifest.frames,
      manifest.patches);

  semvid::Selection sel =
      semvid::selection_from_json(semvid::read_text_file(args.selection_path));
  if (sel.frames.size() != manifest.frames) {
    throw semvid::ValidationError(
        "selection covers " + std::to_string(sel.frames.size()) +
        " frames, manifest says " + std::to_string(manifest.frames));
  }
  std::vector<std::size_t> kept = sel.flat_indices(manifest.patches);
  semvid::RestrictMode mode = args.mode == "reweighted"
                                  ? semvid::RestrictMode::reweighted
                                  : semvid::RestrictMode::restricted;
  semvid::MetricReport report = semvid::compute_metrics(stack, kept, mode);
  semvid::write_text_file(args.out_path, semvid::metric_report_to_json(report));
  return semvid::kExitOk;
}

struct SynthArgs {
  std::string spec_path;
  std::string out_dir;
};

int run_synth(const SynthArgs& args) {
  semvid::ScenarioSpec spec =
      semvid::scenario_spec_from_json(semvid::read_text_file(args.spec_path));
  semvid::Scenario sc = semvid::generate_scenario(spec);

  std::filesystem::path dir(args.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw semvid::IoError(args.out_dir + ": cannot create directory: " +
                          ec.message());
  }

  semvid::write_npy((dir / "patches.npy").string(), sc.patches);
  semvid::write_npy((dir / "query.npy").string(), sc.query);

  semvid::StackManifest manifest;
  manifest.frames = spec.frames;
  manifest.patches = spec.patches;
  manifest.patches_path = "patches.npy";
  manifest.query_path = "query.npy";
  for (std::size_t l = 0; l < sc.attention.layers.size(); ++l) {
    char name[32];
    std::snprintf(name, sizeof(name), "layer_%02zu.npy", l);
    semvid::write_npy((dir / name).string(), sc.attention.layers[l]);
    manifest.layers.push_back(name);
  }
  std::vector<float> injection(sc.attention.injection.begin(),
                               sc.attention.injection.end());
  semvid::write_npy((dir / "injection.npy").string(),
                    {injection.size()}, injection);
  manifest.injection = "injection.npy";

  std::vector<float> mask(sc.evidence_mask.begin(), sc.evidence_mask.end());
  semvid::write_npy((dir / "evidence_mask.npy").string(),
                    {spec.frames, spec.patches}, mask);
  manifest.evidence_mask_path = "evidence_mask.npy";

  semvid::write_text_file((dir / "manifest.json").string(),
                          semvid::manifest_to_json(manifest));
  semvid::write_text_file((dir / "spec.json").string(),
                          semvid::scenario_spec_to_json(spec));
  return semvid::kExitOk;
}

struct BenchArgs {
  std::string specs_path;
  std::string out_path;
  std::string config_path;
  std::vector<std::string> strategies;
  std::vector<double> ratios;
  std::uint64_t seed = 0;
};

int run_bench_cmd(const BenchArgs& args) {
  std::vector<semvid::ScenarioSpec> specs =
      semvid::scenario_specs_from_json(semvid::read_text_file(args.specs_path));
  std::vector<semvid::StrategyId> strategies;
  for (const std::string& name : args.strategies) {
    strategies.push_back({semvid::parse_strategy(name), args.seed});
  }
  semvid::HyperParams hp;
  if (!args.config_path.empty()) {
    hp = semvid::hyperparams_from_json(semvid::read_text_file(args.config_path), hp);
  }

  std::vector<semvid::BenchRow> rows =
      semvid::run_bench(specs, strategies, args.ratios, hp);
  semvid::write_text_file(args.out_path, semvid::bench_rows_to_csv(rows));
  std::filesystem::path mirror(args.out_path);
  mirror.replace_extension(".json");
  semvid::write_text_file(mirror.string(),
                          semvid::bench_rows_to_json(rows, hp));
  return semvid::kExitOk;
}

struct FlopsArgs {
  semvid::FlopsSpec spec;
};

int run_flops(const FlopsArgs& args) {
  semvid::FlopsEstimate est = semvid::estimate_flops(args.spec);
  std::printf("{\n  \"per_layer\": %llu,\n  \"total\": %llu,\n"
              "  \"total_tflops\": \"%s\"\n}\n",
              static_cast<unsigned long long>(est.per_layer),
              static_cast<unsigned long long>(est.total),
              est.total_tflops_str().c_str());
  return semvid::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SemVID: training-free visual token pruning for video-language"
               " pipelines"};
  app.require_subcommand(1);

  PruneArgs prune_args;
  CLI::App* prune = app.add_subcommand(
      "prune", "Select which visual tokens to keep for one video");
  prune->add_option("--patches", prune_args.patches_path,
                    "Patch embeddings, .npy float32 (T, P, D)")->required();
  prune->add_option("--query", prune_args.query_path,
                    "Query token embeddings, .npy float32 (N, D)")->required();
  prune->add_option("--ratio", prune_args.ratio, "Retention ratio in (0, 1]");
  prune->add_option("--alpha", prune_args.alpha, "Relevance/variation mix");
  prune->add_option("--lambda-mmr", prune_args.lambda_mmr,
                    "Relevance/diversity trade-off for object tokens");
  prune->add_option("--beta", prune_args.beta,
                    "Query weight in the motion score");
  prune->add_option("--k-ctx", prune_args.k_ctx, "Per-frame context floor");
  prune->add_option("--strategy", prune_args.strategy,
                    "semvid|uniform|random|relevance|saliency");
  prune->add_option("--seed", prune_args.seed, "Seed for the random strategy");
  prune->add_option("--config", prune_args.config_path,
                    "JSON file with hyperparameter defaults");
  prune->add_option("--out", prune_args.out_path, "Output selection JSON")
      ->required();

  MetricsArgs metrics_args;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "Evidence retention and connectivity of a selection");
  metrics->add_option("--manifest", metrics_args.manifest_path,
                      "Attention stack manifest JSON")->required();
  metrics->add_option("--selection", metrics_args.selection_path,
                      "Selection JSON from prune")->required();
  metrics->add_option("--mode", metrics_args.mode, "reweighted|restricted");
  metrics->add_option("--out", metrics_args.out_path, "Output metrics JSON")
      ->required();

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a seeded synthetic scenario");
  synth->add_option("--spec", synth_args.spec_path, "Scenario spec JSON")
      ->required();
  synth->add_option("--out-dir", synth_args.out_dir, "Output directory")
      ->required();

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench", "Compare strategies across seeded scenarios");
  bench->add_option("--specs", bench_args.specs_path,
                    "JSON array of scenario specs")->required();
  bench->add_option("--strategies", bench_args.strategies,
                    "Comma-separated strategy names")
      ->required()->delimiter(',');
  bench->add_option("--ratios", bench_args.ratios,
                    "Comma-separated retention ratios")
      ->required()->delimiter(',');
  bench->add_option("--seed", bench_args.seed, "Base seed for the random strategy");
  bench->add_option("--config", bench_args.config_path,
                    "JSON file with hyperparameter defaults");
  bench->add_option("--out", bench_args.out_path,
                    "Output CSV path (a .json mirror is written alongside)")
      ->required();

  FlopsArgs flops_args;
  CLI::App* flops = app.add_subcommand(
      "flops", "Prefill cost of a pruned sequence");
  flops->add_option("--n", flops_args.spec.tokens, "Sequence length")->required();
  flops->add_option("--hidden", flops_args.spec.hidden, "Model width")->required();
  flops->add_option("--ffn", flops_args.spec.ffn,
                    "Feed-forward intermediate width")->required();
  flops->add_option("--kv-heads", flops_args.spec.kv_heads,
                    "Key/value head count")->required();
  flops->add_option("--head-dim", flops_args.spec.head_dim, "Head dimension")
      ->required();
  flops->add_option("--layers", flops_args.spec.layers, "Layer count")
      ->required();

  try {
    app.parse(argc, argv);
    if (prune->parsed()) return run_prune(prune_args);
    if (metrics->parsed()) return run_metrics(metrics_args);
    if (synth->parsed()) return run_synth(synth_args);
    if (bench->parsed()) return run_bench_cmd(bench_args);
    if (flops->parsed()) return run_flops(flops_args);
    return semvid::kExitValidation;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? semvid::kExitOk : semvid::kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "semvid: %s\n", e.what());
    return semvid::exit_code_for(e);
  }
}
