// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
//
// Standalone acceptance gate. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any criterion fails. argv[1] is the
// path to the semvid CLI binary (used by the determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "semvid/budget.hpp"
#include "semvid/flops.hpp"
#include "semvid/graph.hpp"
#include "semvid/npy.hpp"
#include "semvid/pipeline.hpp"
#include "semvid/rng.hpp"
#include "semvid/selector.hpp"
#include "semvid/synth.hpp"
#include "semvid/tensor.hpp"

using namespace semvid;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void run_criterion(int index, const char* name, double budget_seconds,
                   const std::function<Outcome()>& fn) {
  auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
  if (out.pass && budget_seconds > 0.0 && secs > budget_seconds) {
    out.pass = false;
    out.detail = "runtime budget exceeded";
  }
  std::printf("[%2d/10] %-58s %s (%.2fs)%s%s\n", index, name,
              out.pass ? "PASS" : "FAIL", secs, out.detail.empty() ? "" : " : ",
              out.detail.c_str());
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

// ---------------------------------------------------------------- helpers

Tensor3 random_unit_patches(std::size_t t, std::size_t p, std::size_t d,
                            Rng& rng) {
  Tensor3 v(t, p, d);
  for (auto& x : v.data) x = static_cast<float>(rng.normal());
  return normalize_rows_l2(v);
}

AttentionStack random_stack(std::size_t layers, std::size_t frames,
                            std::size_t patches, Rng& rng) {
  const std::size_t n = frames * patches;
  std::vector<Matrix> raw(layers, Matrix(n, n));
  for (auto& m : raw)
    for (auto& x : m.data) x = static_cast<float>(rng.uniform()) + 0.01f;
  std::vector<double> inj(n);
  double total = 0.0;
  for (auto& x : inj) {
    x = rng.uniform() + 0.01;
    total += x;
  }
  for (auto& x : inj) x /= total;
  return make_attention_stack(row_normalize_attention(raw), inj, frames,
                              patches);
}

// Naive MMR reference: rescans every selected token at each step.
std::vector<std::size_t> naive_mmr(const Tensor3& unit_patches, std::size_t t,
                                   const Matrix& relevance, std::size_t quota,
                                   double lambda,
                                   const std::vector<std::size_t>& excluded) {
  const std::size_t p = unit_patches.patches;
  std::vector<bool> taken(p, false);
  for (std::size_t e : excluded) taken[e] = true;
  std::vector<std::size_t> picked;
  while (picked.size() < quota) {
    bool found = false;
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
      if (taken[c]) continue;
      double max_sim = 0.0;
      for (std::size_t s : picked) {
        double sim = dot(unit_patches.patch(t, c), unit_patches.patch(t, s),
                         unit_patches.dim);
        max_sim = std::max(max_sim, sim);
      }
      double score = lambda * relevance.at(t, c) - (1.0 - lambda) * max_sim;
      if (!found || score > best_score) {
        found = true;
        best = c;
        best_score = score;
      }
    }
    if (!found) return picked;
    taken[best] = true;
    picked.push_back(best);
  }
  return picked;
}

// One-sided sign test: P(X >= wins) for X ~ Binomial(n, 0.5).
double sign_test_pvalue(int wins, int n) {
  if (n <= 0) return 1.0;
  double pmf = std::pow(0.5, n);
  double tail = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (k >= wins) tail += pmf;
    pmf *= double(n - k) / double(k + 1);
  }
  return tail;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Drops the trailing CSV column (wall-clock time) from every data line.
std::string strip_last_column(const std::string& csv) {
  std::string out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string::npos) eol = csv.size();
    std::string line = csv.substr(pos, eol - pos);
    if (!header && !line.empty()) {
      std::size_t comma = line.rfind(',');
      if (comma != std::string::npos) line.resize(comma);
    }
    header = false;
    out += line;
    out += '\n';
    pos = eol + 1;
  }
  return out;
}

// Drops lines mentioning the wall-clock field from a JSON report.
std::string strip_timing_lines(const std::string& json) {
  std::string out;
  std::size_t pos = 0;
  while (pos < json.size()) {
    std::size_t eol = json.find('\n', pos);
    if (eol == std::string::npos) eol = json.size();
    std::string line = json.substr(pos, eol - pos);
    if (line.find("prune_ms") == std::string::npos) {
      out += line;
      out += '\n';
    }
    pos = eol + 1;
  }
  return out;
}

int run_cli(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  return rc;
}

// ---------------------------------------------------------------- criteria

Outcome criterion_budget_conservation() {
  Rng rng(1001);
  const std::size_t kctx_choices[] = {0, 1, 3, 10};
  for (int it = 0; it < 1000; ++it) {
    std::size_t k_ctx = kctx_choices[rng.below(4)];
    std::size_t t = 1 + rng.below(64);
    std::size_t p_min = std::max<std::size_t>(1, k_ctx);
    std::size_t p = p_min + rng.below(256 - p_min + 1);
    double lo = double(k_ctx) / double(p);
    double r = lo + (1.0 - lo) * rng.uniform();
    if (r <= 0.0) r = 1e-9;
    std::vector<double> w(t);
    for (auto& x : w) x = rng.uniform();
    if (rng.below(10) == 0) w.assign(t, 0.0);  // exercise the uniform fallback
    BudgetVector b = allocate_budgets(w, r, t, p, k_ctx);
    std::size_t expected = global_budget(r, t, p);
    std::size_t total = 0;
    for (std::size_t k : b.per_frame) {
      if (k < k_ctx || k > p)
        return {false, "per-frame budget out of [k_ctx, P]"};
      total += k;
    }
    if (total != expected || b.total != expected)
      return {false, "sum of budgets misses the floored total"};
  }
  return {true, ""};
}

Outcome criterion_mmr_oracle() {
  Rng rng(2002);
  const double lambdas[] = {0.2, 0.5, 0.8, 1.0};
  for (int it = 0; it < 500; ++it) {
    std::size_t t = 1 + rng.below(8);
    std::size_t p = 2 + rng.below(31);
    std::size_t d = 1 + rng.below(16);
    double lambda = lambdas[rng.below(4)];
    Tensor3 v = random_unit_patches(t, p, d, rng);
    Matrix rel(t, p);
    for (auto& x : rel.data) x = static_cast<float>(rng.uniform() * 2.0 - 1.0);
    std::vector<std::size_t> quota(t);
    FrameIndexLists excluded(t);
    for (std::size_t f = 0; f < t; ++f) {
      std::size_t n_excl = rng.below(p / 2 + 1);
      excluded[f] = rng.sample_without_replacement(p, n_excl);
      std::sort(excluded[f].begin(), excluded[f].end());
      quota[f] = rng.below(p - n_excl + 1);
    }
    auto got = mmr_select_objects(v, rel, quota, lambda, excluded);
    for (std::size_t f = 0; f < t; ++f) {
      auto want = naive_mmr(v, f, rel, quota[f], lambda, excluded[f]);
      if (got[f] != want) return {false, "incremental and naive picks differ"};
    }
  }
  return {true, ""};
}

Outcome criterion_lambda_one() {
  Rng rng(3003);
  for (int it = 0; it < 200; ++it) {
    std::size_t p = 2 + rng.below(31);
    std::size_t d = 1 + rng.below(16);
    Tensor3 v = random_unit_patches(1, p, d, rng);
    Matrix rel(1, p);
    for (auto& x : rel.data) x = static_cast<float>(rng.uniform() * 2.0 - 1.0);
    std::vector<std::size_t> quota = {rng.below(p + 1)};
    auto picks = mmr_select_objects(v, rel, quota, 1.0, FrameIndexLists(1));
    std::vector<float> scores(rel.data.begin(), rel.data.end());
    auto want = topk(std::span<const float>(scores), quota[0]);
    if (picks[0] != want) return {false, "lambda=1 differs from top-k"};
  }
  return {true, ""};
}

Outcome criterion_propagation_oracle() {
  Rng rng(4004);
  for (int it = 0; it < 100; ++it) {
    std::size_t layers = 1 + rng.below(4);
    std::size_t frames = 1 + rng.below(4);
    std::size_t patches = 1 + rng.below(16);
    while (frames * patches > 64) patches = 1 + rng.below(16);
    AttentionStack stack = random_stack(layers, frames, patches, rng);

    // Explicit transpose-chain oracle over the same layer order.
    std::vector<double> pi = stack.injection;
    for (std::size_t l = stack.layers.size(); l-- > 1;) {
      const Matrix& m = stack.layers[l];
      std::vector<double> next(pi.size(), 0.0);
      for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
          next[j] += double(m.at(i, j)) * pi[i];
      pi = next;
    }

    auto got = propagate_evidence(stack);
    for (std::size_t i = 0; i < pi.size(); ++i)
      if (std::abs(got[i] - pi[i]) > 1e-8)
        return {false, "landing distribution differs from the oracle"};

    auto steps = propagate_trajectory(stack);
    for (const auto& step : steps) {
      double total = 0.0;
      for (double x : step) total += x;
      if (std::abs(total - 1.0) > 1e-6)
        return {false, "intermediate distribution does not sum to one"};
    }
  }
  return {true, ""};
}

Outcome criterion_retention_fixtures() {
  {
    std::vector<double> pi_full = {0.25, 0.25, 0.25, 0.25};
    std::vector<double> pi_pruned = {0.5, 0.5};
    RetentionMetrics m = evidence_retention(pi_full, pi_pruned, {0, 1});
    if (std::abs(m.er_raw - 0.25) > 1e-6 || std::abs(m.er_rel - 1.0) > 1e-6)
      return {false, "uniform fixture off"};
  }
  {
    std::vector<double> pi_full = {0.9, 0.1, 0.0, 0.0};
    std::vector<double> pi_pruned = {0.5, 0.5};
    RetentionMetrics m = evidence_retention(pi_full, pi_pruned, {2, 3});
    const double want_rel =
        0.5 / std::exp(0.9 * std::log(0.9) + 0.1 * std::log(0.1));
    if (std::abs(m.er_raw - 0.5) > 1e-6 || std::abs(m.er_rel - want_rel) > 1e-6)
      return {false, "point-mass fixture off"};
  }
  Rng rng(5005);
  for (int it = 0; it < 100; ++it) {
    AttentionStack stack =
        random_stack(1 + rng.below(4), 1 + rng.below(3), 1 + rng.below(8), rng);
    auto pi = propagate_evidence(stack);
    std::vector<std::size_t> all(pi.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    RetentionMetrics m = evidence_retention(pi, pi, all);
    if (m.er_rel != 1.0) return {false, "identity pruning not exactly one"};
  }
  return {true, ""};
}

Outcome criterion_connectivity() {
  {
    std::vector<Matrix> layers(3, Matrix(4, 4, 0.25f));
    std::vector<double> inj(4, 0.25);
    auto stack = make_attention_stack(layers, inj, 2, 2);
    double cs = connectivity_strength(cross_frame_mass(stack));
    if (std::abs(cs - 1.0) > 1e-9) return {false, "uniform fixture off"};
  }
  Rng rng(6006);
  for (int it = 0; it < 200; ++it) {
    std::size_t frames = 2 + rng.below(3);
    std::size_t patches = 2 + rng.below(4);
    AttentionStack stack = random_stack(1 + rng.below(3), frames, patches, rng);
    const std::size_t n = stack.size();
    std::size_t outer_n = 2 + rng.below(n - 1);
    auto outer = rng.sample_without_replacement(n, outer_n);
    std::sort(outer.begin(), outer.end());
    std::size_t inner_n = 1 + rng.below(outer_n);
    auto pick = rng.sample_without_replacement(outer_n, inner_n);
    std::vector<std::size_t> inner;
    for (std::size_t i : pick) inner.push_back(outer[i]);
    std::sort(inner.begin(), inner.end());

    double cs_outer =
        compute_metrics(stack, outer, RestrictMode::restricted).cs;
    double cs_inner =
        compute_metrics(stack, inner, RestrictMode::restricted).cs;
    if (cs_inner > cs_outer + 1e-12)
      return {false, "nested restriction increased connectivity"};
  }
  return {true, ""};
}

Outcome criterion_strategy_orderings() {
  const int n = 100;
  int er_wins = 0, er_ties = 0;
  int cs_wins = 0, cs_ties = 0;
  double recall_semvid = 0.0, recall_random = 0.0;
  HyperParams hp;
  hp.retention_ratio = 0.125;
  for (int s = 0; s < n; ++s) {
    ScenarioSpec spec;
    spec.seed = 1 + static_cast<std::uint64_t>(s);
    Scenario sc = generate_scenario(spec);

    Selection sel_semvid = run_semvid(sc.patches, sc.query, hp);
    Selection sel_saliency = run_baseline(
        sc.patches, sc.query, {Strategy::saliency_topk, 0}, 0.125);
    Selection sel_relevance = run_baseline(
        sc.patches, sc.query, {Strategy::relevance_topk, 0}, 0.125);
    Selection sel_random = run_baseline(
        sc.patches, sc.query, {Strategy::random, spec.seed}, 0.125);

    const std::size_t p = sc.patches.patches;
    MetricReport m_semvid = compute_metrics(
        sc.attention, sel_semvid.flat_indices(p), RestrictMode::reweighted);
    MetricReport m_saliency = compute_metrics(
        sc.attention, sel_saliency.flat_indices(p), RestrictMode::reweighted);
    MetricReport m_relevance = compute_metrics(
        sc.attention, sel_relevance.flat_indices(p), RestrictMode::reweighted);

    if (m_semvid.er_rel > m_saliency.er_rel)
      ++er_wins;
    else if (m_semvid.er_rel == m_saliency.er_rel)
      ++er_ties;
    if (m_semvid.cs > m_relevance.cs)
      ++cs_wins;
    else if (m_semvid.cs == m_relevance.cs)
      ++cs_ties;

    recall_semvid += evidence_recall(sel_semvid, sc);
    recall_random += evidence_recall(sel_random, sc);
  }
  recall_semvid /= n;
  recall_random /= n;

  double p_er = sign_test_pvalue(er_wins, n - er_ties);
  double p_cs = sign_test_pvalue(cs_wins, n - cs_ties);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "er wins %d/100 (p=%.2g), cs wins %d/100 (p=%.2g), recall "
                "%.3f vs %.3f",
                er_wins, p_er, cs_wins, p_cs, recall_semvid, recall_random);
  if (p_er >= 0.01) return {false, std::string("retention ordering weak; ") + buf};
  if (p_cs >= 0.01)
    return {false, std::string("connectivity ordering weak; ") + buf};
  if (recall_semvid - recall_random < 0.10)
    return {false, std::string("recall margin below 0.10; ") + buf};
  return {true, buf};
}

Outcome criterion_ablation_structure() {
  for (int s = 0; s < 10; ++s) {
    ScenarioSpec spec;
    spec.seed = 300 + static_cast<std::uint64_t>(s);
    Scenario sc = generate_scenario(spec);

    HyperParams hp;
    hp.retention_ratio = 0.125;
    hp.alpha = 1.0;
    Selection no_motion = run_semvid(sc.patches, sc.query, hp);
    for (const auto& f : no_motion.frames)
      if (!f.motion.empty()) return {false, "alpha=1 kept motion tokens"};

    hp.alpha = 0.0;
    Selection no_object = run_semvid(sc.patches, sc.query, hp);
    for (const auto& f : no_object.frames)
      if (!f.object.empty()) return {false, "alpha=0 kept object tokens"};

    hp.alpha = 0.6;
    hp.k_ctx = 1;
    Selection proto_only = run_semvid(sc.patches, sc.query, hp);
    Tensor3 unit = normalize_rows_l2(sc.patches);
    Matrix global = normalize_rows_l2(pool_global(sc.patches));
    for (std::size_t t = 0; t < proto_only.frames.size(); ++t) {
      const auto& f = proto_only.frames[t];
      if (f.context.size() != 1) return {false, "k_ctx=1 context is not a singleton"};
      std::vector<bool> taken(sc.patches.patches, false);
      for (std::size_t i : f.object) taken[i] = true;
      for (std::size_t i : f.motion) taken[i] = true;
      bool found = false;
      std::size_t proto = 0;
      double best = 0.0;
      for (std::size_t i = 0; i < sc.patches.patches; ++i) {
        if (taken[i]) continue;
        double c = dot(unit.patch(t, i), global.row(t), unit.dim);
        if (!found || c > best) {
          found = true;
          best = c;
          proto = i;
        }
      }
      if (!found || f.context[0] != proto)
        return {false, "k_ctx=1 did not keep the proto token"};
    }
  }
  return {true, ""};
}

Outcome criterion_flops() {
  FlopsSpec one;
  one.tokens = 1;
  one.hidden = 2;
  one.ffn = 4;
  one.kv_heads = 1;
  one.head_dim = 2;
  one.layers = 1;
  if (estimate_flops(one).per_layer != 44)
    return {false, "single-token fixture is not 44"};

  Rng rng(9009);
  for (int it = 0; it < 20; ++it) {
    FlopsSpec spec;
    spec.tokens = 1 + rng.below(16384);
    spec.hidden = 1 + rng.below(4096);
    spec.ffn = 1 + rng.below(16384);
    spec.kv_heads = 1 + rng.below(16);
    spec.head_dim = 1 + rng.below(256);
    spec.layers = 1 + rng.below(64);
    FlopsEstimate e = estimate_flops(spec);
    unsigned __int128 n = spec.tokens, d = spec.hidden, f = spec.ffn;
    unsigned __int128 kv =
        static_cast<unsigned __int128>(spec.kv_heads) * spec.head_dim;
    unsigned __int128 want =
        2 * n * d * kv + 2 * n * d * d + 2 * n * n * d + 3 * n * d * f;
    if (want > UINT64_MAX) return {false, "oracle overflowed its range"};
    if (e.per_layer != static_cast<std::uint64_t>(want))
      return {false, "per-layer value differs from the integer oracle"};
    if (e.total != e.per_layer * spec.layers)
      return {false, "total is not layers times per-layer"};
  }
  return {true, ""};
}

Outcome criterion_determinism_io(const std::string& cli) {
  // NPY round-trips, including signed zeros.
  Rng rng(1010);
  auto dir = fs::temp_directory_path() / "semvid_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto npy_path = dir / "rt.npy";
  for (int it = 0; it < 1000; ++it) {
    std::size_t rank = 1 + rng.below(3);
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (auto& s : shape) {
      s = 1 + rng.below(8);
      total *= s;
    }
    std::vector<float> data(total);
    for (auto& v : data) v = static_cast<float>(rng.normal());
    if (total >= 2) {
      data[0] = 0.0f;
      data[1] = -0.0f;
    }
    if (total >= 3) data[2] = 3.0e-40f;  // denormal
    write_npy(npy_path.string(), shape, data);
    NpyArray back = read_npy(npy_path.string());
    if (back.shape != shape) return {false, "shape changed in round-trip"};
    if (std::memcmp(back.data.data(), data.data(),
                    data.size() * sizeof(float)) != 0)
      return {false, "payload bits changed in round-trip"};
  }

  if (cli.empty()) return {false, "cli binary path missing (argv[1])"};

  // Byte-identical reruns of prune and bench.
  auto spec_path = dir / "spec.json";
  {
    std::ofstream out(spec_path);
    out << "{\"seed\": 42}\n";
  }
  std::string sc_dir = (dir / "sc").string();
  std::string quiet = " > /dev/null 2>&1";
  if (run_cli(cli + " synth --spec " + spec_path.string() + " --out-dir " +
              sc_dir + quiet) != 0)
    return {false, "synth invocation failed"};

  std::string prune_base = cli + " prune --patches " + sc_dir +
                           "/patches.npy --query " + sc_dir +
                           "/query.npy --ratio 0.125 --out ";
  auto p1 = dir / "p1.json";
  auto p2 = dir / "p2.json";
  if (run_cli(prune_base + p1.string() + quiet) != 0 ||
      run_cli(prune_base + p2.string() + quiet) != 0)
    return {false, "prune invocation failed"};
  if (read_bytes(p1) != read_bytes(p2))
    return {false, "prune outputs differ between identical runs"};
  if (read_bytes(p1).empty()) return {false, "prune wrote an empty file"};

  std::string bench_base =
      cli + " bench --specs " + spec_path.string() +
      " --strategies semvid,uniform,random --ratios 0.125,0.25 --out ";
  auto b1 = dir / "b1.csv";
  auto b2 = dir / "b2.csv";
  if (run_cli(bench_base + b1.string() + quiet) != 0 ||
      run_cli(bench_base + b2.string() + quiet) != 0)
    return {false, "bench invocation failed"};
  // Wall-clock timing is the one legitimately nondeterministic column.
  if (strip_last_column(read_bytes(b1)) != strip_last_column(read_bytes(b2)))
    return {false, "bench csv differs beyond the timing column"};
  auto j1 = dir / "b1.json";
  auto j2 = dir / "b2.json";
  if (strip_timing_lines(read_bytes(j1)) != strip_timing_lines(read_bytes(j2)))
    return {false, "bench json differs beyond the timing field"};
  if (read_bytes(j1).empty()) return {false, "bench json mirror missing"};
  return {true, ""};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";

  run_criterion(1, "budget conservation over 1000 randomized allocations", 5.0,
                criterion_budget_conservation);
  run_criterion(2, "incremental mmr equals the naive oracle on 500 instances",
                10.0, criterion_mmr_oracle);
  run_criterion(3, "mmr at lambda one equals relevance top-k on 200 instances",
                0.0, criterion_lambda_one);
  run_criterion(4, "evidence propagation matches the transpose-chain oracle",
                0.0, criterion_propagation_oracle);
  run_criterion(5, "retention fixtures and exact identity retention", 0.0,
                criterion_retention_fixtures);
  run_criterion(6, "connectivity fixture and restricted-mode monotonicity", 0.0,
                criterion_connectivity);
  run_criterion(7, "strategy orderings over 100 seeded scenarios", 120.0,
                criterion_strategy_orderings);
  run_criterion(8, "ablation structure at alpha extremes and proto-only", 0.0,
                criterion_ablation_structure);
  run_criterion(9, "flops fixture and integer-exact random specs", 0.0,
                criterion_flops);
  run_criterion(10, "byte-identical cli reruns and bit-exact npy round-trips",
                0.0, [&] { return criterion_determinism_io(cli); });

  if (g_failures == 0) {
    std::printf("acceptance: 10/10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
