// Copyright (C) 2026 SemVID Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "semvid/budget.hpp"
#include "semvid/errors.hpp"
#include "semvid/rng.hpp"

using namespace semvid;

TEST_CASE("frame_relevance is zero for frames orthogonal to the query") {
  // Frame means live on axis 0/1, queries on axis 2.
  Matrix g(2, 3);
  g.at(0, 0) = 1.0f;
  g.at(1, 1) = 2.0f;
  Matrix q(2, 3);
  q.at(0, 2) = 1.0f;
  q.at(1, 2) = 5.0f;
  auto s = frame_relevance(g, q);
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(0.0));
}

TEST_CASE("frame_relevance peaks at the query-aligned frame") {
  Matrix q(1, 4);
  q.at(0, 0) = 3.0f;
  Matrix g(3, 4);
  g.at(0, 1) = 1.0f;                      // orthogonal
  g.at(1, 0) = 1.0f;                      // aligned
  g.at(2, 0) = 1.0f;
  g.at(2, 1) = 1.0f;                      // partially aligned
  auto s = frame_relevance(g, q);
  CHECK(s[1] == doctest::Approx(1.0));
  CHECK(s[1] > s[2]);
  CHECK(s[2] > s[0]);
}

TEST_CASE("frame_variation is zero for a static video") {
  Matrix g(4, 3, 1.0f);
  auto s = frame_variation(g);
  for (double v : s) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("frame_variation peaks after a hard cut") {
  // Frames 0-2 share one scene direction, frame 3 is orthogonal.
  Matrix g(4, 2);
  g.at(0, 0) = 1.0f;
  g.at(1, 0) = 1.1f;
  g.at(2, 0) = 0.9f;
  g.at(3, 1) = 1.0f;
  auto s = frame_variation(g);
  CHECK(s[0] == s[1]);
  CHECK(s[3] > s[1]);
  CHECK(s[3] > s[2]);
  CHECK(s[3] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("frame_variation of a single frame is zero") {
  Matrix g(1, 3, 2.0f);
  auto s = frame_variation(g);
  REQUIRE(s.size() == 1);
  CHECK(s[0] == 0.0);
}

TEST_CASE("mix_weights blends min-max normalized streams") {
  std::vector<double> rel = {0.0, 1.0};
  std::vector<double> var = {1.0, 0.0};
  auto w = mix_weights(rel, var, 0.6);
  CHECK(w[0] == doctest::Approx(0.4));
  CHECK(w[1] == doctest::Approx(0.6));
}

TEST_CASE("mix_weights falls back to uniform when all weights vanish") {
  std::vector<double> rel = {0.5, 0.5};
  std::vector<double> var = {0.2, 0.2};
  auto w = mix_weights(rel, var, 0.6);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));
}

TEST_CASE("global_budget floors the token product") {
  // 10460 tokens at an eighth keeps 1307.
  CHECK(global_budget(0.125, 20, 523) == 1307);
  CHECK(global_budget(1.0, 4, 16) == 64);
  CHECK_THROWS_AS(global_budget(0.0, 4, 16), ValidationError);
  CHECK_THROWS_AS(global_budget(1.5, 4, 16), ValidationError);
}

TEST_CASE("allocate_budgets follows largest remainders") {
  std::vector<double> w = {0.7, 0.1, 0.1, 0.1};
  // K = 100, floor 3 per frame: targets 64.6, 11.8, 11.8, 11.8.
  BudgetVector b = allocate_budgets(w, 0.25, 4, 100, 3);
  CHECK(b.total == 100);
  CHECK(b.per_frame == std::vector<std::size_t>{64, 12, 12, 12});
}

TEST_CASE("allocate_budgets clamps at the frame capacity and redistributes") {
  std::vector<double> w = {1.0, 0.0, 0.0, 0.0};
  BudgetVector b = allocate_budgets(w, 0.5, 4, 10, 1);
  CHECK(b.per_frame[0] == 10);
  std::size_t total = 0;
  for (std::size_t k : b.per_frame) {
    CHECK(k >= 1);
    CHECK(k <= 10);
    total += k;
  }
  CHECK(total == 20);
  CHECK(b.total == 20);
}

TEST_CASE("allocate_budgets rejects budgets below the context floor") {
  std::vector<double> w = {0.5, 0.5};
  try {
    allocate_budgets(w, 0.05, 2, 16, 3);
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    // The message names the smallest feasible ratio k_ctx/P.
    CHECK(std::string(e.what()).find("0.1875") != std::string::npos);
  }
}

TEST_CASE("allocate_budgets conserves the total over random cases") {
  Rng rng(31);
  for (int it = 0; it < 50; ++it) {
    std::size_t t = 1 + rng.below(12);
    std::size_t p = 4 + rng.below(60);
    std::size_t k_ctx = rng.below(4);
    double lo = static_cast<double>(k_ctx) / static_cast<double>(p);
    double r = lo + (1.0 - lo) * rng.uniform();
    if (r <= 0.0) r = 1.0 / static_cast<double>(t * p);
    std::vector<double> w(t);
    for (auto& x : w) x = rng.uniform();
    BudgetVector b = allocate_budgets(w, r, t, p, k_ctx);
    std::size_t total = 0;
    for (std::size_t k : b.per_frame) {
      CHECK(k >= k_ctx);
      CHECK(k <= p);
      total += k;
    }
    CHECK(total == global_budget(r, t, p));
  }
}

TEST_CASE("partition_roles splits twenty tokens as 12/5/3") {
  BudgetVector b;
  b.per_frame = {20};
  b.total = 20;
  RoleQuota q = partition_roles(b, 0.6, 3);
  CHECK(q.object[0] == 12);
  CHECK(q.motion[0] == 5);
  CHECK(q.context[0] == 3);
}

TEST_CASE("partition_roles disables motion at alpha one") {
  BudgetVector b;
  b.per_frame = {20};
  b.total = 20;
  RoleQuota q = partition_roles(b, 1.0, 3);
  CHECK(q.object[0] == 17);
  CHECK(q.motion[0] == 0);
  CHECK(q.context[0] == 3);
}

TEST_CASE("partition_roles disables objects at alpha zero") {
  BudgetVector b;
  b.per_frame = {20};
  b.total = 20;
  RoleQuota q = partition_roles(b, 0.0, 3);
  CHECK(q.object[0] == 0);
  CHECK(q.motion[0] == 17);
  CHECK(q.context[0] == 3);
}

TEST_CASE("partition_roles caps context by the frame budget") {
  BudgetVector b;
  b.per_frame = {2};
  b.total = 2;
  RoleQuota q = partition_roles(b, 0.6, 3);
  CHECK(q.context[0] == 2);
  CHECK(q.object[0] + q.motion[0] == 0);
}

TEST_CASE("hyperparameter validation bounds the unit-interval fields") {
  HyperParams hp;
  CHECK_NOTHROW(hp.validate());
  hp.alpha = 1.5;
  CHECK_THROWS_AS(hp.validate(), ValidationError);
  hp.alpha = 0.6;
  hp.retention_ratio = 0.0;
  CHECK_THROWS_AS(hp.validate(), ValidationError);
}
