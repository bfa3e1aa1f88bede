// Copyright 2026 The bdauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "bdauth/metrics.hpp"
#include "bdauth/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bdauth;
using namespace bdauth::metrics;

namespace {

void check_roc_invariants(const RocCurve& roc, const std::vector<double>& g, const std::vector<double>& a) {
  REQUIRE_FALSE(roc.points.empty());
  for (std::size_t i = 0; i < roc.points.size(); ++i) {
    const auto& p = roc.points[i];
    CHECK(p.fpr >= 0.0);
    CHECK(p.fpr <= 1.0);
    CHECK(p.tpr >= 0.0);
    CHECK(p.tpr <= 1.0);
    // Each point is exactly the threshold test at its delta.
    CHECK(acceptance_rate(g, p.delta) == doctest::Approx(p.tpr));
    CHECK(acceptance_rate(a, p.delta) == doctest::Approx(p.fpr));
    if (i > 0) {
      CHECK(p.fpr > roc.points[i - 1].fpr);
      CHECK(p.tpr >= roc.points[i - 1].tpr);
      CHECK(p.delta > roc.points[i - 1].delta);
    }
  }
  CHECK(roc.points.back().fpr == 1.0);
  CHECK(roc.points.back().tpr == 1.0);
}

}  // namespace

TEST_CASE("ROC of separated populations passes through (0, 1)") {
  const std::vector<double> g = {0.1, 0.2, 0.3};
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
  const auto roc = compute_roc(g, a);
  check_roc_invariants(roc, g, a);
  CHECK(roc.points.front().fpr == 0.0);
  CHECK(roc.points.front().tpr == 1.0);
  CHECK(tpr_at_fpr(roc, 0.0) == 1.0);
  CHECK(auc(g, a) == 1.0);
}

TEST_CASE("ROC of identical populations stays near the diagonal") {
  Rng rng(1);
  const std::size_t n = 5000;
  std::vector<double> g(n), a(n);
  for (auto& x : g) x = uniform(rng, 0.0, 3.0);
  for (auto& x : a) x = uniform(rng, 0.0, 3.0);
  const auto roc = compute_roc(g, a);
  check_roc_invariants(roc, g, a);
  double worst = 0.0;
  for (const auto& p : roc.points) worst = std::max(worst, std::abs(p.tpr - p.fpr));
  // Two-sample KS bound at significance 0.01.
  CHECK(worst < 1.628 * std::sqrt(2.0 / n));
  CHECK(auc(g, a) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("AUC matches Phi(d / sqrt 2) for Gaussian-shifted scores") {
  Rng rng(2);
  std::normal_distribution<double> z(0.0, 1.0);
  for (double d : {0.5, 1.0, 2.0}) {
    std::vector<double> g(20000), a(20000);
    for (auto& x : g) x = z(rng);
    for (auto& x : a) x = d + z(rng);
    CHECK(std::abs(auc(g, a) - oracle::normal_cdf(d / std::sqrt(2.0))) < 0.01);
  }
}

TEST_CASE("AUC counts ties as one half and ranks non-finite attacker scores last") {
  CHECK(auc(std::vector<double>{1.0}, std::vector<double>{1.0}) == 0.5);
  CHECK(auc(std::vector<double>{1.0, 3.0}, std::vector<double>{2.0}) == 0.5);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(auc(std::vector<double>{5.0}, std::vector<double>{inf}) == 1.0);
  CHECK_THROWS_AS(auc(std::vector<double>{}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("property: ROC invariants on random populations with ties") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t ng = 1 + rng() % 60, na = 1 + rng() % 60;
    std::vector<double> g(ng), a(na);
    // Coarse grid to force ties within and across populations.
    for (auto& x : g) x = std::floor(uniform(rng, 0.0, 10.0)) / 4.0;
    for (auto& x : a) x = std::floor(uniform(rng, 2.0, 14.0)) / 4.0;
    check_roc_invariants(compute_roc(g, a), g, a);
    const double au = auc(g, a);
    CHECK(au >= 0.0);
    CHECK(au <= 1.0);
  }
}

TEST_CASE("tpr_at_fpr") {
  const std::vector<double> g = {0.1, 0.5, 0.9, 1.3};
  const std::vector<double> a = {0.4, 1.0, 2.0, 3.0};
  const auto roc = compute_roc(g, a);
  CHECK(tpr_at_fpr(roc, 1.0) == 1.0);
  CHECK(tpr_at_fpr(roc, 0.0) == 0.25);
  CHECK(tpr_at_fpr(roc, 0.25) == 0.75);
  CHECK(tpr_at_fpr(roc, -0.1) == 0.0);
}

TEST_CASE("calibrate_delta returns the largest delta meeting the FPR target") {
  const std::vector<double> a = {0.5, 0.7, 0.7, 1.0, 2.0};
  CHECK(calibrate_delta(a, 1.0) == 2.0);
  const double d0 = calibrate_delta(a, 0.0);
  CHECK(d0 < 0.5);
  CHECK(d0 == std::nextafter(0.5, 0.0));
  CHECK(acceptance_rate(a, calibrate_delta(a, 0.2)) == doctest::Approx(0.2));
  // 0.4 would need to admit exactly two, but 0.7 is doubled.
  CHECK(acceptance_rate(a, calibrate_delta(a, 0.4)) == doctest::Approx(0.2));

  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + rng() % 200);
    for (auto& x : v) x = std::floor(uniform(rng, 0.0, 50.0)) / 10.0;
    const double target = uniform(rng, 0.0, 1.0);
    const double d = calibrate_delta(v, target);
    CHECK(acceptance_rate(v, d) <= target + 1e-12);
    std::sort(v.begin(), v.end());
    const auto next = std::upper_bound(v.begin(), v.end(), d);
    if (next != v.end()) CHECK(acceptance_rate(v, *next) > target);
  }
}

TEST_CASE("full-TPR delta and acceptance rate") {
  const std::vector<double> g = {0.3, 0.1, 0.8};
  CHECK(delta_for_full_tpr(g) == 0.8);
  CHECK(acceptance_rate(g, 0.8) == 1.0);
  CHECK(acceptance_rate(g, 0.29) == doctest::Approx(1.0 / 3.0));
  CHECK(acceptance_rate(std::vector<double>{}, 1.0) == 0.0);
}

TEST_CASE("Wilson interval and AUC standard error") {
  const auto w = wilson_interval(50, 100, 1.959964);
  CHECK(w.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(w.hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto all = wilson_interval(1000, 1000);
  CHECK(all.hi == 1.0);
  CHECK(all.lo > 0.99);
  CHECK(auc_standard_error(0.8, 1000, 1000) < auc_standard_error(0.8, 100, 100));
  CHECK(auc_standard_error(0.8, 1000, 1000) > 0.0);
}

TEST_CASE("confusion matrix") {
  ConfusionMatrix m(3);
  for (int i = 0; i < 10; ++i) {
    m.add(0, 0);
    m.add(1, i < 9 ? 1 : 2);
    m.add(2, i < 8 ? 2 : 0);
  }
  CHECK(m.row_total(1) == 10u);
  CHECK(m.accuracy(1) == doctest::Approx(0.9));
  CHECK(m.trace_fraction() == doctest::Approx((1.0 + 0.9 + 0.8) / 3.0));
  CHECK_THROWS_AS(m.add(3, 0), std::out_of_range);
}
