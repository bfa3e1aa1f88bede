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

#include "bdauth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bdauth::metrics {

namespace {

std::vector<double> finite_sorted(std::span<const double> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (std::isfinite(x)) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Largest double strictly below x.
double below(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }

}  // namespace

RocCurve compute_roc(std::span<const double> genuine, std::span<const double> attacker) {
  RocCurve roc;
  if (genuine.empty() || attacker.empty()) return roc;
  const std::vector<double> g = finite_sorted(genuine);
  const std::vector<double> a = finite_sorted(attacker);
  const double ng = static_cast<double>(genuine.size());
  const double na = static_cast<double>(attacker.size());
  const double top = std::max(g.empty() ? 0.0 : g.back(), a.empty() ? 0.0 : a.back());

  // Genuine acceptances for the largest delta strictly below the threshold.
  auto tpr_before = [&](double v) {
    return static_cast<double>(std::lower_bound(g.begin(), g.end(), v) - g.begin()) / ng;
  };
  auto tpr_upto = [&](double v) {
    return static_cast<double>(std::upper_bound(g.begin(), g.end(), v) - g.begin()) / ng;
  };

  if (a.empty()) {
    roc.points.push_back({0.0, tpr_upto(top), top});
    return roc;
  }
  if (a.front() > 0.0) roc.points.push_back({0.0, tpr_before(a.front()), below(a.front())});
  std::size_t i = 0;
  while (i < a.size()) {
    const double v = a[i];
    std::size_t j = i;
    while (j < a.size() && a[j] == v) ++j;
    const double fpr = static_cast<double>(j) / na;
    if (j < a.size()) {
      roc.points.push_back({fpr, tpr_before(a[j]), below(a[j])});
    } else {
      roc.points.push_back({fpr, tpr_upto(top), top});
    }
    i = j;
  }
  return roc;
}

double auc(std::span<const double> genuine, std::span<const double> attacker) {
  if (genuine.empty() || attacker.empty()) throw std::invalid_argument("AUC needs two populations");
  // Non-finite scores rank above everything; ties among them count half.
  std::vector<double> a(attacker.begin(), attacker.end());
  for (double& x : a) {
    if (!std::isfinite(x)) x = std::numeric_limits<double>::infinity();
  }
  std::sort(a.begin(), a.end());
  double wins = 0.0;
  for (double x : genuine) {
    const double gx = std::isfinite(x) ? x : std::numeric_limits<double>::infinity();
    const auto lo = std::lower_bound(a.begin(), a.end(), gx);
    const auto hi = std::upper_bound(lo, a.end(), gx);
    wins += static_cast<double>(a.end() - hi) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(genuine.size()) * static_cast<double>(a.size()));
}

double tpr_at_fpr(const RocCurve& roc, double fpr_limit) {
  double best = 0.0;
  for (const RocPoint& p : roc.points) {
    if (p.fpr <= fpr_limit) best = std::max(best, p.tpr);
  }
  return best;
}

double calibrate_delta(std::span<const double> attacker, double target_fpr) {
  const std::vector<double> a = finite_sorted(attacker);
  if (a.empty()) throw std::invalid_argument("calibration needs attacker distances");
  const auto allowed = static_cast<std::size_t>(
      std::floor(std::max(0.0, target_fpr) * static_cast<double>(attacker.size()) + 1e-9));
  if (allowed >= a.size()) return a.back();
  // delta must stay below the (allowed+1)-th smallest attacker distance.
  return below(a[allowed]);
}

double delta_for_full_tpr(std::span<const double> genuine) {
  const std::vector<double> g = finite_sorted(genuine);
  if (g.empty()) throw std::invalid_argument("no finite genuine distances");
  return g.back();
}

double acceptance_rate(std::span<const double> distances, double delta) {
  if (distances.empty()) return 0.0;
  std::size_t n = 0;
  for (double d : distances) n += d <= delta;
  return static_cast<double>(n) / static_cast<double>(distances.size());
}

BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double auc_standard_error(double a, std::size_t n_genuine, std::size_t n_attacker) {
  const double q1 = a / (2 - a);
  const double q2 = 2 * a * a / (1 + a);
  const double ng = static_cast<double>(n_genuine);
  const double na = static_cast<double>(n_attacker);
  const double var = (a * (1 - a) + (ng - 1) * (q1 - a * a) + (na - 1) * (q2 - a * a)) / (ng * na);
  return std::sqrt(std::max(0.0, var));
}

void ConfusionMatrix::add(std::size_t truth, std::size_t identified) {
  if (truth >= k || identified >= k) throw std::out_of_range("device index outside the matrix");
  ++counts[truth * k + identified];
}

std::size_t ConfusionMatrix::row_total(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t c = 0; c < k; ++c) s += at(truth, c);
  return s;
}

double ConfusionMatrix::accuracy(std::size_t truth) const {
  const std::size_t t = row_total(truth);
  return t == 0 ? 0.0 : static_cast<double>(at(truth, truth)) / static_cast<double>(t);
}

double ConfusionMatrix::trace_fraction() const {
  std::size_t diag = 0;
  std::size_t all = 0;
  for (std::size_t r = 0; r < k; ++r) {
    diag += at(r, r);
    all += row_total(r);
  }
  return all == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(all);
}

}  // namespace bdauth::metrics
