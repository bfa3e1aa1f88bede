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

// Threshold-test statistics over L1 distance populations. A session is
// accepted when its distance is at most delta, so genuine sessions should
// score low and attacker sessions high.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bdauth::metrics {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double delta = 0.0;
};

/// Upper-left envelope: one point per achievable FPR level with the largest
/// TPR and delta at that level. FPR strictly increases, TPR never decreases.
struct RocCurve {
  std::vector<RocPoint> points;
};

/// Non-finite distances (aborted sessions) are never accepted.
RocCurve compute_roc(std::span<const double> genuine, std::span<const double> attacker);

/// P(genuine < attacker) + P(tie) / 2, the area under the full ROC.
double auc(std::span<const double> genuine, std::span<const double> attacker);

/// Largest TPR among points with FPR <= limit; 0 when none.
double tpr_at_fpr(const RocCurve& roc, double fpr_limit);

/// Largest delta whose empirical FPR is <= target. With target >= 1 this is
/// the largest finite attacker distance; it is negative when a zero attacker
/// distance must be excluded.
double calibrate_delta(std::span<const double> attacker, double target_fpr);

/// Smallest delta accepting every finite genuine distance.
double delta_for_full_tpr(std::span<const double> genuine);

/// Fraction of distances <= delta.
double acceptance_rate(std::span<const double> distances, double delta);

struct BinomialInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval at the given z.
BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959964);

/// Standard error of an AUC estimate (Hanley and McNeil).
double auc_standard_error(double auc, std::size_t n_genuine, std::size_t n_attacker);

struct ConfusionMatrix {
  explicit ConfusionMatrix(std::size_t k = 0) : k(k), counts(k * k, 0) {}
  std::size_t k;
  std::vector<std::size_t> counts;  // row = true device, column = identified

  void add(std::size_t truth, std::size_t identified);
  std::size_t at(std::size_t truth, std::size_t identified) const { return counts[truth * k + identified]; }
  std::size_t row_total(std::size_t truth) const;
  double accuracy(std::size_t truth) const;
  double trace_fraction() const;
};

}  // namespace bdauth::metrics
