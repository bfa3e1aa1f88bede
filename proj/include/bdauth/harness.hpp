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

// Config-driven Monte Carlo experiments and their CSV output.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bdauth/adversaries.hpp"
#include "bdauth/baselines.hpp"
#include "bdauth/metrics.hpp"
#include "bdauth/scenario.hpp"

namespace bdauth::harness {

enum class Experiment { authentication, identification, leakage, cost };
enum class SweepAxis { none, key_length, snr, distance, speed, profile, attack };
enum class AuthMode { one_way, mutual };

std::string_view experiment_name(Experiment e);
std::string_view sweep_name(SweepAxis a);

struct ExperimentConfig {
  Experiment experiment = Experiment::authentication;
  AuthMode mode = AuthMode::one_way;

  ScenarioGeometry geometry;
  PhyContext phy;
  /// Source power for power_mode=fixed_ref: the level giving ref_snr_db at
  /// the stage receiver, on mean channel gains, with the BD pair
  /// ref_distance_m apart.
  bool fixed_power_from_reference = false;
  double ref_snr_db = 40.0;
  double ref_distance_m = 1.0;

  std::size_t key_length = 10;
  std::size_t n_auth = 1000;
  /// Attacker sessions per point; zero means n_auth.
  std::size_t n_attack = 0;
  std::size_t n_devices = 10;

  adv::AttackerConfig attacker{adv::AttackKind::impersonation, 0.5, true};
  /// Which BD the attacker shadows; "bd_i" or "bd_j".
  Node attacker_victim = Node::bd_j;

  SweepAxis sweep = SweepAxis::none;
  std::vector<std::string> sweep_values;

  std::uint64_t master_seed = 1;
  std::string out;
  double target_fpr = 0.02;
  /// A positive value evaluates every point at this delta instead of one
  /// calibrated on the same population.
  double delta = 0.0;
  int li_bins = 16;
  /// Replay experiments: apply the key update after the recorded session.
  bool key_update = true;
  unsigned threads = 0;

  base::BaselineCostModel costs;

  /// Throws ConfigError listing every offending field.
  void validate() const;
  /// Canonical key=value text; parse(to_text()) reproduces the config.
  std::string to_text() const;
  std::uint64_t hash() const;
};

/// Parses flat key=value text; '#' starts a comment. Throws ConfigError
/// naming unknown keys and unparsable values.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
/// Applies one key=value assignment.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// The configuration of one sweep point.
ExperimentConfig at_sweep_point(const ExperimentConfig& cfg, const std::string& value);

struct SchemeCosts {
  double latency_s = 0.0;
  double power_mw = 0.0;
};

struct MetricsReport {
  std::string sweep_axis;
  std::string sweep_value;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  std::vector<double> genuine;
  std::vector<double> attacker;
  metrics::RocCurve roc;
  double auc = 0.0;
  std::map<double, double> tpr_at_fpr;
  double delta = 0.0;
  double tpr_at_delta = 0.0;
  double fpr_at_delta = 0.0;

  metrics::ConfusionMatrix confusion;
  std::optional<double> li;
  std::optional<double> li_baseline1;
  std::optional<double> li_baseline2;

  std::map<std::string, SchemeCosts> costs;
};

/// Seed of one trial; a pure function of the master seed, the sweep point
/// and the trial tag, so points can run in any order.
std::uint64_t trial_seed(const ExperimentConfig& cfg, const std::string& point, std::string_view population,
                         std::uint64_t trial);

/// Runs `n` independent jobs on the worker pool; job(i) must only touch slot i.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& job);

/// Distances of genuine and attacker sessions for one point.
std::vector<double> genuine_population(const ExperimentConfig& cfg, const std::string& point,
                                       std::string_view population = "genuine");
std::vector<double> attacker_population(const ExperimentConfig& cfg, const std::string& point,
                                        std::string_view population = "attacker");

MetricsReport run_point(const ExperimentConfig& cfg, const std::string& point);

/// One report per sweep value (a single report without a sweep).
std::vector<MetricsReport> run_monte_carlo(const ExperimentConfig& cfg);

/// Runs a calibration population and returns the largest delta with
/// empirical FPR <= target_fpr. Seeds are disjoint from run_monte_carlo's.
double calibrate_delta(const ExperimentConfig& cfg, double target_fpr);

/// Metrics CSV, one row per report. Throws IoError.
void export_metrics_csv(const std::vector<MetricsReport>& reports, const std::string& path);
/// ROC rows ordered by FPR within each sweep point.
void export_roc_csv(const std::vector<MetricsReport>& reports, const std::string& path);
void export_confusion_csv(const std::vector<MetricsReport>& reports, const std::string& path);
/// Names the x/y columns to plot for each figure-style output.
void export_plot_recipes(const std::string& path);

std::string metrics_csv_header();

/// Writes the raw receiver samples of the first challenge field of genuine
/// trial 0 as little-endian interleaved float32 I/Q. Returns the sample count.
std::size_t dump_iq(const ExperimentConfig& cfg, const std::string& path);

/// Stage transcripts of genuine trial 0 followed by one impersonation attempt.
std::vector<std::string> sample_transcripts(const ExperimentConfig& cfg);

}  // namespace bdauth::harness
