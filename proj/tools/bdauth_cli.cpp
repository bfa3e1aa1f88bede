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

// bdauth: command-line front end for the experiment harness.
//
//   bdauth run CONFIG [--out DIR]          metrics.csv, roc.csv, confusion.csv, plot_recipes.txt
//   bdauth calibrate CONFIG [--target-fpr] prints the calibrated delta
//   bdauth roc CONFIG [--out FILE]         ROC rows only
//   bdauth export CONFIG [--out DIR]       canonical config, plot recipes, sample transcripts

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdauth/errors.hpp"
#include "bdauth/harness.hpp"
#include "bdauth/kernels.hpp"

namespace {

namespace fs = std::filesystem;
using bdauth::harness::ExperimentConfig;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string sweep;
  std::string out;
  std::optional<std::size_t> trials;
  std::string attack;
  std::string dump_iq;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("config", o.config, "Config file (flat key=value)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--sweep", o.sweep, "Sweep as axis=v1,v2,... (axes: key_length snr distance speed profile attack)");
  cmd->add_option("--out", o.out, "Output directory (file for roc)");
  cmd->add_option("--trials", o.trials, "Sessions per population (n_auth)");
  cmd->add_option("--attack", o.attack, "Attack kind");
  cmd->add_option("--dump-iq", o.dump_iq, "Write float32 I/Q of one received field to this path");
  cmd->add_option("--set", o.overrides, "Extra key=value overrides, applied last");
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = bdauth::harness::load_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.trials) cfg.n_auth = *o.trials;
  if (!o.attack.empty()) bdauth::harness::set_config_value(cfg, "attack", o.attack);
  if (!o.sweep.empty()) {
    const auto eq = o.sweep.find('=');
    if (eq == std::string::npos) throw bdauth::ConfigError("--sweep expects axis=v1,v2,...");
    bdauth::harness::set_config_value(cfg, "sweep", o.sweep.substr(0, eq));
    bdauth::harness::set_config_value(cfg, "sweep_values", o.sweep.substr(eq + 1));
  }
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw bdauth::ConfigError("--set expects key=value, got '" + kv + "'");
    bdauth::harness::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.out.empty()) cfg.out = o.out;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const ExperimentConfig& cfg) {
  fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
  fs::create_directories(dir);
  return dir;
}

void maybe_dump(const CommonOptions& o, const ExperimentConfig& cfg) {
  if (o.dump_iq.empty()) return;
  const std::size_t n = bdauth::harness::dump_iq(cfg, o.dump_iq);
  std::cerr << "wrote " << n << " I/Q samples to " << o.dump_iq << "\n";
}

void print_summary(const std::vector<bdauth::harness::MetricsReport>& reports) {
  for (const auto& r : reports) {
    std::printf("%s=%s", r.sweep_axis.c_str(), r.sweep_value.empty() ? "-" : r.sweep_value.c_str());
    if (!r.genuine.empty()) {
      std::printf("  auc=%.4f  delta=%.4f  tpr=%.4f  fpr=%.4f", r.auc, r.delta, r.tpr_at_delta, r.fpr_at_delta);
    }
    if (r.confusion.k > 0) std::printf("  id_trace=%.4f", r.confusion.trace_fraction());
    if (r.li) std::printf("  li=%.4f  li_b1=%.4f  li_b2=%.4f", *r.li, *r.li_baseline1, *r.li_baseline2);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backscatter-device challenge-response authentication simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts, cal_opts, roc_opts, exp_opts;
  double target_fpr = -1.0;
  CLI::App* run = app.add_subcommand("run", "Run a Monte Carlo experiment and write CSV output");
  add_common(run, run_opts);
  CLI::App* cal = app.add_subcommand("calibrate", "Calibrate delta on an attacker population");
  add_common(cal, cal_opts);
  cal->add_option("--target-fpr", target_fpr, "FPR target (default from config)");
  CLI::App* roc = app.add_subcommand("roc", "Write the ROC curve(s) of an experiment");
  add_common(roc, roc_opts);
  CLI::App* exp = app.add_subcommand("export", "Write canonical config, plot recipes and sample transcripts");
  add_common(exp, exp_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentConfig cfg = build_config(run_opts);
      maybe_dump(run_opts, cfg);
      std::cerr << "kernels: " << bdauth::kernels::active_kernels().name << "\n";
      const auto reports = bdauth::harness::run_monte_carlo(cfg);
      const fs::path dir = out_dir(cfg);
      bdauth::harness::export_metrics_csv(reports, (dir / "metrics.csv").string());
      bdauth::harness::export_roc_csv(reports, (dir / "roc.csv").string());
      bdauth::harness::export_confusion_csv(reports, (dir / "confusion.csv").string());
      bdauth::harness::export_plot_recipes((dir / "plot_recipes.txt").string());
      print_summary(reports);
    } else if (*cal) {
      const ExperimentConfig cfg = build_config(cal_opts);
      maybe_dump(cal_opts, cfg);
      const double target = target_fpr >= 0.0 ? target_fpr : cfg.target_fpr;
      std::printf("%.17g\n", bdauth::harness::calibrate_delta(cfg, target));
    } else if (*roc) {
      const ExperimentConfig cfg = build_config(roc_opts);
      maybe_dump(roc_opts, cfg);
      const auto reports = bdauth::harness::run_monte_carlo(cfg);
      const std::string path = cfg.out.empty() ? "roc.csv" : cfg.out;
      if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
      bdauth::harness::export_roc_csv(reports, path);
      print_summary(reports);
    } else if (*exp) {
      const ExperimentConfig cfg = build_config(exp_opts);
      maybe_dump(exp_opts, cfg);
      const fs::path dir = out_dir(cfg);
      std::ofstream((dir / "config.txt").string()) << cfg.to_text();
      bdauth::harness::export_plot_recipes((dir / "plot_recipes.txt").string());
      std::ofstream tr((dir / "transcripts.tsv").string());
      for (const auto& line : bdauth::harness::sample_transcripts(cfg)) tr << line << "\n";
      if (!tr) throw bdauth::IoError("cannot write transcripts to " + dir.string());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
