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

#include "bdauth/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "bdauth/errors.hpp"

namespace bdauth::harness {

namespace {

constexpr double kNoThreshold = std::numeric_limits<double>::max();
const std::vector<double> kFprLimits = {0.0, 0.01, 0.02, 0.05};

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": '" + v + "' is not a number");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": '" + v + "' is not a nonnegative integer");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": '" + v + "' is not an integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename E>
E from_table(const std::string& key, const std::string& v,
             std::initializer_list<std::pair<E, std::string_view>> table) {
  for (const auto& [e, name] : table) {
    if (name == v) return e;
  }
  std::string options;
  for (const auto& [e, name] : table) options += (options.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(key + ": '" + v + "' is not one of " + options);
}

template <typename E>
std::string_view to_table(E e, std::initializer_list<std::pair<E, std::string_view>> table) {
  for (const auto& [x, name] : table) {
    if (x == e) return name;
  }
  return "?";
}

const std::initializer_list<std::pair<Experiment, std::string_view>> kExperiments = {
    {Experiment::authentication, "authentication"},
    {Experiment::identification, "identification"},
    {Experiment::leakage, "leakage"},
    {Experiment::cost, "cost"}};
const std::initializer_list<std::pair<SweepAxis, std::string_view>> kAxes = {
    {SweepAxis::none, "none"},       {SweepAxis::key_length, "key_length"},
    {SweepAxis::snr, "snr"},         {SweepAxis::distance, "distance"},
    {SweepAxis::speed, "speed"},     {SweepAxis::profile, "profile"},
    {SweepAxis::attack, "attack"}};
const std::initializer_list<std::pair<AuthMode, std::string_view>> kModes = {
    {AuthMode::one_way, "one_way"}, {AuthMode::mutual, "mutual"}};
const std::initializer_list<std::pair<phy::AmbientModel, std::string_view>> kAmbient = {
    {phy::AmbientModel::stationary, "stationary"}, {phy::AmbientModel::iid_symbols, "iid"}};
const std::initializer_list<std::pair<Node, std::string_view>> kVictims = {{Node::bd_i, "bd_i"},
                                                                          {Node::bd_j, "bd_j"}};

struct Field {
  std::string_view key;
  /// Excluded from the config hash: does not change any result.
  bool presentation_only;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define BD_DOUBLE(NAME, MEMBER)                                                             \
  Field {                                                                                   \
    NAME, false, [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_double(NAME, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.MEMBER); }                             \
  }
#define BD_BOOL(NAME, MEMBER)                                                               \
  Field {                                                                                   \
    NAME, false, [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_bool(NAME, v); }, \
        [](const ExperimentConfig& c) { return std::string(c.MEMBER ? "1" : "0"); }         \
  }
#define BD_SIZE(NAME, MEMBER)                                                               \
  Field {                                                                                   \
    NAME, false,                                                                            \
        [](ExperimentConfig& c, const std::string& v) {                                     \
          c.MEMBER = static_cast<decltype(c.MEMBER)>(to_uint(NAME, v));                     \
        },                                                                                  \
        [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }                  \
  }
#define BD_INT(NAME, MEMBER)                                                                \
  Field {                                                                                   \
    NAME, false, [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_int(NAME, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }                  \
  }
#define BD_ENUM(NAME, MEMBER, TABLE)                                                        \
  Field {                                                                                   \
    NAME, false,                                                                            \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = from_table(NAME, v, TABLE); }, \
        [](const ExperimentConfig& c) { return std::string(to_table(c.MEMBER, TABLE)); }    \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      BD_ENUM("experiment", experiment, kExperiments),
      BD_ENUM("mode", mode, kModes),
      BD_DOUBLE("fc_hz", geometry.carrier_hz),
      BD_DOUBLE("d_i_m", geometry.d_i_m),
      BD_DOUBLE("d_j_m", geometry.d_j_m),
      BD_DOUBLE("d_ij_m", geometry.d_ij_m),
      BD_DOUBLE("v_ij_mps", geometry.v_ij_mps),
      BD_DOUBLE("path_loss_exponent", geometry.path_loss_exponent),
      Field{"profile", false,
            [](ExperimentConfig& c, const std::string& v) {
              (void)channel::MultipathProfile::by_name(v);
              c.geometry.profile = v;
            },
            [](const ExperimentConfig& c) { return c.geometry.profile; }},
      BD_INT("n_subcarriers", phy.ofdm.n_subcarriers),
      BD_INT("cp_len", phy.ofdm.cp_len),
      BD_DOUBLE("sample_rate_hz", phy.ofdm.sample_rate_hz),
      BD_DOUBLE("tx_power_dbm", phy.power.tx_power_dbm),
      BD_BOOL("pilot_present", phy.ofdm.pilot_present),
      BD_ENUM("ambient", phy.ambient, kAmbient),
      BD_INT("span", phy.span_ofdm_symbols),
      BD_INT("timing_offset", phy.timing_offset),
      BD_DOUBLE("response_delay_s", phy.response_delay_s),
      BD_DOUBLE("noise_dbm", phy.receiver.noise.noise_power_dbm),
      BD_DOUBLE("eta", phy.receiver.efficiency),
      BD_INT("guard", phy.receiver.guard),
      BD_BOOL("noise_compensation", phy.receiver.noise_compensation),
      Field{"power_mode", false,
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "target_snr") {
                c.phy.power.mode = PowerControl::Mode::target_snr;
                c.fixed_power_from_reference = false;
              } else if (v == "fixed") {
                c.phy.power.mode = PowerControl::Mode::fixed_tx_power;
                c.fixed_power_from_reference = false;
              } else if (v == "fixed_ref") {
                c.phy.power.mode = PowerControl::Mode::fixed_tx_power;
                c.fixed_power_from_reference = true;
              } else {
                throw ConfigError("power_mode: '" + v + "' is not one of target_snr, fixed, fixed_ref");
              }
            },
            [](const ExperimentConfig& c) {
              if (c.phy.power.mode == PowerControl::Mode::target_snr) return std::string("target_snr");
              return std::string(c.fixed_power_from_reference ? "fixed_ref" : "fixed");
            }},
      BD_DOUBLE("snr_db", phy.power.snr_db),
      Field{"snr_reference", false,
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "receiver") {
                c.phy.power.snr_reference.reset();
              } else if (v == "attacker") {
                c.phy.power.snr_reference = Node::attacker;
              } else {
                throw ConfigError("snr_reference: '" + v + "' is not one of receiver, attacker");
              }
            },
            [](const ExperimentConfig& c) {
              return std::string(c.phy.power.snr_reference ? "attacker" : "receiver");
            }},
      BD_DOUBLE("ref_snr_db", ref_snr_db),
      BD_DOUBLE("ref_distance_m", ref_distance_m),
      BD_SIZE("keylength", key_length),
      BD_SIZE("n_auth", n_auth),
      BD_SIZE("n_attack", n_attack),
      BD_SIZE("n_devices", n_devices),
      Field{"attack", false,
            [](ExperimentConfig& c, const std::string& v) { c.attacker.kind = adv::attack_from_name(v); },
            [](const ExperimentConfig& c) { return std::string(adv::attack_name(c.attacker.kind)); }},
      BD_DOUBLE("d_attacker_m", attacker.distance_to_victim_m),
      BD_ENUM("attack_victim", attacker_victim, kVictims),
      BD_BOOL("key_update", key_update),
      BD_ENUM("sweep", sweep, kAxes),
      Field{"sweep_values", false,
            [](ExperimentConfig& c, const std::string& v) { c.sweep_values = split_list(v); },
            [](const ExperimentConfig& c) {
              std::string s;
              for (const auto& x : c.sweep_values) s += (s.empty() ? "" : ",") + x;
              return s;
            }},
      BD_SIZE("seed", master_seed),
      BD_DOUBLE("target_fpr", target_fpr),
      BD_DOUBLE("delta", delta),
      BD_INT("li_bins", li_bins),
      BD_DOUBLE("t_tx", costs.t_tx),
      BD_DOUBLE("t_rand", costs.t_rand),
      BD_DOUBLE("t_verify", costs.t_verify),
      BD_DOUBLE("t_xor", costs.t_xor),
      BD_DOUBLE("t_decoding", costs.t_decoding),
      BD_DOUBLE("t_hash", costs.t_hash),
      BD_DOUBLE("t_gen", costs.t_gen),
      BD_DOUBLE("p_decoding_mw", costs.p_decoding_mw),
      BD_DOUBLE("p_xor_mw", costs.p_xor_mw),
      BD_DOUBLE("p_hash_mw", costs.p_hash_mw),
      BD_DOUBLE("snr_target_db", costs.snr_target_db),
      Field{"out", true, [](ExperimentConfig& c, const std::string& v) { c.out = v; },
            [](const ExperimentConfig& c) { return c.out; }},
      Field{"threads", true,
            [](ExperimentConfig& c, const std::string& v) {
              c.threads = static_cast<unsigned>(to_uint("threads", v));
            },
            [](const ExperimentConfig& c) { return std::to_string(c.threads); }},
  };
  return table;
}

#undef BD_DOUBLE
#undef BD_BOOL
#undef BD_SIZE
#undef BD_INT
#undef BD_ENUM

std::string_view sweep_key(SweepAxis a) {
  switch (a) {
    case SweepAxis::none: return "";
    case SweepAxis::key_length: return "keylength";
    case SweepAxis::snr: return "snr_db";
    case SweepAxis::distance: return "d_ij_m";
    case SweepAxis::speed: return "v_ij_mps";
    case SweepAxis::profile: return "profile";
    case SweepAxis::attack: return "attack";
  }
  return "";
}

}  // namespace

std::string_view experiment_name(Experiment e) { return to_table(e, kExperiments); }
std::string_view sweep_name(SweepAxis a) { return to_table(a, kAxes); }

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig cfg) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> problems;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(lineno) + ": expected key=value");
      continue;
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      problems.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  need(n_auth >= 1, "n_auth must be at least 1");
  need(key_length >= auth::kMinKeyLength && key_length <= auth::kMaxKeyLength,
       "keylength must lie in [5, 30]");
  need(geometry.d_i_m > 0.0, "d_i_m must be positive");
  need(geometry.d_j_m > 0.0, "d_j_m must be positive");
  need(geometry.d_ij_m >= 1.0 && geometry.d_ij_m <= 10.0, "d_ij_m must lie in [1, 10]");
  need(geometry.v_ij_mps >= 0.0 && geometry.v_ij_mps <= 30.0, "v_ij_mps must lie in [0, 30]");
  need(geometry.carrier_hz > 0.0, "fc_hz must be positive");
  need(attacker.distance_to_victim_m >= 0.1 && attacker.distance_to_victim_m <= 2.0,
       "d_attacker_m must lie in [0.1, 2]");
  need(phy.ofdm.cp_len > 0 && phy.ofdm.cp_len < phy.ofdm.n_subcarriers, "cp_len must lie in (0, n_subcarriers)");
  need(phy.ofdm.sample_rate_hz > 0.0, "sample_rate_hz must be positive");
  need(phy.span_ofdm_symbols >= 1, "span must be at least 1");
  need(std::abs(phy.timing_offset) < phy.ofdm.cp_len, "timing_offset must satisfy |offset| < cp_len");
  need(phy.receiver.efficiency > 0.0 && phy.receiver.efficiency <= 1.0, "eta must lie in (0, 1]");
  need(target_fpr >= 0.0 && target_fpr <= 1.0, "target_fpr must lie in [0, 1]");
  need(delta >= 0.0, "delta must be nonnegative");
  need(li_bins >= 2, "li_bins must be at least 2");
  need(experiment != Experiment::identification || n_devices >= 2, "n_devices must be at least 2");
  need(ref_distance_m > 0.0, "ref_distance_m must be positive");
  try {
    channel::MultipathProfile::by_name(geometry.profile);
    if (channel::MultipathProfile::by_name(geometry.profile).max_delay() >= phy.ofdm.cp_len) {
      bad.push_back("profile delay spread must fit inside cp_len");
    }
  } catch (const ConfigError& e) {
    bad.push_back(e.what());
  }
  try {
    costs.validate();
  } catch (const ConfigError& e) {
    bad.push_back(e.what());
  }
  if (experiment == Experiment::leakage) {
    const bool smart = attacker.kind == adv::AttackKind::eavesdrop_smart;
    const bool naive = attacker.kind == adv::AttackKind::eavesdrop_naive;
    need(smart || naive, "leakage experiments need attack=eavesdrop_naive or eavesdrop_smart");
    if (smart || naive) {
      try {
        attacker.validate(geometry.carrier_hz);
      } catch (const ConfigError& e) {
        bad.push_back(e.what());
      }
    }
  }
  // Every sweep value must itself give a valid config.
  if (sweep != SweepAxis::none) {
    for (const auto& v : sweep_values) {
      try {
        ExperimentConfig point = *this;
        set_config_value(point, std::string(sweep_key(sweep)), v);
        point.sweep = SweepAxis::none;
        point.validate();
      } catch (const ConfigError& e) {
        bad.push_back("sweep value '" + v + "': " + e.what());
      }
    }
  }
  if (!bad.empty()) {
    std::string msg = "invalid config:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ConfigError(msg);
  }
}

std::string ExperimentConfig::to_text() const {
  std::string s;
  for (const Field& f : fields()) s += std::string(f.key) + "=" + f.get(*this) + "\n";
  return s;
}

std::uint64_t ExperimentConfig::hash() const {
  std::string s;
  for (const Field& f : fields()) {
    if (!f.presentation_only) s += std::string(f.key) + "=" + f.get(*this) + "\n";
  }
  return fnv1a(s);
}

ExperimentConfig at_sweep_point(const ExperimentConfig& cfg, const std::string& value) {
  ExperimentConfig point = cfg;
  if (cfg.sweep != SweepAxis::none) set_config_value(point, std::string(sweep_key(cfg.sweep)), value);
  return point;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, const std::string& point, std::string_view population,
                         std::uint64_t trial) {
  return derive_seed(cfg.master_seed,
                     {fnv1a(sweep_name(cfg.sweep)), fnv1a(point), fnv1a(population), trial});
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& job) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

/// Everything one simulated session needs, seeded from a single trial seed.
struct Trial {
  Trial(const ExperimentConfig& cfg, std::uint64_t seed)
      : rng(derive_seed(seed, "session")),
        scenario(cfg.geometry, derive_seed(seed, "channels"),
                 AttackerPlacement{cfg.attacker_victim, cfg.attacker.distance_to_victim_m}),
        phy(cfg.phy),
        source(cfg.phy.ofdm, cfg.phy.ambient, rng) {
    if (cfg.fixed_power_from_reference) {
      const double g_src =
          channel::link_amplitude({cfg.geometry.d_i_m, cfg.geometry.path_loss_exponent, 0.0, cfg.geometry.carrier_hz});
      const double g_bd = channel::link_amplitude(
          {cfg.ref_distance_m, cfg.geometry.path_loss_exponent, 0.0, cfg.geometry.carrier_hz});
      const double watts = std::pow(10.0, cfg.ref_snr_db / 10.0) * phy.receiver.noise.variance_w() /
                           (g_src * g_src * g_bd * g_bd);
      phy.power.tx_power_dbm = channel::watts_to_dbm(watts);
    }
  }

  auth::Medium medium() { return {scenario, phy, source, rng}; }

  Rng rng;
  Scenario scenario;
  PhyContext phy;
  phy::AmbientSource source;
};

Node other_bd(Node n) { return n == Node::bd_i ? Node::bd_j : Node::bd_i; }

double genuine_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  Trial t(cfg, seed);
  auto net = auth::make_network(2, cfg.key_length, t.rng);
  auto m = t.medium();
  const auth::AuthThreshold open(kNoThreshold);
  if (cfg.mode == AuthMode::mutual) {
    const auth::MutualResult r = auth::mutual_authenticate(net[0], net[1], open, m);
    return std::max(r.first.l1_distance, r.second.l1_distance);
  }
  return auth::one_way_authenticate(net[0], net[1].own_id(), Node::bd_i,
                                    auth::honest_responder(net[1], Node::bd_j), open, m)
      .l1_distance;
}

double attacker_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  Trial t(cfg, seed);
  auto net = auth::make_network(2, cfg.key_length, t.rng);
  auto m = t.medium();
  const auth::AuthThreshold open(kNoThreshold);
  const bool mutual = cfg.mode == AuthMode::mutual;
  switch (cfg.attacker.kind) {
    case adv::AttackKind::replay: {
      adv::ReplayOptions o;
      o.key_update = cfg.key_update;
      o.mutual = mutual;
      const adv::ReplayOutcome r = adv::replay_attack(net, open, m, o);
      return std::max(r.first.l1_distance, r.second ? r.second->l1_distance : 0.0);
    }
    case adv::AttackKind::counterfeit: {
      const adv::CounterfeitOutcome r = adv::counterfeit_attack(net[0], net[1], open, m, mutual);
      return std::max(r.first.l1_distance, r.second ? r.second->l1_distance : 0.0);
    }
    default: {
      double d = adv::impersonation_attempt(net[0], net[1].own_id(), Node::bd_i, open, m).l1_distance;
      if (mutual) {
        d = std::max(d, adv::impersonation_attempt(net[1], net[0].own_id(), Node::bd_j, open, m).l1_distance);
      }
      return d;
    }
  }
}

std::string point_name(const ExperimentConfig& cfg, const std::string& value) {
  return cfg.sweep == SweepAxis::none ? std::string("base") : value;
}

void fill_authentication(const ExperimentConfig& cfg, const std::string& point, MetricsReport& r) {
  r.genuine = genuine_population(cfg, point);
  r.attacker = attacker_population(cfg, point);
  r.roc = metrics::compute_roc(r.genuine, r.attacker);
  r.auc = metrics::auc(r.genuine, r.attacker);
  for (double f : kFprLimits) r.tpr_at_fpr[f] = metrics::tpr_at_fpr(r.roc, f);
  r.delta = cfg.delta > 0.0 ? cfg.delta : metrics::calibrate_delta(r.attacker, cfg.target_fpr);
  r.tpr_at_delta = metrics::acceptance_rate(r.genuine, r.delta);
  r.fpr_at_delta = metrics::acceptance_rate(r.attacker, r.delta);
}

void fill_identification(const ExperimentConfig& cfg, const std::string& point, MetricsReport& r) {
  const std::size_t n = cfg.n_devices;
  Rng key_rng(trial_seed(cfg, point, "network", 0));
  const auto net = auth::make_network(n, cfg.key_length, key_rng);
  std::vector<std::size_t> identified(n * cfg.n_auth);
  parallel_for(identified.size(), cfg.threads, [&](std::size_t idx) {
    const std::size_t device = idx / cfg.n_auth;
    const std::size_t verifier = (device + 1) % n;
    Trial t(cfg, trial_seed(cfg, point, "identification", idx));
    auto m = t.medium();
    auth::AuthSession rec(net[verifier].own_id(), net[device].own_id(), Node::bd_i, {});
    auth::OneWayOptions o;
    o.record = &rec;
    auth::one_way_authenticate(net[verifier], net[device].own_id(), Node::bd_i,
                               auth::honest_responder(net[device], Node::bd_j),
                               auth::AuthThreshold(kNoThreshold), m, o);
    identified[idx] = rec.stage() == auth::Stage::decided
                          ? auth::identify_device(rec.k_estimated, net[verifier]).value
                          : verifier;
  });
  r.confusion = metrics::ConfusionMatrix(n);
  for (std::size_t idx = 0; idx < identified.size(); ++idx) r.confusion.add(idx / cfg.n_auth, identified[idx]);
}

void fill_leakage(const ExperimentConfig& cfg, const std::string& point, MetricsReport& r) {
  const std::size_t L = cfg.key_length;
  const bool smart = cfg.attacker.kind == adv::AttackKind::eavesdrop_smart;
  const double los_gain = std::pow(
      channel::link_amplitude({cfg.attacker.distance_to_victim_m, cfg.geometry.path_loss_exponent, 0.0,
                               cfg.geometry.carrier_hz}),
      2.0);
  std::vector<double> truth(cfg.n_auth * L), ours(cfg.n_auth * L), b1(cfg.n_auth * L), b2(cfg.n_auth * L);
  parallel_for(cfg.n_auth, cfg.threads, [&](std::size_t k) {
    Trial t(cfg, trial_seed(cfg, point, "leakage", k));
    auto net = auth::make_network(2, L, t.rng);
    auto m = t.medium();
    const Node victim = cfg.attacker_victim;
    const auth::DeviceRegistry& reg = victim == Node::bd_i ? net[0] : net[1];
    const auth::DeviceRegistry& peer = victim == Node::bd_i ? net[1] : net[0];
    const Node listeners[] = {Node::attacker};
    auto [session, heard] = auth::challenge(reg, peer.own_id(), victim, other_bd(victim), m, listeners);
    const StageCapture& cap = heard.captures.front();
    std::vector<double> inferred = smart ? *adv::smart_eavesdrop(cap, los_gain).inferred_key
                                         : adv::naive_key_guess(L, t.rng);
    const auto key = reg.own_key().coeffs();
    const base::Bytes kb = base::key_bytes(key);
    const auto x1 = base::bytes_to_unit(base::xor_eavesdrop(base::baseline1_xor_auth(kb, kb, t.rng).transcript));
    const auto x2 = base::bytes_to_unit(base::baseline2_hash_auth(kb, kb, t.rng).transcript.response);
    for (std::size_t l = 0; l < L; ++l) {
      truth[k * L + l] = key[l];
      ours[k * L + l] = inferred[l];
      b1[k * L + l] = x1[l];
      b2[k * L + l] = x2[l];
    }
  });
  r.li = adv::leaked_information(truth, ours, cfg.li_bins);
  r.li_baseline1 = adv::leaked_information(truth, b1, cfg.li_bins);
  r.li_baseline2 = adv::leaked_information(truth, b2, cfg.li_bins);
}

void fill_cost(const ExperimentConfig& cfg, MetricsReport& r) {
  base::BaselineCostModel m = cfg.costs;
  if (m.t_tx == 0.0) m.t_tx = base::field_time_s(cfg.key_length, cfg.phy);
  for (base::Scheme s : {base::Scheme::ours, base::Scheme::baseline1, base::Scheme::baseline2}) {
    r.costs[std::string(base::scheme_name(s))] = {
        base::latency_s(s, m, cfg.n_auth),
        base::power_mw(s, m, cfg.geometry.d_ij_m, cfg.phy.receiver.noise)};
  }
}

}  // namespace

std::vector<double> genuine_population(const ExperimentConfig& cfg, const std::string& point,
                                       std::string_view population) {
  std::vector<double> out(cfg.n_auth);
  parallel_for(out.size(), cfg.threads,
               [&](std::size_t k) { out[k] = genuine_trial(cfg, trial_seed(cfg, point, population, k)); });
  return out;
}

std::vector<double> attacker_population(const ExperimentConfig& cfg, const std::string& point,
                                        std::string_view population) {
  std::vector<double> out(cfg.n_attack != 0 ? cfg.n_attack : cfg.n_auth);
  parallel_for(out.size(), cfg.threads,
               [&](std::size_t k) { out[k] = attacker_trial(cfg, trial_seed(cfg, point, population, k)); });
  return out;
}

MetricsReport run_point(const ExperimentConfig& cfg, const std::string& value) {
  const ExperimentConfig point = at_sweep_point(cfg, value);
  point.validate();
  MetricsReport r;
  r.sweep_axis = std::string(sweep_name(cfg.sweep));
  r.sweep_value = cfg.sweep == SweepAxis::none ? std::string() : value;
  r.seed = cfg.master_seed;
  r.config_hash = cfg.hash();
  const std::string name = point_name(cfg, value);
  switch (point.experiment) {
    case Experiment::authentication: fill_authentication(point, name, r); break;
    case Experiment::identification: fill_identification(point, name, r); break;
    case Experiment::leakage: fill_leakage(point, name, r); break;
    case Experiment::cost: break;
  }
  fill_cost(point, r);
  return r;
}

std::vector<MetricsReport> run_monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<MetricsReport> out;
  if (cfg.sweep == SweepAxis::none) {
    out.push_back(run_point(cfg, ""));
    return out;
  }
  for (const auto& v : cfg.sweep_values) out.push_back(run_point(cfg, v));
  return out;
}

double calibrate_delta(const ExperimentConfig& cfg, double target_fpr) {
  cfg.validate();
  const std::vector<double> a = attacker_population(cfg, "calibration", "calibration_attacker");
  return metrics::calibrate_delta(a, target_fpr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "sweep_axis,sweep_value,n_genuine,n_attacker,auc,tpr_fpr_0,tpr_fpr_0.01,tpr_fpr_0.02,"
         "tpr_fpr_0.05,delta,tpr_at_delta,fpr_at_delta,id_accuracy_min,id_trace_fraction,li,"
         "li_baseline1,li_baseline2,latency_ours_s,latency_baseline1_s,latency_baseline2_s,"
         "power_ours_mw,power_baseline1_mw,power_baseline2_mw,seed,config_hash";
}

void export_metrics_csv(const std::vector<MetricsReport>& reports, const std::string& path) {
  std::ofstream out = open_out(path);
  out << metrics_csv_header() << "\n";
  for (const MetricsReport& r : reports) {
    const bool roc = !r.genuine.empty();
    const bool ident = r.confusion.k > 0;
    std::string id_min;
    if (ident) {
      double m = 1.0;
      for (std::size_t d = 0; d < r.confusion.k; ++d) m = std::min(m, r.confusion.accuracy(d));
      id_min = fmt(m);
    }
    out << r.sweep_axis << "," << r.sweep_value << "," << r.genuine.size() << "," << r.attacker.size() << ","
        << (roc ? fmt(r.auc) : "");
    for (double f : kFprLimits) {
      const auto it = r.tpr_at_fpr.find(f);
      out << "," << (it != r.tpr_at_fpr.end() ? fmt(it->second) : "");
    }
    out << "," << (roc ? fmt(r.delta) : "") << "," << (roc ? fmt(r.tpr_at_delta) : "") << ","
        << (roc ? fmt(r.fpr_at_delta) : "") << "," << id_min << ","
        << (ident ? fmt(r.confusion.trace_fraction()) : "") << "," << opt(r.li) << ","
        << opt(r.li_baseline1) << "," << opt(r.li_baseline2);
    for (const char* s : {"ours", "baseline1", "baseline2"}) {
      const auto it = r.costs.find(s);
      out << "," << (it != r.costs.end() ? fmt(it->second.latency_s) : "");
    }
    for (const char* s : {"ours", "baseline1", "baseline2"}) {
      const auto it = r.costs.find(s);
      out << "," << (it != r.costs.end() ? fmt(it->second.power_mw) : "");
    }
    out << "," << r.seed << "," << hex(r.config_hash) << "\n";
  }
  close_out(out, path);
}

void export_roc_csv(const std::vector<MetricsReport>& reports, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "sweep_axis,sweep_value,fpr,tpr,delta,seed,config_hash\n";
  for (const MetricsReport& r : reports) {
    for (const metrics::RocPoint& p : r.roc.points) {
      out << r.sweep_axis << "," << r.sweep_value << "," << fmt(p.fpr) << "," << fmt(p.tpr) << ","
          << fmt(p.delta) << "," << r.seed << "," << hex(r.config_hash) << "\n";
    }
  }
  close_out(out, path);
}

void export_confusion_csv(const std::vector<MetricsReport>& reports, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "sweep_axis,sweep_value,true_device,identified_device,count,seed,config_hash\n";
  for (const MetricsReport& r : reports) {
    for (std::size_t a = 0; a < r.confusion.k; ++a) {
      for (std::size_t b = 0; b < r.confusion.k; ++b) {
        out << r.sweep_axis << "," << r.sweep_value << "," << a << "," << b << "," << r.confusion.at(a, b)
            << "," << r.seed << "," << hex(r.config_hash) << "\n";
      }
    }
  }
  close_out(out, path);
}

void export_plot_recipes(const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# figure\tfile\tx\ty\tgroup\n"
         "confusion_matrix\tconfusion.csv\tidentified_device\ttrue_device\tcount\n"
         "roc_vs_key_length\troc.csv\tfpr\ttpr\tsweep_value\n"
         "roc_vs_snr\troc.csv\tfpr\ttpr\tsweep_value\n"
         "tpr_vs_snr\tmetrics.csv\tsweep_value\ttpr_at_delta\t-\n"
         "tpr_vs_distance\tmetrics.csv\tsweep_value\ttpr_fpr_0\t-\n"
         "tpr_vs_speed\tmetrics.csv\tsweep_value\ttpr_fpr_0\t-\n"
         "tpr_vs_profile\tmetrics.csv\tsweep_value\ttpr_fpr_0\t-\n"
         "leaked_information_vs_snr\tmetrics.csv\tsweep_value\tli,li_baseline1,li_baseline2\t-\n"
         "replay_roc\troc.csv\tfpr\ttpr\tsweep_value\n"
         "counterfeit_roc\troc.csv\tfpr\ttpr\tsweep_value\n"
         "latency_vs_n_auth\tmetrics.csv\tsweep_value\tlatency_ours_s,latency_baseline1_s,latency_baseline2_s\t-\n"
         "power_vs_distance\tmetrics.csv\tsweep_value\tpower_ours_mw,power_baseline1_mw,power_baseline2_mw\t-\n";
  close_out(out, path);
}

std::size_t dump_iq(const ExperimentConfig& cfg, const std::string& path) {
  cfg.validate();
  Trial t(cfg, trial_seed(cfg, "base", "genuine", 0));
  const auto net = auth::make_network(2, cfg.key_length, t.rng);
  const auto d = auth::generate_random_number(cfg.key_length, t.rng);
  if (t.phy.power.mode == PowerControl::Mode::target_snr) {
    const double per_watt = unit_reflection_power(t.scenario, Node::bd_i, Node::bd_j, t.phy, t.source, t.rng);
    const double noise_w = t.phy.receiver.noise.variance_w();
    t.source.set_tx_power_w(std::pow(10.0, t.phy.power.snr_db / 10.0) * (noise_w > 0.0 ? noise_w : 1e-9) /
                            per_watt);
  } else {
    t.source.set_tx_power_w(channel::dbm_to_watts(t.phy.power.tx_power_dbm));
  }
  const phy::LinkSnapshot links = t.scenario.snapshot(Node::bd_i, Node::bd_j);
  const phy::Emission e =
      phy::emit_backscatter(d, links.incident, t.source, t.rng, t.phy.span_ofdm_symbols, t.phy.timing_offset);
  std::vector<std::complex<double>> raw;
  phy::receive_backscatter(e, links.inward, links.downlink, t.phy.receiver, t.rng, nullptr, &raw);
  phy::write_iq_f32(path, raw);
  return raw.size();
}

std::vector<std::string> sample_transcripts(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::string> lines;
  const auth::AuthThreshold threshold(cfg.delta > 0.0 ? cfg.delta : kNoThreshold);
  {
    Trial t(cfg, trial_seed(cfg, "base", "genuine", 0));
    auto net = auth::make_network(2, cfg.key_length, t.rng);
    auto m = t.medium();
    auth::AuthSession rec(net[0].own_id(), net[1].own_id(), Node::bd_i, {});
    auth::OneWayOptions o;
    o.record = &rec;
    auth::one_way_authenticate(net[0], net[1].own_id(), Node::bd_i, auth::honest_responder(net[1], Node::bd_j),
                               threshold, m, o);
    for (auto& l : auth::transcript_lines(rec)) lines.push_back(std::move(l));
  }
  {
    Trial t(cfg, trial_seed(cfg, "base", "attacker", 0));
    auto net = auth::make_network(2, cfg.key_length, t.rng);
    auto m = t.medium();
    auth::AuthSession rec(net[0].own_id(), net[1].own_id(), Node::bd_i, {});
    auth::OneWayOptions o;
    o.record = &rec;
    auth::one_way_authenticate(net[0], net[1].own_id(), Node::bd_i, adv::impersonation_responder(t.rng),
                               threshold, m, o);
    for (auto& l : auth::transcript_lines(rec, adv::attack_name(adv::AttackKind::impersonation))) {
      lines.push_back(std::move(l));
    }
  }
  return lines;
}

}  // namespace bdauth::harness
