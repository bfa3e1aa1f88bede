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

#include "bdauth/adversaries.hpp"

#include <algorithm>
#include <cmath>

#include "bdauth/errors.hpp"

namespace bdauth::adv {

using auth::AuthDecision;
using auth::AuthThreshold;
using auth::DeviceRegistry;
using auth::Medium;
using auth::Responder;

namespace {

constexpr std::pair<AttackKind, std::string_view> kNames[] = {
    {AttackKind::none, "none"},
    {AttackKind::impersonation, "impersonation"},
    {AttackKind::eavesdrop_naive, "eavesdrop_naive"},
    {AttackKind::eavesdrop_smart, "eavesdrop_smart"},
    {AttackKind::replay, "replay"},
    {AttackKind::counterfeit, "counterfeit"},
};

using Fields = std::pair<std::vector<double>, std::vector<double>>;

}  // namespace

std::string_view attack_name(AttackKind k) {
  for (const auto& [kind, name] : kNames) {
    if (kind == k) return name;
  }
  return "?";
}

AttackKind attack_from_name(std::string_view name) {
  for (const auto& [kind, n] : kNames) {
    if (n == name) return kind;
  }
  throw ConfigError("unknown attack '" + std::string(name) + "'");
}

void AttackerConfig::validate(double carrier_hz) const {
  if (!(distance_to_victim_m >= 0.1 && distance_to_victim_m <= 2.0)) {
    throw ConfigError("attacker distance must lie in [0.1, 2] m");
  }
  const bool inside = placement(Node::bd_i).within_coherence(carrier_hz);
  if (kind == AttackKind::eavesdrop_smart && !inside) {
    throw ConfigError("a smart eavesdropper must sit within half a wavelength of its victim");
  }
  if (kind == AttackKind::eavesdrop_naive && inside) {
    throw ConfigError("a naive eavesdropper must sit beyond half a wavelength of its victim");
  }
}

Responder impersonation_responder(Rng& rng) {
  return {Node::attacker, [&rng](const auth::AuthSession& s, const StageReadings&) {
            return Fields{auth::generate_random_number(s.d_true.size(), rng),
                          auth::generate_random_number(s.d_true.size(), rng)};
          }};
}

Responder replay_responder(std::vector<double> first, std::vector<double> second) {
  return {Node::attacker, [f = std::move(first), g = std::move(second)](const auth::AuthSession&,
                                                                         const StageReadings&) {
            return Fields{f, g};
          }};
}

Responder counterfeit_responder(std::vector<double> c_i, std::vector<double> c_j) {
  return {Node::attacker, [ci = std::move(c_i), cj = std::move(c_j)](const auth::AuthSession&,
                                                                      const StageReadings& heard) {
            if (heard.first.size() != ci.size()) throw LengthError("guess length mismatch");
            std::vector<double> first(ci.size());
            for (std::size_t l = 0; l < ci.size(); ++l) {
              if (!(heard.second[l] > 0.0)) throw DegenerateMeasurement("zero reading at attacker");
              first[l] = std::clamp(heard.first[l] / heard.second[l] * ci[l], 0.0, 1.0);
            }
            return Fields{std::move(first), cj};
          }};
}

AuthDecision impersonation_attempt(const DeviceRegistry& verifier, auth::RefNumber victim,
                                   Node verifier_node, AuthThreshold threshold, Medium& medium) {
  return auth::one_way_authenticate(verifier, victim, verifier_node, impersonation_responder(medium.rng),
                                    threshold, medium);
}

EavesdropObservation naive_eavesdrop(const StageCapture& capture) {
  return {capture.first, capture.second, std::nullopt, std::nullopt, std::nullopt};
}

std::vector<double> naive_key_guess(std::size_t length, Rng& rng) {
  return auth::generate_random_number(length, rng);
}

EavesdropObservation smart_eavesdrop(const StageCapture& capture, double los_power_gain) {
  if (!(los_power_gain > 0.0)) throw ConfigError("line-of-sight gain must be positive");
  auto invert = [&](const std::vector<double>& v, const std::vector<double>& copy) {
    if (v.size() != copy.size()) throw LengthError("observation lengths differ");
    std::vector<double> out(v.size());
    for (std::size_t l = 0; l < v.size(); ++l) {
      out[l] = copy[l] > 0.0 ? std::clamp(v[l] / (copy[l] * los_power_gain), 0.0, 1.0) : 0.0;
    }
    return out;
  };
  EavesdropObservation obs;
  obs.v1 = capture.first;
  obs.v2 = capture.second;
  obs.channel_estimate = capture.first_side.pilot_channel_estimate;
  obs.inferred_random = invert(capture.first, capture.first_side.copy_window_power);
  obs.inferred_key = invert(capture.second, capture.second_side.copy_window_power);
  return obs;
}

ReplayOutcome replay_attack(std::span<DeviceRegistry> network, AuthThreshold threshold, Medium& medium,
                            const ReplayOptions& options) {
  if (network.size() < 2) throw ConfigError("replay needs two devices");
  DeviceRegistry& reg_i = network[0];
  DeviceRegistry& reg_j = network[1];

  // Recorded mutual session. The attacker keeps both responses as sent.
  auth::AuthSession rec1(reg_i.own_id(), reg_j.own_id(), Node::bd_i, {});
  auth::AuthSession rec2(reg_j.own_id(), reg_i.own_id(), Node::bd_j, {});
  auth::OneWayOptions o1;
  o1.record = &rec1;
  auth::OneWayOptions o2;
  o2.record = &rec2;
  const AuthDecision a1 = auth::one_way_authenticate(reg_i, reg_j.own_id(), Node::bd_i,
                                                     auth::honest_responder(reg_j, Node::bd_j),
                                                     threshold, medium, o1);
  const AuthDecision a2 = auth::one_way_authenticate(reg_j, reg_i.own_id(), Node::bd_j,
                                                     auth::honest_responder(reg_i, Node::bd_i),
                                                     threshold, medium, o2);
  ReplayOutcome out;
  out.recorded_session_accepted = a1.accepted && a2.accepted;
  if (rec1.stage() < auth::Stage::responded || rec2.stage() < auth::Stage::responded) {
    out.first = {false, 0.0, "recording session aborted"};
    return out;
  }
  const std::vector<double> resp_j_first = rec1.d_estimated;
  const std::vector<double> resp_j_second(reg_j.own_key().coeffs().begin(), reg_j.own_key().coeffs().end());
  const std::vector<double> resp_i_first = rec2.d_estimated;
  const std::vector<double> resp_i_second(reg_i.own_key().coeffs().begin(), reg_i.own_key().coeffs().end());

  if (options.key_update && out.recorded_session_accepted) {
    auth::broadcast_key_update(network, reg_i.own_id(), rec1.d_true);
    auth::broadcast_key_update(network, reg_j.own_id(), rec2.d_true);
  }

  auth::OneWayOptions r1;
  if (options.reuse_random_number) r1.fixed_random = rec1.d_true;
  out.first = auth::one_way_authenticate(reg_i, reg_j.own_id(), Node::bd_i,
                                         replay_responder(resp_j_first, resp_j_second), threshold,
                                         medium, r1);
  if (options.mutual) {
    auth::OneWayOptions r2;
    if (options.reuse_random_number) r2.fixed_random = rec2.d_true;
    out.second = auth::one_way_authenticate(reg_j, reg_i.own_id(), Node::bd_j,
                                            replay_responder(resp_i_first, resp_i_second), threshold,
                                            medium, r2);
  }
  return out;
}

CounterfeitOutcome counterfeit_attack(const DeviceRegistry& reg_i, const DeviceRegistry& reg_j,
                                      AuthThreshold threshold, Medium& medium, bool mutual,
                                      std::optional<std::pair<std::vector<double>, std::vector<double>>>
                                          guesses) {
  const std::size_t n = reg_i.own_key().size();
  if (!guesses) {
    guesses.emplace(auth::generate_random_number(n, medium.rng), auth::generate_random_number(n, medium.rng));
  }
  const auto& [c_i, c_j] = *guesses;
  CounterfeitOutcome out;
  out.first = auth::one_way_authenticate(reg_i, reg_j.own_id(), Node::bd_i,
                                         counterfeit_responder(c_i, c_j), threshold, medium);
  if (mutual) {
    // Same beliefs about both keys, roles swapped.
    out.second = auth::one_way_authenticate(reg_j, reg_i.own_id(), Node::bd_j,
                                            counterfeit_responder(c_j, c_i), threshold, medium);
  }
  return out;
}

std::vector<double> counterfeit_reconstruction(std::span<const double> k_i, std::span<const double> d,
                                               std::span<const double> c_i,
                                               std::span<const double> c_j) {
  const std::size_t n = k_i.size();
  if (d.size() != n || c_i.size() != n || c_j.size() != n) throw LengthError("length mismatch");
  std::vector<double> k(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double sent = std::min(1.0, d[l] / k_i[l] * c_i[l]);
    k[l] = std::clamp(d[l] * c_j[l] / sent, 0.0, 1.0);
  }
  return k;
}

double leaked_information(std::span<const double> truth, std::span<const double> inferred, int bins) {
  if (truth.size() != inferred.size()) throw EstimatorError("populations must be paired");
  if (bins < 2) throw EstimatorError("at least two bins are needed");
  const std::size_t b = static_cast<std::size_t>(bins);
  const std::size_t n = truth.size();
  if (n < 10 * b * b) {
    throw EstimatorError("leaked information needs at least " + std::to_string(10 * b * b) +
                         " pairs, got " + std::to_string(n));
  }
  auto bin_of = [b](double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return std::min(b - 1, static_cast<std::size_t>(c * static_cast<double>(b)));
  };
  std::vector<double> joint(b * b, 0.0), px(b, 0.0), py(b, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t x = bin_of(truth[k]);
    const std::size_t y = bin_of(inferred[k]);
    joint[x * b + y] += 1.0;
    px[x] += 1.0;
    py[y] += 1.0;
  }
  const double nn = static_cast<double>(n);
  double mi = 0.0;
  double hx = 0.0;
  for (std::size_t x = 0; x < b; ++x) {
    if (px[x] > 0.0) hx -= px[x] / nn * std::log(px[x] / nn);
    for (std::size_t y = 0; y < b; ++y) {
      const double j = joint[x * b + y];
      if (j > 0.0) mi += j / nn * std::log(j * nn / (px[x] * py[y]));
    }
  }
  if (hx <= 0.0) return 0.0;
  return std::clamp(mi / hx, 0.0, 1.0);
}

}  // namespace bdauth::adv
