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

// Attack simulations against the challenge-response exchange, and the
// leaked-information metric used to score eavesdroppers.

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bdauth/auth_protocol.hpp"

namespace bdauth::adv {

enum class AttackKind { none, impersonation, eavesdrop_naive, eavesdrop_smart, replay, counterfeit };

std::string_view attack_name(AttackKind k);
/// Throws ConfigError for an unknown name.
AttackKind attack_from_name(std::string_view name);

struct AttackerConfig {
  AttackKind kind = AttackKind::impersonation;
  double distance_to_victim_m = 0.5;
  bool knows_procedure = true;

  /// Distance within [0.1, 2] m; smart eavesdroppers must sit inside half a
  /// wavelength and naive ones outside it. Throws ConfigError.
  void validate(double carrier_hz) const;
  AttackerPlacement placement(Node victim) const { return {victim, distance_to_victim_m}; }
};

struct EavesdropObservation {
  std::vector<double> v1;
  std::vector<double> v2;
  std::optional<std::complex<double>> channel_estimate;
  std::optional<std::vector<double>> inferred_random;
  std::optional<std::vector<double>> inferred_key;
};

/// Backscatters uniform random guesses for both response fields.
auth::Responder impersonation_responder(Rng& rng);

/// Sends fixed fields regardless of the challenge.
auth::Responder replay_responder(std::vector<double> first, std::vector<double> second);

/// Sends clamp(v1/v2 * C_i) and C_j, the only response consistent with
/// guessed keys C_i and C_j.
auth::Responder counterfeit_responder(std::vector<double> c_i, std::vector<double> c_j);

/// The attacker claims `victim` and answers with random guesses.
auth::AuthDecision impersonation_attempt(const auth::DeviceRegistry& verifier, auth::RefNumber victim,
                                         Node verifier_node, auth::AuthThreshold threshold,
                                         auth::Medium& medium);

/// Ratio-only observer: v1/v2 = D/K_i leaves both unknowns free, so no
/// inference is attempted.
EavesdropObservation naive_eavesdrop(const StageCapture& capture);

/// A naive attacker's key is a guess independent of the observation.
std::vector<double> naive_key_guess(std::size_t length, Rng& rng);

/// Near-field observer: the copy-window power measures the ambient power
/// through the shared channel, so each reading divided by it and by the
/// known line-of-sight gain |h_ie|^2 returns the reflection coefficient.
EavesdropObservation smart_eavesdrop(const StageCapture& capture, double los_power_gain);

struct ReplayOptions {
  bool key_update = true;
  bool reuse_random_number = false;
  bool mutual = false;
};

struct ReplayOutcome {
  /// Honest mutual session the attacker recorded.
  bool recorded_session_accepted = false;
  auth::AuthDecision first;
  std::optional<auth::AuthDecision> second;
  bool accepted() const { return first.accepted && (!second || second->accepted); }
};

/// Records an honest mutual session between network[0] (BD_i) and
/// network[1] (BD_j), optionally updates keys, then replays the recorded
/// response fields from the attacker node in a fresh session. With
/// key_update off and reuse_random_number on, the replay lands in a session
/// identical to the recorded one, which is the control case.
ReplayOutcome replay_attack(std::span<auth::DeviceRegistry> network, auth::AuthThreshold threshold,
                            auth::Medium& medium, const ReplayOptions& options = {});

struct CounterfeitOutcome {
  auth::AuthDecision first;
  std::optional<auth::AuthDecision> second;
  bool accepted() const { return first.accepted && (!second || second->accepted); }
};

/// Guesses C_i, C_j uniform over [0.1, 1] unless given. In mutual mode the
/// attacker answers both challenges of a mutual session.
CounterfeitOutcome counterfeit_attack(const auth::DeviceRegistry& reg_i,
                                      const auth::DeviceRegistry& reg_j, auth::AuthThreshold threshold,
                                      auth::Medium& medium, bool mutual,
                                      std::optional<std::pair<std::vector<double>, std::vector<double>>>
                                          guesses = std::nullopt);

/// Key the verifier reconstructs from a noiseless counterfeit. Without
/// clamping this is K_i * C_j / C_i; the attacker's first field saturates at 1
/// when D * C_i / K_i exceeds it, and the estimate is clamped to [0, 1].
std::vector<double> counterfeit_reconstruction(std::span<const double> k_i, std::span<const double> d,
                                               std::span<const double> c_i,
                                               std::span<const double> c_j);

/// Plug-in histogram mutual information over [0, 1] x [0, 1], normalized by
/// the entropy of the true-value marginal and clipped to [0, 1].
/// Throws EstimatorError with fewer than 10 * bins^2 pairs.
double leaked_information(std::span<const double> truth, std::span<const double> inferred,
                          int bins = 16);

}  // namespace bdauth::adv
