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

// PID keys, device registries and the two-stage challenge-response exchange.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bdauth/random.hpp"
#include "bdauth/scenario.hpp"

namespace bdauth::auth {

inline constexpr double kBMin = 0.1;
inline constexpr std::size_t kMinKeyLength = 5;
inline constexpr std::size_t kMaxKeyLength = 30;

/// Upper-layer device identifier. Opaque apart from its ordering.
struct RefNumber {
  std::uint32_t value = 0;
  auto operator<=>(const RefNumber&) const = default;
};

class PidKey {
 public:
  /// Throws ConfigError when the length or any coefficient is out of range.
  explicit PidKey(std::vector<double> coeffs);

  static PidKey random(std::size_t length, Rng& rng);

  std::span<const double> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  double operator[](std::size_t l) const { return coeffs_[l]; }
  bool operator==(const PidKey&) const = default;

 private:
  std::vector<double> coeffs_;
};

class DeviceRegistry {
 public:
  DeviceRegistry(RefNumber own_id, PidKey own_key);

  RefNumber own_id() const { return own_id_; }
  const PidKey& own_key() const { return entries_.at(own_id_); }
  bool contains(RefNumber id) const { return entries_.contains(id); }
  /// Throws ConfigError for an unknown id.
  const PidKey& key(RefNumber id) const;
  void set(RefNumber id, PidKey key);
  const std::map<RefNumber, PidKey>& entries() const { return entries_; }

 private:
  RefNumber own_id_;
  std::map<RefNumber, PidKey> entries_;
};

/// Same keys on every device, one registry per device.
std::vector<DeviceRegistry> make_network(std::size_t n_devices, std::size_t key_length, Rng& rng);

struct AuthThreshold {
  double delta;
  /// Throws ConfigError unless delta > 0.
  explicit AuthThreshold(double d);
};

enum class Stage { challenge_sent = 0, responded = 1, decided = 2 };
std::string_view stage_name(Stage s);

struct AuthDecision {
  bool accepted = false;
  double l1_distance = 0.0;
  /// Empty for a clean decision; otherwise why the session aborted.
  std::string cause;
};

class AuthSession {
 public:
  AuthSession(RefNumber verifier_id, RefNumber prover_id, Node verifier_node, std::vector<double> d_true);

  RefNumber verifier_id;
  RefNumber prover_id;
  Node verifier_node;
  std::vector<double> d_true;
  std::vector<double> d_estimated;
  std::vector<double> k_estimated;
  /// P1, P2 at the prover; P3, P4 at the verifier.
  std::array<std::vector<double>, 4> powers;
  std::optional<bool> decision;
  std::optional<double> l1_distance;

  Stage stage() const { return stage_; }
  /// Throws std::logic_error on a non-forward transition.
  void advance(Stage next);

 private:
  Stage stage_ = Stage::challenge_sent;
};

/// Shared transmission context of one session.
struct Medium {
  Scenario& scenario;
  const PhyContext& phy;
  phy::AmbientSource& source;
  Rng& rng;
};

std::vector<double> generate_random_number(std::size_t length, Rng& rng);

/// The verifier backscatters D then its own key. Readings are those at
/// `prover_node`; `listeners` also capture the stage. A nonempty
/// `fixed_random` replaces the fresh D.
std::pair<AuthSession, StageReadings> challenge(const DeviceRegistry& verifier, RefNumber prover_id,
                                                Node verifier_node, Node prover_node, Medium& medium,
                                                std::span<const Node> listeners = {},
                                                std::span<const double> fixed_random = {});

/// (P1 / P2) * K_i, clamped to [0, 1]. Throws DegenerateMeasurement on P2 = 0.
std::vector<double> prover_estimate_random(std::span<const double> p1, std::span<const double> p2,
                                           std::span<const double> stored_k_i);

/// Backscatters two arbitrary fields from `tx` to the session verifier and
/// records them as P3, P4.
StageReadings respond_with(AuthSession& session, std::span<const double> first,
                           std::span<const double> second, Node tx, Medium& medium,
                           std::span<const Node> listeners = {});

/// Honest prover: estimated D then its own key.
StageReadings respond(const DeviceRegistry& prover, AuthSession& session, Node prover_node,
                      Medium& medium, std::span<const Node> listeners = {});

/// D * P4 / P3, clamped to [0, 1]. Throws DegenerateMeasurement on P3 = 0.
std::vector<double> verifier_estimate_key(std::span<const double> p3, std::span<const double> p4,
                                          std::span<const double> d_true);

double l1_distance(std::span<const double> a, std::span<const double> b);

AuthDecision verify(std::span<const double> k_estimated, const PidKey& stored, AuthThreshold threshold);

/// Decides a responded session in place.
AuthDecision decide(AuthSession& session, const PidKey& stored, AuthThreshold threshold);

/// What a responding party sends given what it heard in the challenge.
struct Responder {
  Node node;
  std::function<std::pair<std::vector<double>, std::vector<double>>(const AuthSession&,
                                                                     const StageReadings&)>
      fields;
};

Responder honest_responder(const DeviceRegistry& prover, Node node);

struct OneWayOptions {
  std::span<const Node> listeners = {};
  std::span<const double> fixed_random = {};
  /// Filled with the finished session when set.
  AuthSession* record = nullptr;
  StageReadings* challenge_capture = nullptr;
  StageReadings* response_capture = nullptr;
};

/// Challenge, response, estimation and verification. Any stage error is
/// returned as a reject whose cause names the error.
AuthDecision one_way_authenticate(const DeviceRegistry& verifier, RefNumber claimed_id,
                                  Node verifier_node, const Responder& responder, AuthThreshold threshold,
                                  Medium& medium, const OneWayOptions& options = {});

struct MutualResult {
  AuthDecision first;   // BD_i verifies BD_j
  AuthDecision second;  // BD_j verifies BD_i
  std::vector<double> d_i;
  std::vector<double> d_j;
  bool accepted() const { return first.accepted && second.accepted; }
};

MutualResult mutual_authenticate(const DeviceRegistry& reg_i, const DeviceRegistry& reg_j,
                                 AuthThreshold threshold, Medium& medium);

/// Registry entry closest in L1 to the estimate; ties go to the lower id.
RefNumber identify_device(std::span<const double> k_estimated, const DeviceRegistry& registry);

/// Elementwise sqrt(K * D).
PidKey key_update(const PidKey& key, std::span<const double> d_session);

/// Applies (id, D) to every registry holding `id`.
void broadcast_key_update(std::span<DeviceRegistry> network, RefNumber id,
                          std::span<const double> d_session);

/// One tab-separated key=value line per stage.
std::vector<std::string> transcript_lines(const AuthSession& session,
                                          std::string_view attacker_kind = "none");

}  // namespace bdauth::auth
