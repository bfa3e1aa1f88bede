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

#include "bdauth/auth_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bdauth/errors.hpp"

namespace bdauth::auth {

PidKey::PidKey(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < kMinKeyLength || coeffs_.size() > kMaxKeyLength) {
    throw ConfigError("key length " + std::to_string(coeffs_.size()) + " outside [5, 30]");
  }
  for (double c : coeffs_) {
    if (!(c >= kBMin && c <= 1.0)) {
      throw ConfigError("key coefficient " + std::to_string(c) + " outside [0.1, 1]");
    }
  }
}

PidKey PidKey::random(std::size_t length, Rng& rng) {
  return PidKey(generate_random_number(length, rng));
}

DeviceRegistry::DeviceRegistry(RefNumber own_id, PidKey own_key) : own_id_(own_id) {
  entries_.emplace(own_id, std::move(own_key));
}

const PidKey& DeviceRegistry::key(RefNumber id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw ConfigError("device " + std::to_string(id.value) + " is not registered");
  }
  return it->second;
}

void DeviceRegistry::set(RefNumber id, PidKey key) { entries_.insert_or_assign(id, std::move(key)); }

std::vector<DeviceRegistry> make_network(std::size_t n_devices, std::size_t key_length, Rng& rng) {
  std::vector<PidKey> keys;
  for (std::size_t d = 0; d < n_devices; ++d) keys.push_back(PidKey::random(key_length, rng));
  std::vector<DeviceRegistry> net;
  for (std::size_t d = 0; d < n_devices; ++d) {
    DeviceRegistry reg(RefNumber{static_cast<std::uint32_t>(d)}, keys[d]);
    for (std::size_t o = 0; o < n_devices; ++o) reg.set(RefNumber{static_cast<std::uint32_t>(o)}, keys[o]);
    net.push_back(std::move(reg));
  }
  return net;
}

AuthThreshold::AuthThreshold(double d) : delta(d) {
  if (!(d > 0.0)) throw ConfigError("threshold must be positive");
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::challenge_sent: return "challenge_sent";
    case Stage::responded: return "responded";
    case Stage::decided: return "decided";
  }
  return "?";
}

AuthSession::AuthSession(RefNumber verifier, RefNumber prover, Node node, std::vector<double> d)
    : verifier_id(verifier), prover_id(prover), verifier_node(node), d_true(std::move(d)) {}

void AuthSession::advance(Stage next) {
  if (static_cast<int>(next) != static_cast<int>(stage_) + 1) {
    throw std::logic_error("session cannot move from " + std::string(stage_name(stage_)) + " to " +
                           std::string(stage_name(next)));
  }
  stage_ = next;
}

std::vector<double> generate_random_number(std::size_t length, Rng& rng) {
  std::uniform_real_distribution<double> u(kBMin, 1.0);
  std::vector<double> d(length);
  for (double& x : d) x = u(rng);
  return d;
}

std::pair<AuthSession, StageReadings> challenge(const DeviceRegistry& verifier, RefNumber prover_id,
                                                Node verifier_node, Node prover_node, Medium& medium,
                                                std::span<const Node> listeners,
                                                std::span<const double> fixed_random) {
  if (!verifier.contains(prover_id)) {
    throw ConfigError("device " + std::to_string(prover_id.value) + " is not registered");
  }
  const PidKey& k_i = verifier.own_key();
  if (verifier.key(prover_id).size() != k_i.size()) {
    throw LengthError("challenge fields must have equal length");
  }
  std::vector<double> d = fixed_random.empty()
                             ? generate_random_number(k_i.size(), medium.rng)
                             : std::vector<double>(fixed_random.begin(), fixed_random.end());
  if (d.size() != k_i.size()) throw LengthError("random number and key lengths differ");
  AuthSession session(verifier.own_id(), prover_id, verifier_node, std::move(d));
  StageReadings r = run_stage(medium.scenario, verifier_node, prover_node, session.d_true,
                              k_i.coeffs(), medium.phy, medium.source, medium.rng, listeners);
  session.powers[0] = r.first;
  session.powers[1] = r.second;
  return {std::move(session), std::move(r)};
}

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw LengthError("reading and key lengths differ");
}

}  // namespace

std::vector<double> prover_estimate_random(std::span<const double> p1, std::span<const double> p2,
                                           std::span<const double> stored_k_i) {
  check_lengths(p1.size(), p2.size(), stored_k_i.size());
  std::vector<double> d(p1.size());
  for (std::size_t l = 0; l < d.size(); ++l) {
    if (!(p2[l] > 0.0)) throw DegenerateMeasurement("zero P2 reading at element " + std::to_string(l));
    d[l] = std::clamp(p1[l] / p2[l] * stored_k_i[l], 0.0, 1.0);
  }
  return d;
}

StageReadings respond_with(AuthSession& session, std::span<const double> first,
                           std::span<const double> second, Node tx, Medium& medium,
                           std::span<const Node> listeners) {
  if (session.stage() != Stage::challenge_sent) {
    throw std::logic_error("respond requires a session in challenge_sent");
  }
  medium.scenario.advance(medium.phy.response_delay_for(first.size()));
  StageReadings r = run_stage(medium.scenario, tx, session.verifier_node, first, second, medium.phy,
                              medium.source, medium.rng, listeners);
  session.d_estimated.assign(first.begin(), first.end());
  session.powers[2] = r.first;
  session.powers[3] = r.second;
  session.advance(Stage::responded);
  return r;
}

StageReadings respond(const DeviceRegistry& prover, AuthSession& session, Node prover_node,
                      Medium& medium, std::span<const Node> listeners) {
  const std::vector<double> d_hat =
      prover_estimate_random(session.powers[0], session.powers[1], prover.key(session.verifier_id).coeffs());
  return respond_with(session, d_hat, prover.own_key().coeffs(), prover_node, medium, listeners);
}

std::vector<double> verifier_estimate_key(std::span<const double> p3, std::span<const double> p4,
                                          std::span<const double> d_true) {
  check_lengths(p3.size(), p4.size(), d_true.size());
  std::vector<double> k(p3.size());
  for (std::size_t l = 0; l < k.size(); ++l) {
    if (!(p3[l] > 0.0)) throw DegenerateMeasurement("zero P3 reading at element " + std::to_string(l));
    k[l] = std::clamp(d_true[l] * p4[l] / p3[l], 0.0, 1.0);
  }
  return k;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LengthError("keys of different length are not comparable");
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) s += std::abs(a[l] - b[l]);
  return s;
}

AuthDecision verify(std::span<const double> k_estimated, const PidKey& stored, AuthThreshold threshold) {
  const double dist = l1_distance(k_estimated, stored.coeffs());
  return {dist <= threshold.delta, dist, {}};
}

AuthDecision decide(AuthSession& session, const PidKey& stored, AuthThreshold threshold) {
  session.k_estimated = verifier_estimate_key(session.powers[2], session.powers[3], session.d_true);
  AuthDecision d = verify(session.k_estimated, stored, threshold);
  session.advance(Stage::decided);
  session.decision = d.accepted;
  session.l1_distance = d.l1_distance;
  return d;
}

Responder honest_responder(const DeviceRegistry& prover, Node node) {
  return {node, [&prover](const AuthSession& s, const StageReadings& heard) {
            auto d_hat = prover_estimate_random(heard.first, heard.second,
                                                prover.key(s.verifier_id).coeffs());
            const auto k = prover.own_key().coeffs();
            return std::pair{std::move(d_hat), std::vector<double>(k.begin(), k.end())};
          }};
}

AuthDecision one_way_authenticate(const DeviceRegistry& verifier, RefNumber claimed_id,
                                  Node verifier_node, const Responder& responder, AuthThreshold threshold,
                                  Medium& medium, const OneWayOptions& options) {
  std::optional<AuthSession> session;
  try {
    auto [s, heard] = challenge(verifier, claimed_id, verifier_node, responder.node, medium,
                                  options.listeners, options.fixed_random);
    session.emplace(std::move(s));
    if (options.challenge_capture != nullptr) *options.challenge_capture = heard;
    auto [first, second] = responder.fields(*session, heard);
    StageReadings back = respond_with(*session, first, second, responder.node, medium, options.listeners);
    if (options.response_capture != nullptr) *options.response_capture = std::move(back);
    AuthDecision d = decide(*session, verifier.key(claimed_id), threshold);
    if (options.record != nullptr) *options.record = *session;
    return d;
  } catch (const std::exception& e) {
    if (options.record != nullptr && session) *options.record = *session;
    return {false, std::numeric_limits<double>::infinity(), e.what()};
  }
}

MutualResult mutual_authenticate(const DeviceRegistry& reg_i, const DeviceRegistry& reg_j,
                                 AuthThreshold threshold, Medium& medium) {
  MutualResult out;
  AuthSession rec_i(reg_i.own_id(), reg_j.own_id(), Node::bd_i, {});
  AuthSession rec_j(reg_j.own_id(), reg_i.own_id(), Node::bd_j, {});
  OneWayOptions o1;
  o1.record = &rec_i;
  out.first = one_way_authenticate(reg_i, reg_j.own_id(), Node::bd_i,
                                   honest_responder(reg_j, Node::bd_j), threshold, medium, o1);
  OneWayOptions o2;
  o2.record = &rec_j;
  out.second = one_way_authenticate(reg_j, reg_i.own_id(), Node::bd_j,
                                    honest_responder(reg_i, Node::bd_i), threshold, medium, o2);
  out.d_i = rec_i.d_true;
  out.d_j = rec_j.d_true;
  return out;
}

RefNumber identify_device(std::span<const double> k_estimated, const DeviceRegistry& registry) {
  std::optional<RefNumber> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& [id, key] : registry.entries()) {
    if (key.size() != k_estimated.size()) continue;
    const double d = l1_distance(k_estimated, key.coeffs());
    // std::map iterates ids in increasing order, so strict < keeps the lowest.
    if (d < best_dist) {
      best_dist = d;
      best = id;
    }
  }
  if (!best) throw ConfigError("no registry key matches the estimate length");
  return *best;
}

PidKey key_update(const PidKey& key, std::span<const double> d_session) {
  if (key.size() != d_session.size()) throw LengthError("key and random number lengths differ");
  std::vector<double> next(key.size());
  for (std::size_t l = 0; l < next.size(); ++l) {
    // The geometric mean of two values in [0.1, 1] stays in [0.1, 1]; the
    // clamp only absorbs rounding at the boundaries.
    next[l] = std::clamp(std::sqrt(key[l] * d_session[l]), std::min(key[l], d_session[l]),
                         std::max(key[l], d_session[l]));
  }
  return PidKey(std::move(next));
}

void broadcast_key_update(std::span<DeviceRegistry> network, RefNumber id,
                          std::span<const double> d_session) {
  for (DeviceRegistry& reg : network) {
    if (reg.contains(id)) reg.set(id, key_update(reg.key(id), d_session));
  }
}

namespace {

std::string join(std::span<const double> v) {
  std::ostringstream os;
  os.precision(9);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

std::vector<std::string> transcript_lines(const AuthSession& s, std::string_view attacker_kind) {
  const std::string head = "verifier=" + std::to_string(s.verifier_id.value) +
                           "\tprover=" + std::to_string(s.prover_id.value) +
                           "\tattacker=" + std::string(attacker_kind);
  std::vector<std::string> lines;
  lines.push_back("stage=challenge_sent\t" + head + "\td_true=" + join(s.d_true) +
                  "\tp1=" + join(s.powers[0]) + "\tp2=" + join(s.powers[1]));
  if (s.stage() >= Stage::responded) {
    lines.push_back("stage=responded\t" + head + "\td_estimated=" + join(s.d_estimated) +
                    "\tp3=" + join(s.powers[2]) + "\tp4=" + join(s.powers[3]));
  }
  if (s.stage() == Stage::decided) {
    std::ostringstream os;
    os.precision(9);
    os << *s.l1_distance;
    lines.push_back("stage=decided\t" + head + "\tk_estimated=" + join(s.k_estimated) +
                    "\tl1=" + os.str() + "\taccepted=" + (*s.decision ? "1" : "0"));
  }
  return lines;
}

}  // namespace bdauth::auth
