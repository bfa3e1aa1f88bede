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

#include "bdauth/scenario.hpp"

#include <cmath>
#include <limits>

#include "bdauth/errors.hpp"

namespace bdauth {

using channel::FadingKind;
using channel::FadingProcess;
using channel::LinkGeometry;
using channel::MultipathProfile;

std::string_view node_name(Node n) {
  switch (n) {
    case Node::source: return "source";
    case Node::bd_i: return "bd_i";
    case Node::bd_j: return "bd_j";
    case Node::attacker: return "attacker";
  }
  return "?";
}

void ScenarioGeometry::validate() const {
  for (double d : {d_i_m, d_j_m, d_ij_m}) {
    if (!(d > 0.0)) throw InvalidGeometry("all node distances must be positive");
  }
  if (!(v_ij_mps >= 0.0)) throw InvalidGeometry("relative speed must be nonnegative");
  if (!(carrier_hz > 0.0)) throw InvalidGeometry("carrier frequency must be positive");
  (void)MultipathProfile::by_name(profile);
}

bool AttackerPlacement::within_coherence(double carrier_hz) const {
  return distance_m < 0.5 * channel::kSpeedOfLight / carrier_hz;
}

double PhyContext::field_duration_s(std::size_t key_length) const {
  const double symbols =
      overhead_symbols() + static_cast<double>(key_length) * static_cast<double>(span_ofdm_symbols);
  return symbols * ofdm.symbol_duration_s();
}

double PhyContext::response_delay_for(std::size_t key_length) const {
  return response_delay_s >= 0.0 ? response_delay_s : field_duration_s(key_length);
}

std::size_t Scenario::index(Node a, Node b) {
  const auto ia = static_cast<std::size_t>(a);
  const auto ib = static_cast<std::size_t>(b);
  return ia < ib ? ia * kNodeCount + ib : ib * kNodeCount + ia;
}

Scenario::Scenario(const ScenarioGeometry& geometry, std::uint64_t seed,
                   std::optional<AttackerPlacement> attacker)
    : geometry_(geometry), attacker_(attacker) {
  geometry_.validate();
  const MultipathProfile profile = MultipathProfile::by_name(geometry_.profile);
  auto geo = [&](double d, double v) {
    return LinkGeometry{d, geometry_.path_loss_exponent, v, geometry_.carrier_hz};
  };
  auto seed_for = [&](Node a, Node b) {
    return derive_seed(seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)});
  };
  auto put = [&](Node a, Node b, FadingProcess p) { links_[index(a, b)].emplace(std::move(p)); };

  put(Node::source, Node::bd_i,
      FadingProcess(geo(geometry_.d_i_m, 0.0), profile, seed_for(Node::source, Node::bd_i)));
  put(Node::source, Node::bd_j,
      FadingProcess(geo(geometry_.d_j_m, 0.0), profile, seed_for(Node::source, Node::bd_j)));
  put(Node::bd_i, Node::bd_j,
      FadingProcess(geo(geometry_.d_ij_m, geometry_.v_ij_mps), profile,
                    seed_for(Node::bd_i, Node::bd_j)));

  if (attacker_) {
    const AttackerPlacement& a = *attacker_;
    if (a.near != Node::bd_i && a.near != Node::bd_j) {
      throw ConfigError("an attacker shadows bd_i or bd_j");
    }
    if (!(a.distance_m > 0.0)) throw InvalidGeometry("attacker distance must be positive");
    const Node other = a.near == Node::bd_i ? Node::bd_j : Node::bd_i;
    const double d_near_source = a.near == Node::bd_i ? geometry_.d_i_m : geometry_.d_j_m;
    if (a.within_coherence(geometry_.carrier_hz)) {
      const FadingProcess& shadowed = link(Node::source, a.near);
      put(Node::source, Node::attacker,
          FadingProcess::with_taps(shadowed.geometry(), shadowed.profile(), shadowed.taps(),
                                   seed_for(Node::source, Node::attacker)));
      put(a.near, Node::attacker,
          FadingProcess(geo(a.distance_m, 0.0), MultipathProfile::flat(),
                        seed_for(a.near, Node::attacker), FadingKind::line_of_sight));
    } else {
      put(Node::source, Node::attacker,
          FadingProcess(geo(d_near_source, 0.0), profile, seed_for(Node::source, Node::attacker)));
      put(a.near, Node::attacker,
          FadingProcess(geo(a.distance_m, 0.0), profile, seed_for(a.near, Node::attacker)));
    }
    put(other, Node::attacker,
        FadingProcess(geo(geometry_.d_ij_m, 0.0), profile, seed_for(other, Node::attacker)));
  }
}

bool Scenario::has_link(Node a, Node b) const { return links_[index(a, b)].has_value(); }

FadingProcess& Scenario::link(Node a, Node b) {
  auto& slot = links_[index(a, b)];
  if (!slot) {
    throw ConfigError("no link between " + std::string(node_name(a)) + " and " +
                      std::string(node_name(b)));
  }
  return *slot;
}

const FadingProcess& Scenario::link(Node a, Node b) const {
  return const_cast<Scenario*>(this)->link(a, b);
}

void Scenario::advance(double delta_t_s) {
  for (auto& slot : links_) {
    if (slot) slot->advance(delta_t_s);
  }
}

phy::LinkSnapshot Scenario::snapshot(Node tx, Node rx) const {
  return {link(Node::source, tx).taps(), link(tx, rx).taps(), link(Node::source, rx).taps()};
}

double Scenario::power_for_snr(Node tx, Node rx, double snr_db, double noise_w) const {
  const double gain =
      channel::total_power(link(Node::source, tx).taps()) * channel::total_power(link(tx, rx).taps());
  if (!(gain > 0.0)) throw ConfigError("backscatter link has zero gain");
  return std::pow(10.0, snr_db / 10.0) * noise_w / gain;
}

double unit_reflection_power(const Scenario& scenario, Node tx, Node rx, const PhyContext& phy,
                             phy::AmbientSource& source, Rng& rng) {
  phy::ReceiverConfig quiet = phy.receiver;
  quiet.noise.noise_power_dbm = -std::numeric_limits<double>::infinity();
  quiet.noise_compensation = false;
  const double saved = source.tx_power_w();
  source.set_tx_power_w(1.0);
  const phy::LinkSnapshot links = scenario.snapshot(tx, rx);
  const double full = 1.0;
  const phy::Emission e = phy::emit_backscatter(std::span<const double>(&full, 1), links.incident, source,
                                                rng, phy.span_ofdm_symbols, phy.timing_offset);
  const auto r = phy::receive_backscatter(e, links.inward, links.downlink, quiet, rng);
  source.set_tx_power_w(saved);
  return r.front().value_w / quiet.efficiency;
}

StageReadings run_stage(Scenario& scenario, Node tx, Node rx, std::span<const double> first_field,
                        std::span<const double> second_field, const PhyContext& phy,
                        phy::AmbientSource& source, Rng& rng, std::span<const Node> listeners) {
  if (first_field.size() != second_field.size()) {
    throw LengthError("both fields of a stage must have the same length");
  }
  if (phy.power.mode == PowerControl::Mode::target_snr) {
    const Node ref = phy.power.snr_reference.value_or(rx);
    const double noise_w = phy.receiver.noise.variance_w();
    const double per_watt = unit_reflection_power(scenario, tx, ref, phy, source, rng);
    if (!(per_watt > 0.0)) throw ConfigError("backscatter link has zero gain");
    source.set_tx_power_w(std::pow(10.0, phy.power.snr_db / 10.0) * (noise_w > 0.0 ? noise_w : 1e-9) /
                          per_watt);
  } else {
    source.set_tx_power_w(channel::dbm_to_watts(phy.power.tx_power_dbm));
  }

  StageReadings out;
  out.captures.resize(listeners.size());
  const double field_s = phy.field_duration_s(first_field.size());
  for (int field = 0; field < 2; ++field) {
    const auto coeffs = field == 0 ? first_field : second_field;
    const phy::LinkSnapshot links = scenario.snapshot(tx, rx);
    const phy::Emission e = phy::emit_backscatter(coeffs, links.incident, source, rng,
                                                  phy.span_ofdm_symbols, phy.timing_offset);
    auto values = phy::reading_values(
        phy::receive_backscatter(e, links.inward, links.downlink, phy.receiver, rng));
    (field == 0 ? out.first : out.second) = std::move(values);
    for (std::size_t l = 0; l < listeners.size(); ++l) {
      StageCapture& cap = out.captures[l];
      cap.listener = listeners[l];
      const phy::LinkSnapshot at = scenario.snapshot(tx, listeners[l]);
      phy::SideObservation& side = field == 0 ? cap.first_side : cap.second_side;
      auto heard = phy::reading_values(
          phy::receive_backscatter(e, at.inward, at.downlink, phy.receiver, rng, &side));
      (field == 0 ? cap.first : cap.second) = std::move(heard);
    }
    scenario.advance(field_s);
  }
  return out;
}

}  // namespace bdauth
