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

// Node placement, per-link fading processes and the stage primitive that
// carries two consecutive backscatter fields from one tag to another.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdauth/channel_models.hpp"
#include "bdauth/phy_layer.hpp"
#include "bdauth/random.hpp"

namespace bdauth {

enum class Node : std::uint8_t { source = 0, bd_i = 1, bd_j = 2, attacker = 3 };
inline constexpr std::size_t kNodeCount = 4;

std::string_view node_name(Node n);

struct ScenarioGeometry {
  double d_i_m = 3.0;   // RF source -> BD_i
  double d_j_m = 3.0;   // RF source -> BD_j
  double d_ij_m = 3.0;  // BD_i <-> BD_j
  double v_ij_mps = 0.0;
  double carrier_hz = 9.0e8;
  double path_loss_exponent = 2.0;
  std::string profile = "flat";

  void validate() const;
};

/// Where an attacker sits relative to the tag it shadows.
struct AttackerPlacement {
  Node near = Node::bd_i;
  double distance_m = 0.5;

  /// Inside half a carrier wavelength the attacker shares the shadowed tag's
  /// channel from the source and sees it over a near-field line-of-sight link.
  bool within_coherence(double carrier_hz) const;
};

/// RF source power policy for each stage.
struct PowerControl {
  enum class Mode {
    fixed_tx_power,
    /// The source is set so the stage receiver sees the requested SNR for a
    /// fully reflecting tag (B = 1) on the channel realized at stage start,
    /// with signal power taken over the receiver's measurement window.
    target_snr,
  };
  Mode mode = Mode::target_snr;
  double tx_power_dbm = 1.0;
  double snr_db = 20.0;
  /// Node whose SNR is controlled; unset means the stage receiver.
  std::optional<Node> snr_reference;
};

/// Physical-layer settings shared by every stage of a session.
struct PhyContext {
  phy::OfdmConfig ofdm;
  phy::ReceiverConfig receiver;
  phy::AmbientModel ambient = phy::AmbientModel::stationary;
  int span_ofdm_symbols = 2;
  int timing_offset = 0;
  PowerControl power;
  /// Delay between challenge and response; negative means one field duration.
  double response_delay_s = -1.0;

  int overhead_symbols() const { return (ofdm.pilot_present ? 1 : 0) + 1; }
  double field_duration_s(std::size_t key_length) const;
  double response_delay_for(std::size_t key_length) const;
};

class Scenario {
 public:
  Scenario(const ScenarioGeometry& geometry, std::uint64_t seed,
           std::optional<AttackerPlacement> attacker = std::nullopt);

  const ScenarioGeometry& geometry() const { return geometry_; }
  const std::optional<AttackerPlacement>& attacker() const { return attacker_; }
  bool has_link(Node a, Node b) const;
  channel::FadingProcess& link(Node a, Node b);
  const channel::FadingProcess& link(Node a, Node b) const;

  /// Evolves every link by dt.
  void advance(double delta_t_s);

  /// Incident (source->tx), inward (tx->rx) and downlink (source->rx) taps.
  phy::LinkSnapshot snapshot(Node tx, Node rx) const;

  /// Source power in watts giving `snr_db` at `rx` for B = 1 from `tx`.
  double power_for_snr(Node tx, Node rx, double snr_db, double noise_w) const;

 private:
  static std::size_t index(Node a, Node b);

  ScenarioGeometry geometry_;
  std::optional<AttackerPlacement> attacker_;
  std::array<std::optional<channel::FadingProcess>, kNodeCount * kNodeCount> links_;
};

/// Noiseless received power over the measurement window per watt of source
/// power when `tx` reflects fully (B = 1) towards `rx`.
double unit_reflection_power(const Scenario& scenario, Node tx, Node rx, const PhyContext& phy,
                             phy::AmbientSource& source, Rng& rng);

/// What an eavesdropping node captured during one stage.
struct StageCapture {
  Node listener = Node::attacker;
  std::vector<double> first;
  std::vector<double> second;
  phy::SideObservation first_side;
  phy::SideObservation second_side;
};

struct StageReadings {
  std::vector<double> first;
  std::vector<double> second;
  std::vector<StageCapture> captures;
};

/// Two consecutive backscatter fields from `tx` to `rx`. Sets the source
/// power per the power policy, then advances the scenario by one field
/// duration after each field.
StageReadings run_stage(Scenario& scenario, Node tx, Node rx, std::span<const double> first_field,
                        std::span<const double> second_field, const PhyContext& phy,
                        phy::AmbientSource& source, Rng& rng,
                        std::span<const Node> listeners = {});

}  // namespace bdauth
