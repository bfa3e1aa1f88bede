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

// Two digital comparison handshakes and the latency / power accounting used
// to compare them with the physical-layer scheme.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bdauth/auth_protocol.hpp"
#include "bdauth/channel_models.hpp"
#include "bdauth/random.hpp"

namespace bdauth::base {

enum class Scheme { ours, baseline1, baseline2 };
std::string_view scheme_name(Scheme s);

struct BaselineCostModel {
  double t_tx = 0.0;  // one field; filled from the PHY when zero
  double t_rand = 1.0e-5;
  double t_verify = 1.0e-5;
  double t_xor = 1.0e-6;
  double t_decoding = 1.0e-5;
  double t_hash = 1.0e-3;
  double t_gen = 1.0e-5;
  double p_decoding_mw = 0.03;
  double p_xor_mw = 0.01;
  double p_hash_mw = 7.5;
  double snr_target_db = 10.0;

  /// Throws ConfigError on negative constants or p_hash outside [5, 10].
  void validate() const;
};

/// Duration of one transmitted field of `key_length` elements.
double field_time_s(std::size_t key_length, const PhyContext& phy);

/// Counts used for the complexity comparison.
struct OpCounters {
  /// Radio transmissions (backscatter fields or packets).
  std::uint64_t transmissions = 0;
  /// Bits run through digital processing (XOR, digest, decoding).
  std::uint64_t processed_bits = 0;
};

OpCounters ours_op_counters(std::size_t key_length);

using Bytes = std::vector<std::uint8_t>;

/// A PID key quantized to one byte per coefficient.
Bytes key_bytes(std::span<const double> coeffs);

struct Transcript {
  Bytes nonce;
  Bytes response;
};

struct BaselineResult {
  auth::AuthDecision decision;
  Transcript transcript;
  OpCounters ops;
};

/// Nonce, then nonce XOR key; the verifier XORs back and compares.
BaselineResult baseline1_xor_auth(std::span<const std::uint8_t> verifier_copy,
                                  std::span<const std::uint8_t> prover_key, Rng& rng);

/// XOR of the two observed messages.
Bytes xor_eavesdrop(const Transcript& t);

/// Nonce, then SHA-256(key || nonce) truncated to the key length; the
/// verifier recomputes. A set `replayed_response` is sent instead of the
/// prover's own digest.
BaselineResult baseline2_hash_auth(std::span<const std::uint8_t> verifier_copy,
                                   std::span<const std::uint8_t> prover_key, Rng& rng,
                                   std::optional<Bytes> replayed_response = std::nullopt);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

/// Bytes mapped to [0, 1], for scoring transcripts with leaked_information.
std::vector<double> bytes_to_unit(std::span<const std::uint8_t> b);

/// Latency of n_auth authentications.
double latency_s(Scheme s, const BaselineCostModel& m, std::size_t n_auth = 1);

/// Minimum BD transmit power in mW reaching the SNR target at `distance_m`
/// under the large-scale gain law and the noise floor.
double rf_power_mw(double distance_m, const channel::NoiseModel& noise, double snr_target_db,
                   double path_loss_exponent = 2.0);

/// Computation power in mW per authentication.
double computation_power_mw(Scheme s, const BaselineCostModel& m);

/// RF plus computation power in mW per authentication.
double power_mw(Scheme s, const BaselineCostModel& m, double distance_m,
                const channel::NoiseModel& noise = {});

}  // namespace bdauth::base
