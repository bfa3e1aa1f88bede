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

#include "bdauth/baselines.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>

#include "bdauth/errors.hpp"

namespace bdauth::base {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ours: return "ours";
    case Scheme::baseline1: return "baseline1";
    case Scheme::baseline2: return "baseline2";
  }
  return "?";
}

void BaselineCostModel::validate() const {
  for (double t : {t_tx, t_rand, t_verify, t_xor, t_decoding, t_hash, t_gen, p_decoding_mw, p_xor_mw}) {
    if (!(t >= 0.0)) throw ConfigError("cost constants must be nonnegative");
  }
  if (!(p_hash_mw >= 5.0 && p_hash_mw <= 10.0)) throw ConfigError("p_hash_mw must lie in [5, 10]");
}

double field_time_s(std::size_t key_length, const PhyContext& phy) {
  return phy.field_duration_s(key_length);
}

OpCounters ours_op_counters(std::size_t) {
  // Four backscatter fields whatever the key length; no digital processing.
  return {4, 0};
}

Bytes key_bytes(std::span<const double> coeffs) {
  Bytes out(coeffs.size());
  for (std::size_t l = 0; l < coeffs.size(); ++l) {
    out[l] = static_cast<std::uint8_t>(std::lround(std::clamp(coeffs[l], 0.0, 1.0) * 255.0));
  }
  return out;
}

namespace {

Bytes random_bytes(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> u(0, 255);
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(u(rng));
  return b;
}

Bytes xor_bytes(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw LengthError("XOR operands differ in length");
  Bytes out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

Bytes keyed_digest(std::span<const std::uint8_t> key, std::span<const std::uint8_t> nonce) {
  Bytes msg(key.begin(), key.end());
  msg.insert(msg.end(), nonce.begin(), nonce.end());
  const auto h = sha256(msg);
  Bytes out(key.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h[i % h.size()];
  return out;
}

auth::AuthDecision exact_match(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
  return {diff == 0, static_cast<double>(diff), {}};
}

}  // namespace

BaselineResult baseline1_xor_auth(std::span<const std::uint8_t> verifier_copy,
                                  std::span<const std::uint8_t> prover_key, Rng& rng) {
  if (verifier_copy.size() != prover_key.size()) throw LengthError("key lengths differ");
  BaselineResult r;
  r.transcript.nonce = random_bytes(prover_key.size(), rng);
  r.transcript.response = xor_bytes(r.transcript.nonce, prover_key);
  const Bytes recovered = xor_bytes(r.transcript.response, r.transcript.nonce);
  r.decision = exact_match(recovered, verifier_copy);
  const std::uint64_t bits = 8 * prover_key.size();
  // Two XORs, and each of the two messages is encoded and decoded.
  r.ops = {2 * bits, 2 * bits + 4 * bits};
  return r;
}

Bytes xor_eavesdrop(const Transcript& t) { return xor_bytes(t.nonce, t.response); }

BaselineResult baseline2_hash_auth(std::span<const std::uint8_t> verifier_copy,
                                   std::span<const std::uint8_t> prover_key, Rng& rng,
                                   std::optional<Bytes> replayed_response) {
  if (verifier_copy.size() != prover_key.size()) throw LengthError("key lengths differ");
  BaselineResult r;
  r.transcript.nonce = random_bytes(prover_key.size(), rng);
  r.transcript.response =
      replayed_response ? *replayed_response : keyed_digest(prover_key, r.transcript.nonce);
  const Bytes expected = keyed_digest(verifier_copy, r.transcript.nonce);
  r.decision = r.transcript.response.size() == expected.size()
                   ? exact_match(r.transcript.response, expected)
                   : auth::AuthDecision{false, static_cast<double>(expected.size()), "length"};
  const std::uint64_t bits = 8 * prover_key.size();
  // Two digests over key || nonce, two decodes.
  r.ops = {2 * bits, 2 * 2 * bits + 2 * bits};
  return r;
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return out;
}

std::vector<double> bytes_to_unit(std::span<const std::uint8_t> b) {
  std::vector<double> v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v[i] = b[i] / 255.0;
  return v;
}

double latency_s(Scheme s, const BaselineCostModel& m, std::size_t n_auth) {
  double one = 0.0;
  switch (s) {
    case Scheme::ours:
      one = 4 * m.t_tx + m.t_rand + m.t_verify;
      break;
    case Scheme::baseline1:
      one = 4 * m.t_tx + m.t_rand + m.t_verify + 2 * m.t_xor + 4 * m.t_decoding;
      break;
    case Scheme::baseline2:
      one = 2 * m.t_gen + 2 * m.t_tx + 2 * m.t_hash + m.t_rand + m.t_verify + 2 * m.t_decoding;
      break;
  }
  return one * static_cast<double>(n_auth);
}

double rf_power_mw(double distance_m, const channel::NoiseModel& noise, double snr_target_db,
                   double path_loss_exponent) {
  const double g = channel::link_amplitude({distance_m, path_loss_exponent, 0.0, 9.0e8});
  const double noise_mw = noise.variance_w() * 1.0e3;
  return std::pow(10.0, snr_target_db / 10.0) * noise_mw / (g * g);
}

double computation_power_mw(Scheme s, const BaselineCostModel& m) {
  switch (s) {
    case Scheme::ours: return 0.0;
    case Scheme::baseline1: return 4 * m.p_decoding_mw + 2 * m.p_xor_mw;
    case Scheme::baseline2: return 2 * m.p_decoding_mw + 2 * m.p_hash_mw;
  }
  return 0.0;
}

double power_mw(Scheme s, const BaselineCostModel& m, double distance_m, const channel::NoiseModel& noise) {
  return rf_power_mw(distance_m, noise, m.snr_target_db) + computation_power_mw(s, m);
}

}  // namespace bdauth::base
