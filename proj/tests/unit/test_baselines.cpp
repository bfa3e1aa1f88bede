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

#include <cmath>
#include <string>
#include <vector>

#include "bdauth/adversaries.hpp"
#include "bdauth/baselines.hpp"
#include "bdauth/errors.hpp"
#include "doctest.h"

using namespace bdauth;
using namespace bdauth::base;

namespace {

BaselineCostModel zero_costs() {
  BaselineCostModel m;
  m.t_tx = m.t_rand = m.t_verify = m.t_xor = m.t_decoding = m.t_hash = m.t_gen = 0.0;
  return m;
}

}  // namespace

TEST_CASE("SHA-256 matches the FIPS 180-2 test vector") {
  const std::string abc = "abc";
  const auto d = sha256(std::span(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()));
  const std::uint8_t expected[4] = {0xba, 0x78, 0x16, 0xbf};
  for (int i = 0; i < 4; ++i) CHECK(d[i] == expected[i]);
  CHECK(d[31] == 0xad);
}

TEST_CASE("key bytes quantize to 1/255 steps") {
  const auto b = key_bytes(std::vector<double>{0.0, 1.0, 0.5, 0.1});
  CHECK(b == Bytes{0, 255, 128, 26});
  const auto u = bytes_to_unit(b);
  CHECK(u[1] == 1.0);
  CHECK(u[3] == doctest::Approx(26.0 / 255.0));
}

TEST_CASE("baseline1 XOR handshake") {
  Rng rng(1);
  const Bytes key = {10, 200, 33, 47, 99};
  const auto r = baseline1_xor_auth(key, key, rng);
  CHECK(r.decision.accepted);
  CHECK(xor_eavesdrop(r.transcript) == key);
  Bytes wrong = key;
  wrong[2] ^= 1;
  CHECK_FALSE(baseline1_xor_auth(key, wrong, rng).decision.accepted);
}

TEST_CASE("baseline2 hash handshake") {
  Rng rng(2);
  const Bytes key = {10, 200, 33, 47, 99, 5};
  const auto r = baseline2_hash_auth(key, key, rng);
  CHECK(r.decision.accepted);
  CHECK(r.transcript.response.size() == key.size());
  Bytes wrong = key;
  wrong[0] ^= 0x80;
  CHECK_FALSE(baseline2_hash_auth(key, wrong, rng).decision.accepted);
  // A digest recorded under one nonce fails under the next.
  CHECK_FALSE(baseline2_hash_auth(key, key, rng, r.transcript.response).decision.accepted);
  CHECK_THROWS_AS(baseline2_hash_auth(key, Bytes{1, 2}, rng), LengthError);
}

TEST_CASE("transcript leakage: XOR leaks the key, the digest does not") {
  Rng rng(3);
  std::vector<double> truth, x1, x2;
  for (int s = 0; s < 300; ++s) {
    const auto key = auth::PidKey::random(10, rng);
    const auto kb = key_bytes(key.coeffs());
    const auto a = bytes_to_unit(xor_eavesdrop(baseline1_xor_auth(kb, kb, rng).transcript));
    const auto b = bytes_to_unit(baseline2_hash_auth(kb, kb, rng).transcript.response);
    for (std::size_t l = 0; l < 10; ++l) {
      truth.push_back(key[l]);
      x1.push_back(a[l]);
      x2.push_back(b[l]);
    }
  }
  CHECK(adv::leaked_information(truth, x1) >= 0.95);
  CHECK(adv::leaked_information(truth, x2) <= 0.05);
}

TEST_CASE("latency formulas") {
  BaselineCostModel m = zero_costs();
  m.t_tx = 1.0;
  CHECK(latency_s(Scheme::ours, m) == 4.0);
  CHECK(latency_s(Scheme::baseline1, m) == 4.0);
  CHECK(latency_s(Scheme::baseline2, m) == 2.0);

  m = zero_costs();
  m.t_tx = 0.1;
  m.t_rand = 0.2;
  m.t_verify = 0.3;
  m.t_xor = 0.05;
  m.t_decoding = 0.07;
  m.t_hash = 0.9;
  m.t_gen = 0.4;
  CHECK(latency_s(Scheme::ours, m) == doctest::Approx(4 * 0.1 + 0.2 + 0.3));
  CHECK(latency_s(Scheme::baseline1, m) == doctest::Approx(4 * 0.1 + 0.2 + 0.3 + 2 * 0.05 + 4 * 0.07));
  CHECK(latency_s(Scheme::baseline2, m) ==
        doctest::Approx(2 * 0.4 + 2 * 0.1 + 2 * 0.9 + 0.2 + 0.3 + 2 * 0.07));
  CHECK(latency_s(Scheme::baseline2, m, 1000) == doctest::Approx(1000 * latency_s(Scheme::baseline2, m)));
}

TEST_CASE("property: latency is affine and ours beats baseline1") {
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    BaselineCostModel m;
    m.t_tx = uniform(rng, 0.0, 1e-3);
    m.t_rand = uniform(rng, 0.0, 1e-3);
    m.t_verify = uniform(rng, 0.0, 1e-3);
    m.t_xor = uniform(rng, 1e-9, 1e-3);
    m.t_decoding = uniform(rng, 1e-9, 1e-3);
    CHECK(latency_s(Scheme::ours, m) < latency_s(Scheme::baseline1, m));
    BaselineCostModel z = m;
    z.t_xor = 0.0;
    CHECK(latency_s(Scheme::baseline1, m) - latency_s(Scheme::baseline1, z) == doctest::Approx(2 * m.t_xor));
  }
}

TEST_CASE("power: RF link budget and computation terms") {
  const channel::NoiseModel noise{-30.0};
  // 10 dB above a 1e-3 mW floor through an amplitude gain 1e-2 / d^2.
  CHECK(rf_power_mw(1.0, noise, 10.0) == doctest::Approx(1e-2 / 1e-4));
  CHECK(rf_power_mw(6.0, noise, 10.0) / rf_power_mw(3.0, noise, 10.0) == doctest::Approx(16.0));
  const BaselineCostModel m;
  CHECK(computation_power_mw(Scheme::ours, m) == 0.0);
  CHECK(computation_power_mw(Scheme::baseline1, m) == doctest::Approx(4 * 0.03 + 2 * 0.01));
  CHECK(computation_power_mw(Scheme::baseline2, m) == doctest::Approx(2 * 0.03 + 2 * 7.5));
  for (double d = 1.0; d <= 10.0; d += 0.25) {
    CHECK(power_mw(Scheme::ours, m, d) < power_mw(Scheme::baseline1, m, d));
    CHECK(power_mw(Scheme::baseline1, m, d) < power_mw(Scheme::baseline2, m, d));
  }
}

TEST_CASE("cost model validation") {
  BaselineCostModel m;
  CHECK_NOTHROW(m.validate());
  m.p_hash_mw = 12.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = {};
  m.t_hash = -1.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("operation counters: constant for ours, linear for the baselines") {
  Rng rng(5);
  for (std::size_t L : {5u, 10u, 20u, 30u}) {
    CHECK(ours_op_counters(L).transmissions == ours_op_counters(5).transmissions);
    CHECK(ours_op_counters(L).processed_bits == 0u);
    const Bytes key(L, 7);
    const auto b1 = baseline1_xor_auth(key, key, rng).ops;
    const auto b2 = baseline2_hash_auth(key, key, rng).ops;
    const auto b1_5 = baseline1_xor_auth(Bytes(5, 7), Bytes(5, 7), rng).ops;
    const auto b2_5 = baseline2_hash_auth(Bytes(5, 7), Bytes(5, 7), rng).ops;
    CHECK(b1.processed_bits * 5 == b1_5.processed_bits * L);
    CHECK(b2.processed_bits * 5 == b2_5.processed_bits * L);
  }
}

TEST_CASE("field time follows the OFDM numerology") {
  PhyContext phy;
  // 10 elements of 2 symbols plus pilot and lead-in, 4 us each.
  CHECK(field_time_s(10, phy) == doctest::Approx(22 * 4e-6));
}
