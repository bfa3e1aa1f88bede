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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "bdauth/errors.hpp"
#include "bdauth/phy_layer.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bdauth;
using phy::cplx;

namespace {

channel::TapResponse random_taps(const channel::MultipathProfile& p, Rng& rng, double scale = 1.0) {
  channel::TapResponse t;
  for (std::size_t k = 0; k < p.size(); ++k) {
    t.push_back({p.tap_delays_samples[k], complex_normal(rng, scale * p.tap_amplitudes[k] * p.tap_amplitudes[k])});
  }
  return t;
}

phy::ReceiverConfig quiet_receiver() {
  phy::ReceiverConfig r;
  r.noise.noise_power_dbm = -std::numeric_limits<double>::infinity();
  r.noise_compensation = false;
  return r;
}

}  // namespace

TEST_CASE("OFDM symbols carry the configured power and a true cyclic prefix") {
  phy::OfdmConfig cfg;
  cfg.pilot_present = true;
  Rng rng(1);
  const auto f = phy::gen_ofdm_frame(cfg, 6, rng);
  REQUIRE(f.samples.size() == 6u * cfg.symbol_len());
  for (int s = 0; s < 6; ++s) {
    const auto sym = f.symbol(s);
    double p = 0.0;
    for (int n = cfg.cp_len; n < cfg.symbol_len(); ++n) p += std::norm(sym[n]);
    // Unitary synthesis of unit-modulus loads: exact power per sample.
    CHECK(p / cfg.n_subcarriers == doctest::Approx(cfg.tx_power_w()).epsilon(1e-12));
    for (int n = 0; n < cfg.cp_len; ++n) CHECK(std::abs(sym[n] - sym[n + cfg.n_subcarriers]) < 1e-15);
  }
  CHECK(cfg.symbol_duration_s() == doctest::Approx(4e-6));
}

TEST_CASE("pilot is the first symbol and has unit power") {
  phy::OfdmConfig cfg;
  const auto pilot = phy::pilot_symbol(cfg);
  double p = 0.0;
  for (int n = cfg.cp_len; n < cfg.symbol_len(); ++n) p += std::norm(pilot[n]);
  CHECK(p / cfg.n_subcarriers == doctest::Approx(1.0));
  Rng rng(2);
  const auto f = phy::gen_ofdm_frame(cfg, 2, rng);
  const double amp = std::sqrt(cfg.tx_power_w());
  for (int n = 0; n < cfg.symbol_len(); ++n) CHECK(std::abs(f.samples[n] - amp * pilot[n]) < 1e-15);
}

TEST_CASE("apply_multipath matches direct convolution") {
  Rng rng(3);
  for (const char* name : {"flat", "rural", "urban"}) {
    const auto prof = channel::MultipathProfile::by_name(name);
    const auto taps = random_taps(prof, rng);
    std::vector<cplx> x(300);
    for (auto& v : x) v = complex_normal(rng, 1.0);
    std::vector<int> d;
    std::vector<cplx> g;
    for (const auto& t : taps) {
      d.push_back(t.delay);
      g.push_back(t.gain);
    }
    const auto y = phy::apply_multipath(x, taps, 16);
    const auto ref = oracle::convolve(x, d, g);
    for (std::size_t n = 0; n < x.size(); ++n) CHECK(std::abs(y[n] - ref[n]) < 1e-12);
  }
  CHECK_THROWS_AS(phy::apply_multipath(std::vector<cplx>(10), {{16, {1.0, 0.0}}}, 16), ConfigError);
}

TEST_CASE("multipath preserves energy in expectation") {
  Rng rng(4);
  const auto prof = channel::MultipathProfile::urban();
  phy::OfdmConfig cfg;
  const auto f = phy::gen_ofdm_frame(cfg, 40, rng);
  double in = 0.0;
  for (const auto& s : f.samples) in += std::norm(s);
  double out = 0.0;
  const int drops = 400;
  for (int i = 0; i < drops; ++i) {
    const auto y = phy::apply_multipath(f.samples, random_taps(prof, rng), cfg.cp_len);
    for (const auto& s : y) out += std::norm(s);
  }
  CHECK(out / drops / in == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("CP subtraction cancels the downlink for any multipath within the CP") {
  phy::OfdmConfig cfg;
  Rng rng(5);
  for (const char* name : {"flat", "rural", "urban"}) {
    const auto prof = channel::MultipathProfile::by_name(name);
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = phy::gen_ofdm_frame(cfg, 5, rng);
      const auto y = phy::apply_multipath(f.samples, random_taps(prof, rng), cfg.cp_len);
      // Symbol 0 is skipped: it has no predecessor to fill its ISI region.
      const auto z = phy::cp_subtract(std::span<const cplx>(y).subspan(cfg.symbol_len()), cfg, prof.max_delay());
      CHECK(z.size() == 4u * static_cast<std::size_t>(cfg.cp_len - prof.max_delay()));
      double peak = 0.0;
      for (const auto& v : z) peak = std::max(peak, std::abs(v));
      CHECK(peak < 1e-12 * std::sqrt(cfg.tx_power_w()));
    }
  }
}

TEST_CASE("CP subtraction inside the ISI region leaves residue") {
  phy::OfdmConfig cfg;
  Rng rng(6);
  const auto f = phy::gen_ofdm_frame(cfg, 3, rng);
  const auto y = phy::apply_multipath(f.samples, {{0, {1.0, 0.0}}, {3, {0.5, 0.0}}}, cfg.cp_len);
  const auto z = phy::cp_subtract(std::span<const cplx>(y).subspan(cfg.symbol_len()), cfg, 0);
  double peak = 0.0;
  for (int n = 0; n < 3; ++n) peak = std::max(peak, std::abs(z[n]));
  CHECK(peak > 1e-6);
}

TEST_CASE("cp_subtract rejects partial symbols and bad guards") {
  phy::OfdmConfig cfg;
  CHECK_THROWS_AS(phy::cp_subtract(std::vector<cplx>(81), cfg), LengthError);
  CHECK_THROWS_AS(phy::cp_subtract(std::vector<cplx>(80), cfg, 16), ConfigError);
  CHECK_THROWS_AS(phy::cp_subtract(std::vector<cplx>(80), cfg, -1), ConfigError);
}

TEST_CASE("backscatter modulation switches at mid-symbol") {
  phy::OfdmConfig cfg;
  const std::vector<cplx> ones(3 * cfg.symbol_len(), cplx(1.0, 0.0));
  const std::vector<phy::BackscatterSymbol> msg = {{0.25, 1}, {1.0, 2}};
  const auto out = phy::backscatter_modulate(ones, msg, cfg, 0);
  const int half = cfg.symbol_len() / 2;
  for (int s = 0; s < 3; ++s) {
    const double amp = s == 0 ? 0.5 : 1.0;
    for (int n = 0; n < cfg.symbol_len(); ++n) {
      CHECK(out[s * cfg.symbol_len() + n] == cplx(n < half ? amp : 0.0, 0.0));
    }
  }
  const auto shifted = phy::backscatter_modulate(ones, msg, cfg, -5);
  CHECK(shifted[half - 6] != cplx(0.0, 0.0));
  CHECK(shifted[half - 5] == cplx(0.0, 0.0));
  CHECK_THROWS_AS(phy::backscatter_modulate(ones, msg, cfg, 16), ConfigError);
  CHECK_THROWS_AS(phy::backscatter_modulate(ones, std::vector<phy::BackscatterSymbol>{{1.5, 1}}, cfg), ConfigError);
  CHECK_THROWS_AS(phy::backscatter_modulate(ones, std::vector<phy::BackscatterSymbol>{{0.5, 4}}, cfg), LengthError);
}

TEST_CASE("harvested power is efficiency times mean power") {
  const std::vector<cplx> x = {{1.0, 0.0}, {0.0, 2.0}, {1.0, 1.0}};
  const auto r = phy::harvested_power(x, 0.7);
  CHECK(r.value_w == doctest::Approx(0.7 * (1.0 + 4.0 + 2.0) / 3.0));
  CHECK(r.n_samples_averaged == 3u);
  CHECK_THROWS_AS(phy::harvested_power(std::vector<cplx>{}, 0.7), MeasurementError);
}

TEST_CASE("noiseless readings are proportional to the reflection coefficient") {
  phy::OfdmConfig cfg;
  Rng rng(7);
  for (const char* name : {"flat", "rural", "urban"}) {
    const auto prof = channel::MultipathProfile::by_name(name);
    phy::AmbientSource src(cfg, phy::AmbientModel::stationary, rng);
    const phy::LinkSnapshot links{random_taps(prof, rng), random_taps(prof, rng), random_taps(prof, rng)};
    const std::vector<double> b = {0.1, 0.35, 0.8, 1.0, 0.5};
    const auto r = phy::reading_values(phy::transmit_bd_message(b, links, src, quiet_receiver(), rng, 2));
    for (std::size_t l = 1; l < b.size(); ++l) CHECK(r[l] / r[0] == doctest::Approx(b[l] / b[0]).epsilon(1e-12));
  }
}

TEST_CASE("readings scale linearly with source power") {
  phy::OfdmConfig cfg;
  Rng rng(8);
  phy::AmbientSource src(cfg, phy::AmbientModel::stationary, rng);
  const phy::LinkSnapshot links{{{0, {0.3, 0.1}}}, {{0, {0.2, -0.4}}}, {{0, {1.0, 0.0}}}};
  const std::vector<double> b = {0.5, 0.9};
  Rng r1(9), r2(9);
  const auto a = phy::reading_values(phy::transmit_bd_message(b, links, src, quiet_receiver(), r1));
  src.set_tx_power_w(src.tx_power_w() * 10.0);
  const auto c = phy::reading_values(phy::transmit_bd_message(b, links, src, quiet_receiver(), r2));
  CHECK(c[0] / a[0] == doctest::Approx(10.0));
  CHECK_THROWS_AS(src.set_tx_power_w(0.0), ConfigError);
  CHECK_THROWS_AS(src.set_tx_power_w(std::numeric_limits<double>::infinity()), ConfigError);
}

TEST_CASE("noise compensation removes the 2 sigma^2 floor") {
  phy::OfdmConfig cfg;
  Rng rng(10);
  phy::AmbientSource src(cfg, phy::AmbientModel::stationary, rng);
  src.set_tx_power_w(1e-30);
  phy::ReceiverConfig rx;
  rx.noise.noise_power_dbm = -30.0;
  rx.noise_compensation = false;
  const phy::LinkSnapshot links{{{0, {1.0, 0.0}}}, {{0, {1.0, 0.0}}}, {{0, {1.0, 0.0}}}};
  const std::vector<double> b(400, 0.5);
  double mean = 0.0;
  for (double v : phy::reading_values(phy::transmit_bd_message(b, links, src, rx, rng))) mean += v;
  mean /= b.size();
  CHECK(mean == doctest::Approx(0.7 * 2.0 * 1e-6).epsilon(0.03));
  rx.noise_compensation = true;
  for (double v : phy::reading_values(phy::transmit_bd_message(b, links, src, rx, rng))) CHECK(v > 0.0);
}

TEST_CASE("pilot channel estimate and copy-window power") {
  phy::OfdmConfig cfg;
  Rng rng(11);
  phy::AmbientSource src(cfg, phy::AmbientModel::stationary, rng);
  const cplx h(0.3, -0.2);
  const std::vector<double> b = {0.4, 0.6};
  const auto e = phy::emit_backscatter(b, {{0, h}}, src, rng, 1);
  phy::SideObservation side;
  phy::receive_backscatter(e, {{0, {1.0, 0.0}}}, {{0, h}}, quiet_receiver(), rng, &side);
  REQUIRE(side.pilot_channel_estimate.has_value());
  CHECK(std::abs(*side.pilot_channel_estimate - h) < 1e-12);
  REQUIRE(side.copy_window_power.size() == 2u);
  CHECK(side.copy_window_power[0] > 0.0);
}

TEST_CASE("I/Q dump round-trips as little-endian float32") {
  const auto path = (std::filesystem::temp_directory_path() / "bdauth_iq_test.f32").string();
  const std::vector<cplx> x = {{1.0, -2.0}, {0.5, 0.25}, {-3.0, 4.0}};
  phy::write_iq_f32(path, x);
  CHECK(std::filesystem::file_size(path) == 24u);
  std::ifstream in(path, std::ios::binary);
  unsigned char first[4];
  in.read(reinterpret_cast<char*>(first), 4);
  // 1.0f = 0x3f800000, least significant byte first.
  CHECK(first[0] == 0x00);
  CHECK(first[3] == 0x3f);
  const auto back = phy::read_iq_f32(path);
  REQUIRE(back.size() == 3u);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::complex<double>(back[i]) == x[i]);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(phy::write_iq_f32("/nonexistent_dir/x.f32", x), IoError);
}
