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

#include "bdauth/phy_layer.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>

#include "bdauth/errors.hpp"
#include "bdauth/kernels.hpp"

namespace bdauth::phy {

static_assert(sizeof(cplx) == sizeof(fftw_complex), "std::complex<double> must alias fftw_complex");

namespace {

// FFTW planning is not thread-safe; execution with new-array execute is.
class InversePlans {
 public:
  static InversePlans& instance() {
    static InversePlans plans;
    return plans;
  }

  fftw_plan get(int n) {
    std::lock_guard lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, p);
    return p;
  }

  ~InversePlans() {
    for (auto& [n, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<int, fftw_plan> plans_;
};

/// Unitary inverse DFT of the loads with the CP prepended; unit mean power
/// over the useful part when the loads are unit-modulus.
std::vector<cplx> synthesize_symbol(const OfdmConfig& config, std::vector<cplx> loads) {
  const int n = config.n_subcarriers;
  std::vector<cplx> useful(n);
  fftw_execute_dft(InversePlans::instance().get(n), reinterpret_cast<fftw_complex*>(loads.data()),
                   reinterpret_cast<fftw_complex*>(useful.data()));
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> symbol(config.symbol_len());
  for (int i = 0; i < config.cp_len; ++i) symbol[i] = useful[n - config.cp_len + i] * norm;
  for (int i = 0; i < n; ++i) symbol[config.cp_len + i] = useful[i] * norm;
  return symbol;
}

std::vector<cplx> random_qpsk_symbol(const OfdmConfig& config, Rng& rng) {
  std::vector<cplx> loads(config.n_subcarriers);
  std::uniform_int_distribution<int> quadrant(0, 3);
  const double a = std::numbers::sqrt2 / 2.0;
  for (cplx& x : loads) {
    const int q = quadrant(rng);
    x = cplx((q & 1) ? a : -a, (q & 2) ? a : -a);
  }
  return synthesize_symbol(config, std::move(loads));
}

int resolve_guard(const ReceiverConfig& receiver, const TapResponse& downlink, int cp_len) {
  const int guard = receiver.guard >= 0 ? receiver.guard : channel::max_delay(downlink);
  if (guard >= cp_len) {
    throw ConfigError("CP guard " + std::to_string(guard) + " leaves no samples in a CP of " +
                      std::to_string(cp_len));
  }
  return guard;
}

void check_delays(const TapResponse& taps, int cp_len, const char* what) {
  if (channel::max_delay(taps) >= cp_len) {
    throw ConfigError(std::string(what) + " channel delay spread " +
                      std::to_string(channel::max_delay(taps)) + " does not fit in CP length " +
                      std::to_string(cp_len));
  }
}

}  // namespace

double OfdmConfig::tx_power_w() const { return channel::dbm_to_watts(tx_power_dbm); }

void OfdmConfig::validate() const {
  if (n_subcarriers < 2) throw ConfigError("need at least 2 subcarriers");
  if (cp_len < 1 || cp_len >= n_subcarriers) {
    throw ConfigError("CP length must satisfy 0 < cp_len < n_subcarriers");
  }
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample rate must be positive");
}

std::span<const cplx> BasebandFrame::symbol(int k) const {
  const std::size_t len = config.symbol_len();
  return std::span<const cplx>(samples).subspan(static_cast<std::size_t>(k) * len, len);
}

std::vector<cplx> pilot_symbol(const OfdmConfig& config) {
  // Zadoff-Chu root 1: constant modulus in both domains.
  const int n = config.n_subcarriers;
  std::vector<cplx> loads(n);
  for (int k = 0; k < n; ++k) {
    const double phase = (n % 2 == 0) ? -std::numbers::pi * k * k / n
                                      : -std::numbers::pi * k * (k + 1) / n;
    loads[k] = std::polar(1.0, phase);
  }
  return synthesize_symbol(config, std::move(loads));
}

BasebandFrame gen_ofdm_frame(const OfdmConfig& config, int n_symbols, Rng& rng) {
  config.validate();
  if (n_symbols < 1) throw LengthError("an OFDM frame needs at least one symbol");
  BasebandFrame frame;
  frame.config = config;
  frame.n_symbols = n_symbols;
  frame.samples.reserve(static_cast<std::size_t>(n_symbols) * config.symbol_len());
  const double amp = std::sqrt(config.tx_power_w());
  for (int k = 0; k < n_symbols; ++k) {
    std::vector<cplx> sym =
        (k == 0 && config.pilot_present) ? pilot_symbol(config) : random_qpsk_symbol(config, rng);
    for (const cplx& s : sym) frame.samples.push_back(s * amp);
  }
  return frame;
}

AmbientSource::AmbientSource(OfdmConfig config, AmbientModel model, Rng& rng)
    : config_(config), model_(model), tx_power_w_(config.tx_power_w()) {
  config_.validate();
  if (model_ == AmbientModel::stationary) data_symbol_ = random_qpsk_symbol(config_, rng);
  if (config_.pilot_present) pilot_ = pilot_symbol(config_);
}

void AmbientSource::set_tx_power_w(double watts) {
  if (!(watts > 0.0) || !std::isfinite(watts)) {
    throw ConfigError("RF source power must be positive and finite");
  }
  tx_power_w_ = watts;
}

BasebandFrame AmbientSource::frame(int n_symbols, Rng& rng) const {
  if (n_symbols < 1) throw LengthError("an OFDM frame needs at least one symbol");
  BasebandFrame frame;
  frame.config = config_;
  frame.config.tx_power_dbm = channel::watts_to_dbm(tx_power_w_);
  frame.n_symbols = n_symbols;
  const std::size_t len = config_.symbol_len();
  frame.samples.resize(static_cast<std::size_t>(n_symbols) * len);
  const double amp = std::sqrt(tx_power_w_);
  const auto& k = kernels::active_kernels();
  for (int s = 0; s < n_symbols; ++s) {
    cplx* dst = frame.samples.data() + static_cast<std::size_t>(s) * len;
    if (s == 0 && config_.pilot_present) {
      k.scale_real(dst, pilot_.data(), amp, len);
    } else if (model_ == AmbientModel::stationary) {
      k.scale_real(dst, data_symbol_.data(), amp, len);
    } else {
      const std::vector<cplx> sym = random_qpsk_symbol(config_, rng);
      k.scale_real(dst, sym.data(), amp, len);
    }
  }
  return frame;
}

void accumulate_multipath(std::span<cplx> out, std::span<const cplx> x, const TapResponse& taps) {
  const auto& k = kernels::active_kernels();
  const std::size_t n = std::min(out.size(), x.size());
  for (const channel::Tap& tap : taps) {
    const std::size_t d = static_cast<std::size_t>(tap.delay);
    if (d >= n) continue;
    k.accumulate_scaled(out.data() + d, x.data(), tap.gain, n - d);
  }
}

std::vector<cplx> apply_multipath(std::span<const cplx> samples, const TapResponse& taps,
                                  int cp_len) {
  check_delays(taps, cp_len, "multipath");
  std::vector<cplx> out(samples.size());
  accumulate_multipath(out, samples, taps);
  return out;
}

std::vector<cplx> backscatter_modulate(std::span<const cplx> incident,
                                       std::span<const BackscatterSymbol> message,
                                       const OfdmConfig& config, int timing_offset) {
  config.validate();
  if (std::abs(timing_offset) >= config.cp_len) {
    throw ConfigError("state-transition offset must stay within +/-(cp_len - 1)");
  }
  const std::size_t len = config.symbol_len();
  std::size_t needed = 0;
  for (const BackscatterSymbol& b : message) {
    if (!(b.power_coeff >= 0.0 && b.power_coeff <= 1.0)) {
      throw ConfigError("power-domain reflection coefficient outside [0, 1]");
    }
    if (b.span_ofdm_symbols < 1) throw ConfigError("a backscatter symbol spans >= 1 OFDM symbol");
    needed += static_cast<std::size_t>(b.span_ofdm_symbols) * len;
  }
  if (needed > incident.size()) {
    throw LengthError("message needs " + std::to_string(needed) + " samples but the incident frame has " +
                      std::to_string(incident.size()));
  }
  const std::size_t on_len = static_cast<std::size_t>(static_cast<int>(len) / 2 + timing_offset);
  const auto& k = kernels::active_kernels();
  std::vector<cplx> out(incident.size());
  std::size_t pos = 0;
  for (const BackscatterSymbol& b : message) {
    const double amp = std::sqrt(b.power_coeff);
    for (int s = 0; s < b.span_ofdm_symbols; ++s, pos += len) {
      k.scale_real(out.data() + pos, incident.data() + pos, amp, on_len);
    }
  }
  return out;
}

std::vector<cplx> cp_subtract(std::span<const cplx> received, const OfdmConfig& config, int guard) {
  config.validate();
  const std::size_t len = config.symbol_len();
  if (received.size() % len != 0) {
    throw LengthError("received buffer of " + std::to_string(received.size()) +
                      " samples is not a whole number of " + std::to_string(len) + "-sample symbols");
  }
  if (guard < 0 || guard >= config.cp_len) throw ConfigError("CP guard must lie in [0, cp_len)");
  const std::size_t n_sym = received.size() / len;
  const std::size_t window = static_cast<std::size_t>(config.cp_len - guard);
  const std::size_t lag = static_cast<std::size_t>(config.n_subcarriers);
  std::vector<cplx> out(n_sym * window);
  const auto& k = kernels::active_kernels();
  for (std::size_t s = 0; s < n_sym; ++s) {
    const cplx* base = received.data() + s * len + guard;
    k.subtract(out.data() + s * window, base, base + lag, window);
  }
  return out;
}

HarvestedPowerReading harvested_power(std::span<const cplx> signal, double efficiency) {
  if (signal.empty()) throw MeasurementError("cannot measure power of an empty signal");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw MeasurementError("harvester efficiency must lie in (0, 1]");
  }
  const double mean = kernels::active_kernels().power_sum(signal.data(), signal.size()) /
                      static_cast<double>(signal.size());
  return {efficiency * mean, signal.size(), efficiency};
}

Emission emit_backscatter(std::span<const double> power_coeffs, const TapResponse& incident,
                          const AmbientSource& source, Rng& rng, int span_ofdm_symbols,
                          int timing_offset) {
  const OfdmConfig& cfg = source.config();
  check_delays(incident, cfg.cp_len, "incident");
  if (span_ofdm_symbols < 1) throw ConfigError("span_ofdm_symbols must be >= 1");
  Emission e;
  e.first_message_symbol = (cfg.pilot_present ? 1 : 0) + 1;
  e.span_ofdm_symbols = span_ofdm_symbols;
  e.n_elements = power_coeffs.size();
  const int n_symbols =
      e.first_message_symbol + static_cast<int>(power_coeffs.size()) * span_ofdm_symbols;
  e.ambient = source.frame(n_symbols, rng);

  std::vector<cplx> at_tag(e.ambient.samples.size());
  accumulate_multipath(at_tag, e.ambient.samples, incident);

  std::vector<BackscatterSymbol> message(power_coeffs.size());
  for (std::size_t i = 0; i < power_coeffs.size(); ++i) {
    message[i] = {power_coeffs[i], span_ofdm_symbols};
  }
  const std::size_t offset = static_cast<std::size_t>(e.first_message_symbol) * cfg.symbol_len();
  e.reflected.assign(at_tag.size(), cplx{});
  const std::vector<cplx> modulated = backscatter_modulate(
      std::span<const cplx>(at_tag).subspan(offset), message, cfg, timing_offset);
  std::copy(modulated.begin(), modulated.end(), e.reflected.begin() + static_cast<std::ptrdiff_t>(offset));
  return e;
}

std::vector<HarvestedPowerReading> receive_backscatter(const Emission& emission,
                                                       const TapResponse& inward,
                                                       const TapResponse& downlink,
                                                       const ReceiverConfig& receiver, Rng& rng,
                                                       SideObservation* side,
                                                       std::vector<cplx>* raw_capture) {
  const OfdmConfig& cfg = emission.ambient.config;
  check_delays(inward, cfg.cp_len, "inward");
  check_delays(downlink, cfg.cp_len, "downlink");
  const int guard = resolve_guard(receiver, downlink, cfg.cp_len);
  const double sigma2 = receiver.noise.variance_w();
  const double eta = receiver.efficiency;

  std::vector<cplx> y(emission.ambient.samples.size());
  accumulate_multipath(y, emission.reflected, inward);
  accumulate_multipath(y, emission.ambient.samples, downlink);
  channel::add_awgn(y, sigma2, rng);
  if (raw_capture != nullptr) *raw_capture = y;

  const std::size_t len = cfg.symbol_len();
  const std::size_t start = static_cast<std::size_t>(emission.first_message_symbol) * len;
  const std::vector<cplx> z =
      cp_subtract(std::span<const cplx>(y).subspan(start), cfg, guard);

  const std::size_t window = static_cast<std::size_t>(cfg.cp_len - guard);
  const std::size_t per_element = window * static_cast<std::size_t>(emission.span_ofdm_symbols);
  // The difference of two independent noise samples carries 2 sigma^2.
  const double floor_w = eta * 2.0 * sigma2;
  std::vector<HarvestedPowerReading> readings;
  readings.reserve(emission.n_elements);
  for (std::size_t e = 0; e < emission.n_elements; ++e) {
    HarvestedPowerReading r = harvested_power(
        std::span<const cplx>(z).subspan(e * per_element, per_element), eta);
    if (receiver.noise_compensation && floor_w > 0.0) {
      r.value_w = std::max(r.value_w - floor_w, 1.0e-6 * floor_w);
    }
    readings.push_back(r);
  }

  if (side != nullptr) {
    side->copy_window_power.clear();
    const auto& k = kernels::active_kernels();
    for (std::size_t e = 0; e < emission.n_elements; ++e) {
      double acc = 0.0;
      for (int s = 0; s < emission.span_ofdm_symbols; ++s) {
        const std::size_t sym = start + (e * emission.span_ofdm_symbols + s) * len;
        acc += k.power_sum(y.data() + sym + cfg.n_subcarriers + guard, window);
      }
      double p = eta * acc / static_cast<double>(per_element);
      if (receiver.noise_compensation && sigma2 > 0.0) {
        p = std::max(p - eta * sigma2, 1.0e-6 * eta * sigma2);
      }
      side->copy_window_power.push_back(p);
    }
    side->pilot_channel_estimate.reset();
    if (cfg.pilot_present) {
      const std::span<const cplx> ref = emission.ambient.symbol(0);
      cplx num{};
      double den = 0.0;
      for (std::size_t n = static_cast<std::size_t>(cfg.cp_len); n < len; ++n) {
        num += y[n] * std::conj(ref[n]);
        den += std::norm(ref[n]);
      }
      if (den > 0.0) side->pilot_channel_estimate = num / den;
    }
  }
  return readings;
}

std::vector<HarvestedPowerReading> transmit_bd_message(std::span<const double> power_coeffs,
                                                       const LinkSnapshot& links,
                                                       const AmbientSource& source,
                                                       const ReceiverConfig& receiver, Rng& rng,
                                                       int span_ofdm_symbols, int timing_offset) {
  const Emission e =
      emit_backscatter(power_coeffs, links.incident, source, rng, span_ofdm_symbols, timing_offset);
  return receive_backscatter(e, links.inward, links.downlink, receiver, rng);
}

std::vector<double> reading_values(std::span<const HarvestedPowerReading> readings) {
  std::vector<double> v;
  v.reserve(readings.size());
  for (const HarvestedPowerReading& r : readings) v.push_back(r.value_w);
  return v;
}

void write_iq_f32(const std::string& path, std::span<const cplx> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const cplx& s : samples) {
    float iq[2] = {static_cast<float>(s.real()), static_cast<float>(s.imag())};
    for (float f : iq) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
      const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                             static_cast<char>((bits >> 16) & 0xff),
                             static_cast<char>((bits >> 24) & 0xff)};
      out.write(bytes, 4);
    }
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<std::complex<float>> read_iq_f32(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::complex<float>> out;
  unsigned char buf[8];
  while (in.read(reinterpret_cast<char*>(buf), 8)) {
    auto decode = [](const unsigned char* b) {
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                                 (static_cast<std::uint32_t>(b[2]) << 16) |
                                 (static_cast<std::uint32_t>(b[3]) << 24);
      return std::bit_cast<float>(bits);
    };
    out.emplace_back(decode(buf), decode(buf + 4));
  }
  return out;
}

}  // namespace bdauth::phy
