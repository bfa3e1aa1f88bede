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

// Ambient OFDM source, midpoint-hop backscatter modulation and the
// CP-subtraction receiver that turns a superposed signal into per-symbol
// harvested-power readings.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdauth/channel_models.hpp"
#include "bdauth/random.hpp"

namespace bdauth::phy {

using cplx = std::complex<double>;
using channel::TapResponse;

struct OfdmConfig {
  int n_subcarriers = 64;
  int cp_len = 16;
  /// 802.11a numerology: 4 us symbols with the defaults above.
  double sample_rate_hz = 20.0e6;
  double tx_power_dbm = 1.0;
  bool pilot_present = true;

  int symbol_len() const { return n_subcarriers + cp_len; }
  double symbol_duration_s() const { return symbol_len() / sample_rate_hz; }
  double tx_power_w() const;

  /// Throws ConfigError.
  void validate() const;
};

struct BasebandFrame {
  std::vector<cplx> samples;
  int n_symbols = 0;
  OfdmConfig config;

  std::span<const cplx> symbol(int k) const;
};

/// Random QPSK subcarrier loads per symbol, unitary inverse DFT, CP prepended,
/// scaled so each symbol's useful part carries the configured transmit power.
/// With pilot_present, symbol 0 carries the fixed Zadoff-Chu pilot instead.
BasebandFrame gen_ofdm_frame(const OfdmConfig& config, int n_symbols, Rng& rng);

/// Unit-power time-domain pilot symbol (CP included).
std::vector<cplx> pilot_symbol(const OfdmConfig& config);

enum class AmbientModel {
  /// Fresh random loads for every symbol.
  iid_symbols,
  /// One random data symbol drawn when the source is created and repeated.
  /// The windowed ambient power is then identical in every symbol, which is
  /// what makes same-stage power ratios channel- and payload-free.
  stationary,
};

/// The RF source as seen by one authentication session.
class AmbientSource {
 public:
  AmbientSource(OfdmConfig config, AmbientModel model, Rng& rng);

  const OfdmConfig& config() const { return config_; }
  AmbientModel model() const { return model_; }
  double tx_power_w() const { return tx_power_w_; }
  void set_tx_power_w(double watts);

  BasebandFrame frame(int n_symbols, Rng& rng) const;

 private:
  OfdmConfig config_;
  AmbientModel model_;
  double tx_power_w_;
  std::vector<cplx> data_symbol_;
  std::vector<cplx> pilot_;
};

/// y[n] = sum_k g_k x[n - d_k], truncated to the input length.
/// Throws ConfigError when a delay reaches cp_len.
std::vector<cplx> apply_multipath(std::span<const cplx> samples, const TapResponse& taps,
                                  int cp_len);

/// out[n] += (taps * x)[n] without the delay check; out.size() == x.size().
void accumulate_multipath(std::span<cplx> out, std::span<const cplx> x, const TapResponse& taps);

struct BackscatterSymbol {
  /// Power-domain reflection coefficient B; the amplitude applied is sqrt(B).
  double power_coeff = 0.0;
  int span_ofdm_symbols = 1;
};

/// Reflected baseband signal: within each OFDM symbol the incident samples
/// are scaled by sqrt(B) before the state transition at N_t/2 + offset and
/// zeroed after it. Samples past the message are zero.
/// Throws LengthError when the message does not fit; ConfigError when
/// |timing_offset| >= cp_len or a coefficient is outside [0, 1].
std::vector<cplx> backscatter_modulate(std::span<const cplx> incident,
                                       std::span<const BackscatterSymbol> message,
                                       const OfdmConfig& config, int timing_offset = 0);

/// For each OFDM symbol, y[n] - y[n + N] over n in [guard, cp_len).
/// The output has (cp_len - guard) samples per symbol.
/// Throws LengthError on a partial symbol.
std::vector<cplx> cp_subtract(std::span<const cplx> received, const OfdmConfig& config,
                              int guard = 0);

struct HarvestedPowerReading {
  double value_w = 0.0;
  std::size_t n_samples_averaged = 0;
  double harvester_efficiency = 0.7;
};

/// value_w = efficiency * mean |x|^2. Throws MeasurementError on empty input.
HarvestedPowerReading harvested_power(std::span<const cplx> signal, double efficiency = 0.7);

struct ReceiverConfig {
  channel::NoiseModel noise;
  double efficiency = 0.7;
  /// First CP sample used by the subtraction; negative means "max downlink
  /// tap delay", the first index where the CP copy is intact.
  int guard = -1;
  /// Subtract the known noise-floor contribution 2*sigma^2 from each reading.
  bool noise_compensation = true;
};

/// One backscatter transmission: the ambient frame on air and the signal the
/// tag reflects. Receivers combine both with their own channels.
struct Emission {
  BasebandFrame ambient;
  std::vector<cplx> reflected;
  int first_message_symbol = 0;
  int span_ofdm_symbols = 1;
  std::size_t n_elements = 0;
};

/// Frame layout: [pilot] [lead-in] [message symbols]; the tag stays silent
/// during the pilot and lead-in.
Emission emit_backscatter(std::span<const double> power_coeffs, const TapResponse& incident,
                          const AmbientSource& source, Rng& rng, int span_ofdm_symbols = 1,
                          int timing_offset = 0);

/// Auxiliary observations an eavesdropper can make on the same transmission.
struct SideObservation {
  /// Least-squares flat channel estimate from the downlink pilot.
  std::optional<cplx> pilot_channel_estimate;
  /// Per element: efficiency * mean |y[n+N]|^2 over the copy window (the tag
  /// is silent there), noise-compensated like the main readings.
  std::vector<double> copy_window_power;
};

std::vector<HarvestedPowerReading> receive_backscatter(const Emission& emission,
                                                       const TapResponse& inward,
                                                       const TapResponse& downlink,
                                                       const ReceiverConfig& receiver, Rng& rng,
                                                       SideObservation* side = nullptr,
                                                       std::vector<cplx>* raw_capture = nullptr);

struct LinkSnapshot {
  TapResponse incident;  // RF source -> transmitting tag
  TapResponse inward;    // transmitting tag -> receiver
  TapResponse downlink;  // RF source -> receiver
};

/// Full chain for one message: ambient frame, incident channel, backscatter,
/// inward channel plus direct path plus noise, CP subtraction and one
/// harvested-power reading per message element.
std::vector<HarvestedPowerReading> transmit_bd_message(std::span<const double> power_coeffs,
                                                       const LinkSnapshot& links,
                                                       const AmbientSource& source,
                                                       const ReceiverConfig& receiver, Rng& rng,
                                                       int span_ofdm_symbols = 1,
                                                       int timing_offset = 0);

std::vector<double> reading_values(std::span<const HarvestedPowerReading> readings);

/// Little-endian interleaved float32 I/Q, as consumed by most SDR tooling.
void write_iq_f32(const std::string& path, std::span<const cplx> samples);
std::vector<std::complex<float>> read_iq_f32(const std::string& path);

}  // namespace bdauth::phy
