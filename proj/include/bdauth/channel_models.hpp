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

// Large-scale gain, time-correlated small-scale fading and receiver noise
// for every link of a backscatter scenario.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bdauth/random.hpp"

namespace bdauth::channel {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 2.99792458e8;

struct LinkGeometry {
  double distance_m = 1.0;
  double path_loss_exponent = 2.0;
  double relative_speed_mps = 0.0;
  double carrier_hz = 9.0e8;

  double doppler_hz() const { return relative_speed_mps * carrier_hz / kSpeedOfLight; }
  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }

  /// Throws InvalidGeometry.
  void validate() const;
};

enum class PhaseMode { random_per_drop };

struct MultipathProfile {
  std::string name = "flat";
  std::vector<int> tap_delays_samples{0};
  std::vector<double> tap_amplitudes{1.0};
  PhaseMode phase_mode = PhaseMode::random_per_drop;

  int max_delay() const;
  std::size_t size() const { return tap_delays_samples.size(); }

  static MultipathProfile flat();
  /// 4 taps at delays 0..3, power ladder falling 2 dB per tap, unit total power.
  static MultipathProfile rural();
  /// 12 taps at delays 0..11, same ladder.
  static MultipathProfile urban();
  /// "flat" | "rural" | "urban"; throws ConfigError otherwise.
  static MultipathProfile by_name(const std::string& name);
};

struct Tap {
  int delay = 0;
  cplx gain{0.0, 0.0};
};
using TapResponse = std::vector<Tap>;

int max_delay(const TapResponse& taps);
double total_power(const TapResponse& taps);

enum class FadingKind {
  rayleigh,
  /// Fixed magnitude, random phase per drop, no temporal evolution.
  line_of_sight,
};

/// Table III large-scale amplitude gain 1e-2 * d^-exponent.
/// Throws InvalidGeometry for non-positive distance.
double path_loss_gain(const LinkGeometry& geometry);

/// Amplitude scale applied to simulated taps: path_loss_gain capped at 1,
/// since a passive link cannot deliver more power than it receives.
double link_amplitude(const LinkGeometry& geometry);

/// Clarke/Jakes rule 0.423 / f_d; +infinity for a static link.
double coherence_time_s(const LinkGeometry& geometry);

/// First-order Gauss-Markov correlation J0(2 pi f_d dt) for one step.
double step_correlation(double doppler_hz, double delta_t_s);

/// Per-tap complex gains of one link, evolving in time.
///
/// Each tap k is CN(0, (a_k * g)^2) marginally, where a_k is the profile
/// amplitude and g = link_amplitude(geometry). Instances are independent and
/// own their random stream.
class FadingProcess {
 public:
  FadingProcess(LinkGeometry geometry, MultipathProfile profile, std::uint64_t seed,
                FadingKind kind = FadingKind::rayleigh);

  /// Process whose taps are fixed to the given values (used to place a
  /// receiver inside the coherence distance of another one).
  static FadingProcess with_taps(LinkGeometry geometry, MultipathProfile profile, TapResponse taps,
                                 std::uint64_t seed);

  const LinkGeometry& geometry() const { return geometry_; }
  const MultipathProfile& profile() const { return profile_; }
  FadingKind kind() const { return kind_; }
  const TapResponse& taps() const { return taps_; }

  /// Expected power of tap k.
  double tap_variance(std::size_t k) const;

  /// Gauss-Markov step with correlation J0(2 pi f_d dt); dt = 0 or a static
  /// link leaves the taps untouched.
  FadingProcess evolve(double delta_t_s) const;
  void advance(double delta_t_s);

  /// Fresh independent drop of every tap (advances the stream).
  void redraw();

 private:
  LinkGeometry geometry_;
  MultipathProfile profile_;
  FadingKind kind_;
  TapResponse taps_;
  Rng rng_;
};

struct NoiseModel {
  double noise_power_dbm = -30.0;
  double variance_w() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// n i.i.d. CN(0, sigma^2) samples.
std::vector<cplx> awgn(const NoiseModel& noise, std::size_t n_samples, Rng& rng);

/// In-place x[i] += CN(0, variance).
void add_awgn(std::span<cplx> samples, double variance_w, Rng& rng);

}  // namespace bdauth::channel
