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

#include "bdauth/channel_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bdauth/errors.hpp"

namespace bdauth::channel {

void LinkGeometry::validate() const {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw InvalidGeometry("link distance must be positive, got " + std::to_string(distance_m));
  }
  if (!(relative_speed_mps >= 0.0)) {
    throw InvalidGeometry("relative speed must be nonnegative");
  }
  if (!(carrier_hz > 0.0)) {
    throw InvalidGeometry("carrier frequency must be positive");
  }
}

namespace {

MultipathProfile ladder_profile(std::string name, int n_taps) {
  MultipathProfile p;
  p.name = std::move(name);
  p.tap_delays_samples.resize(n_taps);
  p.tap_amplitudes.resize(n_taps);
  double total = 0.0;
  for (int k = 0; k < n_taps; ++k) total += std::pow(10.0, -0.2 * k);
  for (int k = 0; k < n_taps; ++k) {
    p.tap_delays_samples[k] = k;
    p.tap_amplitudes[k] = std::sqrt(std::pow(10.0, -0.2 * k) / total);
  }
  return p;
}

}  // namespace

int MultipathProfile::max_delay() const {
  return tap_delays_samples.empty()
             ? 0
             : *std::max_element(tap_delays_samples.begin(), tap_delays_samples.end());
}

MultipathProfile MultipathProfile::flat() { return MultipathProfile{}; }
MultipathProfile MultipathProfile::rural() { return ladder_profile("rural", 4); }
MultipathProfile MultipathProfile::urban() { return ladder_profile("urban", 12); }

MultipathProfile MultipathProfile::by_name(const std::string& name) {
  if (name == "flat") return flat();
  if (name == "rural") return rural();
  if (name == "urban") return urban();
  throw ConfigError("unknown multipath profile '" + name + "' (expected flat, rural or urban)");
}

int max_delay(const TapResponse& taps) {
  int m = 0;
  for (const Tap& t : taps) m = std::max(m, t.delay);
  return m;
}

double total_power(const TapResponse& taps) {
  double p = 0.0;
  for (const Tap& t : taps) p += std::norm(t.gain);
  return p;
}

double path_loss_gain(const LinkGeometry& geometry) {
  if (!(geometry.distance_m > 0.0)) {
    throw InvalidGeometry("link distance must be positive, got " +
                          std::to_string(geometry.distance_m));
  }
  return 1.0e-2 * std::pow(geometry.distance_m, -geometry.path_loss_exponent);
}

double link_amplitude(const LinkGeometry& geometry) {
  return std::min(1.0, path_loss_gain(geometry));
}

double coherence_time_s(const LinkGeometry& geometry) {
  const double fd = geometry.doppler_hz();
  if (fd <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.423 / fd;
}

double step_correlation(double doppler_hz, double delta_t_s) {
  if (doppler_hz <= 0.0 || delta_t_s <= 0.0) return 1.0;
  return std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * doppler_hz * delta_t_s);
}

FadingProcess::FadingProcess(LinkGeometry geometry, MultipathProfile profile, std::uint64_t seed,
                             FadingKind kind)
    : geometry_(geometry), profile_(std::move(profile)), kind_(kind), rng_(seed) {
  geometry_.validate();
  if (profile_.tap_delays_samples.size() != profile_.tap_amplitudes.size() ||
      profile_.tap_delays_samples.empty()) {
    throw ConfigError("multipath profile needs one amplitude per tap delay");
  }
  taps_.resize(profile_.size());
  for (std::size_t k = 0; k < taps_.size(); ++k) taps_[k].delay = profile_.tap_delays_samples[k];
  redraw();
}

FadingProcess FadingProcess::with_taps(LinkGeometry geometry, MultipathProfile profile,
                                       TapResponse taps, std::uint64_t seed) {
  FadingProcess p(geometry, std::move(profile), seed, FadingKind::line_of_sight);
  p.taps_ = std::move(taps);
  return p;
}

double FadingProcess::tap_variance(std::size_t k) const {
  const double a = profile_.tap_amplitudes.at(k) * link_amplitude(geometry_);
  return a * a;
}

void FadingProcess::redraw() {
  for (std::size_t k = 0; k < taps_.size(); ++k) {
    if (kind_ == FadingKind::rayleigh) {
      taps_[k].gain = complex_normal(rng_, tap_variance(k));
    } else {
      const double phase = uniform(rng_, 0.0, 2.0 * std::numbers::pi);
      taps_[k].gain = std::polar(std::sqrt(tap_variance(k)), phase);
    }
  }
}

void FadingProcess::advance(double delta_t_s) {
  if (delta_t_s < 0.0) throw ConfigError("fading step must be nonnegative");
  if (kind_ != FadingKind::rayleigh) return;
  const double rho = step_correlation(geometry_.doppler_hz(), delta_t_s);
  if (rho == 1.0) return;
  const double innovation = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  for (std::size_t k = 0; k < taps_.size(); ++k) {
    taps_[k].gain = rho * taps_[k].gain + innovation * complex_normal(rng_, tap_variance(k));
  }
}

FadingProcess FadingProcess::evolve(double delta_t_s) const {
  FadingProcess next = *this;
  next.advance(delta_t_s);
  return next;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double NoiseModel::variance_w() const { return dbm_to_watts(noise_power_dbm); }

std::vector<cplx> awgn(const NoiseModel& noise, std::size_t n_samples, Rng& rng) {
  std::vector<cplx> out(n_samples);
  add_awgn(out, noise.variance_w(), rng);
  return out;
}

void add_awgn(std::span<cplx> samples, double variance_w, Rng& rng) {
  if (variance_w <= 0.0) return;
  std::normal_distribution<double> n(0.0, std::sqrt(variance_w / 2.0));
  for (cplx& s : samples) {
    const double re = n(rng);
    const double im = n(rng);
    s += cplx(re, im);
  }
}

}  // namespace bdauth::channel
