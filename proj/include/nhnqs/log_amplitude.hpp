// Copyright 2026 The nhnqs Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>

namespace nhnqs {

// log Psi(x) split into log-magnitude and phase (radians).
struct LogAmplitude {
  double log_magnitude = 0.0;
  double phase = 0.0;

  LogAmplitude() = default;
  LogAmplitude(double log_mag, double ph) : log_magnitude(log_mag), phase(ph) {}
  explicit LogAmplitude(std::complex<double> z) : log_magnitude(z.real()), phase(z.imag()) {}

  std::complex<double> value() const { return {log_magnitude, phase}; }
  std::complex<double> amplitude() const { return std::exp(value()); }
  bool finite() const { return std::isfinite(log_magnitude) && std::isfinite(phase); }
};

// Phase difference reduced to (-pi, pi].
inline double phase_distance(double a, double b) {
  const double two_pi = 2.0 * M_PI;
  double d = std::fmod(a - b, two_pi);
  if (d > M_PI) d -= two_pi;
  if (d <= -M_PI) d += two_pi;
  return d;
}

}  // namespace nhnqs
