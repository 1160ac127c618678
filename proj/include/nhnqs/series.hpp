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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nhnqs {

// xi as a function of eta: a fixed value, or eta * ratio (default eta / 10).
struct XiRule {
  double ratio = 0.1;
  std::optional<double> fixed;

  double operator()(double eta) const { return fixed ? *fixed : ratio * eta; }
  std::string to_string() const;
};

XiRule parse_xi_rule(const std::string& s);  // "ratio:<r>" or "<value>"

// Ground-state energy per spin, low-field series through order 12.
double e_low(double eta, double xi, double j = 1.0);
// High-field series; the second field component is the printed epsilon.
// Throws DomainError for eta <= 0.
double e_high(double eta, double xi, double j = 1.0);

enum class Branch { kLow, kHigh };

std::string to_string(Branch b);

struct SeriesPoint {
  double eta = 0.0;
  double xi = 0.0;
  double j = 1.0;
  double e_low = 0.0;
  double e_high = 0.0;  // NaN where undefined (eta <= 0)
  Branch chosen = Branch::kLow;
  double e_extrapolated = 0.0;
};

inline constexpr double kDefaultSplit = 1.5;

SeriesPoint series_point(double eta, const XiRule& rule = {}, double j = 1.0, double split = kDefaultSplit);

// Low branch for eta <= split, high branch above.
std::vector<SeriesPoint> extrapolate(const std::vector<double>& grid, const XiRule& rule = {}, double j = 1.0,
                                     double split = kDefaultSplit);

// First eta in [lo, hi] where E_low rises through E_high, located on a
// `scan_step` grid and refined by bisection.
std::optional<double> branch_crossing(double lo, double hi, const XiRule& rule = {}, double j = 1.0,
                                      double scan_step = 1e-3);

// eta, xi, e_low, e_high, chosen, e_extrapolated
void write_series_csv(std::ostream& os, const std::vector<SeriesPoint>& points);

}  // namespace nhnqs
