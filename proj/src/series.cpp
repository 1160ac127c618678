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

#include "nhnqs/series.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "nhnqs/checkpoint.hpp"
#include "nhnqs/errors.hpp"

namespace nhnqs {

std::string XiRule::to_string() const {
  return fixed ? format_double(*fixed) : "ratio:" + format_double(ratio);
}

XiRule parse_xi_rule(const std::string& s) {
  XiRule r;
  if (s.rfind("ratio:", 0) == 0) {
    r.ratio = parse_double(s.substr(6));
  } else {
    r.fixed = parse_double(s);
  }
  return r;
}

namespace {

using Real = long double;

// c * eta^p * xi^q / J^r
struct Monomial {
  Real c;
  int p;
  int q;
  int r;
};

// The low-field series, one entry per monomial.
const Monomial kLowTerms[] = {
    {-1.0L, 0, 0, -1},
    {-1.0L / 4, 2, 0, 1},
    {1.0L / 4, 0, 2, 1},
    {-1.0L / 64, 4, 0, 3},
    {-1.0L / 64, 0, 4, 3},
    {-5.0L / 32, 2, 2, 3},
    {-1.0L / 256, 6, 0, 5},
    {1.0L / 256, 0, 6, 5},
    {-7.0L / 256, 4, 2, 5},
    {7.0L / 256, 2, 4, 5},
    {-25.0L / 16384, 8, 0, 7},
    {-25.0L / 16384, 0, 8, 7},
    {-129.0L / 4096, 6, 2, 7},
    {-129.0L / 4096, 2, 6, 7},
    {-171.0L / 8192, 4, 4, 7},
    {-49.0L / 65536, 10, 0, 9},
    {49.0L / 65536, 0, 10, 9},
    {781.0L / 65536, 8, 2, 9},
    {-781.0L / 65536, 2, 8, 9},
    {-33.0L / 32768, 6, 4, 9},
    {33.0L / 32768, 4, 6, 9},
    {-441.0L / 1048576, 12, 0, 11},
    {-441.0L / 1048576, 0, 12, 11},
    {-7631.0L / 524288, 10, 2, 11},
    {-7631.0L / 524288, 2, 10, 11},
    {-18551.0L / 1048576, 8, 4, 11},
    {-18551.0L / 1048576, 4, 8, 11},
    {-7241.0L / 262144, 6, 6, 11},
};

Real ipow(Real x, int n) {
  Real r = 1.0L;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

}  // namespace

double e_low(double eta, double xi, double j) {
  if (j == 0.0) throw DomainError("low-field series needs J != 0");
  const Real e = eta;
  const Real x = xi;
  const Real jj = j;
  Real sum = 0.0L;
  for (const auto& m : kLowTerms) {
    const Real jp = m.r >= 0 ? 1.0L / ipow(jj, m.r) : ipow(jj, -m.r);
    sum += m.c * ipow(e, m.p) * ipow(x, m.q) * jp;
  }
  return static_cast<double>(sum);
}

double e_high(double eta, double xi, double j) {
  if (!(eta > 0.0)) throw DomainError("high-field series needs eta > 0");
  const Real e = eta;
  const Real x2 = static_cast<Real>(xi) * xi;
  const Real e2 = e * e;
  const Real s = e2 + x2;
  const Real j2 = static_cast<Real>(j) * j;
  Real sum = -e - j2 / (4 * e);
  sum -= ipow(j2, 2) * (e2 - 3 * x2) / (64 * ipow(e, 3) * s);
  sum -= ipow(j2, 3) * (e2 + 5 * x2) / (256 * ipow(e, 5) * s);
  sum -= ipow(j2, 4) * (25 * ipow(e2, 3) - 269 * ipow(e2, 2) * x2 - 405 * e2 * x2 * x2 - 175 * ipow(x2, 3)) /
         (16384 * ipow(e, 7) * ipow(s, 3));
  sum -= ipow(j2, 5) * (49 * ipow(e2, 3) + 715 * ipow(e2, 2) * x2 + 1043 * e2 * x2 * x2 + 441 * ipow(x2, 3)) /
         (65536 * ipow(e, 9) * ipow(s, 3));
  return static_cast<double>(sum);
}

std::string to_string(Branch b) { return b == Branch::kLow ? "low" : "high"; }

SeriesPoint series_point(double eta, const XiRule& rule, double j, double split) {
  SeriesPoint pt;
  pt.eta = eta;
  pt.xi = rule(eta);
  pt.j = j;
  pt.e_low = e_low(eta, pt.xi, j);
  pt.e_high = eta > 0.0 ? e_high(eta, pt.xi, j) : std::numeric_limits<double>::quiet_NaN();
  pt.chosen = eta <= split ? Branch::kLow : Branch::kHigh;
  pt.e_extrapolated = pt.chosen == Branch::kLow ? pt.e_low : pt.e_high;
  return pt;
}

std::vector<SeriesPoint> extrapolate(const std::vector<double>& grid, const XiRule& rule, double j, double split) {
  std::vector<SeriesPoint> out;
  out.reserve(grid.size());
  for (double eta : grid) out.push_back(series_point(eta, rule, j, split));
  return out;
}

std::optional<double> branch_crossing(double lo, double hi, const XiRule& rule, double j, double scan_step) {
  auto diff = [&](double eta) { return e_low(eta, rule(eta), j) - e_high(eta, rule(eta), j); };
  lo = std::max(lo, scan_step);
  double prev_eta = lo;
  double prev = diff(lo);
  const auto count = static_cast<long>(std::ceil((hi - lo) / scan_step));
  for (long k = 1; k <= count; ++k) {
    const double eta = std::min(hi, lo + static_cast<double>(k) * scan_step);
    const double d = diff(eta);
    if (prev < 0.0 && d >= 0.0) {
      double a = prev_eta;
      double b = eta;
      for (int it = 0; it < 100 && b - a > 1e-14; ++it) {
        const double mid = 0.5 * (a + b);
        (diff(mid) < 0.0 ? a : b) = mid;
      }
      return 0.5 * (a + b);
    }
    prev = d;
    prev_eta = eta;
  }
  return std::nullopt;
}

void write_series_csv(std::ostream& os, const std::vector<SeriesPoint>& points) {
  os << "eta,xi,e_low,e_high,chosen,e_extrapolated\n" << std::setprecision(15);
  for (const auto& p : points) {
    os << p.eta << ',' << p.xi << ',' << p.e_low << ',';
    if (std::isnan(p.e_high)) {
      os << "nan";
    } else {
      os << p.e_high;
    }
    os << ',' << to_string(p.chosen) << ',' << p.e_extrapolated << '\n';
  }
}

}  // namespace nhnqs
