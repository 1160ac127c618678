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

#include "nhnqs/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhnqs/errors.hpp"

namespace nhnqs {

std::string to_string(Boundary b) { return b == Boundary::kPeriodic ? "pbc" : "obc"; }

Boundary parse_boundary(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "pbc" || lower == "periodic") return Boundary::kPeriodic;
  if (lower == "obc" || lower == "open") return Boundary::kOpen;
  throw ConfigError("unknown boundary condition '" + s + "' (expected pbc or obc)");
}

ModelParams::ModelParams(int n, double j, double eta, double xi, Boundary boundary)
    : n_(n), j_(j), eta_(eta), xi_(xi), boundary_(boundary) {
  if (n < 2) throw InvalidConfigError("model needs N >= 2 sites, got " + std::to_string(n));
  if (!std::isfinite(j) || !std::isfinite(eta) || !std::isfinite(xi)) {
    throw InvalidConfigError("model couplings must be finite");
  }
  // The staggered field is only consistent on a bipartite ring.
  if (boundary == Boundary::kPeriodic && n % 2 != 0) {
    throw InvalidConfigError("odd N = " + std::to_string(n) + " is not bipartite under PBC");
  }
}

ModelParams ModelParams::from_eta(int n, double eta, Boundary boundary, double j) {
  return {n, j, eta, eta / 10.0, boundary};
}

SpinConfig::SpinConfig(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
  for (auto s : spins_) {
    if (s != 1 && s != -1) throw InvalidConfigError("spin values must be +1 or -1");
  }
}

SpinConfig::SpinConfig(std::initializer_list<int> spins) {
  spins_.reserve(spins.size());
  for (int s : spins) {
    if (s != 1 && s != -1) throw InvalidConfigError("spin values must be +1 or -1");
    spins_.push_back(static_cast<std::int8_t>(s));
  }
}

SpinConfig SpinConfig::from_index(int n, std::uint64_t index) {
  if (n < 1 || n > 63) throw InvalidConfigError("index encoding supports 1..63 sites");
  std::vector<std::int8_t> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    s[static_cast<std::size_t>(i)] = ((index >> (n - 1 - i)) & 1U) ? -1 : 1;
  }
  SpinConfig c;
  c.spins_ = std::move(s);
  return c;
}

std::uint64_t SpinConfig::index() const {
  if (spins_.size() > 63) throw InvalidConfigError("index encoding supports at most 63 sites");
  std::uint64_t idx = 0;
  for (auto s : spins_) idx = (idx << 1) | (s < 0 ? 1U : 0U);
  return idx;
}

SpinConfig SpinConfig::flipped(int site) const {
  SpinConfig c = *this;
  c.flip(site);
  return c;
}

SpinConfig SpinConfig::reflected() const {
  SpinConfig c = *this;
  std::reverse(c.spins_.begin(), c.spins_.end());
  return c;
}

SpinConfig SpinConfig::spin_flipped() const {
  SpinConfig c = *this;
  for (auto& s : c.spins_) s = static_cast<std::int8_t>(-s);
  return c;
}

double SpinConfig::magnetization() const {
  int sum = 0;
  for (auto s : spins_) sum += s;
  return static_cast<double>(sum) / static_cast<double>(spins_.size());
}

std::string SpinConfig::to_string() const {
  std::string out;
  out.reserve(spins_.size());
  for (auto s : spins_) out.push_back(s > 0 ? '+' : '-');
  return out;
}

void check_config(const SpinConfig& x, const ModelParams& p) {
  if (x.size() != p.n()) {
    throw InvalidConfigError("configuration has " + std::to_string(x.size()) + " sites, model has " +
                             std::to_string(p.n()));
  }
}

double diagonal_energy(const SpinConfig& x, const ModelParams& p) {
  check_config(x, p);
  const int n = p.n();
  int sum = 0;
  for (int b = 0; b < p.bond_count(); ++b) sum += x[b] * x[(b + 1) % n];
  return -p.j() * sum;
}

std::vector<Connection> connections(const SpinConfig& x, const ModelParams& p) {
  check_config(x, p);
  std::vector<Connection> out;
  out.reserve(static_cast<std::size_t>(p.n()));
  for (int site = 0; site < p.n(); ++site) {
    out.push_back({x.flipped(site), site, -p.field(site)});
  }
  return out;
}

namespace {

std::complex<double> ratio_sum(const SpinConfig& x, const LogPsiFn& log_psi, const ModelParams& p) {
  const LogAmplitude here = log_psi(x);
  if (!here.finite() || here.log_magnitude < kLogAmplitudeFloor) {
    throw DivergentRatioError("amplitude underflow at configuration " + x.to_string());
  }
  std::complex<double> sum = diagonal_energy(x, p);
  SpinConfig target = x;
  for (int site = 0; site < p.n(); ++site) {
    target.flip(site);
    const std::complex<double> dlog = log_psi(target).value() - here.value();
    target.flip(site);
    if (!std::isfinite(dlog.imag()) || std::isnan(dlog.real()) || dlog.real() > kMaxLogRatio) {
      throw DivergentRatioError("divergent amplitude ratio at configuration " + x.to_string() +
                                " (flip site " + std::to_string(site + 1) + ")");
    }
    sum += -p.field(site) * std::exp(dlog);
  }
  return sum;
}

}  // namespace

std::complex<double> local_energy(const SpinConfig& x, const LogPsiFn& log_psi, const ModelParams& p) {
  return ratio_sum(x, log_psi, p);
}

std::complex<double> local_energy_left(const SpinConfig& x, const LogPsiFn& log_psi_left,
                                       const ModelParams& p) {
  return ratio_sum(x, log_psi_left, p);
}

std::vector<SpinConfig> enumerate_configs(int n) {
  std::vector<SpinConfig> out;
  const std::uint64_t dim = std::uint64_t{1} << n;
  out.reserve(dim);
  for (std::uint64_t i = 0; i < dim; ++i) out.push_back(SpinConfig::from_index(n, i));
  return out;
}

}  // namespace nhnqs
