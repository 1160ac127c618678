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

#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "nhnqs/log_amplitude.hpp"

namespace nhnqs {

enum class Boundary { kPeriodic, kOpen };

std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& s);

// Couplings and staggered complex field of the chain
//   H = -J sum_j z_j z_{j+1} - g sum_{j in A} x_j - g* sum_{j in B} x_j,
// with g = eta + i xi. Sites are 1-based in the physics convention and
// sublattice A holds the odd sites; storage is 0-based, so A = even index.
class ModelParams {
 public:
  ModelParams(int n, double j, double eta, double xi, Boundary boundary);

  // Weak non-Hermiticity regime xi = eta / 10.
  static ModelParams from_eta(int n, double eta, Boundary boundary, double j = 1.0);

  int n() const { return n_; }
  double j() const { return j_; }
  double eta() const { return eta_; }
  double xi() const { return xi_; }
  Boundary boundary() const { return boundary_; }

  std::complex<double> g() const { return {eta_, xi_}; }
  // Transverse field acting on 0-based site `site`.
  std::complex<double> field(int site) const { return site % 2 == 0 ? g() : std::conj(g()); }
  bool on_sublattice_a(int site) const { return site % 2 == 0; }
  int bond_count() const { return boundary_ == Boundary::kPeriodic ? n_ : n_ - 1; }

  ModelParams with_field(double eta, double xi) const { return {n_, j_, eta, xi, boundary_}; }

  bool operator==(const ModelParams&) const = default;

 private:
  int n_;
  double j_;
  double eta_;
  double xi_;
  Boundary boundary_;
};

// Spins in the z basis, entries strictly +1 / -1.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::vector<std::int8_t> spins);
  SpinConfig(std::initializer_list<int> spins);

  // Basis state with lexicographic index: site 1 is the most significant bit
  // and a set bit means spin down, so index 0 is all-up.
  static SpinConfig from_index(int n, std::uint64_t index);
  static SpinConfig all_up(int n) { return from_index(n, 0); }

  std::uint64_t index() const;
  int size() const { return static_cast<int>(spins_.size()); }
  std::int8_t operator[](int i) const { return spins_[static_cast<std::size_t>(i)]; }
  std::span<const std::int8_t> spins() const { return spins_; }

  void flip(int site) { spins_[static_cast<std::size_t>(site)] = static_cast<std::int8_t>(-spins_[static_cast<std::size_t>(site)]); }
  SpinConfig flipped(int site) const;
  // Spatial reflection i <-> N - i + 1.
  SpinConfig reflected() const;
  SpinConfig spin_flipped() const;

  // N^-1 sum_i x_i.
  double magnetization() const;

  // Raw bytes, usable as a hash-map key.
  std::string key() const { return {reinterpret_cast<const char*>(spins_.data()), spins_.size()}; }
  std::string to_string() const;

  bool operator==(const SpinConfig&) const = default;

 private:
  std::vector<std::int8_t> spins_;
};

// One off-diagonal matrix element <target|H|source>.
struct Connection {
  SpinConfig target;
  int site = 0;
  std::complex<double> coefficient;
};

using LogPsiFn = std::function<LogAmplitude(const SpinConfig&)>;

// Ratios exp(dlog) with Re(dlog) above this are treated as divergent.
inline constexpr double kMaxLogRatio = 60.0;
// log|Psi(x)| below this is treated as a vanishing amplitude.
inline constexpr double kLogAmplitudeFloor = -300.0;

void check_config(const SpinConfig& x, const ModelParams& p);

// -J sum_bonds x_j x_{j+1}.
double diagonal_energy(const SpinConfig& x, const ModelParams& p);

// One single-flip connection per site: -g on sublattice A, -g* on B.
std::vector<Connection> connections(const SpinConfig& x, const ModelParams& p);

// <x|H|Psi> / <x|Psi>.
std::complex<double> local_energy(const SpinConfig& x, const LogPsiFn& log_psi, const ModelParams& p);

// <Psi_L|H|x> / <Psi_L|x> with log_psi_left(x) = log <Psi_L|x>. H equals its
// transpose in the z basis, so the same coefficient table applies.
std::complex<double> local_energy_left(const SpinConfig& x, const LogPsiFn& log_psi_left,
                                       const ModelParams& p);

// Every basis state of an n-site chain in index order.
std::vector<SpinConfig> enumerate_configs(int n);

}  // namespace nhnqs
