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

#include <doctest.h>

#include <cmath>
#include <random>

#include "nhnqs/errors.hpp"
#include "nhnqs/exact_diag.hpp"
#include "nhnqs/spin_model.hpp"
#include "oracles.hpp"

using namespace nhnqs;

TEST_SUITE("spin_model") {

TEST_CASE("model parameters validate their inputs") {
  CHECK_THROWS_AS(ModelParams(5, 1.0, 0.5, 0.05, Boundary::kPeriodic), InvalidConfigError);
  CHECK_NOTHROW(ModelParams(5, 1.0, 0.5, 0.05, Boundary::kOpen));
  CHECK_THROWS_AS(ModelParams(1, 1.0, 0.5, 0.05, Boundary::kOpen), InvalidConfigError);
  CHECK_THROWS_AS(ModelParams(4, 1.0, NAN, 0.05, Boundary::kOpen), InvalidConfigError);
  const auto p = ModelParams::from_eta(10, 1.6, Boundary::kPeriodic);
  CHECK(p.xi() == doctest::Approx(0.16));
  CHECK(p.bond_count() == 10);
  CHECK(ModelParams(10, 1, 1, 0, Boundary::kOpen).bond_count() == 9);
}

TEST_CASE("field alternates between g and its conjugate") {
  const ModelParams p(4, 1.0, 0.7, 0.2, Boundary::kPeriodic);
  CHECK(p.field(0) == std::complex<double>(0.7, 0.2));
  CHECK(p.field(1) == std::complex<double>(0.7, -0.2));
  CHECK(p.field(2) == p.field(0));
}

TEST_CASE("configuration index puts site 1 in the most significant bit") {
  CHECK(SpinConfig::all_up(4).index() == 0);
  CHECK(SpinConfig({-1, 1, 1, 1}).index() == 8);
  CHECK(SpinConfig({1, 1, 1, -1}).index() == 1);
  for (std::uint64_t i = 0; i < 64; ++i) CHECK(SpinConfig::from_index(6, i).index() == i);
  CHECK_THROWS_AS(SpinConfig({1, 0, 1}), InvalidConfigError);
}

TEST_CASE("reflection and global flip") {
  const SpinConfig x{1, -1, -1, 1, 1, 1};
  CHECK(x.reflected() == SpinConfig{1, 1, 1, -1, -1, 1});
  CHECK(x.spin_flipped() == SpinConfig{-1, 1, 1, -1, -1, -1});
  CHECK(x.magnetization() == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("diagonal energy of simple configurations") {
  const ModelParams pbc(4, 1.0, 0.0, 0.0, Boundary::kPeriodic);
  const ModelParams obc(4, 1.0, 0.0, 0.0, Boundary::kOpen);
  CHECK(diagonal_energy(SpinConfig::all_up(4), pbc) == -4.0);
  CHECK(diagonal_energy(SpinConfig::all_up(4), obc) == -3.0);
  CHECK(diagonal_energy(SpinConfig{1, -1, 1, -1}, pbc) == 4.0);
  CHECK(diagonal_energy(SpinConfig{1, 1, -1, -1}, pbc) == 0.0);
  CHECK_THROWS_AS(diagonal_energy(SpinConfig{1, 1}, pbc), InvalidConfigError);
}

TEST_CASE("connections carry -g on odd sites and -g* on even sites") {
  const ModelParams p(4, 1.0, 0.5, 0.3, Boundary::kOpen);
  const auto conns = connections(SpinConfig::all_up(4), p);
  REQUIRE(conns.size() == 4);
  for (int s = 0; s < 4; ++s) {
    CHECK(conns[s].site == s);
    CHECK(conns[s].target == SpinConfig::all_up(4).flipped(s));
    CHECK(conns[s].coefficient == -p.field(s));
  }
}

TEST_CASE("local energy equals (H psi)_x / psi_x for arbitrary states") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (bool periodic : {true, false}) {
    const int n = 6;
    const ModelParams p(n, 0.8, 0.6, 0.25, periodic ? Boundary::kPeriodic : Boundary::kOpen);
    const oracle::Mat h = oracle::hamiltonian(n, 0.8, 0.6, 0.25, periodic);
    Eigen::VectorXcd psi(1 << n);
    for (auto& v : psi) v = {nd(gen), nd(gen)};
    const Eigen::VectorXcd hpsi = h * psi;
    const LogPsiFn f = [&](const SpinConfig& x) { return LogAmplitude(std::log(psi(x.index()))); };
    for (std::uint64_t i = 0; i < (1u << n); ++i) {
      const auto e = local_energy(SpinConfig::from_index(n, i), f, p);
      CHECK(std::abs(e - hpsi(i) / psi(i)) < 1e-10 * (1.0 + std::abs(e)));
    }
  }
}

TEST_CASE("left and right local energies agree on eigenstates") {
  for (int n : {4, 6}) {
    for (bool periodic : {true, false}) {
      const ModelParams p(n, 1.0, 0.7, 0.15, periodic ? Boundary::kPeriodic : Boundary::kOpen);
      const Spectrum s = diagonalize(p);
      for (int k : {select_ground(s), 1, 5}) {
        const auto right = s.right_log_psi(k);
        const auto left = s.left_log_psi(k);
        double worst = 0.0;
        for (const auto& x : enumerate_configs(n)) {
          // Momentum eigenstates can vanish on some configurations by symmetry.
          const auto i = static_cast<Eigen::Index>(x.index());
          if (std::abs(s.right_vectors(i, k)) < 1e-6 || std::abs(s.left_vectors(i, k)) < 1e-6) continue;
          const auto er = local_energy(x, right, p);
          const auto el = local_energy_left(x, left, p);
          worst = std::max({worst, std::abs(er - el), std::abs(er - s.eigenvalues(k))});
        }
        CHECK(worst < 1e-10);
      }
    }
  }
}

TEST_CASE("exploding amplitude ratios are reported") {
  const ModelParams p(4, 1.0, 0.5, 0.05, Boundary::kPeriodic);
  const LogPsiFn steep = [](const SpinConfig& x) { return LogAmplitude(100.0 * x.magnetization() * 4, 0.0); };
  CHECK_THROWS_AS(local_energy(SpinConfig{-1, -1, -1, -1}, steep, p), DivergentRatioError);
  CHECK_NOTHROW(local_energy(SpinConfig::all_up(4), steep, p));
  const LogPsiFn tiny = [](const SpinConfig&) { return LogAmplitude(-400.0, 0.0); };
  CHECK_THROWS_AS(local_energy(SpinConfig::all_up(4), tiny, p), DivergentRatioError);
}

TEST_CASE("enumeration follows index order") {
  const auto all = enumerate_configs(5);
  REQUIRE(all.size() == 32);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].index() == i);
}

}  // TEST_SUITE
