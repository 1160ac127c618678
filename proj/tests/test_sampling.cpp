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
#include <map>
#include <numeric>

#include "nhnqs/errors.hpp"
#include "nhnqs/sampling.hpp"
#include "oracles.hpp"

using namespace nhnqs;

namespace {

// |Psi|^2 / Z over all basis states.
std::vector<double> exact_distribution(const Ansatz& psi) {
  const auto configs = enumerate_configs(psi.n_sites());
  std::vector<double> p;
  for (const auto& x : configs) p.push_back(std::exp(2.0 * psi.log_psi(x).log_magnitude));
  const double z = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= z;
  return p;
}

// Weighted histogram over basis indices accumulated from `calls` batches.
struct Histogram {
  std::vector<double> mass;
  std::vector<double> call_means;  // per-batch weighted means of an observable
};

Histogram collect(Sampler& sampler, const Ansatz& psi, int calls, const ModelParams& p) {
  Histogram h;
  h.mass.assign(std::size_t{1} << psi.n_sites(), 0.0);
  for (int c = 0; c < calls; ++c) {
    const SampleBatch batch = sampler.sample(psi);
    std::vector<LogAmplitude> lp;
    for (const auto& x : batch.configs) lp.push_back(psi.log_psi(x));
    const auto w = batch_weights(batch, lp);
    double mean = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      h.mass[batch.configs[k].index()] += w[k];
      mean += w[k] * diagonal_energy(batch.configs[k], p);
    }
    h.call_means.push_back(mean);
  }
  for (auto& v : h.mass) v /= calls;
  return h;
}

// Observable mean within 3 sigma of the batch-means error.
void check_energy(const Histogram& h, const Ansatz& psi, const ModelParams& p) {
  const auto exact = exact_distribution(psi);
  const auto configs = enumerate_configs(psi.n_sites());
  double ref = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) ref += exact[i] * diagonal_energy(configs[i], p);
  const double n = static_cast<double>(h.call_means.size());
  const double mean = std::accumulate(h.call_means.begin(), h.call_means.end(), 0.0) / n;
  double var = 0.0;
  for (double v : h.call_means) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / (n - 1) / n);
  CHECK(std::abs(mean - ref) < 3.0 * sigma + 1e-12);
}

// Ansatz whose amplitude vanishes everywhere.
class Vanishing : public Ansatz {
 public:
  Vanishing() : Ansatz({Architecture::kMlp, 4, 1}) {}
  LogAmplitude log_psi(const SpinConfig&) const override { return {-1000.0, 0.0}; }
  LogAmplitude log_psi_grad(const SpinConfig& x, GradVector& g) const override {
    g.resize(0);
    return log_psi(x);
  }
  std::unique_ptr<Ansatz> clone() const override { return std::make_unique<Vanishing>(*this); }
};

SamplerConfig small_config(int batch, std::uint64_t seed) {
  SamplerConfig c;
  c.batch = batch;
  c.seed = seed;
  c.burn_in = 20;
  return c;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("config validation") {
  SamplerConfig c;
  CHECK_NOTHROW(validate(c));
  c.batch = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.batch = 1;
  c.thinning = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK(make_sampler(Architecture::kRnn, {})->name() == "autoregressive");
  CHECK(make_sampler(Architecture::kRbm, {})->name() == "gibbs");
  CHECK(make_sampler(Architecture::kMlp, {})->name() == "metropolis");
  CHECK(make_sampler("metropolis", Architecture::kRbm, {})->name() == "metropolis");
  CHECK_THROWS_AS(make_sampler("hmc", Architecture::kRbm, {}), ConfigError);
}

TEST_CASE("autoregressive: uniform conditionals give uniform frequencies") {
  AnsatzConfig c{Architecture::kRnn, 2, 4};
  Rnn rnn(c);  // all-zero parameters: every conditional is 1/2
  AutoregressiveSampler s(small_config(100000, 5));
  const SampleBatch batch = s.sample(rnn);
  CHECK_FALSE(batch.reweighted());
  std::vector<double> counts(4, 0.0);
  for (const auto& x : batch.configs) counts[x.index()] += 1.0;
  const double sigma = std::sqrt(1e5 * 0.25 * 0.75);
  for (double v : counts) CHECK(std::abs(v - 25000.0) < 3.0 * sigma);
  CHECK(s.passes() == 100000);
}

TEST_CASE("autoregressive: forced conditionals are deterministic") {
  AnsatzConfig c{Architecture::kRnn, 5, 3};
  Rnn rnn(c);
  RealVector theta = rnn.params();
  for (const auto& b : rnn.layout()) {
    if (b.name == "b_out") theta(b.offset) = 1e3;
  }
  rnn.set_params(theta);
  AutoregressiveSampler s(small_config(500, 1));
  for (const auto& x : s.sample(rnn).configs) CHECK(x == SpinConfig::all_up(5));
}

TEST_CASE("autoregressive: matches the enumerated distribution") {
  AnsatzConfig c{Architecture::kRnn, 4, 6, RnnCell::kGated};
  auto psi = make_ansatz(c);
  Rng rng(13);
  RealVector theta(psi->n_params());
  for (auto& v : theta) v = rng.uniform(-1.5, 1.5);
  psi->set_params(theta);
  AutoregressiveSampler s(small_config(1000, 77));
  const ModelParams p(4, 1.0, 0.5, 0.05, Boundary::kPeriodic);
  const Histogram h = collect(s, *psi, 100, p);
  CHECK(oracle::tv_distance(h.mass, exact_distribution(*psi)) < 0.02);
  CHECK(s.passes() == 100000);
  check_energy(h, *psi, p);
}

TEST_CASE("autoregressive: PT wrapper is corrected by reweighting") {
  AnsatzConfig c{Architecture::kRnn, 4, 5};
  c.pt_symmetric = true;
  auto psi = make_ansatz(c);
  Rng rng(4);
  RealVector theta(psi->n_params());
  for (auto& v : theta) v = rng.uniform(-1.5, 1.5);
  psi->set_params(theta);
  AutoregressiveSampler s(small_config(1000, 9));
  const SampleBatch probe = s.sample(*psi);
  CHECK(probe.reweighted());
  // Proposal is the RNN's own log probability.
  const auto& rnn = dynamic_cast<const Rnn&>(psi->base());
  CHECK(probe.log_proposal[0] == doctest::Approx(rnn.log_probability(probe.configs[0])));
  const ModelParams p(4, 1.0, 0.5, 0.05, Boundary::kOpen);
  const Histogram h = collect(s, *psi, 100, p);
  CHECK(oracle::tv_distance(h.mass, exact_distribution(*psi)) < 0.03);
  check_energy(h, *psi, p);
}

TEST_CASE("gibbs: zero parameters give zero mean magnetization") {
  AnsatzConfig c{Architecture::kRbm, 4, 3};
  Rbm rbm(c);
  GibbsSampler s(small_config(1000, 3));
  double sum = 0.0, sum2 = 0.0;
  const int calls = 100;
  for (int t = 0; t < calls; ++t) {
    for (const auto& x : s.sample(rbm).configs) {
      const double m = x.magnetization();
      sum += m;
      sum2 += m * m;
    }
  }
  const double n = 1000.0 * calls;
  const double mean = sum / n;
  const double sigma = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean) < 3.0 * sigma);
}

TEST_CASE("gibbs: block update matches the two-copy transition matrix") {
  AnsatzConfig c{Architecture::kRbm, 2, 1};
  Rbm rbm(c);
  Eigen::VectorXcd a(2), b(1);
  Eigen::MatrixXcd w(2, 1);
  a << 0.3, -0.2;
  b << 0.15;
  w << 0.6, -0.4;
  rbm.set_complex(a, b, w);

  // T(x -> y) = sum_{h,h'} p(h|x) p(h'|x) p(y|h,h') on the joint
  // exp(2 a.y + (h + h')(b + W y)).
  const auto configs = enumerate_configs(2);
  auto joint = [&](const SpinConfig& y, double h1, double h2) {
    double e = 0.0;
    for (int i = 0; i < 2; ++i) e += 2.0 * a(i).real() * y[i];
    double theta = b(0).real();
    for (int i = 0; i < 2; ++i) theta += w(i, 0).real() * y[i];
    return std::exp(e + (h1 + h2) * theta);
  };
  Eigen::Matrix4d t = Eigen::Matrix4d::Zero();
  for (int xi = 0; xi < 4; ++xi) {
    for (double h1 : {-1.0, 1.0}) {
      for (double h2 : {-1.0, 1.0}) {
        double px = 0.0;
        for (double g1 : {-1.0, 1.0}) {
          for (double g2 : {-1.0, 1.0}) px += joint(configs[xi], g1, g2);
        }
        const double ph = joint(configs[xi], h1, h2) / px;
        double zy = 0.0;
        for (int yi = 0; yi < 4; ++yi) zy += joint(configs[yi], h1, h2);
        for (int yi = 0; yi < 4; ++yi) t(xi, yi) += ph * joint(configs[yi], h1, h2) / zy;
      }
    }
  }
  // The oracle itself is stochastic and balanced with respect to |Psi|^2.
  const auto pi = exact_distribution(rbm);
  for (int x = 0; x < 4; ++x) {
    CHECK(t.row(x).sum() == doctest::Approx(1.0));
    for (int y = 0; y < 4; ++y) CHECK(pi[x] * t(x, y) == doctest::Approx(pi[y] * t(y, x)).epsilon(1e-12));
  }
  // Empirical transitions from each start state.
  Rng rng(21);
  const int trials = 40000;
  for (int x = 0; x < 4; ++x) {
    std::vector<double> counts(4, 0.0);
    for (int k = 0; k < trials; ++k) {
      SpinConfig s = configs[x];
      GibbsSampler::block_update(rbm, s, rng);
      counts[s.index()] += 1.0;
    }
    for (int y = 0; y < 4; ++y) {
      const double sigma = std::sqrt(trials * t(x, y) * (1 - t(x, y)));
      CHECK(std::abs(counts[y] - trials * t(x, y)) < 4.0 * sigma + 1.0);
    }
  }
}

TEST_CASE("gibbs: strong visible bias polarizes") {
  AnsatzConfig c{Architecture::kRbm, 4, 2};
  Rbm rbm(c);
  rbm.set_complex(Eigen::VectorXcd::Constant(4, 8.0), Eigen::VectorXcd::Zero(2), Eigen::MatrixXcd::Zero(4, 2));
  GibbsSampler s(small_config(2000, 6));
  int up = 0;
  for (const auto& x : s.sample(rbm).configs) up += x == SpinConfig::all_up(4);
  CHECK(up >= 1995);
}

TEST_CASE("gibbs: real and complex parameters sample |Psi|^2") {
  const ModelParams p(4, 1.0, 0.5, 0.05, Boundary::kPeriodic);
  for (bool complex : {false, true}) {
    AnsatzConfig c{Architecture::kRbm, 4, 3};
    Rbm rbm(c);
    Rng rng(31);
    RealVector theta(rbm.n_params());
    for (auto& v : theta) v = rng.uniform(-0.8, 0.8);
    if (!complex) {
      for (const auto& b : rbm.layout()) theta.segment(b.offset + b.count(), b.count()).setZero();
    }
    rbm.set_params(theta);
    CHECK(rbm.has_imaginary_part() == complex);
    GibbsSampler s(small_config(1000, 17));
    const Histogram h = collect(s, rbm, 100, p);
    CHECK(oracle::tv_distance(h.mass, exact_distribution(rbm)) < 0.03);
    check_energy(h, rbm, p);
  }
}

TEST_CASE("gibbs: PT-wrapped RBM is reweighted") {
  AnsatzConfig c{Architecture::kRbm, 4, 3};
  c.pt_symmetric = true;
  auto psi = make_ansatz(c);
  Rng rng(2);
  RealVector theta(psi->n_params());
  for (auto& v : theta) v = rng.uniform(-0.8, 0.8);
  psi->set_params(theta);
  GibbsSampler s(small_config(1000, 8));
  const ModelParams p(4, 1.0, 0.5, 0.05, Boundary::kOpen);
  const Histogram h = collect(s, *psi, 100, p);
  CHECK(oracle::tv_distance(h.mass, exact_distribution(*psi)) < 0.03);
  check_energy(h, *psi, p);
}

TEST_CASE("metropolis: uniform ansatz always accepts") {
  AnsatzConfig c{Architecture::kMlp, 4, 3};
  Mlp mlp(c);
  MetropolisSampler s(small_config(500, 12));
  for (int t = 0; t < 10; ++t) s.sample(mlp);
  CHECK(s.acceptance_rate() == 1.0);
  // Proposal sites are uniform: chi-square with 3 degrees of freedom.
  const auto& counts = s.proposal_counts();
  REQUIRE(counts.size() == 4);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double chi2 = 0.0;
  for (auto v : counts) chi2 += (v - total / 4) * (v - total / 4) / (total / 4);
  CHECK(chi2 < 16.27);
}

TEST_CASE("metropolis: matches the enumerated distribution") {
  AnsatzConfig c{Architecture::kMlp, 4, 6};
  auto psi = make_ansatz(c);
  Rng rng(41);
  RealVector theta(psi->n_params());
  for (auto& v : theta) v = rng.uniform(-0.7, 0.7);
  psi->set_params(theta);
  MetropolisSampler s(small_config(1000, 23));
  const ModelParams p(4, 1.0, 0.5, 0.05, Boundary::kPeriodic);
  const Histogram h = collect(s, *psi, 100, p);
  CHECK(oracle::tv_distance(h.mass, exact_distribution(*psi)) < 0.03);
  check_energy(h, *psi, p);
}

TEST_CASE("metropolis: vanishing amplitude is reported") {
  Vanishing psi;
  MetropolisSampler s(small_config(4, 1));
  CHECK_THROWS_AS(s.sample(psi), ZeroAmplitudeError);
}

TEST_CASE("enumeration sampler") {
  AnsatzConfig c{Architecture::kRbm, 3, 2};
  auto psi = make_ansatz(c, 3);
  EnumerationSampler s;
  const auto batch = s.sample(*psi);
  CHECK(batch.size() == 8);
  std::vector<LogAmplitude> lp;
  for (const auto& x : batch.configs) lp.push_back(psi->log_psi(x));
  const auto w = batch_weights(batch, lp);
  const auto exact = exact_distribution(*psi);
  for (std::size_t k = 0; k < 8; ++k) CHECK(w[k] == doctest::Approx(exact[k]).epsilon(1e-12));
  AnsatzConfig big{Architecture::kRbm, 17, 2};
  CHECK_THROWS_AS(s.sample(*make_ansatz(big)), SizeError);
}

TEST_CASE("all samplers are reproducible from the seed") {
  AnsatzConfig base{Architecture::kRbm, 6, 4};
  for (const std::string kind : {"gibbs", "metropolis", "autoregressive"}) {
    AnsatzConfig c = base;
    c.architecture = kind == "autoregressive" ? Architecture::kRnn : Architecture::kRbm;
    auto psi = make_ansatz(c, 9);
    SamplerConfig sc = small_config(64, 1234);
    sc.jobs = 2;
    auto s1 = make_sampler(kind, c.architecture, sc);
    auto s2 = make_sampler(kind, c.architecture, sc);
    sc.jobs = 1;
    auto s3 = make_sampler(kind, c.architecture, sc);
    for (int t = 0; t < 3; ++t) {
      const auto a = s1->sample(*psi).configs;
      CHECK(a == s2->sample(*psi).configs);
      CHECK(a == s3->sample(*psi).configs);
    }
  }
}

}  // TEST_SUITE
