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
#include <sstream>

#include "nhnqs/errors.hpp"
#include "nhnqs/exact_diag.hpp"
#include "nhnqs/vmc.hpp"
#include "oracles.hpp"

using namespace nhnqs;

namespace {

std::vector<LogAmplitude> real_logs(std::initializer_list<double> v) {
  std::vector<LogAmplitude> out;
  for (double x : v) out.emplace_back(x, 0.0);
  return out;
}

Eigen::VectorXcd amplitudes(const Ansatz& psi) {
  const auto configs = enumerate_configs(psi.n_sites());
  Eigen::VectorXcd v(static_cast<Eigen::Index>(configs.size()));
  for (std::size_t i = 0; i < configs.size(); ++i) v(static_cast<Eigen::Index>(i)) = psi.log_psi(configs[i]).amplitude();
  return v;
}

RealVector random_params(Eigen::Index n, Rng& rng, double scale) {
  RealVector theta(n);
  for (auto& v : theta) v = rng.uniform(-scale, scale);
  return theta;
}

// Toy network with one parameter and a hand-set amplitude.
class Spike : public Ansatz {
 public:
  explicit Spike(double height, bool nan_gradient = false)
      : Ansatz({Architecture::kMlp, 4, 1}), height_(height), nan_(nan_gradient) {
    add_block("c", 1, 1);
  }
  LogAmplitude log_psi(const SpinConfig& x) const override {
    return {x == SpinConfig::all_up(4) ? height_ : 0.0, 0.0};
  }
  LogAmplitude log_psi_grad(const SpinConfig& x, GradVector& g) const override {
    g = GradVector::Constant(1, nan_ ? std::nan("") : 0.0);
    return log_psi(x);
  }
  std::unique_ptr<Ansatz> clone() const override { return std::make_unique<Spike>(*this); }

 private:
  double height_;
  bool nan_;
};

TrainConfig quick_config(int steps, double lr) {
  TrainConfig c;
  c.steps = steps;
  c.learning_rate = lr;
  c.eval_batches = 1;
  return c;
}

SamplerConfig sampler_config(int batch, std::uint64_t seed) {
  SamplerConfig c;
  c.batch = batch;
  c.seed = seed;
  c.burn_in = 20;
  return c;
}

}  // namespace

TEST_SUITE("vmc") {

TEST_CASE("real-part loss examples") {
  CHECK(loss_real(real_logs({0.0, 1.0}), std::vector<std::complex<double>>{0.0, 2.0}) == doctest::Approx(0.5));
  CHECK(loss_real(real_logs({0.3, -1.0, 2.0}), std::vector<std::complex<double>>{1.5, 1.5, 1.5}) == 0.0);
  CHECK_THROWS_AS(loss_real(real_logs({0.0}), std::vector<std::complex<double>>{1.0}), InvalidConfigError);

  std::vector<GradVector> derivs(3, GradVector::Constant(2, {0.7, -0.2}));
  derivs[1](0) = {0.1, 5.0};
  CHECK(loss_gradient(derivs, {2.0, 2.0, 2.0}, {0.2, 0.3, 0.5}).isZero(0.0));
  // 2 sum w (T - <T>) Re O with <T> = 1.
  const RealVector g = loss_gradient(derivs, {0.0, 2.0, 1.0}, {0.25, 0.25, 0.5});
  CHECK(g(0) == doctest::Approx(2 * (0.25 * -1 * 0.7 + 0.25 * 1 * 0.1)));
  CHECK(g(1) == doctest::Approx(2 * (0.25 * -1 * 0.7 + 0.25 * 1 * 0.7)));
}

TEST_CASE("regularizer examples") {
  const std::vector<std::complex<double>> e{{1.0, 0.4}, {2.0, 0.6}};
  CHECK(regularize(1.0, e, 0.0) == 1.0);
  CHECK(regularize(1.0, e, 0.1) == doctest::Approx(1.05));
  CHECK(regularize(1.0, {{1.0, 0.0}, {-3.0, 0.0}}, 0.1) == 1.0);
  CHECK(regularize(1.0, {{0.0, -0.5}, {0.0, -0.5}}, 0.1) == doctest::Approx(1.05));
  CHECK(parse_regularizer("re-variance") == Regularizer::kReVariance);
  CHECK_THROWS_AS(parse_regularizer("l2"), ConfigError);
}

TEST_CASE("Adam") {
  RealVector p = RealVector::Constant(3, 0.5);
  Adam adam(3, 0.01);
  adam.step(p, RealVector::Zero(3));
  CHECK(p == RealVector::Constant(3, 0.5));

  RealVector q = RealVector::Zero(1);
  Adam a1(1, 0.01);
  a1.step(q, RealVector::Constant(1, 1.0));
  CHECK(q(0) == doctest::Approx(-0.0099999999).epsilon(1e-9));
  a1.step(q, RealVector::Constant(1, -0.5));
  // Hand-computed: m = 0.04, v = 0.001249 after two steps.
  CHECK(a1.first_moment()(0) == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(a1.second_moment()(0) == doctest::Approx(0.001249).epsilon(1e-14));
  CHECK(q(0) == doctest::Approx(-0.012663370262909694).epsilon(1e-12));
  CHECK(a1.steps() == 2);
}

TEST_CASE("target functionals") {
  const std::complex<double> e(-2.0, 0.5);
  CHECK(parse_target("min-re")(e) == -2.0);
  CHECK(parse_target("max-re")(e) == 2.0);
  CHECK(parse_target("min-im")(e) == 0.5);
  CHECK(parse_target("max-im")(e) == -0.5);
  CHECK(parse_target("min-abs")(e) == doctest::Approx(std::sqrt(4.25)));
  CHECK(parse_target("max-abs")(e) == doctest::Approx(-std::sqrt(4.25)));
  CHECK(parse_target("weighted:2,-1")(e) == doctest::Approx(-4.5));
  CHECK(parse_target("max-abs").name() == "max-abs");
  CHECK_THROWS_AS(parse_target("median"), ConfigError);
  CHECK_THROWS_AS(parse_target("weighted:1"), ConfigError);
}

TEST_CASE("train config validation") {
  TrainConfig c;
  CHECK_NOTHROW(validate(c));
  c.steps = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.alpha = -0.1;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("enumerated local energy is unbiased") {
  Rng rng(3);
  for (bool periodic : {true, false}) {
    const int n = 6;
    const ModelParams p(n, 1.0, 0.8, 0.3, periodic ? Boundary::kPeriodic : Boundary::kOpen);
    for (Architecture a : {Architecture::kRbm, Architecture::kMlp}) {
      auto psi = make_ansatz({a, n, 5});
      psi->set_params(random_params(psi->n_params(), rng, 0.4));
      EnumerationSampler s;
      const auto ev = evaluate_batch(*psi, p, s.sample(*psi), false);
      const Eigen::VectorXcd v = amplitudes(*psi);
      const oracle::Mat h = oracle::hamiltonian(n, 1.0, 0.8, 0.3, periodic);
      const std::complex<double> ref = v.dot(h * v) / v.squaredNorm();
      CHECK(std::abs(ev.mean_eloc() - ref) < 1e-10);
      CHECK(ev.var_re_eloc() >= 0.0);
    }
  }
}

TEST_CASE("gradient equals the derivative of the frozen reweighted estimate") {
  // E(theta) = sum_k w_k(theta) T_k with T frozen at theta0 and w
  // self-normalized against the frozen proposal.
  const ModelParams p(4, 1.0, 0.7, 0.25, Boundary::kPeriodic);
  AnsatzConfig c{Architecture::kRbm, 4, 3};
  auto psi = make_ansatz(c);
  Rng rng(5);
  psi->set_params(random_params(psi->n_params(), rng, 0.5));
  GibbsSampler sampler(sampler_config(200, 4));
  SampleBatch batch = sampler.sample(*psi);
  batch.log_proposal.clear();
  for (const auto& x : batch.configs) batch.log_proposal.push_back(2.0 * psi->log_psi(x).log_magnitude + 0.3);

  const auto ev = evaluate_batch(*psi, p, batch, true);
  const double alpha = 0.1;
  const double sign = ev.mean_eloc().imag() > 0 ? 1.0 : -1.0;
  std::vector<double> targets;
  for (const auto& e : ev.eloc) targets.push_back(e.real() + alpha * sign * e.imag());
  const RealVector grad = loss_gradient(ev.log_derivs, targets, ev.weights);

  auto estimate = [&](const RealVector& theta) {
    auto q = psi->clone();
    q->set_params(theta);
    double z = 0.0, num = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const double w = std::exp(2.0 * q->log_psi(batch.configs[k]).log_magnitude - batch.log_proposal[k]);
      z += w;
      num += w * targets[k];
    }
    return num / z;
  };
  const RealVector theta = psi->params();
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    RealVector tp = theta, tm = theta;
    tp(k) += h;
    tm(k) -= h;
    const double fd = (estimate(tp) - estimate(tm)) / (2 * h);
    CHECK(std::abs(fd - grad(k)) <= 1e-4 * std::abs(grad(k)) + 1e-8);
  }
}

TEST_CASE("gradient equals the Rayleigh-quotient derivative in the Hermitian limit") {
  const ModelParams p(4, 1.0, 0.9, 0.0, Boundary::kOpen);
  const oracle::Mat h = oracle::hamiltonian(4, 1.0, 0.9, 0.0, false);
  auto psi = make_ansatz({Architecture::kRnn, 4, 4});
  Rng rng(6);
  psi->set_params(random_params(psi->n_params(), rng, 0.8));
  EnumerationSampler s;
  const auto ev = evaluate_batch(*psi, p, s.sample(*psi), true);
  std::vector<double> targets;
  for (const auto& e : ev.eloc) targets.push_back(e.real());
  const RealVector grad = loss_gradient(ev.log_derivs, targets, ev.weights);

  auto rayleigh = [&](const RealVector& theta) {
    auto q = psi->clone();
    q->set_params(theta);
    const Eigen::VectorXcd v = amplitudes(*q);
    return (v.dot(h * v) / v.squaredNorm()).real();
  };
  const RealVector theta = psi->params();
  const double step = 1e-6;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    RealVector tp = theta, tm = theta;
    tp(k) += step;
    tm(k) -= step;
    const double fd = (rayleigh(tp) - rayleigh(tm)) / (2 * step);
    CHECK(std::abs(fd - grad(k)) <= 1e-4 * std::abs(grad(k)) + 1e-8);
  }
}

TEST_CASE("an exact eigenstate is a zero-variance fixed point") {
  const ModelParams p(4, 1.0, 0.8, 0.08, Boundary::kPeriodic);
  const Spectrum spec = diagonalize(p);
  const int g = select_ground(spec);
  Eigen::VectorXcd target = spec.right_vectors.col(g);
  Eigen::Index top;
  target.cwiseAbs().maxCoeff(&top);
  target *= std::abs(target(top)) / target(top);

  // Gauss-Newton fit of log Psi + c to the log of the eigenvector.
  Rbm rbm({Architecture::kRbm, 4, 8});
  Rng rng(9);
  rbm.set_params(random_params(rbm.n_params(), rng, 0.1));
  const auto configs = enumerate_configs(4);
  const Eigen::Index np = rbm.n_params();
  std::complex<double> c = 0.0;
  double residual = 1.0;
  for (int it = 0; it < 100 && residual > 1e-13; ++it) {
    Eigen::MatrixXd a(32, np + 2);
    Eigen::VectorXd r(32);
    for (int i = 0; i < 16; ++i) {
      GradVector grad;
      const auto lp = rbm.log_psi_grad(configs[i], grad).value() + c;
      const auto t = std::log(target(i));
      r(i) = lp.real() - t.real();
      r(16 + i) = phase_distance(lp.imag(), t.imag());
      a.row(i) << grad.real().transpose(), 1.0, 0.0;
      a.row(16 + i) << grad.imag().transpose(), 0.0, 1.0;
    }
    residual = r.norm();
    const Eigen::VectorXd delta = a.completeOrthogonalDecomposition().solve(-r);
    rbm.set_params(rbm.params() + delta.head(np));
    c += std::complex<double>(delta(np), delta(np + 1));
  }
  REQUIRE(residual < 1e-10);

  EnumerationSampler s;
  const auto ev = evaluate_batch(rbm, p, s.sample(rbm), true);
  CHECK(std::abs(ev.mean_eloc() - spec.eigenvalues(g)) < 1e-8);
  CHECK(ev.var_re_eloc() < 1e-16);
  std::vector<double> targets;
  const double sign = ev.mean_eloc().imag() > 0 ? 1.0 : -1.0;
  for (const auto& e : ev.eloc) targets.push_back(e.real() + 0.1 * sign * e.imag());
  CHECK(loss_gradient(ev.log_derivs, targets, ev.weights).norm() < 1e-8);
}

TEST_CASE("classical point converges to -J per spin") {
  const ModelParams p(6, 1.0, 0.0, 0.0, Boundary::kPeriodic);
  auto psi = make_ansatz({Architecture::kRbm, 6, 6}, 1);
  GibbsSampler s(sampler_config(256, 2));
  const TrainResult r = train(*psi, p, s, quick_config(300, 0.05));
  CHECK(r.final_estimate.energy.real() / 6 == doctest::Approx(-1.0).epsilon(0.02));
  CHECK(r.final_estimate.abs_magnetization > 0.95);
  CHECK(r.records.size() == 300);
  CHECK(r.skipped_steps == 0);
}

TEST_CASE("max-Re on -H reproduces min-Re on H bit for bit") {
  const ModelParams p(6, 1.0, 0.9, 0.2, Boundary::kPeriodic);
  const ModelParams neg(6, -1.0, -0.9, -0.2, Boundary::kPeriodic);
  auto a = make_ansatz({Architecture::kMlp, 6, 5}, 3);
  auto b = a->clone();
  MetropolisSampler sa(sampler_config(128, 7)), sb(sampler_config(128, 7));
  TrainConfig ca = quick_config(15, 0.02);
  TrainConfig cb = ca;
  cb.target = parse_target("max-re");
  const auto ra = train(*a, p, sa, ca);
  const auto rb = train(*b, neg, sb, cb);
  CHECK(a->params() == b->params());
  for (std::size_t k = 0; k < ra.records.size(); ++k) {
    CHECK(ra.records[k].mean_re_eloc == -rb.records[k].mean_re_eloc);
    CHECK(ra.records[k].var_re_eloc == rb.records[k].var_re_eloc);
  }
}

TEST_CASE("min-Abs concentrates on the zero-energy sector") {
  const ModelParams p(4, 1.0, 0.0, 0.0, Boundary::kPeriodic);
  auto psi = make_ansatz({Architecture::kMlp, 4, 8}, 5);
  MetropolisSampler s(sampler_config(256, 5));
  TrainConfig c = quick_config(300, 0.03);
  c.target = parse_target("min-abs");
  train(*psi, p, s, c);
  const auto configs = enumerate_configs(4);
  double zero = 0.0, total = 0.0;
  for (const auto& x : configs) {
    const double w = std::exp(2.0 * psi->log_psi(x).log_magnitude);
    total += w;
    if (diagonal_energy(x, p) == 0.0) zero += w;
  }
  CHECK(zero / total > 0.95);
}

TEST_CASE("training is deterministic") {
  const ModelParams p(6, 1.0, 1.2, 0.12, Boundary::kOpen);
  for (Architecture arch : {Architecture::kRnn, Architecture::kRbm, Architecture::kMlp}) {
    const AnsatzConfig c = default_ansatz_config(arch, 6, Boundary::kOpen);
    auto a = make_ansatz(c, 11);
    auto b = make_ansatz(c, 11);
    auto sa = make_sampler(arch, sampler_config(64, 2));
    auto sb = make_sampler(arch, sampler_config(64, 2));
    const auto ra = train(*a, p, *sa, quick_config(8, 0.01));
    const auto rb = train(*b, p, *sb, quick_config(8, 0.01));
    REQUIRE(ra.records.size() == rb.records.size());
    for (std::size_t k = 0; k < ra.records.size(); ++k) {
      CHECK(ra.records[k].mean_re_eloc == rb.records[k].mean_re_eloc);
      CHECK(ra.records[k].mean_im_eloc == rb.records[k].mean_im_eloc);
      CHECK(ra.records[k].var_re_eloc == rb.records[k].var_re_eloc);
      CHECK(ra.records[k].grad_norm == rb.records[k].grad_norm);
    }
    CHECK(a->params() == b->params());
    std::ostringstream oa, ob;
    write_training_csv(oa, ra.records, false);
    write_training_csv(ob, rb.records, false);
    CHECK(oa.str() == ob.str());
    CHECK(oa.str().rfind("step,mean_re_eloc,mean_im_eloc,var_re_eloc,wall_ms", 0) == 0);
  }
}

TEST_CASE("divergent local energies abort training") {
  Spike psi(100.0);
  EnumerationSampler s;
  const ModelParams p(4, 1.0, 0.5, 0.05, Boundary::kPeriodic);
  CHECK_THROWS_AS(train(psi, p, s, quick_config(3, 0.01)), TrainingAbortedError);
  // Mild spike: ratios stay finite.
  Spike mild(5.0);
  CHECK_NOTHROW(train(mild, p, s, quick_config(2, 0.01)));
}

TEST_CASE("non-finite gradients are skipped, then abort") {
  Spike psi(0.0, true);
  EnumerationSampler s;
  const ModelParams p(4, 1.0, 0.5, 0.05, Boundary::kPeriodic);
  TrainConfig c = quick_config(4, 0.01);
  c.max_skipped_steps = 5;
  const auto r = train(psi, p, s, c);
  CHECK(r.skipped_steps == 4);
  for (const auto& rec : r.records) CHECK(rec.skipped);
  c.steps = 10;
  CHECK_THROWS_AS(train(psi, p, s, c), TrainingAbortedError);
}

TEST_CASE("magnetization estimators") {
  SampleBatch batch;
  batch.configs = {SpinConfig{1, 1, 1, 1}, SpinConfig{-1, -1, -1, 1}};
  CHECK(magnetization(batch, {0.5, 0.5}) == doctest::Approx(0.25));
  CHECK(abs_magnetization(batch, {0.5, 0.5}) == doctest::Approx(0.75));
  CHECK_THROWS_AS(magnetization(SampleBatch{}, {}), InvalidConfigError);
}

}  // TEST_SUITE
