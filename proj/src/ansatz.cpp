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

#include "nhnqs/ansatz.hpp"

#include <cmath>
#include <numbers>

#include "nhnqs/errors.hpp"

namespace nhnqs {

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::kRnn:
      return "rnn";
    case Architecture::kRbm:
      return "rbm";
    case Architecture::kMlp:
      return "mlp";
  }
  return "rnn";
}

Architecture parse_architecture(const std::string& s) {
  if (s == "rnn") return Architecture::kRnn;
  if (s == "rbm") return Architecture::kRbm;
  if (s == "mlp") return Architecture::kMlp;
  throw ConfigError("unknown architecture '" + s + "' (expected rnn, rbm or mlp)");
}

std::string to_string(RnnCell c) { return c == RnnCell::kGated ? "gru" : "vanilla"; }

RnnCell parse_cell(const std::string& s) {
  if (s == "vanilla") return RnnCell::kVanilla;
  if (s == "gru" || s == "gated") return RnnCell::kGated;
  throw ConfigError("unknown RNN cell '" + s + "' (expected vanilla or gru)");
}

AnsatzConfig default_ansatz_config(Architecture a, int n, Boundary boundary) {
  AnsatzConfig c;
  c.architecture = a;
  c.n = n;
  c.pt_symmetric = boundary == Boundary::kOpen;
  return c;
}

void Ansatz::add_block(const std::string& name, int rows, int cols, bool complex) {
  ParamBlock b{name, rows, cols, complex, params_.size()};
  layout_.push_back(b);
  params_.conservativeResize(params_.size() + b.size());
  params_.tail(b.size()).setZero();
}

void Ansatz::set_params(const RealVector& theta) {
  if (theta.size() != params_.size()) {
    throw InvalidConfigError("expected " + std::to_string(params_.size()) + " parameters, got " +
                             std::to_string(theta.size()));
  }
  if (!theta.allFinite()) throw InvalidConfigError("non-finite parameter");
  params_ = theta;
  refresh();
}

void Ansatz::initialize(Rng& rng, double scale) {
  RealVector theta = params();
  for (const auto& b : layout()) {
    for (Eigen::Index k = 0; k < b.count(); ++k) theta(b.offset + k) = rng.uniform(-scale, scale);
    if (b.complex) theta.segment(b.offset + b.count(), b.count()).setZero();
  }
  set_params(theta);
}

void Ansatz::check_input(const SpinConfig& x) const {
  if (x.size() != config_.n) {
    throw InvalidConfigError("configuration has " + std::to_string(x.size()) + " sites, ansatz expects " +
                             std::to_string(config_.n));
  }
}

namespace {

Eigen::MatrixXd block_matrix(const RealVector& theta, const ParamBlock& b) {
  Eigen::MatrixXd m(b.rows, b.cols);
  for (int r = 0; r < b.rows; ++r) {
    for (int c = 0; c < b.cols; ++c) m(r, c) = theta(b.offset + static_cast<Eigen::Index>(r) * b.cols + c);
  }
  return m;
}

// Scatters a complex derivative w.r.t. a real matrix block into `grad`.
void put_block(GradVector& grad, const ParamBlock& b, const Eigen::MatrixXcd& d) {
  for (int r = 0; r < b.rows; ++r) {
    for (int c = 0; c < b.cols; ++c) grad(b.offset + static_cast<Eigen::Index>(r) * b.cols + c) = d(r, c);
  }
}

double sigmoid(double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); }

int token(int spin) { return spin > 0 ? 0 : 1; }

}  // namespace

std::complex<double> log_cosh(std::complex<double> z) {
  const double s = z.real() >= 0 ? 1.0 : -1.0;
  const std::complex<double> sz = s * z;
  return sz - std::numbers::ln2 + std::log(1.0 + std::exp(-2.0 * sz));
}

// ---------------------------------------------------------------- RNN

struct Rnn::Trace {
  std::vector<Eigen::VectorXd> h;  // h[0] = 0, h[i + 1] after site i
  std::vector<Eigen::VectorXd> z, r, cand;
  std::vector<double> p_up;
  std::vector<Eigen::Vector2d> q;  // phase-head pre-activations
};

Rnn::Rnn(AnsatzConfig config) : Ansatz(config), d_(config.hidden), gated_(config.cell == RnnCell::kGated) {
  if (config.n < 1 || d_ < 1) throw ConfigError("RNN needs n >= 1 and hidden >= 1");
  config_.architecture = Architecture::kRnn;
  config_.pt_symmetric = false;
  const char* gates[] = {"", "_z", "_r"};
  for (int g = 0; g < (gated_ ? 3 : 1); ++g) {
    add_block(std::string("w_in") + gates[g], d_, 2);
    add_block(std::string("w_rec") + gates[g], d_, d_);
    add_block(std::string("b_rec") + gates[g], d_, 1);
  }
  add_block("w_out", 2, d_);
  add_block("b_out", 2, 1);
  if (config.phase_head) {
    add_block("w_phase", 2, d_);
    add_block("b_phase", 2, 1);
  }
  refresh();
}

void Rnn::refresh() {
  mats_.clear();
  for (const auto& b : layout_) mats_.push_back(block_matrix(params_, b));
}

double Rnn::step(const Eigen::VectorXd& h, int previous_spin, Eigen::VectorXd& h_next) const {
  const int t = token(previous_spin);
  if (!gated_) {
    h_next = (mats_[0].col(t) + mats_[1] * h + mats_[2].col(0)).array().tanh().matrix();
  } else {
    const Eigen::VectorXd z = (mats_[3].col(t) + mats_[4] * h + mats_[5].col(0)).unaryExpr(&sigmoid);
    const Eigen::VectorXd r = (mats_[6].col(t) + mats_[7] * h + mats_[8].col(0)).unaryExpr(&sigmoid);
    const Eigen::VectorXd n =
        (mats_[0].col(t) + mats_[1] * r.cwiseProduct(h) + mats_[2].col(0)).array().tanh().matrix();
    h_next = (1.0 - z.array()) * h.array() + z.array() * n.array();
  }
  const int out = gated_ ? 9 : 3;
  const Eigen::Vector2d logits = mats_[out] * h_next + mats_[out + 1].col(0);
  return sigmoid(logits(0) - logits(1));
}

void Rnn::forward(const SpinConfig& x, Trace& t) const {
  const int n = config_.n;
  t.h.assign(1, Eigen::VectorXd::Zero(d_));
  t.p_up.clear();
  t.z.clear();
  t.r.clear();
  t.cand.clear();
  t.q.clear();
  const int out = gated_ ? 9 : 3;
  for (int i = 0; i < n; ++i) {
    const int prev = i == 0 ? 1 : x[i - 1];
    const Eigen::VectorXd& h = t.h.back();
    Eigen::VectorXd hn;
    if (gated_) {
      const int tk = token(prev);
      t.z.push_back((mats_[3].col(tk) + mats_[4] * h + mats_[5].col(0)).unaryExpr(&sigmoid));
      t.r.push_back((mats_[6].col(tk) + mats_[7] * h + mats_[8].col(0)).unaryExpr(&sigmoid));
      t.cand.push_back(
          (mats_[0].col(tk) + mats_[1] * t.r.back().cwiseProduct(h) + mats_[2].col(0)).array().tanh().matrix());
      hn = (1.0 - t.z.back().array()) * h.array() + t.z.back().array() * t.cand.back().array();
    } else {
      hn = (mats_[0].col(token(prev)) + mats_[1] * h + mats_[2].col(0)).array().tanh().matrix();
    }
    const Eigen::Vector2d logits = mats_[out] * hn + mats_[out + 1].col(0);
    t.p_up.push_back(sigmoid(logits(0) - logits(1)));
    if (config_.phase_head) t.q.push_back(mats_[out + 2] * hn + mats_[out + 3].col(0));
    t.h.push_back(std::move(hn));
  }
}

namespace {

double site_probability(double p_up, int spin) { return spin > 0 ? p_up : 1.0 - p_up; }

double softsign_phase(double q) { return std::numbers::pi * q / (1.0 + std::abs(q)); }

}  // namespace

double Rnn::log_probability(const SpinConfig& x) const {
  check_input(x);
  Trace t;
  forward(x, t);
  double lp = 0.0;
  for (int i = 0; i < config_.n; ++i) lp += std::log(site_probability(t.p_up[i], x[i]) + kLogOffset);
  return lp;
}

LogAmplitude Rnn::log_psi(const SpinConfig& x) const {
  check_input(x);
  Trace t;
  forward(x, t);
  double mag = 0.0;
  double phase = 0.0;
  for (int i = 0; i < config_.n; ++i) {
    mag += 0.5 * std::log(site_probability(t.p_up[i], x[i]) + kLogOffset);
    if (config_.phase_head) phase += softsign_phase(t.q[i](token(x[i])));
  }
  return {mag, phase};
}

LogAmplitude Rnn::log_psi_grad(const SpinConfig& x, GradVector& grad) const {
  check_input(x);
  Trace t;
  forward(x, t);
  const int n = config_.n;
  const int out = gated_ ? 9 : 3;
  std::vector<Eigen::MatrixXcd> d(mats_.size());
  for (std::size_t k = 0; k < mats_.size(); ++k) d[k] = Eigen::MatrixXcd::Zero(mats_[k].rows(), mats_[k].cols());

  double mag = 0.0;
  double phase = 0.0;
  const std::complex<double> I(0.0, 1.0);
  Eigen::VectorXcd dh_carry = Eigen::VectorXcd::Zero(d_);
  for (int i = n - 1; i >= 0; --i) {
    const int s = token(x[i]);
    const double p_s = site_probability(t.p_up[i], x[i]);
    mag += 0.5 * std::log(p_s + kLogOffset);
    const Eigen::VectorXd& hn = t.h[i + 1];
    const Eigen::VectorXd& h = t.h[i];

    // d/dlogit_k of 0.5 log(p_s + offset) = 0.5 p_s / (p_s + offset) (delta_sk - p_k).
    const Eigen::Vector2d p(t.p_up[i], 1.0 - t.p_up[i]);
    Eigen::Vector2d dl = -p;
    dl(s) += 1.0;
    dl *= 0.5 * p_s / (p_s + kLogOffset);
    d[out] += dl * hn.transpose();
    d[out + 1].col(0) += dl;
    Eigen::VectorXcd dh = dh_carry + (mats_[out].transpose() * dl).cast<std::complex<double>>();

    if (config_.phase_head) {
      const double q = t.q[i](s);
      phase += softsign_phase(q);
      const double dq = std::numbers::pi / ((1.0 + std::abs(q)) * (1.0 + std::abs(q)));
      d[out + 2].row(s) += I * dq * hn.transpose();
      d[out + 3](s, 0) += I * dq;
      dh += I * dq * mats_[out + 2].row(s).transpose();
    }

    const int tk = token(i == 0 ? 1 : x[i - 1]);
    if (!gated_) {
      const Eigen::VectorXcd da = dh.cwiseProduct((1.0 - hn.array().square()).matrix());
      d[0].col(tk) += da;
      d[1] += da * h.transpose();
      d[2].col(0) += da;
      dh_carry = mats_[1].transpose() * da;
    } else {
      const Eigen::VectorXd& z = t.z[i];
      const Eigen::VectorXd& r = t.r[i];
      const Eigen::VectorXd& c = t.cand[i];
      const Eigen::VectorXd rh = r.cwiseProduct(h);
      const Eigen::VectorXcd dz = dh.cwiseProduct(c - h);
      const Eigen::VectorXcd dc = dh.cwiseProduct(z);
      Eigen::VectorXcd dprev = dh.cwiseProduct((1.0 - z.array()).matrix());

      const Eigen::VectorXcd dac = dc.cwiseProduct((1.0 - c.array().square()).matrix());
      d[0].col(tk) += dac;
      d[1] += dac * rh.transpose();
      d[2].col(0) += dac;
      const Eigen::VectorXcd drh = mats_[1].transpose() * dac;
      const Eigen::VectorXcd dr = drh.cwiseProduct(h);
      dprev += drh.cwiseProduct(r);

      const Eigen::VectorXcd daz = dz.cwiseProduct(z.cwiseProduct((1.0 - z.array()).matrix()));
      d[3].col(tk) += daz;
      d[4] += daz * h.transpose();
      d[5].col(0) += daz;
      dprev += mats_[4].transpose() * daz;

      const Eigen::VectorXcd dar = dr.cwiseProduct(r.cwiseProduct((1.0 - r.array()).matrix()));
      d[6].col(tk) += dar;
      d[7] += dar * h.transpose();
      d[8].col(0) += dar;
      dprev += mats_[7].transpose() * dar;
      dh_carry = dprev;
    }
  }
  grad.resize(params_.size());
  for (std::size_t k = 0; k < layout_.size(); ++k) put_block(grad, layout_[k], d[k]);
  return {mag, phase};
}

// ---------------------------------------------------------------- RBM

Rbm::Rbm(AnsatzConfig config) : Ansatz(config) {
  if (config.n < 1 || config.hidden < 1) throw ConfigError("RBM needs n >= 1 and hidden >= 1");
  config_.architecture = Architecture::kRbm;
  config_.pt_symmetric = false;
  add_block("a", config.n, 1, true);
  add_block("b", config.hidden, 1, true);
  add_block("w", config.n, config.hidden, true);
  refresh();
}

void Rbm::refresh() {
  const int n = config_.n;
  const int m = config_.hidden;
  auto cplx = [this](const ParamBlock& b, Eigen::Index k) {
    return std::complex<double>(params_(b.offset + k), params_(b.offset + b.count() + k));
  };
  a_.resize(n);
  b_.resize(m);
  w_.resize(n, m);
  for (int i = 0; i < n; ++i) a_(i) = cplx(layout_[0], i);
  for (int j = 0; j < m; ++j) b_(j) = cplx(layout_[1], j);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) w_(i, j) = cplx(layout_[2], static_cast<Eigen::Index>(i) * m + j);
  }
  complex_ = a_.imag().any() || b_.imag().any() || w_.imag().any();
}

void Rbm::set_complex(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& w) {
  const int n = config_.n;
  const int m = config_.hidden;
  if (a.size() != n || b.size() != m || w.rows() != n || w.cols() != m) {
    throw InvalidConfigError("RBM array shapes do not match");
  }
  RealVector theta(params_.size());
  auto put = [&theta](const ParamBlock& blk, Eigen::Index k, std::complex<double> v) {
    theta(blk.offset + k) = v.real();
    theta(blk.offset + blk.count() + k) = v.imag();
  };
  for (int i = 0; i < n; ++i) put(layout_[0], i, a(i));
  for (int j = 0; j < m; ++j) put(layout_[1], j, b(j));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) put(layout_[2], static_cast<Eigen::Index>(i) * m + j, w(i, j));
  }
  set_params(theta);
}

LogAmplitude Rbm::log_psi(const SpinConfig& x) const {
  check_input(x);
  std::complex<double> v = 0.0;
  Eigen::VectorXcd theta = b_;
  for (int i = 0; i < config_.n; ++i) {
    v += a_(i) * static_cast<double>(x[i]);
    theta += static_cast<double>(x[i]) * w_.row(i).transpose();
  }
  for (int j = 0; j < config_.hidden; ++j) v += log_cosh(theta(j));
  return LogAmplitude(v);
}

LogAmplitude Rbm::log_psi_grad(const SpinConfig& x, GradVector& grad) const {
  check_input(x);
  const int n = config_.n;
  const int m = config_.hidden;
  std::complex<double> v = 0.0;
  Eigen::VectorXcd theta = b_;
  for (int i = 0; i < n; ++i) {
    v += a_(i) * static_cast<double>(x[i]);
    theta += static_cast<double>(x[i]) * w_.row(i).transpose();
  }
  for (int j = 0; j < m; ++j) v += log_cosh(theta(j));
  const Eigen::VectorXcd th = theta.array().tanh().matrix();

  // Holomorphic derivative D gives d/dRe = D and d/dIm = i D.
  grad.resize(params_.size());
  const std::complex<double> I(0.0, 1.0);
  auto put = [&grad, &I](const ParamBlock& blk, Eigen::Index k, std::complex<double> d) {
    grad(blk.offset + k) = d;
    grad(blk.offset + blk.count() + k) = I * d;
  };
  for (int i = 0; i < n; ++i) put(layout_[0], i, static_cast<double>(x[i]));
  for (int j = 0; j < m; ++j) put(layout_[1], j, th(j));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) put(layout_[2], static_cast<Eigen::Index>(i) * m + j, static_cast<double>(x[i]) * th(j));
  }
  return LogAmplitude(v);
}

// ---------------------------------------------------------------- MLP

Mlp::Mlp(AnsatzConfig config, std::vector<int> hidden_layers) : Ansatz(config) {
  config_.architecture = Architecture::kMlp;
  config_.pt_symmetric = false;
  if (hidden_layers.empty()) hidden_layers = {config.hidden};
  if (config.n < 1) throw ConfigError("MLP needs n >= 1");
  sizes_.push_back(config.n);
  for (int h : hidden_layers) {
    if (h < 1) throw ConfigError("MLP hidden layers must be non-empty");
    sizes_.push_back(h);
  }
  sizes_.push_back(2);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    add_block("w" + std::to_string(l), sizes_[l + 1], sizes_[l]);
    add_block("b" + std::to_string(l), sizes_[l + 1], 1);
  }
  refresh();
}

void Mlp::refresh() {
  weights_.clear();
  biases_.clear();
  for (std::size_t k = 0; k < layout_.size(); k += 2) {
    weights_.push_back(block_matrix(params_, layout_[k]));
    biases_.push_back(block_matrix(params_, layout_[k + 1]).col(0));
  }
}

namespace {

Eigen::VectorXd spin_vector(const SpinConfig& x) {
  Eigen::VectorXd v(x.size());
  for (int i = 0; i < x.size(); ++i) v(i) = x[i];
  return v;
}

}  // namespace

LogAmplitude Mlp::log_psi(const SpinConfig& x) const {
  check_input(x);
  Eigen::VectorXd a = spin_vector(x);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    a = weights_[l] * a + biases_[l];
    if (l + 1 < weights_.size()) a = a.cwiseMax(0.0);
  }
  return {a(0), a(1)};
}

LogAmplitude Mlp::log_psi_grad(const SpinConfig& x, GradVector& grad) const {
  check_input(x);
  const std::size_t layers = weights_.size();
  std::vector<Eigen::VectorXd> acts{spin_vector(x)};
  std::vector<Eigen::VectorXd> pre;
  for (std::size_t l = 0; l < layers; ++l) {
    pre.push_back(weights_[l] * acts.back() + biases_[l]);
    acts.push_back(l + 1 < layers ? pre.back().cwiseMax(0.0) : pre.back());
  }
  grad.resize(params_.size());
  Eigen::VectorXcd delta(2);
  delta << 1.0, std::complex<double>(0.0, 1.0);
  for (std::size_t l = layers; l-- > 0;) {
    put_block(grad, layout_[2 * l], delta * acts[l].transpose());
    put_block(grad, layout_[2 * l + 1], delta);
    if (l == 0) break;
    delta = weights_[l].transpose() * delta;
    for (Eigen::Index k = 0; k < delta.size(); ++k) {
      if (pre[l - 1](k) <= 0.0) delta(k) = 0.0;
    }
  }
  return {acts.back()(0), acts.back()(1)};
}

// ---------------------------------------------------------------- PT

std::complex<double> pt_log_average(std::complex<double> a, std::complex<double> b) {
  const std::complex<double> bc = std::conj(b);
  const double m = std::max(a.real(), bc.real());
  const std::complex<double> s = std::exp(a - m) + std::exp(bc - m);
  if (!(std::abs(s) > 1e-14)) throw ZeroAmplitudeError("PT-symmetrized amplitude cancels exactly");
  return m + std::log(0.5 * s);
}

PtSymmetric::PtSymmetric(std::unique_ptr<Ansatz> inner) : Ansatz(inner->config()), inner_(std::move(inner)) {
  config_.pt_symmetric = true;
}

PtSymmetric::PtSymmetric(const PtSymmetric& other) : Ansatz(other.config_), inner_(other.inner_->clone()) {}

LogAmplitude PtSymmetric::log_psi(const SpinConfig& x) const {
  return LogAmplitude(pt_log_average(inner_->log_psi(x).value(), inner_->log_psi(x.reflected()).value()));
}

LogAmplitude PtSymmetric::log_psi_grad(const SpinConfig& x, GradVector& grad) const {
  GradVector ga;
  GradVector gb;
  const std::complex<double> a = inner_->log_psi_grad(x, ga).value();
  const std::complex<double> b = inner_->log_psi_grad(x.reflected(), gb).value();
  const std::complex<double> out = pt_log_average(a, b);
  // d log Psi = (e^A dA + e^{B*} dB*) / (e^A + e^{B*}) with real parameters.
  const std::complex<double> wa = 0.5 * std::exp(a - out);
  const std::complex<double> wb = 0.5 * std::exp(std::conj(b) - out);
  grad = wa * ga + wb * gb.conjugate();
  return LogAmplitude(out);
}

std::unique_ptr<Ansatz> make_ansatz(const AnsatzConfig& config) {
  std::unique_ptr<Ansatz> net;
  switch (config.architecture) {
    case Architecture::kRnn:
      net = std::make_unique<Rnn>(config);
      break;
    case Architecture::kRbm:
      net = std::make_unique<Rbm>(config);
      break;
    case Architecture::kMlp:
      net = std::make_unique<Mlp>(config);
      break;
  }
  if (config.pt_symmetric) return std::make_unique<PtSymmetric>(std::move(net));
  return net;
}

std::unique_ptr<Ansatz> make_ansatz(const AnsatzConfig& config, std::uint64_t seed) {
  auto net = make_ansatz(config);
  Rng rng = make_stream(seed, "init");
  net->initialize(rng);
  return net;
}

}  // namespace nhnqs
