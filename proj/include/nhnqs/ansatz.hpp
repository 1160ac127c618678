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
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhnqs/random.hpp"
#include "nhnqs/spin_model.hpp"

namespace nhnqs {

enum class Architecture { kRnn, kRbm, kMlp };
enum class RnnCell { kVanilla, kGated };

std::string to_string(Architecture a);
Architecture parse_architecture(const std::string& s);
std::string to_string(RnnCell c);
RnnCell parse_cell(const std::string& s);

struct AnsatzConfig {
  Architecture architecture = Architecture::kRnn;
  int n = 10;
  int hidden = 34;
  RnnCell cell = RnnCell::kVanilla;
  bool phase_head = false;
  bool pt_symmetric = false;

  bool operator==(const AnsatzConfig&) const = default;
};

// PT wrapper on for open chains, off for periodic ones.
AnsatzConfig default_ansatz_config(Architecture a, int n, Boundary boundary);

// Contiguous slice of the real parameter vector. Complex blocks store all
// real parts first, then all imaginary parts; entries are row-major.
struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool complex = false;
  Eigen::Index offset = 0;

  Eigen::Index count() const { return static_cast<Eigen::Index>(rows) * cols; }
  Eigen::Index size() const { return complex ? 2 * count() : count(); }
};

using RealVector = Eigen::VectorXd;
using GradVector = Eigen::VectorXcd;

class Ansatz {
 public:
  explicit Ansatz(AnsatzConfig config) : config_(config) {}
  virtual ~Ansatz() = default;

  const AnsatzConfig& config() const { return config_; }
  Architecture architecture() const { return config_.architecture; }
  int n_sites() const { return config_.n; }

  virtual const std::vector<ParamBlock>& layout() const { return layout_; }
  virtual const RealVector& params() const { return params_; }
  virtual void set_params(const RealVector& theta);
  Eigen::Index n_params() const { return params().size(); }

  virtual LogAmplitude log_psi(const SpinConfig& x) const = 0;
  // Also fills grad_k = d log Psi / d theta_k for the real parameters theta.
  virtual LogAmplitude log_psi_grad(const SpinConfig& x, GradVector& grad) const = 0;

  virtual std::unique_ptr<Ansatz> clone() const = 0;
  // The unwrapped network (itself unless PT-symmetrized).
  virtual const Ansatz& base() const { return *this; }

  // Uniform [-0.05, 0.05] for real entries and real parts, zero imaginary parts.
  void initialize(Rng& rng, double scale = 0.05);

  LogPsiFn log_psi_fn() const {
    return [this](const SpinConfig& x) { return log_psi(x); };
  }

 protected:
  void add_block(const std::string& name, int rows, int cols, bool complex = false);
  // Called after every parameter change.
  virtual void refresh() {}
  void check_input(const SpinConfig& x) const;

  AnsatzConfig config_;
  std::vector<ParamBlock> layout_;
  RealVector params_;
};

// Autoregressive recurrent network. sqrt of the product of softmax
// conditionals gives |Psi|; an optional head adds a phase.
class Rnn : public Ansatz {
 public:
  static constexpr double kLogOffset = 1e-15;

  explicit Rnn(AnsatzConfig config);

  int hidden() const { return config_.hidden; }

  LogAmplitude log_psi(const SpinConfig& x) const override;
  LogAmplitude log_psi_grad(const SpinConfig& x, GradVector& grad) const override;
  std::unique_ptr<Ansatz> clone() const override { return std::make_unique<Rnn>(*this); }

  // One recurrence step: consumes the previous spin (+1 token at site 0)
  // and returns the new hidden state and P(x_i = +1 | x_<i).
  double step(const Eigen::VectorXd& h, int previous_spin, Eigen::VectorXd& h_next) const;
  // log P(x) = sum_i log(P(x_i | x_<i) + offset).
  double log_probability(const SpinConfig& x) const;

 private:
  struct Trace;
  void forward(const SpinConfig& x, Trace& t) const;
  void refresh() override;

  int d_;
  bool gated_;
  // Row-major matrix views rebuilt by refresh().
  std::vector<Eigen::MatrixXd> mats_;
};

// Restricted Boltzmann machine with complex parameters:
//   log Psi = sum_i a_i x_i + sum_j log cosh(b_j + sum_i W_ij x_i).
class Rbm : public Ansatz {
 public:
  explicit Rbm(AnsatzConfig config);

  int hidden() const { return config_.hidden; }
  const Eigen::VectorXcd& visible_bias() const { return a_; }
  const Eigen::VectorXcd& hidden_bias() const { return b_; }
  const Eigen::MatrixXcd& weights() const { return w_; }  // N x M
  bool has_imaginary_part() const { return complex_; }
  // Overwrites parameters from complex arrays.
  void set_complex(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& w);

  LogAmplitude log_psi(const SpinConfig& x) const override;
  LogAmplitude log_psi_grad(const SpinConfig& x, GradVector& grad) const override;
  std::unique_ptr<Ansatz> clone() const override { return std::make_unique<Rbm>(*this); }

 private:
  void refresh() override;

  Eigen::VectorXcd a_;
  Eigen::VectorXcd b_;
  Eigen::MatrixXcd w_;
  bool complex_ = false;
};

// Feed-forward network on +-1 inputs with ReLU hidden layers and two real
// outputs read as (log |Psi|, phase).
class Mlp : public Ansatz {
 public:
  explicit Mlp(AnsatzConfig config, std::vector<int> hidden_layers = {});

  const std::vector<int>& sizes() const { return sizes_; }

  LogAmplitude log_psi(const SpinConfig& x) const override;
  LogAmplitude log_psi_grad(const SpinConfig& x, GradVector& grad) const override;
  std::unique_ptr<Ansatz> clone() const override { return std::make_unique<Mlp>(*this); }

 private:
  void refresh() override;

  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

// Psi(x) = (F(x) + F*(Px)) / 2 with P the spatial reflection.
class PtSymmetric : public Ansatz {
 public:
  explicit PtSymmetric(std::unique_ptr<Ansatz> inner);
  PtSymmetric(const PtSymmetric& other);

  const std::vector<ParamBlock>& layout() const override { return inner_->layout(); }
  const RealVector& params() const override { return inner_->params(); }
  void set_params(const RealVector& theta) override { inner_->set_params(theta); }

  LogAmplitude log_psi(const SpinConfig& x) const override;
  LogAmplitude log_psi_grad(const SpinConfig& x, GradVector& grad) const override;
  std::unique_ptr<Ansatz> clone() const override { return std::make_unique<PtSymmetric>(*this); }
  const Ansatz& base() const override { return *inner_; }

 private:
  std::unique_ptr<Ansatz> inner_;
};

// log(0.5 (e^a + e^conj(b))); throws ZeroAmplitudeError on cancellation.
std::complex<double> pt_log_average(std::complex<double> a, std::complex<double> b);

// Builds the network named by `config` (wrapped if requested) without
// initializing it; parameters start at zero.
std::unique_ptr<Ansatz> make_ansatz(const AnsatzConfig& config);
// As above, then initialize() from a stream derived from `seed`.
std::unique_ptr<Ansatz> make_ansatz(const AnsatzConfig& config, std::uint64_t seed);

// Overflow-safe log cosh for complex arguments and its derivative tanh.
std::complex<double> log_cosh(std::complex<double> z);

}  // namespace nhnqs
