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
#include <iosfwd>
#include <string>
#include <vector>

#include "nhnqs/ansatz.hpp"
#include "nhnqs/sampling.hpp"
#include "nhnqs/spin_model.hpp"

namespace nhnqs {

// Scalar the optimizer minimizes per local energy; "max" selectors are
// stored sign-flipped.
struct TargetFunctional {
  enum class Kind { kMinRe, kMaxRe, kMinIm, kMaxIm, kMinAbs, kMaxAbs, kWeighted };
  Kind kind = Kind::kMinRe;
  double a = 1.0;  // weighted: a Re + b Im
  double b = 0.0;

  double operator()(std::complex<double> e) const;
  std::string name() const;
};

// min-re, max-re, min-im, max-im, min-abs, max-abs, weighted:<a>,<b>
TargetFunctional parse_target(const std::string& s);

enum class Regularizer { kImagMean, kReVariance };

std::string to_string(Regularizer r);
Regularizer parse_regularizer(const std::string& s);

struct TrainConfig {
  int steps = 1000;
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double alpha = 0.1;
  Regularizer regularizer = Regularizer::kImagMean;
  std::uint64_t seed = 111;
  TargetFunctional target;
  double clip_norm = 10.0;
  int max_skipped_steps = 50;
  double max_divergent_fraction = 0.1;
  int eval_batches = 4;
  int jobs = 1;
};

void validate(const TrainConfig& c);

struct TrainingRecord {
  int step = 0;
  double mean_re_eloc = 0.0;
  double mean_im_eloc = 0.0;
  double var_re_eloc = 0.0;
  double wall_ms = 0.0;
  double loss = 0.0;
  double grad_norm = 0.0;
  int divergent = 0;
  bool skipped = false;

  double neg_abs_mean_eloc() const { return -std::abs(std::complex<double>(mean_re_eloc, mean_im_eloc)); }
};

// Surrogate sum_x w_x (T_x - <T>) Re log Psi(x); its parameter gradient
// with T held fixed is the estimator used for training. Uniform weights when
// `weights` is empty.
double loss_real(const std::vector<LogAmplitude>& log_psi, const std::vector<double>& targets,
                 const std::vector<double>& weights = {});
// Default target: T = Re E_loc.
double loss_real(const std::vector<LogAmplitude>& log_psi, const std::vector<std::complex<double>>& eloc);

// 2 sum_x w_x (T_x - <T>) Re O_x with O_x = d log Psi(x) / d theta.
RealVector loss_gradient(const std::vector<GradVector>& log_derivs, const std::vector<double>& targets,
                         const std::vector<double>& weights);

// L + alpha |<Im E_loc>|.
double regularize(double loss, const std::vector<std::complex<double>>& eloc, double alpha,
                  const std::vector<double>& weights = {});

class Adam {
 public:
  Adam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
  void step(RealVector& params, const RealVector& grad);
  int steps() const { return t_; }
  const RealVector& first_moment() const { return m_; }
  const RealVector& second_moment() const { return v_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  int t_ = 0;
  RealVector m_;
  RealVector v_;
};

// Per-sample quantities of one batch. Samples whose local energy diverged
// (or whose amplitude vanished) carry weight 0 and divergent = true.
struct BatchEvaluation {
  std::vector<LogAmplitude> log_psi;
  std::vector<std::complex<double>> eloc;
  std::vector<double> weights;
  std::vector<bool> divergent;
  std::vector<GradVector> log_derivs;  // filled only when requested
  int divergent_count = 0;

  std::complex<double> mean_eloc() const;
  double var_re_eloc() const;
};

BatchEvaluation evaluate_batch(const Ansatz& psi, const ModelParams& model, const SampleBatch& batch,
                               bool with_gradients, int jobs = 1);

struct EnergyEstimate {
  std::complex<double> energy;
  double var_re = 0.0;
  double abs_magnetization = 0.0;  // <|m|>
  double magnetization = 0.0;      // <m>
  std::int64_t samples = 0;
  std::int64_t divergent = 0;
};

// Pools `batches` fresh batches from the sampler.
EnergyEstimate evaluate(const Ansatz& psi, const ModelParams& model, Sampler& sampler, int batches, int jobs = 1);

struct TrainResult {
  std::vector<TrainingRecord> records;
  int skipped_steps = 0;
  EnergyEstimate final_estimate;
};

using StepObserver = std::function<void(const TrainingRecord&, const Ansatz&)>;

TrainResult train(Ansatz& psi, const ModelParams& model, Sampler& sampler, const TrainConfig& config,
                  const StepObserver& observer = {});

// step, mean_re_eloc, mean_im_eloc, var_re_eloc, wall_ms, neg_abs_mean_eloc
void write_training_csv(std::ostream& os, const std::vector<TrainingRecord>& records, bool wall_time = true);

// Weighted <m> and <|m|> of a batch.
double magnetization(const SampleBatch& batch, const std::vector<double>& weights);
double abs_magnetization(const SampleBatch& batch, const std::vector<double>& weights);

}  // namespace nhnqs
