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

#include "nhnqs/vmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "nhnqs/errors.hpp"
#include "nhnqs/parallel.hpp"

namespace nhnqs {

double TargetFunctional::operator()(std::complex<double> e) const {
  switch (kind) {
    case Kind::kMinRe:
      return e.real();
    case Kind::kMaxRe:
      return -e.real();
    case Kind::kMinIm:
      return e.imag();
    case Kind::kMaxIm:
      return -e.imag();
    case Kind::kMinAbs:
      return std::abs(e);
    case Kind::kMaxAbs:
      return -std::abs(e);
    case Kind::kWeighted:
      return a * e.real() + b * e.imag();
  }
  return e.real();
}

std::string TargetFunctional::name() const {
  switch (kind) {
    case Kind::kMinRe:
      return "min-re";
    case Kind::kMaxRe:
      return "max-re";
    case Kind::kMinIm:
      return "min-im";
    case Kind::kMaxIm:
      return "max-im";
    case Kind::kMinAbs:
      return "min-abs";
    case Kind::kMaxAbs:
      return "max-abs";
    case Kind::kWeighted:
      return "weighted:" + std::to_string(a) + "," + std::to_string(b);
  }
  return "min-re";
}

TargetFunctional parse_target(const std::string& s) {
  using K = TargetFunctional::Kind;
  TargetFunctional t;
  if (s == "min-re") {
    t.kind = K::kMinRe;
  } else if (s == "max-re") {
    t.kind = K::kMaxRe;
  } else if (s == "min-im") {
    t.kind = K::kMinIm;
  } else if (s == "max-im") {
    t.kind = K::kMaxIm;
  } else if (s == "min-abs") {
    t.kind = K::kMinAbs;
  } else if (s == "max-abs") {
    t.kind = K::kMaxAbs;
  } else if (s.rfind("weighted:", 0) == 0) {
    const std::string rest = s.substr(9);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw ConfigError("weighted target needs 'weighted:<a>,<b>'");
    t.kind = K::kWeighted;
    try {
      t.a = std::stod(rest.substr(0, comma));
      t.b = std::stod(rest.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad weighted target '" + s + "'");
    }
  } else {
    throw ConfigError("unknown target functional '" + s + "'");
  }
  return t;
}

std::string to_string(Regularizer r) { return r == Regularizer::kReVariance ? "re-variance" : "imag-mean"; }

Regularizer parse_regularizer(const std::string& s) {
  if (s == "imag-mean") return Regularizer::kImagMean;
  if (s == "re-variance") return Regularizer::kReVariance;
  throw ConfigError("unknown regularizer '" + s + "'");
}

void validate(const TrainConfig& c) {
  if (c.steps < 1) throw ConfigError("steps must be >= 1");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(c.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(c.clip_norm > 0.0)) throw ConfigError("clip norm must be > 0");
  if (c.eval_batches < 0) throw ConfigError("eval batches must be >= 0");
}

namespace {

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

}  // namespace

double loss_real(const std::vector<LogAmplitude>& log_psi, const std::vector<double>& targets,
                 const std::vector<double>& weights) {
  const std::size_t n = log_psi.size();
  if (targets.size() != n || (!weights.empty() && weights.size() != n)) {
    throw InvalidConfigError("loss inputs have different lengths");
  }
  if (n < 2) throw InvalidConfigError("loss needs a batch of at least 2 samples");
  const std::vector<double> w = weights.empty() ? uniform_weights(n) : weights;
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += w[k] * targets[k];
  double loss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] != 0.0) loss += w[k] * (targets[k] - mean) * log_psi[k].log_magnitude;
  }
  return loss;
}

double loss_real(const std::vector<LogAmplitude>& log_psi, const std::vector<std::complex<double>>& eloc) {
  std::vector<double> re(eloc.size());
  std::transform(eloc.begin(), eloc.end(), re.begin(), [](auto e) { return e.real(); });
  return loss_real(log_psi, re);
}

RealVector loss_gradient(const std::vector<GradVector>& log_derivs, const std::vector<double>& targets,
                         const std::vector<double>& weights) {
  const std::size_t n = log_derivs.size();
  if (n == 0 || targets.size() != n || weights.size() != n) throw InvalidConfigError("gradient inputs mismatch");
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += weights[k] * targets[k];
  RealVector g = RealVector::Zero(log_derivs.front().size());
  for (std::size_t k = 0; k < n; ++k) {
    if (weights[k] != 0.0) g += (2.0 * weights[k] * (targets[k] - mean)) * log_derivs[k].real();
  }
  return g;
}

double regularize(double loss, const std::vector<std::complex<double>>& eloc, double alpha,
                  const std::vector<double>& weights) {
  if (alpha == 0.0 || eloc.empty()) return loss;
  const std::vector<double> w = weights.empty() ? uniform_weights(eloc.size()) : weights;
  double im = 0.0;
  for (std::size_t k = 0; k < eloc.size(); ++k) im += w[k] * eloc[k].imag();
  return loss + alpha * std::abs(im);
}

Adam::Adam(Eigen::Index n, double lr, double beta1, double beta2, double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(RealVector::Zero(n)), v_(RealVector::Zero(n)) {}

void Adam::step(RealVector& params, const RealVector& grad) {
  if (grad.size() != m_.size() || params.size() != m_.size()) throw InvalidConfigError("Adam size mismatch");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + epsilon_);
}

std::complex<double> BatchEvaluation::mean_eloc() const {
  std::complex<double> m = 0.0;
  for (std::size_t k = 0; k < eloc.size(); ++k) {
    if (weights[k] != 0.0) m += weights[k] * eloc[k];
  }
  return m;
}

double BatchEvaluation::var_re_eloc() const {
  const double m = mean_eloc().real();
  double v = 0.0;
  for (std::size_t k = 0; k < eloc.size(); ++k) {
    if (weights[k] != 0.0) v += weights[k] * (eloc[k].real() - m) * (eloc[k].real() - m);
  }
  return v;
}

namespace {

LogAmplitude safe_log_psi(const Ansatz& psi, const SpinConfig& x, GradVector* grad) {
  try {
    return grad ? psi.log_psi_grad(x, *grad) : psi.log_psi(x);
  } catch (const ZeroAmplitudeError&) {
    if (grad) grad->setZero(psi.n_params());
    return {-std::numeric_limits<double>::infinity(), 0.0};
  }
}

}  // namespace

BatchEvaluation evaluate_batch(const Ansatz& psi, const ModelParams& model, const SampleBatch& batch,
                               bool with_gradients, int jobs) {
  const std::size_t b = batch.size();
  if (b == 0) throw InvalidConfigError("empty batch");
  if (batch.reweighted() && batch.log_proposal.size() != b) throw InvalidConfigError("proposal size mismatch");

  // Every distinct configuration the batch needs: samples first, then
  // their single-flip neighbours.
  std::unordered_map<std::string, std::size_t> index;
  std::vector<SpinConfig> needed;
  std::vector<std::size_t> sample_slot(b);
  for (std::size_t k = 0; k < b; ++k) {
    check_config(batch.configs[k], model);
    auto [it, fresh] = index.emplace(batch.configs[k].key(), needed.size());
    if (fresh) needed.push_back(batch.configs[k]);
    sample_slot[k] = it->second;
  }
  const std::size_t unique = needed.size();
  for (std::size_t u = 0; u < unique; ++u) {
    for (int site = 0; site < model.n(); ++site) {
      SpinConfig y = needed[u].flipped(site);
      if (index.emplace(y.key(), needed.size()).second) needed.push_back(std::move(y));
    }
  }

  std::vector<LogAmplitude> values(needed.size());
  std::vector<GradVector> grads(with_gradients ? unique : 0);
  parallel_for(needed.size(), jobs, [&](std::size_t i) {
    values[i] = safe_log_psi(psi, needed[i], with_gradients && i < unique ? &grads[i] : nullptr);
  });
  const LogPsiFn lookup = [&](const SpinConfig& x) { return values[index.at(x.key())]; };

  std::vector<std::complex<double>> unique_eloc(unique);
  std::vector<char> unique_bad(unique, 0);
  parallel_for(unique, jobs, [&](std::size_t u) {
    try {
      unique_eloc[u] = local_energy(needed[u], lookup, model);
      if (!std::isfinite(unique_eloc[u].real()) || !std::isfinite(unique_eloc[u].imag())) unique_bad[u] = 1;
    } catch (const DivergentRatioError&) {
      unique_bad[u] = 1;
    }
  });

  BatchEvaluation ev;
  ev.log_psi.resize(b);
  ev.eloc.resize(b);
  ev.divergent.assign(b, false);
  std::vector<LogAmplitude> for_weights(b);
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t u = sample_slot[k];
    ev.log_psi[k] = values[u];
    ev.eloc[k] = unique_bad[u] ? std::complex<double>(0.0) : unique_eloc[u];
    ev.divergent[k] = unique_bad[u] != 0;
    for_weights[k] = values[u];
    if (ev.divergent[k]) {
      ++ev.divergent_count;
      for_weights[k].log_magnitude = -std::numeric_limits<double>::infinity();
    }
  }
  if (ev.divergent_count == static_cast<int>(b)) {
    ev.weights.assign(b, 0.0);
  } else {
    ev.weights = batch_weights(batch, for_weights);
    if (!batch.reweighted() && ev.divergent_count > 0) {
      for (std::size_t k = 0; k < b; ++k) ev.weights[k] = ev.divergent[k] ? 0.0 : 1.0 / static_cast<double>(b - ev.divergent_count);
    }
  }
  if (with_gradients) {
    ev.log_derivs.resize(b);
    for (std::size_t k = 0; k < b; ++k) ev.log_derivs[k] = grads[sample_slot[k]];
  }
  return ev;
}

namespace {

void check_weighted_batch(const SampleBatch& batch, const std::vector<double>& weights) {
  if (batch.size() == 0) throw InvalidConfigError("magnetization of an empty batch");
  if (weights.size() != batch.size()) throw InvalidConfigError("weight count does not match batch");
}

}  // namespace

double magnetization(const SampleBatch& batch, const std::vector<double>& weights) {
  check_weighted_batch(batch, weights);
  double m = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) m += weights[k] * batch.configs[k].magnetization();
  return m;
}

double abs_magnetization(const SampleBatch& batch, const std::vector<double>& weights) {
  check_weighted_batch(batch, weights);
  double m = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) m += weights[k] * std::abs(batch.configs[k].magnetization());
  return m;
}

EnergyEstimate evaluate(const Ansatz& psi, const ModelParams& model, Sampler& sampler, int batches, int jobs) {
  if (batches < 1) throw ConfigError("evaluation needs at least one batch");
  struct Part {
    std::vector<double> re;
    std::vector<double> w;
  };
  std::vector<Part> parts;
  EnergyEstimate est;
  for (int i = 0; i < batches; ++i) {
    const SampleBatch batch = sampler.sample(psi);
    const BatchEvaluation ev = evaluate_batch(psi, model, batch, false, jobs);
    est.energy += ev.mean_eloc() / static_cast<double>(batches);
    est.abs_magnetization += abs_magnetization(batch, ev.weights) / batches;
    est.magnetization += magnetization(batch, ev.weights) / batches;
    est.samples += static_cast<std::int64_t>(batch.size());
    est.divergent += ev.divergent_count;
    Part p;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      p.re.push_back(ev.eloc[k].real());
      p.w.push_back(ev.weights[k]);
    }
    parts.push_back(std::move(p));
  }
  for (const auto& p : parts) {
    for (std::size_t k = 0; k < p.re.size(); ++k) {
      const double d = p.re[k] - est.energy.real();
      est.var_re += p.w[k] * d * d / batches;
    }
  }
  return est;
}

TrainResult train(Ansatz& psi, const ModelParams& model, Sampler& sampler, const TrainConfig& config,
                  const StepObserver& observer) {
  validate(config);
  if (psi.n_sites() != model.n()) throw InvalidConfigError("ansatz and model disagree on N");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Adam adam(psi.n_params(), config.learning_rate, config.beta1, config.beta2, config.epsilon);
  TrainResult result;
  RealVector theta = psi.params();

  for (int step = 1; step <= config.steps; ++step) {
    const SampleBatch batch = sampler.sample(psi);
    const BatchEvaluation ev = evaluate_batch(psi, model, batch, true, config.jobs);
    const std::size_t b = batch.size();
    if (ev.divergent_count > config.max_divergent_fraction * static_cast<double>(b)) {
      throw TrainingAbortedError("step " + std::to_string(step) + ": " + std::to_string(ev.divergent_count) +
                                 " of " + std::to_string(b) + " local energies diverged");
    }
    TrainingRecord rec;
    rec.step = step;
    const std::complex<double> mean = ev.mean_eloc();
    rec.mean_re_eloc = mean.real();
    rec.mean_im_eloc = mean.imag();
    rec.var_re_eloc = ev.var_re_eloc();
    rec.divergent = ev.divergent_count;

    std::vector<double> base(b);
    std::vector<double> targets(b);
    const double sign_im = mean.imag() > 0 ? 1.0 : (mean.imag() < 0 ? -1.0 : 0.0);
    for (std::size_t k = 0; k < b; ++k) {
      base[k] = ev.divergent[k] ? 0.0 : config.target(ev.eloc[k]);
      targets[k] = base[k];
      if (ev.divergent[k] || config.alpha == 0.0) continue;
      if (config.regularizer == Regularizer::kImagMean) {
        targets[k] += config.alpha * sign_im * ev.eloc[k].imag();
      } else {
        const double d = ev.eloc[k].real() - mean.real();
        targets[k] += config.alpha * d * d;
      }
    }
    rec.loss = b >= 2 ? loss_real(ev.log_psi, base, ev.weights) : 0.0;
    rec.loss = config.regularizer == Regularizer::kImagMean ? regularize(rec.loss, ev.eloc, config.alpha, ev.weights)
                                                            : rec.loss + config.alpha * rec.var_re_eloc;

    RealVector grad = loss_gradient(ev.log_derivs, targets, ev.weights);
    rec.grad_norm = grad.norm();
    if (!std::isfinite(rec.grad_norm)) {
      rec.skipped = true;
      if (++result.skipped_steps > config.max_skipped_steps) {
        throw TrainingAbortedError("too many non-finite gradients (last at step " + std::to_string(step) + ")");
      }
    } else {
      if (rec.grad_norm > config.clip_norm) grad *= config.clip_norm / rec.grad_norm;
      adam.step(theta, grad);
      psi.set_params(theta);
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    result.records.push_back(rec);
    if (observer) observer(rec, psi);
  }
  if (config.eval_batches > 0) result.final_estimate = evaluate(psi, model, sampler, config.eval_batches, config.jobs);
  return result;
}

void write_training_csv(std::ostream& os, const std::vector<TrainingRecord>& records, bool wall_time) {
  os << "step,mean_re_eloc,mean_im_eloc,var_re_eloc,wall_ms,neg_abs_mean_eloc\n" << std::setprecision(17);
  for (const auto& r : records) {
    os << r.step << ',' << r.mean_re_eloc << ',' << r.mean_im_eloc << ',' << r.var_re_eloc << ','
       << (wall_time ? r.wall_ms : 0.0) << ',' << r.neg_abs_mean_eloc() << '\n';
  }
}

}  // namespace nhnqs
