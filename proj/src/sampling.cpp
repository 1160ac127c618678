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

#include "nhnqs/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "nhnqs/errors.hpp"
#include "nhnqs/parallel.hpp"

namespace nhnqs {

void validate(const SamplerConfig& c) {
  if (c.batch < 1) throw ConfigError("sampler batch must be >= 1");
  if (c.thinning < 1) throw ConfigError("sampler thinning must be >= 1");
  if (c.burn_in < 0) throw ConfigError("sampler burn-in must be >= 0");
}

SpinConfig random_config(int n, Rng& rng) {
  std::vector<std::int8_t> s(static_cast<std::size_t>(n));
  for (auto& v : s) v = rng.bernoulli(0.5) ? 1 : -1;
  return SpinConfig(std::move(s));
}

namespace {

double sigmoid(double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); }

std::vector<Rng> chain_streams(const SamplerConfig& c, const char* name) {
  std::vector<Rng> out;
  out.reserve(static_cast<std::size_t>(c.batch));
  for (int k = 0; k < c.batch; ++k) out.push_back(make_stream(c.seed, name, static_cast<std::uint64_t>(k)));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- autoregressive

AutoregressiveSampler::AutoregressiveSampler(SamplerConfig config)
    : config_(config), rng_(derive_seed(config.seed, "autoregressive")) {
  validate(config_);
}

void AutoregressiveSampler::reset() {
  rng_ = Rng(derive_seed(config_.seed, "autoregressive"));
  passes_ = 0;
}

namespace {

SpinConfig draw_with_log_p(const Rnn& rnn, Rng& rng, double& log_p) {
  const int n = rnn.n_sites();
  std::vector<std::int8_t> s(static_cast<std::size_t>(n));
  Eigen::VectorXd h = Eigen::VectorXd::Zero(rnn.hidden());
  Eigen::VectorXd next;
  int prev = 1;
  log_p = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p_up = rnn.step(h, prev, next);
    const bool up = rng.uniform() < p_up;
    s[static_cast<std::size_t>(i)] = up ? 1 : -1;
    log_p += std::log((up ? p_up : 1.0 - p_up) + Rnn::kLogOffset);
    prev = up ? 1 : -1;
    h.swap(next);
  }
  return SpinConfig(std::move(s));
}

}  // namespace

SpinConfig AutoregressiveSampler::draw(const Rnn& rnn, Rng& rng) {
  double log_p = 0.0;
  return draw_with_log_p(rnn, rng, log_p);
}

SampleBatch AutoregressiveSampler::sample(const Ansatz& psi) {
  const auto* rnn = dynamic_cast<const Rnn*>(&psi.base());
  if (!rnn) throw ConfigError("autoregressive sampling needs an RNN ansatz");
  const bool wrapped = &psi.base() != &psi;
  SampleBatch batch;
  batch.configs.reserve(static_cast<std::size_t>(config_.batch));
  for (int k = 0; k < config_.batch; ++k) {
    double log_p = 0.0;
    batch.configs.push_back(draw_with_log_p(*rnn, rng_, log_p));
    if (wrapped) batch.log_proposal.push_back(log_p);
    ++passes_;
  }
  return batch;
}

// ---------------------------------------------------------------- Gibbs

GibbsSampler::GibbsSampler(SamplerConfig config) : config_(config) { validate(config_); }

void GibbsSampler::block_update(const Rbm& rbm, SpinConfig& x, Rng& rng) {
  const int n = rbm.n_sites();
  const int m = rbm.hidden();
  const Eigen::MatrixXd w = rbm.weights().real();
  Eigen::VectorXd theta = rbm.hidden_bias().real();
  for (int i = 0; i < n; ++i) theta += x[i] * w.row(i).transpose();
  Eigen::VectorXd hsum(m);
  for (int j = 0; j < m; ++j) {
    const double p = sigmoid(2.0 * theta(j));
    const double h1 = rng.uniform() < p ? 1.0 : -1.0;
    const double h2 = rng.uniform() < p ? 1.0 : -1.0;
    hsum(j) = h1 + h2;
  }
  const Eigen::VectorXd field = 2.0 * rbm.visible_bias().real() + w * hsum;
  for (int i = 0; i < n; ++i) {
    const bool up = rng.uniform() < sigmoid(2.0 * field(i));
    if ((x[i] > 0) != up) x.flip(i);
  }
}

void GibbsSampler::site_sweep(const Rbm& rbm, SpinConfig& x, Rng& rng) {
  const int n = rbm.n_sites();
  const Eigen::MatrixXcd& w = rbm.weights();
  const Eigen::VectorXcd& a = rbm.visible_bias();
  Eigen::VectorXcd theta = rbm.hidden_bias();
  for (int i = 0; i < n; ++i) theta += static_cast<double>(x[i]) * w.row(i).transpose();
  for (int i = 0; i < n; ++i) {
    const double xi = x[i];
    std::complex<double> delta = -2.0 * a(i) * xi;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      delta += log_cosh(theta(j) - 2.0 * xi * w(i, j)) - log_cosh(theta(j));
    }
    // Heat bath: flip with |F(x')|^2 / (|F(x)|^2 + |F(x')|^2).
    if (rng.uniform() < sigmoid(2.0 * delta.real())) {
      theta -= 2.0 * xi * w.row(i).transpose();
      x.flip(i);
    }
  }
}

SampleBatch GibbsSampler::sample(const Ansatz& psi) {
  const auto* rbm = dynamic_cast<const Rbm*>(&psi.base());
  if (!rbm) throw ConfigError("Gibbs sampling needs an RBM ansatz");
  const int n = rbm->n_sites();
  int sweeps = config_.thinning;
  if (chains_.empty() || chains_.front().size() != n) {
    rngs_ = chain_streams(config_, "gibbs");
    chains_.clear();
    for (auto& r : rngs_) chains_.push_back(random_config(n, r));
    sweeps += config_.burn_in;
  }
  const bool exact_block = !rbm->has_imaginary_part();
  parallel_for(chains_.size(), config_.jobs, [&](std::size_t c) {
    for (int s = 0; s < sweeps; ++s) {
      if (exact_block) {
        block_update(*rbm, chains_[c], rngs_[c]);
      } else {
        site_sweep(*rbm, chains_[c], rngs_[c]);
      }
    }
  });
  SampleBatch batch;
  batch.configs = chains_;
  if (&psi.base() != &psi) {
    for (const auto& x : batch.configs) batch.log_proposal.push_back(2.0 * rbm->log_psi(x).log_magnitude);
  }
  return batch;
}

// ---------------------------------------------------------------- Metropolis

MetropolisSampler::MetropolisSampler(SamplerConfig config) : config_(config) { validate(config_); }

namespace {

bool usable(const Ansatz& psi, const SpinConfig& x, LogAmplitude& out) {
  try {
    out = psi.log_psi(x);
  } catch (const ZeroAmplitudeError&) {
    return false;
  }
  return out.finite() && out.log_magnitude > kLogAmplitudeFloor;
}

}  // namespace

SampleBatch MetropolisSampler::sample(const Ansatz& psi) {
  const int n = psi.n_sites();
  int sweeps = config_.thinning;
  if (chains_.empty() || chains_.front().size() != n) {
    rngs_ = chain_streams(config_, "metropolis");
    chains_.clear();
    for (auto& r : rngs_) chains_.push_back(random_config(n, r));
    sweeps += config_.burn_in;
    proposal_counts_.assign(static_cast<std::size_t>(n), 0);
  }
  std::vector<std::int64_t> accepted(chains_.size(), 0);
  std::vector<std::vector<std::int64_t>> counts(chains_.size(), std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
  parallel_for(chains_.size(), config_.jobs, [&](std::size_t c) {
    SpinConfig& x = chains_[c];
    Rng& rng = rngs_[c];
    LogAmplitude current;
    int restarts = 0;
    while (!usable(psi, x, current)) {
      if (++restarts > kMaxRestarts) {
        throw ZeroAmplitudeError("Metropolis chain found no configuration with non-zero amplitude");
      }
      x = random_config(n, rng);
    }
    for (int s = 0; s < sweeps; ++s) {
      for (int k = 0; k < n; ++k) {
        const int site = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        ++counts[c][static_cast<std::size_t>(site)];
        const double u = rng.uniform();
        LogAmplitude proposed;
        if (!usable(psi, x.flipped(site), proposed)) continue;
        if (u < std::exp(2.0 * (proposed.log_magnitude - current.log_magnitude))) {
          x.flip(site);
          current = proposed;
          ++accepted[c];
        }
      }
    }
  });
  for (std::size_t c = 0; c < chains_.size(); ++c) {
    accepted_ += accepted[c];
    for (int i = 0; i < n; ++i) {
      proposal_counts_[static_cast<std::size_t>(i)] += counts[c][static_cast<std::size_t>(i)];
      proposed_ += counts[c][static_cast<std::size_t>(i)];
    }
  }
  SampleBatch batch;
  batch.configs = chains_;
  return batch;
}

// ---------------------------------------------------------------- enumeration

SampleBatch EnumerationSampler::sample(const Ansatz& psi) {
  if (psi.n_sites() > max_sites_) {
    throw SizeError("enumeration limited to N <= " + std::to_string(max_sites_));
  }
  SampleBatch batch;
  batch.configs = enumerate_configs(psi.n_sites());
  batch.log_proposal.assign(batch.configs.size(), 0.0);
  return batch;
}

std::unique_ptr<Sampler> make_sampler(Architecture a, const SamplerConfig& config) {
  switch (a) {
    case Architecture::kRnn:
      return std::make_unique<AutoregressiveSampler>(config);
    case Architecture::kRbm:
      return std::make_unique<GibbsSampler>(config);
    case Architecture::kMlp:
      return std::make_unique<MetropolisSampler>(config);
  }
  throw ConfigError("unknown architecture");
}

std::unique_ptr<Sampler> make_sampler(const std::string& kind, Architecture a, const SamplerConfig& config) {
  if (kind == "auto") return make_sampler(a, config);
  if (kind == "autoregressive") return std::make_unique<AutoregressiveSampler>(config);
  if (kind == "gibbs") return std::make_unique<GibbsSampler>(config);
  if (kind == "metropolis") return std::make_unique<MetropolisSampler>(config);
  if (kind == "enumeration") return std::make_unique<EnumerationSampler>();
  throw ConfigError("unknown sampler '" + kind + "'");
}

std::vector<double> batch_weights(const SampleBatch& batch, const std::vector<LogAmplitude>& log_psi) {
  const std::size_t b = batch.size();
  if (log_psi.size() != b) throw InvalidConfigError("log-amplitude count does not match batch");
  if (b == 0) return {};
  if (!batch.reweighted()) return std::vector<double>(b, 1.0 / static_cast<double>(b));
  std::vector<double> lw(b);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < b; ++k) {
    lw[k] = 2.0 * log_psi[k].log_magnitude - batch.log_proposal[k];
    if (std::isnan(lw[k])) lw[k] = -std::numeric_limits<double>::infinity();
    top = std::max(top, lw[k]);
  }
  if (!std::isfinite(top)) throw ZeroAmplitudeError("every sample in the batch has vanishing weight");
  double total = 0.0;
  for (auto& v : lw) {
    v = std::exp(v - top);
    total += v;
  }
  for (auto& v : lw) v /= total;
  return lw;
}

}  // namespace nhnqs
