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

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nhnqs/ansatz.hpp"
#include "nhnqs/random.hpp"
#include "nhnqs/spin_model.hpp"

namespace nhnqs {

struct SamplerConfig {
  int batch = 1024;
  std::uint64_t seed = 111;
  int burn_in = 100;  // sweeps, chain samplers only
  int thinning = 1;   // sweeps between kept samples; one sweep = N site updates
  int jobs = 1;
};

void validate(const SamplerConfig& c);

// Samples plus, when they were not drawn from |Psi|^2 itself, the log of the
// (possibly unnormalized) density they were drawn from. Expectations then
// use self-normalized weights exp(2 Re log Psi - log_proposal).
struct SampleBatch {
  std::vector<SpinConfig> configs;
  std::vector<double> log_proposal;

  std::size_t size() const { return configs.size(); }
  bool reweighted() const { return !log_proposal.empty(); }
};

class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual std::string name() const = 0;
  virtual SampleBatch sample(const Ansatz& psi) = 0;
  // Drops chain state so the next call burns in again.
  virtual void reset() {}
};

// Independent draws from P(x) = prod_i P(x_i | x_<i) of the underlying RNN.
class AutoregressiveSampler : public Sampler {
 public:
  explicit AutoregressiveSampler(SamplerConfig config);
  std::string name() const override { return "autoregressive"; }
  SampleBatch sample(const Ansatz& psi) override;
  void reset() override;
  // Network passes performed so far (one per sample).
  std::int64_t passes() const { return passes_; }

  static SpinConfig draw(const Rnn& rnn, Rng& rng);

 private:
  SamplerConfig config_;
  Rng rng_;
  std::int64_t passes_ = 0;
};

// Block Gibbs on |F|^2 of the underlying RBM, written as a real RBM with
// two hidden copies. Heat-bath site updates replace the block move when
// the parameters have imaginary parts.
class GibbsSampler : public Sampler {
 public:
  explicit GibbsSampler(SamplerConfig config);
  std::string name() const override { return "gibbs"; }
  SampleBatch sample(const Ansatz& psi) override;
  void reset() override { chains_.clear(); }
  const std::vector<SpinConfig>& chains() const { return chains_; }

  // One x -> (h, h') -> x' update of a real-parameter RBM.
  static void block_update(const Rbm& rbm, SpinConfig& x, Rng& rng);
  // N heat-bath single-site updates in site order on |F|^2.
  static void site_sweep(const Rbm& rbm, SpinConfig& x, Rng& rng);

 private:
  SamplerConfig config_;
  std::vector<SpinConfig> chains_;
  std::vector<Rng> rngs_;
};

// Single uniform spin-flip Metropolis on |Psi|^2, one chain per batch slot.
class MetropolisSampler : public Sampler {
 public:
  static constexpr int kMaxRestarts = 100;

  explicit MetropolisSampler(SamplerConfig config);
  std::string name() const override { return "metropolis"; }
  SampleBatch sample(const Ansatz& psi) override;
  void reset() override { chains_.clear(); }
  const std::vector<SpinConfig>& chains() const { return chains_; }
  double acceptance_rate() const { return proposed_ ? static_cast<double>(accepted_) / proposed_ : 0.0; }
  // Proposal site counts, for checking uniformity.
  const std::vector<std::int64_t>& proposal_counts() const { return proposal_counts_; }

 private:
  SamplerConfig config_;
  std::vector<SpinConfig> chains_;
  std::vector<Rng> rngs_;
  std::int64_t proposed_ = 0;
  std::int64_t accepted_ = 0;
  std::vector<std::int64_t> proposal_counts_;
};

// Every basis state once, weighted by |Psi|^2 (small N only).
class EnumerationSampler : public Sampler {
 public:
  explicit EnumerationSampler(int max_sites = 16) : max_sites_(max_sites) {}
  std::string name() const override { return "enumeration"; }
  SampleBatch sample(const Ansatz& psi) override;

 private:
  int max_sites_;
};

SpinConfig random_config(int n, Rng& rng);

// Sampler matched to the architecture: RNN autoregressive, RBM Gibbs, MLP Metropolis.
std::unique_ptr<Sampler> make_sampler(Architecture a, const SamplerConfig& config);
std::unique_ptr<Sampler> make_sampler(const std::string& kind, Architecture a, const SamplerConfig& config);

// Self-normalized weights of a batch under `psi`; log amplitudes are taken
// from `log_psi` (same order as the batch).
std::vector<double> batch_weights(const SampleBatch& batch, const std::vector<LogAmplitude>& log_psi);

}  // namespace nhnqs
