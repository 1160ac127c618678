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
#include <functional>
#include <limits>
#include <iosfwd>
#include <string>
#include <vector>

#include "nhnqs/ansatz.hpp"
#include "nhnqs/sampling.hpp"
#include "nhnqs/series.hpp"
#include "nhnqs/spin_model.hpp"
#include "nhnqs/vmc.hpp"

namespace nhnqs {

struct SweepPlan {
  double eta_start = 3.0;
  double eta_end = 0.0;
  double step = -0.1;
  XiRule xi_rule;
  bool warm_start = false;
  int steps_per_point = 1000;

  std::vector<double> grid() const;
};

// Ground state of both parity sectors, lowest Re E.
struct EdGround {
  std::complex<double> energy;
  double abs_magnetization = 0.0;  // biorthogonal <|M|> / N, real part
  std::string sector;
};

EdGround ed_ground_state(const ModelParams& model);

struct SweepPoint {
  double eta = 0.0;
  double xi = 0.0;
  Architecture arch = Architecture::kRnn;
  bool warm = false;
  std::complex<double> energy_per_spin;
  std::complex<double> initial_energy_per_spin;  // batch mean at the first step
  double abs_m = 0.0;
  double m = 0.0;
  double eps_vs_ed = std::numeric_limits<double>::quiet_NaN();
  double ed_energy_per_spin = std::numeric_limits<double>::quiet_NaN();
  double ed_abs_m = std::numeric_limits<double>::quiet_NaN();
  SeriesPoint series;
  bool aborted = false;
  std::string message;
  std::vector<TrainingRecord> records;
};

struct SweepOptions {
  bool overlay_ed = true;  // only where N fits the ED cap
  bool overlay_se = true;
  int ed_max_sites = 12;
  int jobs = 1;  // cold sweeps only
  // Called with the ansatz about to be trained at grid index k.
  std::function<void(std::size_t, const Ansatz&)> on_start;
  std::function<void(const SweepPoint&, const Ansatz&)> on_point;
};

// Trains one point per grid value. Warm sweeps load each point from the
// checkpoint of the previous one and keep the sampler (and its chains);
// cold sweeps start every point from a fresh initialization.
std::vector<SweepPoint> run_sweep(const SweepPlan& plan, const AnsatzConfig& ansatz, const ModelParams& model_template,
                                  const TrainConfig& train_config, const SamplerConfig& sampler_config,
                                  const SweepOptions& options = {});

// eta, xi, arch, warm, energy_per_spin_re, energy_per_spin_im, abs_m, eps_vs_ed,
// then initial_energy_per_spin_re, ed_energy_per_spin, ed_abs_m, se_e_low,
// se_e_high, se_extrapolated, status
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);

}  // namespace nhnqs
