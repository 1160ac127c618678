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

#include "nhnqs/sweep.hpp"

#include <cmath>
#include <iomanip>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>

#include "nhnqs/checkpoint.hpp"
#include "nhnqs/errors.hpp"
#include "nhnqs/exact_diag.hpp"
#include "nhnqs/parallel.hpp"

namespace nhnqs {

std::vector<double> SweepPlan::grid() const {
  if (steps_per_point < 1) throw ConfigError("sweep needs at least one training step per point");
  return make_grid(eta_start, eta_end, step);
}

EdGround ed_ground_state(const ModelParams& model) {
  EdGround best;
  bool found = false;
  for (Sector sector : {Sector::kEven, Sector::kOdd}) {
    const Spectrum s = diagonalize(model, sector);
    const int g = select_ground(s);
    const std::complex<double> e = s.eigenvalues(g);
    if (found && !(e.real() < best.energy.real())) continue;
    best.energy = e;
    best.abs_magnetization = biorthogonal_expectation(s, g, SpinOperator::abs_magnetization()).real();
    best.sector = to_string(sector);
    found = true;
  }
  return best;
}

namespace {

std::string checkpoint_text(const Ansatz& psi, const ModelParams& model, std::uint64_t seed, std::int64_t step) {
  std::ostringstream os;
  write_checkpoint(os, psi, model, seed, step);
  return os.str();
}

SweepPoint train_point(Ansatz& psi, Sampler& sampler, const ModelParams& model, const TrainConfig& cfg,
                       bool warm) {
  SweepPoint pt;
  pt.eta = model.eta();
  pt.xi = model.xi();
  pt.arch = psi.architecture();
  pt.warm = warm;
  const double n = model.n();
  try {
    TrainResult r = train(psi, model, sampler, cfg);
    pt.records = std::move(r.records);
    const EnergyEstimate& est = r.final_estimate;
    pt.energy_per_spin = est.energy / n;
    pt.abs_m = est.abs_magnetization;
    pt.m = est.magnetization;
  } catch (const Error& e) {
    pt.aborted = true;
    pt.message = e.what();
  }
  if (!pt.records.empty()) {
    pt.initial_energy_per_spin = std::complex<double>(pt.records.front().mean_re_eloc,
                                                      pt.records.front().mean_im_eloc) / n;
  }
  return pt;
}

void add_overlays(SweepPoint& pt, const ModelParams& model, const SweepOptions& options, const XiRule& rule) {
  if (options.overlay_se) {
    pt.series = series_point(model.eta(), rule, model.j());
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    pt.series.e_low = pt.series.e_high = pt.series.e_extrapolated = nan;
  }
  if (options.overlay_ed && model.n() <= options.ed_max_sites) {
    const EdGround g = ed_ground_state(model);
    pt.ed_energy_per_spin = g.energy.real() / model.n();
    pt.ed_abs_m = g.abs_magnetization;
    if (!pt.aborted) {
      pt.eps_vs_ed = std::abs(pt.ed_energy_per_spin - pt.energy_per_spin.real()) / std::abs(pt.ed_energy_per_spin);
    }
  }
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SweepPlan& plan, const AnsatzConfig& ansatz, const ModelParams& model_template,
                                  const TrainConfig& train_config, const SamplerConfig& sampler_config,
                                  const SweepOptions& options) {
  const std::vector<double> grid = plan.grid();
  if (ansatz.n != model_template.n()) throw InvalidConfigError("ansatz and model disagree on N");
  TrainConfig cfg = train_config;
  cfg.steps = plan.steps_per_point;
  std::vector<SweepPoint> out(grid.size());
  auto model_at = [&](double eta) { return model_template.with_field(eta, plan.xi_rule(eta)); };

  if (plan.warm_start) {
    std::unique_ptr<Ansatz> psi = make_ansatz(ansatz, train_config.seed);
    std::unique_ptr<Sampler> sampler = make_sampler(ansatz.architecture, sampler_config);
    std::string last_good;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const ModelParams model = model_at(grid[k]);
      if (!last_good.empty()) {
        std::istringstream is(last_good);
        psi = read_checkpoint(is).ansatz;
      } else if (k > 0) {
        // Nothing trained successfully yet: start over rather than reuse a
        // half-trained network.
        psi = make_ansatz(ansatz, train_config.seed);
      }
      if (options.on_start) options.on_start(k, *psi);
      out[k] = train_point(*psi, *sampler, model, cfg, true);
      if (!out[k].aborted) last_good = checkpoint_text(*psi, model, train_config.seed, static_cast<std::int64_t>(k));
      add_overlays(out[k], model, options, plan.xi_rule);
      if (options.on_point) options.on_point(out[k], *psi);
    }
    return out;
  }

  std::mutex callback_mutex;
  parallel_for(grid.size(), options.jobs, [&](std::size_t k) {
    const ModelParams model = model_at(grid[k]);
    std::unique_ptr<Ansatz> psi = make_ansatz(ansatz, train_config.seed);
    std::unique_ptr<Sampler> sampler = make_sampler(ansatz.architecture, sampler_config);
    if (options.on_start) {
      std::lock_guard<std::mutex> lock(callback_mutex);
      options.on_start(k, *psi);
    }
    out[k] = train_point(*psi, *sampler, model, cfg, false);
    add_overlays(out[k], model, options, plan.xi_rule);
    if (options.on_point) {
      std::lock_guard<std::mutex> lock(callback_mutex);
      options.on_point(out[k], *psi);
    }
  });
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << "eta,xi,arch,warm,energy_per_spin_re,energy_per_spin_im,abs_m,eps_vs_ed,"
        "initial_energy_per_spin_re,ed_energy_per_spin,ed_abs_m,se_e_low,se_e_high,se_extrapolated,status\n"
     << std::setprecision(12);
  auto num = [&os](double v) -> std::ostream& {
    if (std::isnan(v)) return os << "nan";
    return os << v;
  };
  for (const auto& p : points) {
    os << p.eta << ',' << p.xi << ',' << to_string(p.arch) << ',' << (p.warm ? 1 : 0) << ',';
    num(p.energy_per_spin.real()) << ',';
    num(p.energy_per_spin.imag()) << ',';
    num(p.abs_m) << ',';
    num(p.eps_vs_ed) << ',';
    num(p.initial_energy_per_spin.real()) << ',';
    num(p.ed_energy_per_spin) << ',';
    num(p.ed_abs_m) << ',';
    num(p.series.e_low) << ',';
    num(p.series.e_high) << ',';
    num(p.series.e_extrapolated) << ',';
    os << (p.aborted ? "aborted" : "ok") << '\n';
  }
}

}  // namespace nhnqs
