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

#include "nhnqs/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "nhnqs/checkpoint.hpp"
#include "nhnqs/errors.hpp"
#include "nhnqs/exact_diag.hpp"
#include "nhnqs/run_config.hpp"
#include "nhnqs/series.hpp"
#include "nhnqs/sweep.hpp"
#include "nhnqs/vmc.hpp"

namespace fs = std::filesystem;

namespace nhnqs {

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw ConfigError("grid must look like lo:hi:step, got '" + spec + "'");
  return make_grid(parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]));
}

namespace {

// Options shared by every subcommand that builds a RunConfig.
struct ConfigOptions {
  std::string file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app, const std::vector<std::string>& keys) {
    app->add_option("--config", file, "key = value configuration file");
    for (const auto& k : keys) {
      std::string flag = "--" + k;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (k == "architecture") flag += ",--arch";
      app->add_option(flag, values[k], "config key " + k);
    }
  }

  RunConfig resolve(const CLI::App* app, const std::vector<std::string>& keys) const {
    RunConfig c;
    if (!file.empty()) c = load_config(file, c);
    for (const auto& k : keys) {
      std::string flag = "--" + k;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (app->count(flag) > 0) c.set(k, values.at(k));
    }
    return c;
  }
};

fs::path output_dir(const std::string& flag) {
  fs::path dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    dir = env && *env ? fs::path(env) : fs::path(".");
  }
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

const std::vector<std::string> kModelKeys = {"n", "eta", "xi", "j", "boundary"};

int cmd_ed(const RunConfig& c, const std::string& sector_name, const fs::path& dir, std::ostream& out) {
  const ModelParams model = c.model();
  const Sector sector = sector_name == "even" ? Sector::kEven : sector_name == "odd" ? Sector::kOdd : Sector::kFull;
  if (sector_name != "full" && sector_name != "even" && sector_name != "odd") {
    throw ConfigError("sector must be full, even or odd");
  }
  const ComplexMatrix h = build_dense(model, sector);
  EigenOptions opts;
  opts.vectors = false;
  opts.left = false;
  const Spectrum s = eigendecompose(h, model, sector, opts);
  const auto sorted = sorted_eigenvalues(s.eigenvalues);

  const fs::path path = dir / "ed_spectrum.csv";
  std::ofstream os = open_output(path);
  write_metadata(os, make_metadata("ed", c, {{"sector", sector_name}}));
  os << "k,re_E,im_E\n" << std::setprecision(15);
  for (std::size_t k = 0; k < sorted.size(); ++k) os << k << ',' << sorted[k].real() << ',' << sorted[k].imag() << '\n';

  // Trace and conjugate-closure checks.
  const std::complex<double> trace_err = s.eigenvalues.sum() - h.trace();
  double closure = 0.0;
  for (Eigen::Index a = 0; a < s.dim(); ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index b = 0; b < s.dim(); ++b) best = std::min(best, std::abs(std::conj(s.eigenvalues(a)) - s.eigenvalues(b)));
    closure = std::max(closure, best);
  }
  const std::complex<double> e0 = s.eigenvalues(select_ground(s));
  out << std::setprecision(12);
  out << "dimension " << s.dim() << " (" << to_string(sector) << " sector)\n";
  out << "ground_energy " << e0.real() << " " << e0.imag() << "\n";
  out << "energy_per_spin " << e0.real() / model.n() << "\n";
  out << "max_abs_im " << s.eigenvalues.imag().cwiseAbs().maxCoeff() << "\n";
  out << "trace_residual " << std::abs(trace_err) << "\n";
  out << "conjugate_closure_residual " << closure << (closure < 1e-8 ? " (pass)" : " (fail)") << "\n";
  if (model.n() <= 12) {
    const EdGround g = ed_ground_state(model);
    out << "biorthogonal_abs_m " << g.abs_magnetization << "\n";
  }
  out << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_train(const RunConfig& c, const std::string& warm_path, int checkpoint_every, bool wall_time,
              const fs::path& dir, const std::string& tag, std::ostream& out) {
  c.validate();
  const ModelParams model = c.model();
  std::unique_ptr<Ansatz> psi = make_ansatz(c.ansatz(), c.seed);
  std::vector<std::string> inputs;
  if (!warm_path.empty()) {
    std::ifstream is(warm_path);
    if (!is) throw ConfigError("cannot read checkpoint " + warm_path);
    std::stringstream buf;
    buf << is.rdbuf();
    inputs.push_back(buf.str());
    std::istringstream cs(buf.str());
    Checkpoint ck = read_checkpoint(cs);
    if (ck.ansatz->config() != psi->config()) {
      throw ConfigError("warm-start checkpoint (" + to_string(ck.ansatz->architecture()) + ", N = " +
                        std::to_string(ck.ansatz->n_sites()) + ") does not match the requested ansatz (" +
                        to_string(psi->architecture()) + ", N = " + std::to_string(psi->n_sites()) + ")");
    }
    psi->set_params(ck.ansatz->params());
  }
  std::unique_ptr<Sampler> sampler = make_sampler(c.sampler, c.architecture, c.sampler_config());
  const Metadata meta = make_metadata("train", c, {{"warm_start", warm_path.empty() ? "none" : warm_path}}, inputs);

  const std::string prefix = tag.empty() ? "" : tag + "_";
  StepObserver observer;
  if (checkpoint_every > 0) {
    observer = [&](const TrainingRecord& r, const Ansatz& a) {
      if (r.step % checkpoint_every != 0) return;
      std::ofstream os = open_output(dir / (prefix + "step" + std::to_string(r.step) + ".ckpt"));
      write_checkpoint(os, a, model, c.seed, r.step);
    };
  }
  const TrainResult result = train(*psi, model, *sampler, c.train_config(), observer);

  const fs::path log_path = dir / (prefix + "training.csv");
  {
    std::ofstream os = open_output(log_path);
    write_metadata(os, meta);
    write_training_csv(os, result.records, wall_time);
  }
  const fs::path ck_path = dir / (prefix + "final.ckpt");
  {
    std::ostringstream ck;
    write_checkpoint(ck, *psi, model, c.seed, c.steps);
    std::string text = ck.str();
    std::ostringstream header;
    write_metadata(header, meta);
    const auto first_newline = text.find('\n');
    text.insert(first_newline + 1, header.str());
    std::ofstream os = open_output(ck_path);
    os << text;
  }
  const EnergyEstimate& est = result.final_estimate;
  const TrainingRecord& last = result.records.back();
  out << std::setprecision(12);
  out << "final_mean_re_eloc " << last.mean_re_eloc << "\n";
  out << "final_mean_im_eloc " << last.mean_im_eloc << "\n";
  out << "final_var_re_eloc " << last.var_re_eloc << "\n";
  if (c.eval_batches > 0) {
    out << "eval_energy " << est.energy.real() << " " << est.energy.imag() << "\n";
    out << "eval_energy_per_spin " << est.energy.real() / c.n << "\n";
    out << "eval_abs_m " << est.abs_magnetization << "\n";
  }
  out << "skipped_steps " << result.skipped_steps << "\n";
  out << "wrote " << log_path.string() << " " << ck_path.string() << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& c, const SweepPlan& plan, const std::string& overlay, int point_jobs,
              const fs::path& dir, std::ostream& out) {
  c.validate();
  SweepOptions opts;
  opts.overlay_ed = overlay.find("ed") != std::string::npos;
  opts.overlay_se = overlay.find("se") != std::string::npos;
  opts.jobs = point_jobs;
  RunConfig inner = c;
  inner.jobs = 1;
  const auto points =
      run_sweep(plan, c.ansatz(), c.model(), inner.train_config(), inner.sampler_config(), opts);
  const fs::path path = dir / ("sweep_" + to_string(c.architecture) + (plan.warm_start ? "_tl" : "_cold") + ".csv");
  std::ofstream os = open_output(path);
  write_metadata(os, make_metadata("sweep", c,
                                   {{"eta_start", format_double(plan.eta_start)},
                                    {"eta_end", format_double(plan.eta_end)},
                                    {"step", format_double(plan.step)},
                                    {"xi_rule", plan.xi_rule.to_string()},
                                    {"warm_start", plan.warm_start ? "true" : "false"},
                                    {"steps_per_point", std::to_string(plan.steps_per_point)},
                                    {"overlay", overlay}}));
  write_sweep_csv(os, points);
  int aborted = 0;
  for (const auto& p : points) aborted += p.aborted ? 1 : 0;
  out << "points " << points.size() << " aborted " << aborted << "\n";
  out << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_series(const RunConfig& c, const std::string& grid_spec, const XiRule& rule, double split,
               const fs::path& dir, std::ostream& out) {
  const auto grid = parse_grid(grid_spec);
  const auto points = extrapolate(grid, rule, c.j, split);
  const fs::path path = dir / "series.csv";
  std::ofstream os = open_output(path);
  write_metadata(os, make_metadata("series", c,
                                   {{"grid", grid_spec}, {"xi_rule", rule.to_string()}, {"split", format_double(split)}}));
  write_series_csv(os, points);
  out << std::setprecision(12) << "points " << points.size() << "\n";
  if (const auto x = branch_crossing(grid.front(), grid.back(), rule, c.j)) {
    out << "branch_crossing " << *x << "\n";
  } else {
    out << "branch_crossing none\n";
  }
  out << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_ep_scan(const RunConfig& c, const std::string& axis_name, const std::string& grid_spec, double threshold,
                int jobs, const fs::path& dir, std::ostream& out) {
  const ScanAxis axis = axis_name == "eta" ? ScanAxis::kEta : ScanAxis::kXi;
  if (axis_name != "xi" && axis_name != "eta") throw ConfigError("scan axis must be xi or eta");
  const auto grid = parse_grid(grid_spec);
  const ModelParams base = c.model();
  const auto scan = spectral_scan(base, axis, grid, jobs);
  EpSearchOptions ep_opts;
  ep_opts.threshold = threshold;
  const auto eps = find_exceptional_points(base, axis, scan, ep_opts);

  const Metadata meta = make_metadata("ep-scan", c,
                                      {{"axis", axis_name}, {"grid", grid_spec}, {"threshold", format_double(threshold)}});
  const fs::path spec_path = dir / "ep_spectrum.csv";
  const fs::path ov_path = dir / "ep_overlap.csv";
  {
    std::ofstream os = open_output(spec_path);
    write_metadata(os, meta);
    write_scan_spectrum_csv(os, scan);
  }
  {
    std::ofstream os = open_output(ov_path);
    write_metadata(os, meta);
    write_scan_overlap_csv(os, scan);
  }
  out << std::setprecision(10);
  out << "exceptional_points " << eps.size() << "\n";
  for (const auto& e : eps) out << "ep " << axis_name << " = " << e.param << " overlap " << e.overlap << "\n";
  double min_im = std::numeric_limits<double>::infinity();
  int nonzero_param_points = 0;
  for (const auto& pt : scan) {
    if (pt.param == 0.0) continue;
    double m = 0.0;
    for (const auto& e : pt.eigenvalues) m = std::max(m, std::abs(e.imag()));
    min_im = std::min(min_im, m);
    ++nonzero_param_points;
  }
  if (nonzero_param_points > 0) out << "min_over_grid_max_abs_im " << min_im << "\n";
  out << "wrote " << spec_path.string() << " " << ov_path.string() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural-network variational Monte Carlo for the non-Hermitian transverse-field Ising chain", "nhnqs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::string out_dir;
  app.add_option("--out-dir", out_dir, std::string("output directory (default: $") + kOutDirEnv + " or .)");

  const std::vector<std::string> all_keys = config_keys();

  CLI::App* ed = app.add_subcommand("ed", "exact diagonalization spectrum and ground state");
  ConfigOptions ed_cfg;
  ed_cfg.attach(ed, kModelKeys);
  std::string sector = "full";
  ed->add_option("--sector", sector, "full, even or odd spin-flip sector");

  CLI::App* tr = app.add_subcommand("train", "variational training of one model point");
  ConfigOptions tr_cfg;
  tr_cfg.attach(tr, all_keys);
  std::string warm;
  int checkpoint_every = 0;
  bool no_wall = false;
  std::string tag;
  tr->add_option("--warm-start", warm, "checkpoint to start from");
  tr->add_option("--checkpoint-every", checkpoint_every, "write a checkpoint every K steps");
  tr->add_flag("--no-wall-time", no_wall, "write 0 in the wall_ms column");
  tr->add_option("--tag", tag, "output file prefix");

  CLI::App* sw = app.add_subcommand("sweep", "field sweep with or without transfer learning");
  ConfigOptions sw_cfg;
  sw_cfg.attach(sw, all_keys);
  SweepPlan plan;
  std::string sw_xi_rule = "ratio:0.1";
  std::string overlay = "ed,se";
  int point_jobs = 1;
  sw->add_option("--eta-start", plan.eta_start);
  sw->add_option("--eta-end", plan.eta_end);
  sw->add_option("--step", plan.step);
  sw->add_option("--xi-rule", sw_xi_rule, "ratio:<r> (xi = r eta) or a fixed xi");
  sw->add_flag("--tl", plan.warm_start, "warm-start each point from the previous one");
  sw->add_option("--steps-per-point,--fine-steps", plan.steps_per_point, "training steps at every point");
  sw->add_option("--overlay", overlay, "comma list of ed, se (or none)");
  sw->add_option("--point-jobs", point_jobs, "parallel points for cold sweeps");

  CLI::App* se = app.add_subcommand("series", "low/high-field series and their extrapolation");
  ConfigOptions se_cfg;
  se_cfg.attach(se, {"j"});
  std::string se_grid = "0:3:0.1";
  std::string se_xi_rule = "ratio:0.1";
  double split = kDefaultSplit;
  se->add_option("--grid", se_grid, "eta grid lo:hi:step");
  se->add_option("--xi-rule", se_xi_rule, "ratio:<r> (xi = r eta) or a fixed xi");
  se->add_option("--split", split, "low branch for eta <= split");

  CLI::App* ep = app.add_subcommand("ep-scan", "eigenvector-overlap scan for exceptional points");
  ConfigOptions ep_cfg;
  ep_cfg.attach(ep, {"n", "eta", "xi", "j", "boundary", "jobs"});
  std::string axis = "xi";
  std::string ep_grid = "0:1:0.002";
  double threshold = EpSearchOptions{}.threshold;
  ep->add_option("--axis", axis, "scanned parameter: xi or eta");
  ep->add_option("--grid", ep_grid, "scan grid lo:hi:step");
  ep->add_option("--threshold", threshold, "overlap counted as an exceptional point");

  std::vector<std::string> argv_store{"nhnqs"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  // Lets "--xi 0:1:0.002" name the scan grid, as in the ep-scan usage.
  const auto sub = std::find(argv_store.begin(), argv_store.end(), "ep-scan");
  if (sub != argv_store.end()) {
    for (auto k = static_cast<std::size_t>(sub - argv_store.begin()) + 1; k + 1 < argv_store.size(); ++k) {
      if (argv_store[k] == "--xi" && argv_store[k + 1].find(':') != std::string::npos) argv_store[k] = "--grid";
    }
  }
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForVersion&) {
      out << kVersion << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      err << e.what() << "\n";
      return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }
    const fs::path dir = output_dir(out_dir);
    if (*ed) return cmd_ed(ed_cfg.resolve(ed, kModelKeys), sector, dir, out);
    if (*tr) return cmd_train(tr_cfg.resolve(tr, all_keys), warm, checkpoint_every, !no_wall, dir, tag, out);
    if (*sw) {
      plan.xi_rule = parse_xi_rule(sw_xi_rule);
      return cmd_sweep(sw_cfg.resolve(sw, all_keys), plan, overlay, point_jobs, dir, out);
    }
    if (*se) return cmd_series(se_cfg.resolve(se, {"j"}), se_grid, parse_xi_rule(se_xi_rule), split, dir, out);
    if (*ep) {
      const RunConfig c = ep_cfg.resolve(ep, {"n", "eta", "xi", "j", "boundary", "jobs"});
      return cmd_ep_scan(c, axis, ep_grid, threshold, c.jobs, dir, out);
    }
  } catch (const SizeError& e) {
    err << "size error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace nhnqs
