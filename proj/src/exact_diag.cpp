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

#include "nhnqs/exact_diag.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "nhnqs/errors.hpp"
#include "nhnqs/parallel.hpp"

namespace nhnqs {

std::string to_string(Sector s) {
  switch (s) {
    case Sector::kFull:
      return "full";
    case Sector::kEven:
      return "even";
    case Sector::kOdd:
      return "odd";
  }
  return "full";
}

Basis::Basis(int n, Sector sector) : n_(n), sector_(sector) {
  if (n < 1 || n > 30) throw SizeError("basis supports 1..30 sites");
  const std::int64_t full = std::int64_t{1} << n;
  dim_ = sector == Sector::kFull ? full : full / 2;
  mask_ = static_cast<std::uint64_t>(full - 1);
}

std::pair<std::int64_t, double> Basis::locate(std::uint64_t s) const {
  if (sector_ == Sector::kFull || static_cast<std::int64_t>(s) < dim_) {
    return {static_cast<std::int64_t>(s), 1.0};
  }
  return {static_cast<std::int64_t>(s ^ mask_), sector_ == Sector::kEven ? 1.0 : -1.0};
}

SpinOperator SpinOperator::identity() {
  return {[](const SpinConfig&) { return std::complex<double>(1.0); }, {}};
}

SpinOperator SpinOperator::magnetization() {
  return {[](const SpinConfig& x) { return std::complex<double>(x.magnetization()); }, {}};
}

SpinOperator SpinOperator::abs_magnetization() {
  return {[](const SpinConfig& x) { return std::complex<double>(std::abs(x.magnetization())); }, {}};
}

SpinOperator SpinOperator::hamiltonian(const ModelParams& p) {
  SpinOperator op;
  op.diagonal = [p](const SpinConfig& x) { return std::complex<double>(diagonal_energy(x, p)); };
  for (int site = 0; site < p.n(); ++site) op.flips.emplace_back(site, -p.field(site));
  return op;
}

ComplexMatrix build_dense(const ModelParams& p, Sector sector, int max_sites) {
  const int n = p.n();
  if (n > max_sites) {
    throw SizeError("dense ED limited to N <= " + std::to_string(max_sites) + ", got N = " + std::to_string(n));
  }
  const Basis basis(n, sector);
  const std::int64_t dim = basis.dim();
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    const std::uint64_t s = basis.state(col);
    h(col, col) += diagonal_energy(SpinConfig::from_index(n, s), p);
    for (int site = 0; site < n; ++site) {
      const auto [row, sign] = basis.locate(s ^ (std::uint64_t{1} << (n - 1 - site)));
      h(row, col) += sign * -p.field(site);
    }
  }
  return h;
}

ComplexVector apply(const SpinOperator& op, const ComplexVector& v, const Basis& basis) {
  if (v.size() != basis.dim()) throw InvalidConfigError("vector does not match basis dimension");
  const int n = basis.n();
  ComplexVector w = ComplexVector::Zero(v.size());
  for (std::int64_t i = 0; i < basis.dim(); ++i) {
    const std::uint64_t s = basis.state(i);
    if (op.diagonal) {
      const SpinConfig x = SpinConfig::from_index(n, s);
      const std::complex<double> d = op.diagonal(x);
      if (basis.sector() != Sector::kFull && std::abs(d - op.diagonal(x.spin_flipped())) > 1e-14 * (1.0 + std::abs(d))) {
        throw InvalidConfigError("diagonal operator is not spin-flip invariant; use the full sector");
      }
      w(i) += d * v(i);
    }
    for (const auto& [site, c] : op.flips) {
      const auto [j, sign] = basis.locate(s ^ (std::uint64_t{1} << (n - 1 - site)));
      w(i) += c * sign * v(j);
    }
  }
  return w;
}

bool Spectrum::in_degenerate_cluster(int index) const {
  for (const auto& c : degenerate_clusters) {
    if (std::find(c.begin(), c.end(), index) != c.end()) return true;
  }
  return false;
}

LogPsiFn Spectrum::right_log_psi(int index) const {
  if (sector != Sector::kFull) throw ConfigError("amplitude lookup needs a full-sector spectrum");
  ComplexVector r = right_vectors.col(index);
  return [r](const SpinConfig& x) { return LogAmplitude(std::log(r(static_cast<Eigen::Index>(x.index())))); };
}

LogPsiFn Spectrum::left_log_psi(int index) const {
  if (sector != Sector::kFull) throw ConfigError("amplitude lookup needs a full-sector spectrum");
  ComplexVector l = left_vectors.col(index);
  return [l](const SpinConfig& x) {
    return LogAmplitude(std::log(std::conj(l(static_cast<Eigen::Index>(x.index())))));
  };
}

namespace {

struct EigResult {
  ComplexVector values;
  ComplexMatrix vectors;
};

EigResult zgeev(const ComplexMatrix& h, bool vectors) {
  const lapack_int n = static_cast<lapack_int>(h.rows());
  ComplexMatrix a = h;
  EigResult out;
  out.values.resize(n);
  std::complex<double> dummy;
  if (vectors) out.vectors.resize(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a.data(), n, out.values.data(), &dummy, 1,
                    vectors ? out.vectors.data() : &dummy, vectors ? n : 1);
  if (info != 0) throw Error("zgeev failed with info = " + std::to_string(info));
  return out;
}

// Inverse of `r` if its 1-norm condition number is below `max_condition`.
bool invert_if_conditioned(const ComplexMatrix& r, double max_condition, ComplexMatrix& inverse, double& cond) {
  const lapack_int n = static_cast<lapack_int>(r.rows());
  inverse = r;
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const double anorm = LAPACKE_zlange(LAPACK_COL_MAJOR, '1', n, n, inverse.data(), n);
  lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, inverse.data(), n, ipiv.data());
  if (info > 0) {
    cond = std::numeric_limits<double>::infinity();
    return false;
  }
  if (info < 0) throw Error("zgetrf failed");
  double rcond = 0.0;
  info = LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, inverse.data(), n, anorm, &rcond);
  if (info != 0) throw Error("zgecon failed");
  cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond < max_condition)) return false;
  info = LAPACKE_zgetri(LAPACK_COL_MAJOR, n, inverse.data(), n, ipiv.data());
  if (info != 0) throw Error("zgetri failed");
  return true;
}

double spectral_scale(const ComplexVector& values) {
  return std::max(1.0, values.size() > 0 ? values.cwiseAbs().maxCoeff() : 0.0);
}

}  // namespace

Spectrum eigendecompose(const ComplexMatrix& h, const ModelParams& p, Sector sector, const EigenOptions& options) {
  if (h.rows() != h.cols() || h.rows() == 0) throw InvalidConfigError("Hamiltonian must be square and non-empty");
  if (!h.allFinite()) throw InvalidConfigError("Hamiltonian has non-finite entries");
  Spectrum spec(p);
  spec.sector = sector;
  EigResult right = zgeev(h, options.vectors);
  spec.eigenvalues = std::move(right.values);
  if (!options.vectors) return spec;

  spec.right_vectors = std::move(right.vectors);
  spec.right_vectors.colwise().normalize();
  if (!options.left) return spec;

  const std::int64_t dim = spec.dim();
  const double scale = spectral_scale(spec.eigenvalues);
  ComplexMatrix inverse;
  std::vector<int> unpaired;
  if (invert_if_conditioned(spec.right_vectors, options.max_condition, inverse, spec.condition_estimate)) {
    spec.left_vectors = inverse.adjoint();
    spec.left_from_inverse = true;
  } else {
    // Near an EP: decompose H^dagger separately and pair mu_k with conj(lambda_j).
    spec.warnings.push_back("right eigenvectors ill-conditioned (cond ~ " + std::to_string(spec.condition_estimate) +
                            "); left vectors from H^dagger");
    EigResult adj = zgeev(h.adjoint(), true);
    spec.left_vectors.resize(dim, dim);
    std::vector<bool> used(static_cast<std::size_t>(dim), false);
    for (std::int64_t j = 0; j < dim; ++j) {
      std::int64_t best = -1;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::int64_t k = 0; k < dim; ++k) {
        if (used[static_cast<std::size_t>(k)]) continue;
        const double d = std::abs(adj.values(k) - std::conj(spec.eigenvalues(j)));
        if (d < best_dist) {
          best_dist = d;
          best = k;
        }
      }
      used[static_cast<std::size_t>(best)] = true;
      spec.left_vectors.col(j) = adj.vectors.col(best);
    }
  }

  for (std::int64_t j = 0; j < dim; ++j) {
    const std::complex<double> d = spec.left_vectors.col(j).dot(spec.right_vectors.col(j));
    if (std::abs(d) < 1e-10) {
      unpaired.push_back(static_cast<int>(j));
    } else {
      spec.left_vectors.col(j) /= std::conj(d);
    }
  }

  // Group every unpaired index with its (near-)coalescing partners.
  std::set<int> clustered;
  for (int j : unpaired) {
    if (clustered.count(j)) continue;
    std::vector<int> cluster;
    for (std::int64_t k = 0; k < dim; ++k) {
      if (std::abs(spec.eigenvalues(k) - spec.eigenvalues(j)) < 1e-6 * scale) {
        cluster.push_back(static_cast<int>(k));
        clustered.insert(static_cast<int>(k));
      }
    }
    spec.warnings.push_back("biorthonormalization failed in a cluster of " + std::to_string(cluster.size()) +
                            " eigenvalues near " + std::to_string(spec.eigenvalues(j).real()) + " + " +
                            std::to_string(spec.eigenvalues(j).imag()) + "i");
    spec.degenerate_clusters.push_back(std::move(cluster));
  }

  if (dim <= options.residual_check_max_dim) {
    const ComplexMatrix gram = spec.left_vectors.adjoint() * spec.right_vectors;
    double residual = 0.0;
    for (std::int64_t i = 0; i < dim; ++i) {
      if (clustered.count(static_cast<int>(i))) continue;
      for (std::int64_t j = 0; j < dim; ++j) {
        if (clustered.count(static_cast<int>(j))) continue;
        residual = std::max(residual, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
      }
    }
    spec.biorthonormality_residual = residual;
  }
  return spec;
}

Spectrum diagonalize(const ModelParams& p, Sector sector, const EigenOptions& options, int max_sites) {
  return eigendecompose(build_dense(p, sector, max_sites), p, sector, options);
}

int select_ground(const ComplexVector& eigenvalues) {
  if (eigenvalues.size() == 0) throw InvalidConfigError("empty spectrum");
  int best = 0;
  for (int i = 1; i < eigenvalues.size(); ++i) {
    const auto& a = eigenvalues(i);
    const auto& b = eigenvalues(best);
    if (a.real() != b.real()) {
      if (a.real() < b.real()) best = i;
    } else if (std::abs(a.imag()) != std::abs(b.imag())) {
      if (std::abs(a.imag()) < std::abs(b.imag())) best = i;
    } else if (a.imag() < b.imag()) {
      best = i;
    }
  }
  return best;
}

namespace {

std::complex<double> biorthogonal_ratio(const Spectrum& s, int index, const ComplexVector& o_r) {
  const auto l = s.left_vectors.col(index);
  const std::complex<double> den = l.dot(s.right_vectors.col(index));
  if (std::abs(den) < 1e-12) {
    throw SelfOrthogonalityError("<Psi_L|Psi_R> = " + std::to_string(std::abs(den)) +
                                 " vanishes; state is self-orthogonal near an exceptional point");
  }
  return l.dot(o_r) / den;
}

void require_pair(const Spectrum& s, int index) {
  if (!s.has_left()) throw ConfigError("spectrum was computed without left eigenvectors");
  if (index < 0 || index >= s.dim()) throw InvalidConfigError("eigenpair index out of range");
}

}  // namespace

std::complex<double> biorthogonal_expectation(const Spectrum& s, int index, const ComplexMatrix& op) {
  require_pair(s, index);
  if (op.rows() != s.dim() || op.cols() != s.dim()) throw InvalidConfigError("operator dimension mismatch");
  return biorthogonal_ratio(s, index, op * s.right_vectors.col(index));
}

std::complex<double> biorthogonal_expectation(const Spectrum& s, int index, const SpinOperator& op) {
  require_pair(s, index);
  return biorthogonal_ratio(s, index, apply(op, s.right_vectors.col(index), s.basis()));
}

double max_overlap(const ComplexMatrix& vectors, const ComplexVector* eigenvalues, bool skip_degenerate) {
  ComplexMatrix v = vectors;
  v.colwise().normalize();
  const ComplexMatrix gram = v.adjoint() * v;
  const double tol = eigenvalues ? 1e-8 * spectral_scale(*eigenvalues) : 0.0;
  double best = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) {
      if (skip_degenerate && eigenvalues && std::abs((*eigenvalues)(i) - (*eigenvalues)(j)) <= tol) continue;
      best = std::max(best, std::abs(gram(i, j)));
    }
  }
  return best;
}

double max_overlap(const Spectrum& s) {
  if (!s.has_vectors()) throw ConfigError("spectrum was computed without eigenvectors");
  return max_overlap(s.right_vectors, &s.eigenvalues, s.params.xi() == 0.0);
}

std::vector<std::complex<double>> sorted_eigenvalues(const ComplexVector& eigenvalues) {
  std::vector<std::complex<double>> out(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

ModelParams at_param(const ModelParams& base, ScanAxis axis, double value) {
  return axis == ScanAxis::kXi ? base.with_field(base.eta(), value) : base.with_field(value, base.xi());
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (step == 0.0 || !std::isfinite(step)) throw ConfigError("grid step must be finite and non-zero");
  if ((hi - lo) * step < 0.0) throw ConfigError("grid step sign is inconsistent with its endpoints");
  const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-6)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  // Snap so that 3.0 - 30 * 0.1 lands on 0 rather than 4e-16.
  for (std::int64_t i = 0; i < count; ++i) {
    grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return grid;
}

namespace {

double overlap_at(const ModelParams& base, ScanAxis axis, double value, int max_sites) {
  const ModelParams p = at_param(base, axis, value);
  EigenOptions opts;
  opts.left = false;
  return max_overlap(diagonalize(p, Sector::kFull, opts, max_sites));
}

}  // namespace

std::vector<ScanPoint> spectral_scan(const ModelParams& base, ScanAxis axis, const std::vector<double>& grid, int jobs,
                                     int max_sites) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if ((grid[i] - grid[i - 1]) * (grid.back() - grid.front()) <= 0.0) throw ConfigError("scan grid must be monotone");
  }
  std::vector<ScanPoint> out(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    const ModelParams p = at_param(base, axis, grid[i]);
    EigenOptions opts;
    opts.left = false;
    const Spectrum s = diagonalize(p, Sector::kFull, opts, max_sites);
    out[i].param = grid[i];
    out[i].eigenvalues = sorted_eigenvalues(s.eigenvalues);
    out[i].max_overlap = max_overlap(s);
    out[i].warnings = s.warnings;
  });
  return out;
}

std::vector<ExceptionalPoint> find_exceptional_points(const ModelParams& base, ScanAxis axis,
                                                      const std::vector<ScanPoint>& scan,
                                                      const EpSearchOptions& options) {
  std::vector<ExceptionalPoint> eps;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t k = 1; k + 1 < scan.size(); ++k) {
    const double m = scan[k].max_overlap;
    if (!(m > scan[k - 1].max_overlap && m >= scan[k + 1].max_overlap && m >= options.candidate_floor)) continue;
    double a = scan[k - 1].param;
    double b = scan[k + 1].param;
    double best_x = scan[k].param;
    double best = m;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = overlap_at(base, axis, c, kDefaultMaxSites);
    double fd = overlap_at(base, axis, d, kDefaultMaxSites);
    for (int it = 0; it < options.refine_iterations; ++it) {
      if (fc > best) best = fc, best_x = c;
      if (fd > best) best = fd, best_x = d;
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = overlap_at(base, axis, c, kDefaultMaxSites);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = overlap_at(base, axis, d, kDefaultMaxSites);
      }
    }
    if (best >= options.threshold) eps.push_back({best_x, best, scan[k].param, m});
  }
  return eps;
}

void write_scan_spectrum_csv(std::ostream& os, const std::vector<ScanPoint>& scan) {
  os << "param,k,re_E_k,im_E_k\n" << std::setprecision(15);
  for (const auto& pt : scan) {
    for (std::size_t k = 0; k < pt.eigenvalues.size(); ++k) {
      os << pt.param << ',' << k << ',' << pt.eigenvalues[k].real() << ',' << pt.eigenvalues[k].imag() << '\n';
    }
  }
}

void write_scan_overlap_csv(std::ostream& os, const std::vector<ScanPoint>& scan) {
  os << "param,max_overlap\n" << std::setprecision(15);
  for (const auto& pt : scan) os << pt.param << ',' << pt.max_overlap << '\n';
}

}  // namespace nhnqs
