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
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nhnqs/spin_model.hpp"

namespace nhnqs {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kDefaultMaxSites = 14;

// Global spin flip prod_j sigma^x_j commutes with H. Even/odd sectors use
// representatives with site 1 up; the partner state carries sign +1 / -1.
enum class Sector { kFull, kEven, kOdd };

std::string to_string(Sector s);

class Basis {
 public:
  Basis(int n, Sector sector);

  int n() const { return n_; }
  Sector sector() const { return sector_; }
  std::int64_t dim() const { return dim_; }
  // Full-space index of basis vector `i`.
  std::uint64_t state(std::int64_t i) const { return static_cast<std::uint64_t>(i); }
  // Basis position and sign of full-space state `s`.
  std::pair<std::int64_t, double> locate(std::uint64_t s) const;

 private:
  int n_;
  Sector sector_;
  std::int64_t dim_;
  std::uint64_t mask_;
};

// z-basis operator: diagonal(x) + sum_k c_k sigma^x_{site_k}.
struct SpinOperator {
  std::function<std::complex<double>(const SpinConfig&)> diagonal;
  std::vector<std::pair<int, std::complex<double>>> flips;

  static SpinOperator identity();
  static SpinOperator magnetization();      // N^-1 sum_i sigma^z_i
  static SpinOperator abs_magnetization();  // |N^-1 sum_i sigma^z_i|, Z2 invariant
  static SpinOperator hamiltonian(const ModelParams& p);
};

// Dense H in the lexicographic z basis (or a parity sector of it).
ComplexMatrix build_dense(const ModelParams& p, Sector sector = Sector::kFull,
                          int max_sites = kDefaultMaxSites);

ComplexVector apply(const SpinOperator& op, const ComplexVector& v, const Basis& basis);

struct EigenOptions {
  bool vectors = true;
  bool left = true;
  // Left vectors come from inverting the right-vector matrix below this
  // condition number, from a separate decomposition of H^dagger above it.
  double max_condition = 1e10;
  // Skip the O(dim^3) residual check above this dimension.
  std::int64_t residual_check_max_dim = 1024;
};

struct Spectrum {
  explicit Spectrum(ModelParams p) : params(p) {}

  ComplexVector eigenvalues;
  // Columns r_i with unit Euclidean norm.
  ComplexMatrix right_vectors;
  // Columns l_i with l_i^dagger r_j = delta_ij, so <Psi_L| = l^dagger.
  ComplexMatrix left_vectors;
  ModelParams params;
  Sector sector = Sector::kFull;
  bool left_from_inverse = false;
  double condition_estimate = 0.0;
  // max |l_i^dagger r_j - delta_ij| outside declared clusters; negative if unchecked.
  double biorthonormality_residual = -1.0;
  // Index groups whose left/right pairing could not be normalized (EP-degenerate).
  std::vector<std::vector<int>> degenerate_clusters;
  std::vector<std::string> warnings;

  std::int64_t dim() const { return eigenvalues.size(); }
  bool has_vectors() const { return right_vectors.size() > 0; }
  bool has_left() const { return left_vectors.size() > 0; }
  bool in_degenerate_cluster(int index) const;
  Basis basis() const { return {params.n(), sector}; }
  // log <x|Psi_R> and log <Psi_L|x> of eigenpair `index` (full sector only).
  LogPsiFn right_log_psi(int index) const;
  LogPsiFn left_log_psi(int index) const;
};

Spectrum eigendecompose(const ComplexMatrix& h, const ModelParams& p, Sector sector = Sector::kFull,
                        const EigenOptions& options = {});

Spectrum diagonalize(const ModelParams& p, Sector sector = Sector::kFull, const EigenOptions& options = {},
                     int max_sites = kDefaultMaxSites);

// Minimal Re(E); ties broken by smaller |Im E|, then smaller Im E, then index.
int select_ground(const ComplexVector& eigenvalues);
inline int select_ground(const Spectrum& s) { return select_ground(s.eigenvalues); }

std::complex<double> biorthogonal_expectation(const Spectrum& s, int index, const ComplexMatrix& op);
std::complex<double> biorthogonal_expectation(const Spectrum& s, int index, const SpinOperator& op);

// max_{i != j} |v_i^dagger v_j| over unit-normalized columns. Pairs whose
// eigenvalues coincide are skipped when `skip_degenerate` is set.
double max_overlap(const ComplexMatrix& vectors, const ComplexVector* eigenvalues = nullptr,
                   bool skip_degenerate = false);
// Degenerate pairs are skipped only in the Hermitian limit xi = 0.
double max_overlap(const Spectrum& s);

// Eigenvalues sorted by (Re, Im); stable, used as band order in scans.
std::vector<std::complex<double>> sorted_eigenvalues(const ComplexVector& eigenvalues);

enum class ScanAxis { kXi, kEta };

struct ScanPoint {
  double param = 0.0;
  std::vector<std::complex<double>> eigenvalues;  // band order
  double max_overlap = 0.0;
  std::vector<std::string> warnings;
};

ModelParams at_param(const ModelParams& base, ScanAxis axis, double value);

std::vector<ScanPoint> spectral_scan(const ModelParams& base, ScanAxis axis, const std::vector<double>& grid,
                                     int jobs = 1, int max_sites = kDefaultMaxSites);

struct ExceptionalPoint {
  double param = 0.0;
  double overlap = 0.0;
  double grid_param = 0.0;
  double grid_overlap = 0.0;
};

struct EpSearchOptions {
  double threshold = 1.0 - 1e-3;
  // Grid local maxima below this are not refined.
  double candidate_floor = 0.9;
  int refine_iterations = 60;
};

// Overlap peaks of a scan refined by golden-section search inside the
// neighbouring grid bracket; peaks reaching `threshold` are reported.
std::vector<ExceptionalPoint> find_exceptional_points(const ModelParams& base, ScanAxis axis,
                                                      const std::vector<ScanPoint>& scan,
                                                      const EpSearchOptions& options = {});

void write_scan_spectrum_csv(std::ostream& os, const std::vector<ScanPoint>& scan);
void write_scan_overlap_csv(std::ostream& os, const std::vector<ScanPoint>& scan);

// Monotone grid lo, lo+step, ..., hi (inclusive within step/1e6).
std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace nhnqs
