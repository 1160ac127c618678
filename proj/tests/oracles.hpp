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

// Reference constructions used only by tests. Nothing here calls into the
// library's Hamiltonian code.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

// Single-site operator at 1-based `site` of an n-site chain; site 1 is the
// leftmost Kronecker factor. Basis |0> = up, |1> = down.
inline Mat site_op(int n, int site, const Mat& op) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 1; k <= n; ++k) out = kron(out, k == site ? op : Mat::Identity(2, 2));
  return out;
}

inline Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// H = -J sum z_k z_{k+1} - g sum_{odd k} x_k - conj(g) sum_{even k} x_k.
inline Mat hamiltonian(int n, double j, double eta, double xi, bool periodic) {
  const cd g(eta, xi);
  const int dim = 1 << n;
  Mat h = Mat::Zero(dim, dim);
  const int bonds = periodic ? n : n - 1;
  for (int k = 1; k <= bonds; ++k) {
    const int next = k % n + 1;
    h -= j * site_op(n, k, pauli_z()) * site_op(n, next, pauli_z());
  }
  for (int k = 1; k <= n; ++k) h -= (k % 2 == 1 ? g : std::conj(g)) * site_op(n, k, pauli_x());
  return h;
}

// Diagonal operator N^-1 |sum_k z_k|.
inline Mat abs_magnetization(int n) {
  Mat m = Mat::Zero(1 << n, 1 << n);
  for (int k = 1; k <= n; ++k) m += site_op(n, k, pauli_z());
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) = std::abs(m(i, i)) / n;
  return m;
}

// Thermodynamic-limit ground energy per spin of the Hermitian chain
// -J sum z z - h sum x, by Simpson quadrature of the free-fermion dispersion.
inline double tfim_energy_per_spin(double h, double j = 1.0, int panels = 20000) {
  auto f = [&](double k) { return std::sqrt(j * j + h * h + 2.0 * j * h * std::cos(k)); };
  const double a = 0.0;
  const double b = M_PI;
  const double step = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * step);
  return -(s * step / 3.0) / M_PI;
}

// Total-variation distance between two distributions on the same support.
inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return 0.5 * d;
}

}  // namespace oracle
