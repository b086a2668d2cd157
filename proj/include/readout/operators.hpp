// Copyright 2026 The readout-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace readout {

using cplx = std::complex<double>;

/// Dense complex square matrix on a Hilbert space; holds Hamiltonians,
/// collapse operators and density matrices. Row-major, immutable by
/// convention after construction (all algebra returns new values).
class Operator {
 public:
  Operator() = default;
  explicit Operator(std::size_t dim) : dim_(dim), a_(dim * dim, cplx(0.0, 0.0)) {}
  Operator(std::size_t dim, std::vector<cplx> entries);

  std::size_t dim() const { return dim_; }
  const cplx* data() const { return a_.data(); }
  cplx* data() { return a_.data(); }

  cplx operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }

  Operator adjoint() const;
  cplx trace() const;

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  Operator operator*(const Operator& o) const;  // matrix product

  /// max_ij |A_ij - B_ij|
  double max_abs_diff(const Operator& o) const;
  /// max_ij |A_ij - (A^dag)_ij|
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> a_;
};

/// Composite-space bookkeeping, fixed ordering atom (x) cavity:
/// index(level, photon) = level * n_fock + photon.
struct SpaceLayout {
  std::size_t n_levels = 0;
  std::size_t n_fock = 0;

  std::size_t dim() const { return n_levels * n_fock; }
  std::size_t index(std::size_t level, std::size_t photon) const {
    return level * n_fock + photon;
  }
};

Operator identity(std::size_t dim);

/// Kronecker product, result[(i*bd+k),(j*bd+l)] = a[i,j]*b[k,l].
Operator kron(const Operator& a, const Operator& b);

/// Cavity ladder operator on the bare Fock space: A[n-1,n] = sqrt(n).
/// Throws std::invalid_argument for n_fock < 2.
Operator annihilation(std::size_t n_fock);

/// |to><from| (x) I_cavity on the composite space.
/// Throws std::invalid_argument for out-of-range level indices.
Operator transition(const SpaceLayout& layout, std::size_t from_level,
                    std::size_t to_level);

/// Cavity annihilation operator lifted to the composite space.
Operator cavity_annihilation(const SpaceLayout& layout);

/// Tr(op * rho). Throws on dimension mismatch.
cplx expectation(const Operator& op, const Operator& rho);

/// Eigenvalues of the Hermitian part (A + A^dag)/2, ascending.
/// Cyclic Jacobi; intended for the small dimensions used here (<= 48).
std::vector<double> hermitian_eigenvalues(const Operator& a);

/// Smallest eigenvalue of (A + A^dag)/2; the positivity figure for density
/// matrices.
double min_hermitian_eigenvalue(const Operator& a);

/// Density matrix |level, 0_cav><level, 0_cav| (atom in `level`, cavity vacuum).
Operator vacuum_state(const SpaceLayout& layout, std::size_t level);

}  // namespace readout
