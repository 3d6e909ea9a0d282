// Copyright 2026 The qmetro Authors
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

/**
 * @file core.hpp
 * Dense complex linear algebra for small Hilbert spaces: kets, density
 * operators, Kronecker products, partial traces, the SU(d) generator basis
 * and the matrix exponential together with its directional derivative.
 *
 * Composite indices are row-major: the leftmost tensor factor is the most
 * significant digit.
 */
#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qmetro {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation fails numerically (bound violated, residual too large, ...).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Largest absolute entry of a matrix, 0 for empty input.
double max_abs(const CMatrix &m);
double max_abs(const RMatrix &m);

/// Normalized pure state on C^dim.
class Ket {
  public:
    /// Throws DomainError when the amplitudes are empty or not normalized within @p tol.
    explicit Ket(CVector amplitudes, double tol = 1e-12);

    /// Rescales arbitrary nonzero amplitudes onto the unit sphere.
    static Ket normalized(CVector amplitudes);
    static Ket basis(Eigen::Index dim, Eigen::Index index);

    [[nodiscard]] Eigen::Index dim() const { return amplitudes_.size(); }
    [[nodiscard]] const CVector &amplitudes() const { return amplitudes_; }
    [[nodiscard]] Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }
    [[nodiscard]] CMatrix projector() const;

  private:
    CVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator {
  public:
    /// Validates hermiticity (1e-12 entrywise), trace (1e-12) and PSD (min eig >= -1e-10).
    explicit DensityOperator(CMatrix matrix);
    explicit DensityOperator(const Ket &ket);

    [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }
    [[nodiscard]] const CMatrix &matrix() const { return matrix_; }
    [[nodiscard]] double purity() const;

    /// U rho U^dagger. Positivity is inherited from the input so only the
    /// cheap hermiticity and trace checks are repeated.
    [[nodiscard]] DensityOperator conjugated(const CMatrix &unitary) const;

  private:
    struct Trusted {};
    DensityOperator(CMatrix matrix, Trusted);
    CMatrix matrix_;
};

/// Orthonormal Hermitian traceless basis of su(d), tr{t_j t_k} = delta_jk.
struct GeneratorBasis {
    int d = 0;
    std::vector<CMatrix> generators;

    [[nodiscard]] int size() const { return static_cast<int>(generators.size()); }
    /// i * sum_j theta_j t_j.
    [[nodiscard]] CMatrix skew_generator(std::span<const double> theta) const;
};

/// Kronecker product a (x) b with a as the most significant factor.
CMatrix kron(const CMatrix &a, const CMatrix &b);
CVector kron(const CVector &a, const CVector &b);

/// Kronecker product over an ordered, nonempty list of factors.
Ket tensor(std::span<const Ket> factors);
CMatrix tensor(std::span<const CMatrix> factors);

/// Reduced operator on the factors listed in @p keep (any order, kept factors
/// stay in their original relative order).
CMatrix partial_trace(const CMatrix &op, std::span<const int> factor_dims, std::span<const int> keep);
DensityOperator partial_trace(const DensityOperator &rho, std::span<const int> factor_dims,
                              std::span<const int> keep);

/// Generalized Gell-Mann matrices scaled to unit Hilbert-Schmidt norm. The
/// ordering is: for each pair j < k the symmetric then antisymmetric element,
/// followed by the d - 1 diagonal elements.
GeneratorBasis gell_mann_basis(int d);

bool is_skew_hermitian(const CMatrix &a, double tol = 1e-13);
bool is_hermitian(const CMatrix &a, double tol = 1e-12);
double min_hermitian_eigenvalue(const CMatrix &a);

/// exp(A). Skew-Hermitian input goes through a Hermitian eigendecomposition;
/// everything else uses scaling and squaring with a Pade approximant.
CMatrix matrix_exp(const CMatrix &a);

/// Frechet derivative of exp at A in direction E, read off the upper-right
/// block of exp([[A, E], [0, A]]).
CMatrix exp_directional_derivative(const CMatrix &a, const CMatrix &e);

}  // namespace qmetro
