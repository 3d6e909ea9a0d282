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

#include "qmetro/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace qmetro {

namespace {

constexpr double kStateTol = 1e-12;
constexpr double kPsdTol = 1e-10;

void require_square(const CMatrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DomainError(std::string(what) + ": matrix must be square and nonempty");
    }
}

}  // namespace

double max_abs(const CMatrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const RMatrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(CVector amplitudes, double tol) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() < 1) {
        throw DomainError("Ket: dimension must be >= 1");
    }
    const double norm2 = amplitudes_.squaredNorm();
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > tol) {
        throw DomainError("Ket: amplitudes are not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
    }
}

Ket Ket::normalized(CVector amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DomainError("Ket::normalized: zero or non-finite vector");
    }
    amplitudes /= norm;
    return Ket(std::move(amplitudes));
}

Ket Ket::basis(Eigen::Index dim, Eigen::Index index) {
    if (dim < 1 || index < 0 || index >= dim) {
        throw DomainError("Ket::basis: index out of range");
    }
    CVector v = CVector::Zero(dim);
    v[index] = 1.0;
    return Ket(std::move(v));
}

CMatrix Ket::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

// ---------------------------------------------------------------------------
// DensityOperator

namespace {

void check_hermitian_unit_trace(const CMatrix &m) {
    if (!is_hermitian(m, kStateTol)) {
        throw DomainError("DensityOperator: matrix is not Hermitian");
    }
    const Complex tr = m.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > kStateTol) {
        throw DomainError("DensityOperator: trace is " + std::to_string(tr.real()) + ", expected 1");
    }
}

}  // namespace

DensityOperator::DensityOperator(CMatrix matrix) : matrix_(std::move(matrix)) {
    require_square(matrix_, "DensityOperator");
    check_hermitian_unit_trace(matrix_);
    if (min_hermitian_eigenvalue(matrix_) < -kPsdTol) {
        throw DomainError("DensityOperator: matrix is not positive semidefinite");
    }
}

DensityOperator::DensityOperator(const Ket &ket) : matrix_(ket.projector()) {}

DensityOperator::DensityOperator(CMatrix matrix, Trusted) : matrix_(std::move(matrix)) {
    check_hermitian_unit_trace(matrix_);
}

double DensityOperator::purity() const {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return matrix_.squaredNorm();
}

DensityOperator DensityOperator::conjugated(const CMatrix &unitary) const {
    if (unitary.rows() != dim() || unitary.cols() != dim()) {
        throw DomainError("DensityOperator::conjugated: dimension mismatch");
    }
    CMatrix out = unitary * matrix_ * unitary.adjoint();
    // Symmetrize away rounding so the hermiticity check measures real defects only.
    out = (0.5 * (out + out.adjoint())).eval();
    return DensityOperator(std::move(out), Trusted{});
}

// ---------------------------------------------------------------------------
// GeneratorBasis

CMatrix GeneratorBasis::skew_generator(std::span<const double> theta) const {
    if (static_cast<int>(theta.size()) != size()) {
        throw DomainError("parameter vector has length " + std::to_string(theta.size()) + ", expected " +
                          std::to_string(size()));
    }
    CMatrix a = CMatrix::Zero(d, d);
    for (int j = 0; j < size(); ++j) {
        a += Complex(0.0, theta[static_cast<std::size_t>(j)]) * generators[static_cast<std::size_t>(j)];
    }
    return a;
}

GeneratorBasis gell_mann_basis(int d) {
    if (d < 2) {
        throw DomainError("gell_mann_basis: d must be >= 2");
    }
    GeneratorBasis basis;
    basis.d = d;
    basis.generators.reserve(static_cast<std::size_t>(d * d - 1));
    const double s = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            CMatrix sym = CMatrix::Zero(d, d);
            sym(j, k) = s;
            sym(k, j) = s;
            basis.generators.push_back(std::move(sym));

            CMatrix anti = CMatrix::Zero(d, d);
            anti(j, k) = Complex(0.0, -s);
            anti(k, j) = Complex(0.0, s);
            basis.generators.push_back(std::move(anti));
        }
    }
    for (int l = 1; l < d; ++l) {
        const double c = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        CMatrix diag = CMatrix::Zero(d, d);
        for (int m = 0; m < l; ++m) {
            diag(m, m) = c;
        }
        diag(l, l) = -c * l;
        basis.generators.push_back(std::move(diag));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Products and partial traces

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CVector kron(const CVector &a, const CVector &b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a[i] * b;
    }
    return out;
}

Ket tensor(std::span<const Ket> factors) {
    if (factors.empty()) {
        throw DomainError("tensor: empty factor list");
    }
    CVector acc = factors.front().amplitudes();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        acc = kron(acc, factors[i].amplitudes());
    }
    return Ket::normalized(std::move(acc));
}

CMatrix tensor(std::span<const CMatrix> factors) {
    if (factors.empty()) {
        throw DomainError("tensor: empty factor list");
    }
    CMatrix acc = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        if (factors[i].size() == 0) {
            throw DomainError("tensor: empty factor");
        }
        acc = kron(acc, factors[i]);
    }
    return acc;
}

CMatrix partial_trace(const CMatrix &op, std::span<const int> factor_dims, std::span<const int> keep) {
    require_square(op, "partial_trace");
    if (keep.empty()) {
        throw DomainError("partial_trace: keep set is empty");
    }
    const int nf = static_cast<int>(factor_dims.size());
    Eigen::Index total = 1;
    for (int dim : factor_dims) {
        if (dim < 1) {
            throw DomainError("partial_trace: factor dimensions must be >= 1");
        }
        total *= dim;
    }
    if (total != op.rows()) {
        throw DomainError("partial_trace: factor dimensions multiply to " + std::to_string(total) +
                          ", operator has dimension " + std::to_string(op.rows()));
    }
    std::vector<bool> kept(static_cast<std::size_t>(nf), false);
    for (int k : keep) {
        if (k < 0 || k >= nf || kept[static_cast<std::size_t>(k)]) {
            throw DomainError("partial_trace: keep indices must be distinct factor indices");
        }
        kept[static_cast<std::size_t>(k)] = true;
    }

    // Strides of each factor in the composite (row-major) index.
    std::vector<Eigen::Index> stride(static_cast<std::size_t>(nf), 1);
    for (int f = nf - 2; f >= 0; --f) {
        stride[static_cast<std::size_t>(f)] =
            stride[static_cast<std::size_t>(f + 1)] * factor_dims[static_cast<std::size_t>(f + 1)];
    }
    std::vector<int> kept_f, traced_f;
    Eigen::Index dim_keep = 1, dim_trace = 1;
    for (int f = 0; f < nf; ++f) {
        if (kept[static_cast<std::size_t>(f)]) {
            kept_f.push_back(f);
            dim_keep *= factor_dims[static_cast<std::size_t>(f)];
        } else {
            traced_f.push_back(f);
            dim_trace *= factor_dims[static_cast<std::size_t>(f)];
        }
    }
    auto offsets = [&](const std::vector<int> &fs, Eigen::Index count) {
        std::vector<Eigen::Index> out(static_cast<std::size_t>(count));
        for (Eigen::Index i = 0; i < count; ++i) {
            Eigen::Index rem = i, off = 0;
            for (auto it = fs.rbegin(); it != fs.rend(); ++it) {
                const int dim = factor_dims[static_cast<std::size_t>(*it)];
                off += (rem % dim) * stride[static_cast<std::size_t>(*it)];
                rem /= dim;
            }
            out[static_cast<std::size_t>(i)] = off;
        }
        return out;
    };
    const auto keep_off = offsets(kept_f, dim_keep);
    const auto trace_off = offsets(traced_f, dim_trace);

    CMatrix out = CMatrix::Zero(dim_keep, dim_keep);
    for (Eigen::Index a = 0; a < dim_keep; ++a) {
        for (Eigen::Index b = 0; b < dim_keep; ++b) {
            Complex acc = 0.0;
            for (Eigen::Index t = 0; t < dim_trace; ++t) {
                acc += op(keep_off[static_cast<std::size_t>(a)] + trace_off[static_cast<std::size_t>(t)],
                          keep_off[static_cast<std::size_t>(b)] + trace_off[static_cast<std::size_t>(t)]);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

DensityOperator partial_trace(const DensityOperator &rho, std::span<const int> factor_dims,
                              std::span<const int> keep) {
    CMatrix reduced = partial_trace(rho.matrix(), factor_dims, keep);
    reduced = (0.5 * (reduced + reduced.adjoint())).eval();
    return DensityOperator(std::move(reduced));
}

// ---------------------------------------------------------------------------
// Exponentials

bool is_skew_hermitian(const CMatrix &a, double tol) {
    return a.rows() == a.cols() && max_abs(CMatrix(a + a.adjoint())) <= tol * std::max(1.0, max_abs(a));
}

bool is_hermitian(const CMatrix &a, double tol) {
    return a.rows() == a.cols() && max_abs(CMatrix(a - a.adjoint())) <= tol;
}

double min_hermitian_eigenvalue(const CMatrix &a) {
    const CMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("min_hermitian_eigenvalue: eigensolver failed");
    }
    return es.eigenvalues().minCoeff();
}

CMatrix matrix_exp(const CMatrix &a) {
    require_square(a, "matrix_exp");
    if (is_skew_hermitian(a)) {
        // A = iH with H Hermitian: exp(A) = V diag(e^{i lambda}) V^dagger.
        const CMatrix h = Complex(0.0, -0.5) * (a - a.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        if (es.info() != Eigen::Success) {
            throw NumericalError("matrix_exp: eigensolver failed");
        }
        CVector phases(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < phases.size(); ++i) {
            phases[i] = std::polar(1.0, es.eigenvalues()[i]);
        }
        const CMatrix &v = es.eigenvectors();
        return v * phases.asDiagonal() * v.adjoint();
    }
    return a.exp();
}

CMatrix exp_directional_derivative(const CMatrix &a, const CMatrix &e) {
    require_square(a, "exp_directional_derivative");
    if (e.rows() != a.rows() || e.cols() != a.cols()) {
        throw DomainError("exp_directional_derivative: A and E must have the same shape");
    }
    const Eigen::Index n = a.rows();
    CMatrix block = CMatrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = a;
    block.topRightCorner(n, n) = e;
    block.bottomRightCorner(n, n) = a;
    const CMatrix expd = block.exp();
    return expd.topRightCorner(n, n);
}

}  // namespace qmetro
