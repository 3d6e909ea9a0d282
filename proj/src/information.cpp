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

#include "qmetro/information.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qmetro {

namespace {

constexpr double kPovmTol = 1e-10;
constexpr double kPurityTol = 1e-10;
constexpr double kSldCutoff = 1e-12;
constexpr double kSldResidualError = 1e-6;
constexpr double kProbabilityFloor = 1e-12;
constexpr double kSingularDerivative = 1e-9;

// tr{A B} without forming the product.
Complex trace_of_product(const CMatrix &a, const CMatrix &b) { return (a.cwiseProduct(b.transpose())).sum(); }

}  // namespace

// ---------------------------------------------------------------------------
// Povm

Povm::Povm(std::vector<CMatrix> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) {
        throw DomainError("Povm: no elements");
    }
    const Eigen::Index d = elements_.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t m = 0; m < elements_.size(); ++m) {
        const auto &e = elements_[m];
        if (e.rows() != d || e.cols() != d) {
            throw DomainError("Povm: elements must be square with a common dimension");
        }
        if (!is_hermitian(e, kPovmTol)) {
            throw DomainError("Povm: element " + std::to_string(m) + " is not Hermitian");
        }
        if (min_hermitian_eigenvalue(e) < -kPovmTol) {
            throw DomainError("Povm: element " + std::to_string(m) + " is not positive semidefinite");
        }
        sum += e;
    }
    if (max_abs(CMatrix(sum - CMatrix::Identity(d, d))) > kPovmTol) {
        throw DomainError("Povm: elements do not sum to the identity");
    }
}

Povm Povm::projective_pair(const Ket &psi) {
    CMatrix p = psi.projector();
    CMatrix q = CMatrix::Identity(psi.dim(), psi.dim()) - p;
    return Povm({std::move(p), std::move(q)}, Trusted{});
}

Povm Povm::from_basis(const CMatrix &basis) {
    const Eigen::Index d = basis.rows();
    if (basis.cols() != d || max_abs(CMatrix(basis.adjoint() * basis - CMatrix::Identity(d, d))) > kPovmTol) {
        throw DomainError("Povm::from_basis: columns are not an orthonormal basis");
    }
    std::vector<CMatrix> elements;
    elements.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        elements.push_back(basis.col(k) * basis.col(k).adjoint());
    }
    return Povm(std::move(elements), Trusted{});
}

std::vector<double> Povm::probabilities(const DensityOperator &rho) const {
    if (rho.dim() != dim()) {
        throw DomainError("Povm::probabilities: dimension mismatch");
    }
    std::vector<double> p(elements_.size());
    for (std::size_t m = 0; m < elements_.size(); ++m) {
        p[m] = std::max(0.0, trace_of_product(elements_[m], rho.matrix()).real());
    }
    return p;
}

std::vector<double> Povm::probabilities(const Ket &psi) const {
    if (psi.dim() != dim()) {
        throw DomainError("Povm::probabilities: dimension mismatch");
    }
    std::vector<double> p(elements_.size());
    for (std::size_t m = 0; m < elements_.size(); ++m) {
        p[m] = std::max(0.0, psi.amplitudes().dot(elements_[m] * psi.amplitudes()).real());
    }
    return p;
}

// ---------------------------------------------------------------------------
// QFI

Eigen::Index QfiMatrix::flat_index(int channel, int param) const {
    const int p = params_per_channel > 0 ? params_per_channel : static_cast<int>(size());
    if (param < 0 || param >= p || channel < 0 || (channel + 1) * p > size()) {
        throw DomainError("QfiMatrix::flat_index: index out of range");
    }
    return static_cast<Eigen::Index>(channel) * p + param;
}

QfiMatrix qfi_pure_channel(const CMatrix &u, std::span<const CMatrix> du, const Ket &psi0) {
    const Eigen::Index dim = psi0.dim();
    if (u.rows() != dim || u.cols() != dim) {
        throw DomainError("qfi_pure_channel: channel and input dimensions differ");
    }
    const std::size_t p = du.size();
    const CVector &psi = psi0.amplitudes();
    const CVector out = u * psi;
    std::vector<CVector> dpsi(p);
    std::vector<Complex> mean(p);
    for (std::size_t j = 0; j < p; ++j) {
        if (du[j].rows() != dim || du[j].cols() != dim) {
            throw DomainError("qfi_pure_channel: derivative " + std::to_string(j) + " has the wrong shape");
        }
        dpsi[j] = du[j] * psi;
        // tr{U^j rho0 U^dagger} = <psi0| U^dagger U^j |psi0>
        mean[j] = out.dot(dpsi[j]);
    }
    QfiMatrix h;
    h.entries = RMatrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) {
            // tr{U^j rho0 U^{k dagger}} = <psi0| U^{k dagger} U^j |psi0>
            const double overlap = dpsi[k].dot(dpsi[j]).real();
            const double value = 4.0 * overlap + 4.0 * (mean[j] * mean[k]).real();
            h.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = value;
            h.entries(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = value;
        }
    }
    return h;
}

QfiMatrix qfi_pure_channel(const CMatrix &u, std::span<const CMatrix> du, const DensityOperator &rho0) {
    const double purity = rho0.purity();
    if (std::abs(purity - 1.0) > kPurityTol) {
        throw DomainError("qfi_pure_channel: input state is not pure (tr rho^2 = " + std::to_string(purity) + ")");
    }
    // For rho = |psi><psi| the column with the largest diagonal entry is psi up to a phase.
    Eigen::Index col = 0;
    rho0.matrix().diagonal().real().maxCoeff(&col);
    return qfi_pure_channel(u, du, Ket::normalized(rho0.matrix().col(col)));
}

// ---------------------------------------------------------------------------
// SLD

SldSet sld_solve(const DensityOperator &rho, std::span<const CMatrix> drho) {
    const Eigen::Index dim = rho.dim();
    for (std::size_t j = 0; j < drho.size(); ++j) {
        if (drho[j].rows() != dim || drho[j].cols() != dim) {
            throw DomainError("sld_solve: derivative " + std::to_string(j) + " has the wrong shape");
        }
        if (!is_hermitian(drho[j], 1e-10)) {
            throw DomainError("sld_solve: derivative " + std::to_string(j) + " is not Hermitian");
        }
        if (std::abs(drho[j].trace()) > 1e-10) {
            throw DomainError("sld_solve: derivative " + std::to_string(j) + " is not traceless");
        }
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
    if (es.info() != Eigen::Success) {
        throw NumericalError("sld_solve: eigensolver failed");
    }
    const RVector &q = es.eigenvalues();
    const CMatrix &v = es.eigenvectors();

    SldSet out;
    out.operators.reserve(drho.size());
    for (std::size_t j = 0; j < drho.size(); ++j) {
        const CMatrix d = v.adjoint() * drho[j] * v;
        CMatrix l = CMatrix::Zero(dim, dim);
        for (Eigen::Index a = 0; a < dim; ++a) {
            for (Eigen::Index b = 0; b < dim; ++b) {
                const double denom = q[a] + q[b];
                if (denom > kSldCutoff) {
                    l(a, b) = 2.0 * d(a, b) / denom;
                }
            }
        }
        CMatrix lambda = v * l * v.adjoint();
        lambda = (0.5 * (lambda + lambda.adjoint())).eval();
        const CMatrix recon = 0.5 * (rho.matrix() * lambda + lambda * rho.matrix());
        const double residual = max_abs(CMatrix(drho[j] - recon));
        if (residual > kSldResidualError) {
            std::ostringstream os;
            os << "sld_solve: derivative " << j << " is incompatible with the support of rho (residual "
               << residual << ")";
            throw NumericalError(os.str());
        }
        out.max_residual = std::max(out.max_residual, residual);
        out.operators.push_back(std::move(lambda));
    }
    return out;
}

QfiMatrix qfi_from_slds(const DensityOperator &rho, const SldSet &slds) {
    const std::size_t p = slds.operators.size();
    for (const auto &l : slds.operators) {
        if (l.rows() != rho.dim() || l.cols() != rho.dim()) {
            throw DomainError("qfi_from_slds: dimension mismatch");
        }
    }
    std::vector<CMatrix> rho_l(p);
    for (std::size_t k = 0; k < p; ++k) {
        rho_l[k] = rho.matrix() * slds.operators[k];
    }
    QfiMatrix h;
    h.entries = RMatrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) {
            const double value = trace_of_product(slds.operators[j], rho_l[k]).real();
            h.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = value;
            h.entries(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = value;
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Classical Fisher information

FisherMatrix fisher_from_distribution(std::span<const double> probs, const std::vector<std::vector<double>> &dprobs) {
    const std::size_t p = dprobs.size();
    FisherMatrix f;
    f.entries = RMatrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (const auto &d : dprobs) {
        if (d.size() != probs.size()) {
            throw DomainError("fisher_from_distribution: derivative length does not match outcome count");
        }
    }
    for (std::size_t m = 0; m < probs.size(); ++m) {
        if (probs[m] <= kProbabilityFloor) {
            for (std::size_t j = 0; j < p; ++j) {
                if (std::abs(dprobs[j][m]) >= kSingularDerivative) {
                    std::ostringstream os;
                    os << "fisher_information: outcome " << m << " has vanishing probability " << probs[m]
                       << " but derivative " << dprobs[j][m] << " (singular parametrization)";
                    throw NumericalError(os.str());
                }
            }
            continue;
        }
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < p; ++k) {
                f.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
                    dprobs[j][m] * dprobs[k][m] / probs[m];
            }
        }
    }
    return f;
}

FisherMatrix fisher_information(const Povm &povm, const DensityOperator &rho, std::span<const CMatrix> drho) {
    if (povm.dim() != rho.dim()) {
        throw DomainError("fisher_information: measurement and state dimensions differ");
    }
    std::vector<double> probs(povm.size());
    std::vector<std::vector<double>> dprobs(drho.size(), std::vector<double>(povm.size()));
    for (std::size_t m = 0; m < povm.size(); ++m) {
        probs[m] = trace_of_product(povm[m], rho.matrix()).real();
        for (std::size_t j = 0; j < drho.size(); ++j) {
            if (drho[j].rows() != rho.dim() || drho[j].cols() != rho.dim()) {
                throw DomainError("fisher_information: derivative has the wrong shape");
            }
            dprobs[j][m] = trace_of_product(povm[m], drho[j]).real();
        }
    }
    return fisher_from_distribution(probs, dprobs);
}

double min_symmetric_eigenvalue(const RMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    const RMatrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("min_symmetric_eigenvalue: eigensolver failed");
    }
    return es.eigenvalues().minCoeff();
}

double cr_dominance_gap(const FisherMatrix &fisher, const QfiMatrix &qfi) {
    if (fisher.size() != qfi.size()) {
        throw DomainError("cr_dominance_gap: Fisher and quantum information have different sizes");
    }
    return min_symmetric_eigenvalue(qfi.entries - fisher.entries);
}

}  // namespace qmetro
