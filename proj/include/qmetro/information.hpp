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
 * @file information.hpp
 * Quantum (SLD) and classical Fisher information.
 */
#pragma once

#include <vector>

#include "qmetro/core.hpp"

namespace qmetro {

/// Finite-outcome measurement: PSD elements summing to the identity.
class Povm {
  public:
    /// Validates each element PSD (min eig >= -1e-10) and sum = I within 1e-10.
    explicit Povm(std::vector<CMatrix> elements);

    /// {|psi><psi|, I - |psi><psi|}; valid by construction.
    static Povm projective_pair(const Ket &psi);
    /// Rank-one projectors onto an orthonormal basis (columns of @p basis).
    static Povm from_basis(const CMatrix &basis);

    [[nodiscard]] std::size_t size() const { return elements_.size(); }
    [[nodiscard]] Eigen::Index dim() const { return elements_.front().rows(); }
    [[nodiscard]] const std::vector<CMatrix> &elements() const { return elements_; }
    [[nodiscard]] const CMatrix &operator[](std::size_t m) const { return elements_[m]; }

    /// Born-rule probabilities tr{M_m rho}, negatives from rounding clipped to 0.
    [[nodiscard]] std::vector<double> probabilities(const DensityOperator &rho) const;
    [[nodiscard]] std::vector<double> probabilities(const Ket &psi) const;

  private:
    struct Trusted {};
    Povm(std::vector<CMatrix> elements, Trusted) : elements_(std::move(elements)) {}
    std::vector<CMatrix> elements_;
};

/// SLD quantum information H(theta). For multi-channel problems with p
/// parameters per channel, parameter k of channel j sits at j * p + k.
struct QfiMatrix {
    RMatrix entries;
    int params_per_channel = 0;

    [[nodiscard]] Eigen::Index size() const { return entries.rows(); }
    [[nodiscard]] double trace() const { return entries.trace(); }
    [[nodiscard]] Eigen::Index flat_index(int channel, int param) const;
};

struct FisherMatrix {
    RMatrix entries;

    [[nodiscard]] Eigen::Index size() const { return entries.rows(); }
    [[nodiscard]] double trace() const { return entries.trace(); }
};

struct SldSet {
    std::vector<CMatrix> operators;
    double max_residual = 0.0;  // max over j of |d rho_j - (rho L_j + L_j rho)/2|_max
};

/// tr{A rho B^dagger} = <psi| B^dagger A |psi> evaluated on a pure input.
/// H_jk = 4 Re tr{U^j rho0 U^k+} + 4 tr{U^j rho0 U+} tr{U^k rho0 U+}.
/// The second factor pair is purely imaginary, so the "+" realizes the
/// subtraction of the squared mean.
QfiMatrix qfi_pure_channel(const CMatrix &u, std::span<const CMatrix> du, const Ket &psi0);
/// Same, for a density operator that must be pure (tr rho^2 = 1 within 1e-10).
QfiMatrix qfi_pure_channel(const CMatrix &u, std::span<const CMatrix> du, const DensityOperator &rho0);

/// Minimal-norm Hermitian solutions of d rho_j = (rho L_j + L_j rho) / 2.
SldSet sld_solve(const DensityOperator &rho, std::span<const CMatrix> drho);

/// H_jk = Re tr{L_j rho L_k}.
QfiMatrix qfi_from_slds(const DensityOperator &rho, const SldSet &slds);

/// F_jk = sum_m (d_j p_m)(d_k p_m) / p_m over outcomes with p_m > 1e-12.
FisherMatrix fisher_information(const Povm &povm, const DensityOperator &rho, std::span<const CMatrix> drho);
/// Same, from outcome probabilities and their derivatives (drho-free form for product measurements).
FisherMatrix fisher_from_distribution(std::span<const double> probs, const std::vector<std::vector<double>> &dprobs);

/// min eig(H - F); nonnegative up to rounding for any valid measurement.
double cr_dominance_gap(const FisherMatrix &fisher, const QfiMatrix &qfi);

/// Smallest eigenvalue of a real symmetric matrix (symmetrized first).
double min_symmetric_eigenvalue(const RMatrix &m);

}  // namespace qmetro
