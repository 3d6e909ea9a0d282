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
 * @file channels.hpp
 * Parametrized unitary channels: SU(d) channels U = exp(i sum_j theta_j t_j)
 * and families of commuting two-level phase channels Diag(1, e^{i f_j(theta)})
 * sharing one scalar parameter.
 *
 * Multi-channel maps act on the layout S_1 R_1 S_2 R_2 ... S_n R_n where R_j
 * is an ancilla of the same dimension as S_j on which the channel acts
 * trivially.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qmetro/core.hpp"

namespace qmetro {

/// U_theta = exp(i sum_j theta_j t_j) over the Gell-Mann basis of su(d).
class SuDChannel {
  public:
    explicit SuDChannel(int d);

    [[nodiscard]] int d() const { return basis_.d; }
    [[nodiscard]] int parameter_count() const { return basis_.size(); }
    [[nodiscard]] const GeneratorBasis &basis() const { return basis_; }

    [[nodiscard]] CMatrix unitary_at(std::span<const double> theta) const;
    /// d U_theta / d theta_j, via the Frechet derivative of exp at i sum theta t in direction i t_j.
    [[nodiscard]] CMatrix unitary_derivative(std::span<const double> theta, int j) const;
    [[nodiscard]] std::vector<CMatrix> unitary_derivatives(std::span<const double> theta) const;

  private:
    GeneratorBasis basis_;
};

using ScalarFunction = std::function<double(double)>;

/// One member f_j of a dependent family with its analytic derivative.
/// The callables must be safe to invoke concurrently.
struct PhaseFunction {
    ScalarFunction value;
    ScalarFunction derivative;
    std::string description;
};

/// Built-in phase function forms usable from configuration files.
namespace forms {
PhaseFunction linear(double a);                // a * theta
PhaseFunction affine(double a, double b);      // a * theta + b
PhaseFunction power(double a, double k);       // a * theta^k
PhaseFunction sinusoid(double a, double b);    // a * sin(b * theta)
}  // namespace forms

/// n phase channels Diag(1, e^{i f_j(theta)}) with a common theta in [0, t].
class DependentFamily {
  public:
    /// Validates n >= 1, t > 0 and each derivative against central finite
    /// differences at 32 interior points (relative 1e-5).
    DependentFamily(std::vector<PhaseFunction> functions, double domain_upper);

    [[nodiscard]] int size() const { return static_cast<int>(functions_.size()); }
    [[nodiscard]] double domain_upper() const { return domain_upper_; }
    [[nodiscard]] bool contains(double theta) const { return theta >= 0.0 && theta <= domain_upper_; }
    [[nodiscard]] const PhaseFunction &function(int j) const;

    [[nodiscard]] double phase(int j, double theta) const;
    [[nodiscard]] double phase_derivative(int j, double theta) const;
    /// sum over the first @p prefix channels (all channels by default).
    [[nodiscard]] double total_phase(double theta, int prefix = -1) const;
    [[nodiscard]] double total_derivative(double theta, int prefix = -1) const;

    /// Diag(1, e^{i f_j(theta)}); throws DomainError outside [0, t].
    [[nodiscard]] CMatrix unitary_at(int j, double theta) const;
    /// Diag(0, i f'_j(theta) e^{i f_j(theta)}).
    [[nodiscard]] CMatrix unitary_derivative(int j, double theta) const;

    [[nodiscard]] std::vector<CMatrix> unitaries(double theta) const;
    [[nodiscard]] std::vector<CMatrix> unitary_derivatives(double theta) const;

    /// Sub-family of the given members (same domain).
    [[nodiscard]] DependentFamily subset(std::span<const int> members) const;

  private:
    void require_domain(double theta) const;
    std::vector<PhaseFunction> functions_;
    double domain_upper_;
};

struct ConditionReport {
    bool cond_a = false;      // finite real values everywhere on the grid
    bool cond_b = false;      // every f'_j >= 0
    bool cond_c_pi = false;   // 0 <= sum f_j <= pi
    bool cond_c_2pi = false;  // 0 <= sum f_j <= 2 pi
    int grid_size = 0;

    [[nodiscard]] std::string describe() const;
};

/// Grid evaluation of the family conditions over [0, t]; reports only.
ConditionReport validate_family(const DependentFamily &family, int grid_size = 1024);

/// The dense operator (U_1 (x) I) (x) ... (x) (U_n (x) I).
CMatrix extended_operator(std::span<const CMatrix> unitaries);
/// d/dtheta of extended_operator for a scalar parameter shared by all channels
/// (product rule: one term per channel).
CMatrix extended_operator_derivative(std::span<const CMatrix> unitaries, std::span<const CMatrix> derivatives);
/// U_1 U_2 ... U_n.
CMatrix sequential_product(std::span<const CMatrix> unitaries, Eigen::Index dim);
CMatrix sequential_product_derivative(std::span<const CMatrix> unitaries, std::span<const CMatrix> derivatives);

DensityOperator apply_extended(std::span<const CMatrix> unitaries, const DensityOperator &rho0);
DensityOperator apply_sequential(std::span<const CMatrix> unitaries, const DensityOperator &rho0);

}  // namespace qmetro
