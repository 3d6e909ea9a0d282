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

#include "qmetro/channels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qmetro {

// ---------------------------------------------------------------------------
// SuDChannel

SuDChannel::SuDChannel(int d) : basis_(gell_mann_basis(d)) {}

CMatrix SuDChannel::unitary_at(std::span<const double> theta) const {
    return matrix_exp(basis_.skew_generator(theta));
}

CMatrix SuDChannel::unitary_derivative(std::span<const double> theta, int j) const {
    if (j < 0 || j >= parameter_count()) {
        throw DomainError("SuDChannel::unitary_derivative: parameter index out of range");
    }
    const CMatrix a = basis_.skew_generator(theta);
    const CMatrix e = Complex(0.0, 1.0) * basis_.generators[static_cast<std::size_t>(j)];
    return exp_directional_derivative(a, e);
}

std::vector<CMatrix> SuDChannel::unitary_derivatives(std::span<const double> theta) const {
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(parameter_count()));
    for (int j = 0; j < parameter_count(); ++j) {
        out.push_back(unitary_derivative(theta, j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase function forms

namespace forms {

namespace {
std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}
}  // namespace

PhaseFunction linear(double a) {
    return {[a](double t) { return a * t; }, [a](double) { return a; }, "linear(a=" + fmt(a) + ")"};
}

PhaseFunction affine(double a, double b) {
    return {[a, b](double t) { return a * t + b; }, [a](double) { return a; },
            "affine(a=" + fmt(a) + ", b=" + fmt(b) + ")"};
}

PhaseFunction power(double a, double k) {
    return {[a, k](double t) { return a * std::pow(t, k); },
            [a, k](double t) { return k == 0.0 ? 0.0 : a * k * std::pow(t, k - 1.0); },
            "power(a=" + fmt(a) + ", k=" + fmt(k) + ")"};
}

PhaseFunction sinusoid(double a, double b) {
    return {[a, b](double t) { return a * std::sin(b * t); },
            [a, b](double t) { return a * b * std::cos(b * t); },
            "sinusoid(a=" + fmt(a) + ", b=" + fmt(b) + ")"};
}

}  // namespace forms

// ---------------------------------------------------------------------------
// DependentFamily

DependentFamily::DependentFamily(std::vector<PhaseFunction> functions, double domain_upper)
    : functions_(std::move(functions)), domain_upper_(domain_upper) {
    if (functions_.empty()) {
        throw DomainError("DependentFamily: at least one channel is required");
    }
    if (!(domain_upper_ > 0.0) || !std::isfinite(domain_upper_)) {
        throw DomainError("DependentFamily: domain upper bound must be positive and finite");
    }
    constexpr int kSamples = 32;
    const double h = 1e-5 * domain_upper_;
    for (std::size_t j = 0; j < functions_.size(); ++j) {
        const auto &fn = functions_[j];
        if (!fn.value || !fn.derivative) {
            throw DomainError("DependentFamily: channel " + std::to_string(j) + " is missing a callable");
        }
        for (int i = 0; i < kSamples; ++i) {
            const double t = (i + 0.5) * domain_upper_ / kSamples;
            const double fd = (fn.value(t + h) - fn.value(t - h)) / (2.0 * h);
            const double an = fn.derivative(t);
            if (!std::isfinite(fd) || !std::isfinite(an) || std::abs(fd - an) > 1e-5 * std::max(1.0, std::abs(an))) {
                std::ostringstream os;
                os.precision(10);
                os << "DependentFamily: derivative of channel " << j << " (" << fn.description
                   << ") disagrees with finite differences at theta=" << t << ": analytic " << an << ", numeric "
                   << fd;
                throw DomainError(os.str());
            }
        }
    }
}

const PhaseFunction &DependentFamily::function(int j) const {
    if (j < 0 || j >= size()) {
        throw DomainError("DependentFamily: channel index out of range");
    }
    return functions_[static_cast<std::size_t>(j)];
}

void DependentFamily::require_domain(double theta) const {
    if (!contains(theta)) {
        std::ostringstream os;
        os.precision(17);
        os << "theta=" << theta << " lies outside the family domain [0, " << domain_upper_ << "]";
        throw DomainError(os.str());
    }
}

double DependentFamily::phase(int j, double theta) const { return function(j).value(theta); }

double DependentFamily::phase_derivative(int j, double theta) const { return function(j).derivative(theta); }

double DependentFamily::total_phase(double theta, int prefix) const {
    const int m = prefix < 0 ? size() : std::min(prefix, size());
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        acc += phase(j, theta);
    }
    return acc;
}

double DependentFamily::total_derivative(double theta, int prefix) const {
    const int m = prefix < 0 ? size() : std::min(prefix, size());
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        acc += phase_derivative(j, theta);
    }
    return acc;
}

CMatrix DependentFamily::unitary_at(int j, double theta) const {
    require_domain(theta);
    CMatrix u = CMatrix::Zero(2, 2);
    u(0, 0) = 1.0;
    u(1, 1) = std::polar(1.0, phase(j, theta));
    return u;
}

CMatrix DependentFamily::unitary_derivative(int j, double theta) const {
    require_domain(theta);
    CMatrix du = CMatrix::Zero(2, 2);
    du(1, 1) = Complex(0.0, phase_derivative(j, theta)) * std::polar(1.0, phase(j, theta));
    return du;
}

std::vector<CMatrix> DependentFamily::unitaries(double theta) const {
    std::vector<CMatrix> out;
    for (int j = 0; j < size(); ++j) {
        out.push_back(unitary_at(j, theta));
    }
    return out;
}

std::vector<CMatrix> DependentFamily::unitary_derivatives(double theta) const {
    std::vector<CMatrix> out;
    for (int j = 0; j < size(); ++j) {
        out.push_back(unitary_derivative(j, theta));
    }
    return out;
}

DependentFamily DependentFamily::subset(std::span<const int> members) const {
    std::vector<PhaseFunction> fs;
    for (int j : members) {
        fs.push_back(function(j));
    }
    return DependentFamily(std::move(fs), domain_upper_);
}

// ---------------------------------------------------------------------------
// Conditions

std::string ConditionReport::describe() const {
    std::ostringstream os;
    os << "cond_a=" << cond_a << " cond_b=" << cond_b << " cond_c_pi=" << cond_c_pi << " cond_c_2pi=" << cond_c_2pi
       << " grid_size=" << grid_size;
    return os.str();
}

ConditionReport validate_family(const DependentFamily &family, int grid_size) {
    if (grid_size < 2) {
        throw DomainError("validate_family: grid_size must be >= 2");
    }
    constexpr double pi = std::numbers::pi;
    // Rounding slack on the sum bounds so that e.g. sum = pi evaluated as pi + 4e-16 still passes.
    constexpr double slack = 1e-12;
    ConditionReport report;
    report.grid_size = grid_size;
    report.cond_a = report.cond_b = report.cond_c_pi = report.cond_c_2pi = true;
    for (int i = 0; i < grid_size; ++i) {
        const double theta = family.domain_upper() * i / (grid_size - 1);
        double sum = 0.0;
        for (int j = 0; j < family.size(); ++j) {
            const double f = family.phase(j, theta);
            const double df = family.phase_derivative(j, theta);
            if (!std::isfinite(f)) {
                report.cond_a = false;
            }
            if (!(df >= 0.0)) {
                report.cond_b = false;
            }
            sum += f;
        }
        if (!(sum >= -slack && sum <= pi + slack)) {
            report.cond_c_pi = false;
        }
        if (!(sum >= -slack && sum <= 2.0 * pi + slack)) {
            report.cond_c_2pi = false;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Channel application

namespace {

void require_square_unitaries(std::span<const CMatrix> unitaries, const char *what) {
    if (unitaries.empty()) {
        throw DomainError(std::string(what) + ": no channels given");
    }
    const Eigen::Index d = unitaries.front().rows();
    for (const auto &u : unitaries) {
        if (u.rows() != d || u.cols() != d || d < 1) {
            throw DomainError(std::string(what) + ": all channel matrices must be square of equal dimension");
        }
    }
}

}  // namespace

CMatrix extended_operator(std::span<const CMatrix> unitaries) {
    require_square_unitaries(unitaries, "extended_operator");
    const Eigen::Index d = unitaries.front().rows();
    const CMatrix id = CMatrix::Identity(d, d);
    CMatrix acc = kron(unitaries.front(), id);
    for (std::size_t j = 1; j < unitaries.size(); ++j) {
        acc = kron(acc, kron(unitaries[j], id));
    }
    return acc;
}

CMatrix extended_operator_derivative(std::span<const CMatrix> unitaries, std::span<const CMatrix> derivatives) {
    require_square_unitaries(unitaries, "extended_operator_derivative");
    if (derivatives.size() != unitaries.size()) {
        throw DomainError("extended_operator_derivative: one derivative per channel is required");
    }
    const std::size_t n = unitaries.size();
    const Eigen::Index d = unitaries.front().rows();
    const Eigen::Index dim = static_cast<Eigen::Index>(std::pow(static_cast<double>(d * d), static_cast<double>(n)));
    CMatrix sum = CMatrix::Zero(dim, dim);
    std::vector<CMatrix> factors(unitaries.begin(), unitaries.end());
    for (std::size_t j = 0; j < n; ++j) {
        factors[j] = derivatives[j];
        sum += extended_operator(factors);
        factors[j] = unitaries[j];
    }
    return sum;
}

CMatrix sequential_product(std::span<const CMatrix> unitaries, Eigen::Index dim) {
    CMatrix acc = CMatrix::Identity(dim, dim);
    for (const auto &u : unitaries) {
        if (u.rows() != dim || u.cols() != dim) {
            throw DomainError("sequential_product: channel dimension mismatch");
        }
        acc = acc * u;
    }
    return acc;
}

CMatrix sequential_product_derivative(std::span<const CMatrix> unitaries, std::span<const CMatrix> derivatives) {
    require_square_unitaries(unitaries, "sequential_product_derivative");
    if (derivatives.size() != unitaries.size()) {
        throw DomainError("sequential_product_derivative: one derivative per channel is required");
    }
    const Eigen::Index d = unitaries.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t j = 0; j < unitaries.size(); ++j) {
        CMatrix term = CMatrix::Identity(d, d);
        for (std::size_t k = 0; k < unitaries.size(); ++k) {
            term = term * (k == j ? derivatives[k] : unitaries[k]);
        }
        sum += term;
    }
    return sum;
}

DensityOperator apply_extended(std::span<const CMatrix> unitaries, const DensityOperator &rho0) {
    require_square_unitaries(unitaries, "apply_extended");
    const double d = static_cast<double>(unitaries.front().rows());
    const double expected = std::pow(d * d, static_cast<double>(unitaries.size()));
    if (static_cast<double>(rho0.dim()) != expected) {
        throw DomainError("apply_extended: input state has dimension " + std::to_string(rho0.dim()) +
                          ", expected (d^2)^n = " + std::to_string(static_cast<long long>(expected)));
    }
    return rho0.conjugated(extended_operator(unitaries));
}

DensityOperator apply_sequential(std::span<const CMatrix> unitaries, const DensityOperator &rho0) {
    return rho0.conjugated(sequential_product(unitaries, rho0.dim()));
}

}  // namespace qmetro
