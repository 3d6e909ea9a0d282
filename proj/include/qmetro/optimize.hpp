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
 * @file optimize.hpp
 * Maximization of tr{H} over pure inputs to n independent SU(d) channels
 * (each with an ancilla), the weighted trace ratio against the maximally
 * entangled input, and Schmidt spectra to certify maximizers.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "qmetro/channels.hpp"
#include "qmetro/information.hpp"

namespace qmetro {

/// Pure state parametrized by 2 * dim raw real and imaginary parts,
/// normalized on decode.
Ket decode_state(std::span<const double> coords);
std::vector<double> encode_state(const Ket &ket);

/// tr{H} of the map rho0 -> (x)_j (U_{theta^j} (x) I) rho0 (...)^dagger as a
/// function of the pure input. Channel j acts on factor 2j of the layout
/// S_1 R_1 ... S_n R_n.
class TraceQfiObjective {
  public:
    TraceQfiObjective(SuDChannel channel, std::vector<std::vector<double>> thetas);

    [[nodiscard]] int channels() const { return static_cast<int>(thetas_.size()); }
    [[nodiscard]] int d() const { return channel_.d(); }
    [[nodiscard]] Eigen::Index dim() const { return op_.rows(); }
    [[nodiscard]] const SuDChannel &channel() const { return channel_; }
    [[nodiscard]] const std::vector<std::vector<double>> &thetas() const { return thetas_; }
    /// n * 4 (d^2 - 1) / d.
    [[nodiscard]] double bound() const;

    [[nodiscard]] const CMatrix &channel_operator() const { return op_; }
    [[nodiscard]] const std::vector<CMatrix> &channel_derivatives() const { return derivs_; }

    /// Full quantum information matrix through qfi_pure_channel.
    [[nodiscard]] QfiMatrix qfi(const Ket &ket) const;
    /// tr{H}, using precomputed quadratic forms.
    [[nodiscard]] double operator()(const Ket &ket) const;
    [[nodiscard]] double evaluate(std::span<const double> coords) const;

  private:
    SuDChannel channel_;
    std::vector<std::vector<double>> thetas_;
    CMatrix op_;
    std::vector<CMatrix> derivs_;
    std::vector<CMatrix> gram_;   // U^{j dagger} U^j
    std::vector<CMatrix> shift_;  // U^dagger U^j
};

/// tr of qfi_pure_channel at the given input.
double trace_qfi_objective(const SuDChannel &channel, const std::vector<std::vector<double>> &thetas,
                           const Ket &ket);

struct OptimizerOptions {
    int restarts = 32;
    int max_iterations = 5000;
    double fd_step = 1e-5;
    double tolerance = 1e-12;  // stop when one step improves the objective by less
};

struct OptReport {
    double best_value = 0.0;
    CVector best_state;
    double bound = 0.0;
    double gap = 0.0;
    int restarts = 0;
    int best_restart = 0;
    int iterations = 0;        // of the best restart
    bool converged = true;     // false if any restart hit max_iterations
    double gradient_inf_norm = 0.0;
    /// For each channel j: Schmidt coefficients of S_j against all other factors.
    std::vector<std::vector<double>> schmidt_spectra;
};

/// Multi-start gradient ascent with central-difference gradients and a
/// backtracking line search. Restart r starts from Rng::stream(seed, r).
OptReport maximize_trace_qfi(const TraceQfiObjective &objective, const OptimizerOptions &options, std::uint64_t seed);

/// Central-difference gradient of the objective in PureStateParam coordinates.
std::vector<double> objective_gradient(const TraceQfiObjective &objective, std::span<const double> coords, double h);

/// tr{H(rho_mes)^{-1} H(rho0)} for a single SU(d) channel with ancilla.
double ballester_ratio(const SuDChannel &channel, std::span<const double> theta, const Ket &ket);

/// Singular values of the dimA x dimB amplitude matrix, descending.
std::vector<double> schmidt_spectrum(const Ket &ket, Eigen::Index dim_a, Eigen::Index dim_b);
/// Schmidt coefficients of factor @p factor against the rest of a composite with the given factor dimensions.
std::vector<double> factor_schmidt_spectrum(const Ket &ket, std::span<const int> factor_dims, int factor);

}  // namespace qmetro
