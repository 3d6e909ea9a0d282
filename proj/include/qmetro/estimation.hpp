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
 * @file estimation.hpp
 * Born-rule sampling, phase estimators, Monte-Carlo mean-square-error
 * experiments, the staged adaptive procedure and parameter sweeps.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmetro/rng.hpp"
#include "qmetro/schemes.hpp"

namespace qmetro {

using Counts = std::vector<std::int64_t>;

/// Multinomial draw of @p shots outcomes with p_m = tr{M_m rho}.
Counts sample_outcomes(const DensityOperator &rho, const Povm &povm, std::int64_t shots, Rng &rng);

/// phi_hat = 2 arccos(sqrt(n0 / N)) in [0, pi].
double invert_phase(std::int64_t n0, std::int64_t shots);

/// Lifts phi_hat in [0, pi] to [0, 2 pi] using the y-basis tally: keeps
/// phi_hat when n0y / Ny >= 1/2, otherwise returns 2 pi - phi_hat.
double disambiguate_phase(double phi_hat, std::int64_t n0y, std::int64_t ny);

struct PhaseInversion {
    double theta = 0.0;
    bool clamped = false;  // target phase lay outside the function's range
};

/// Inverts a nondecreasing function on [lo, hi] by bisection.
class MonotoneInverter {
  public:
    /// Checks monotonicity on a @p grid_size point grid; throws DomainError otherwise.
    MonotoneInverter(ScalarFunction g, double lo, double hi, int grid_size = 1024);

    [[nodiscard]] PhaseInversion invert(double target) const;
    [[nodiscard]] double lower() const { return lo_; }
    [[nodiscard]] double upper() const { return hi_; }
    [[nodiscard]] double g_lower() const { return g_lo_; }
    [[nodiscard]] double g_upper() const { return g_hi_; }
    /// inf{theta : g(theta) >= target} and sup{theta : g(theta) <= target}, restricted to [a, b].
    [[nodiscard]] double first_at_least(double target, double a, double b) const;
    [[nodiscard]] double last_at_most(double target, double a, double b) const;
    [[nodiscard]] double operator()(double theta) const { return g_(theta); }

  private:
    ScalarFunction g_;
    double lo_, hi_, g_lo_, g_hi_;
};

/// theta_hat solving sum_j f_j(theta) = phi, bisection to interval width < 1e-12.
PhaseInversion phase_to_theta(const DependentFamily &family, double phi);

struct ExperimentConfig {
    SchemeSpec scheme;
    std::optional<DependentFamily> family;  // phase-family schemes
    std::optional<SuDChannel> channel;      // SU(d) schemes
    double theta_true = 0.0;
    std::vector<std::vector<double>> theta_vectors;  // one per SU(d) channel
    std::int64_t shots = 1;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    /// > 0 enables the y-basis sign measurement with this many extra shots,
    /// allowing families that only satisfy 0 <= sum f_j <= 2 pi.
    std::int64_t sign_shots = 0;
};

struct ExperimentResult {
    double empirical_mse = 0.0;    // scalar MSE, or trace of the error matrix
    double theoretical_mse = 0.0;  // 1/(N H), or tr{H^-1}/N
    RMatrix error_matrix;          // vector parameters only
    RMatrix theoretical_matrix;    // vector parameters only
    QfiMatrix qfi;
    std::vector<Counts> counts;    // per trial, outcome tallies concatenated over measurements
    std::vector<double> estimates; // per trial (scalar parameter only)
    std::int64_t estimator_failures = 0;  // undefined or clamped estimates
    std::int64_t boundary_trials = 0;     // some tally hit 0 or N
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

/// Runs config.trials independent repetitions of config.shots uses of the
/// scheme. Trial t draws from Rng::stream(seed, t).
ExperimentResult run_mse_experiment(const ExperimentConfig &config);

struct AdaptiveStage {
    int prefix = 0;              // channels U_s ... U_1 in use
    std::int64_t shots = 0;
    std::int64_t n0 = 0;
    double phase_lo = 0.0;       // confidence interval for g_s(theta) before unwrapping, in [0, pi]
    double phase_hi = 0.0;
    double theta_lo = 0.0;
    double theta_hi = 0.0;
};

struct AdaptiveTrace {
    std::vector<AdaptiveStage> stages;  // completed stages only
    double final_estimate = 0.0;
    bool complete = false;
    std::string note;  // reason when incomplete
};

struct AdaptiveOptions {
    /// Overall miscoverage; each of the n stages uses alpha / n.
    double alpha = 1e-3;
};

/// Staged estimation with prefixes U_1, U_2 U_1, ..., U_n ... U_1, each stage
/// spending total_shots / n shots on the sequential |+> probe.
AdaptiveTrace adaptive_estimate(const DependentFamily &family, double theta_true, std::int64_t total_shots,
                                Rng &rng, const AdaptiveOptions &options = {});

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
std::pair<double, double> clopper_pearson(std::int64_t successes, std::int64_t trials, double alpha);

struct SweepRow {
    double varied_value = 0.0;
    std::optional<ExperimentResult> result;
    std::string error;  // nonempty when the row failed
    std::uint64_t seed = 0;
};

/// One experiment per value; row i runs with seed derive_seed(seed, i).
std::vector<SweepRow> sweep(std::span<const double> values,
                            const std::function<ExperimentConfig(double)> &instantiate, std::uint64_t seed);

}  // namespace qmetro
