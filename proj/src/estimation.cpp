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

#include "qmetro/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <boost/math/special_functions/beta.hpp>

#include "qmetro/parallel.hpp"

namespace qmetro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInversionWidth = 1e-12;
constexpr double kRangeSlack = 1e-12;
// Smallest Bell-outcome probability at which the SU(2) estimator is trusted.
constexpr double kMinBellProbability = 1e-3;

}  // namespace

Counts sample_outcomes(const DensityOperator &rho, const Povm &povm, std::int64_t shots, Rng &rng) {
    if (shots < 1) {
        throw DomainError("sample_outcomes: shots must be >= 1");
    }
    const auto probs = povm.probabilities(rho);
    return rng.multinomial(shots, probs);
}

double invert_phase(std::int64_t n0, std::int64_t shots) {
    if (shots < 1 || n0 < 0 || n0 > shots) {
        throw DomainError("invert_phase: require 0 <= n0 <= N and N >= 1");
    }
    const double frac = static_cast<double>(n0) / static_cast<double>(shots);
    return 2.0 * std::acos(std::sqrt(frac));
}

double disambiguate_phase(double phi_hat, std::int64_t n0y, std::int64_t ny) {
    if (ny < 1 || n0y < 0 || n0y > ny) {
        throw DomainError("disambiguate_phase: require 0 <= n0y <= Ny and Ny >= 1");
    }
    // p_y(0) = (1 + sin phi) / 2: a majority of 0 outcomes means sin phi >= 0.
    if (2 * n0y >= ny) {
        return phi_hat;
    }
    return 2.0 * kPi - phi_hat;
}

// ---------------------------------------------------------------------------
// MonotoneInverter

MonotoneInverter::MonotoneInverter(ScalarFunction g, double lo, double hi, int grid_size)
    : g_(std::move(g)), lo_(lo), hi_(hi) {
    if (!(hi_ > lo_)) {
        throw DomainError("MonotoneInverter: empty interval");
    }
    double prev = g_(lo_);
    for (int i = 1; i < grid_size; ++i) {
        const double x = lo_ + (hi_ - lo_) * i / (grid_size - 1);
        const double y = g_(x);
        if (!(y >= prev - kRangeSlack)) {
            std::ostringstream os;
            os.precision(10);
            os << "function is not nondecreasing on [" << lo_ << ", " << hi_ << "] (drops near " << x << ")";
            throw DomainError(os.str());
        }
        prev = y;
    }
    g_lo_ = g_(lo_);
    g_hi_ = g_(hi_);
}

double MonotoneInverter::first_at_least(double target, double a, double b) const {
    if (g_(a) >= target) {
        return a;
    }
    if (g_(b) < target) {
        return b;
    }
    double l = a, h = b;
    for (int it = 0; it < 200 && h - l > kInversionWidth; ++it) {
        const double m = 0.5 * (l + h);
        (g_(m) >= target ? h : l) = m;
    }
    return h;
}

double MonotoneInverter::last_at_most(double target, double a, double b) const {
    if (g_(b) <= target) {
        return b;
    }
    if (g_(a) > target) {
        return a;
    }
    double l = a, h = b;
    for (int it = 0; it < 200 && h - l > kInversionWidth; ++it) {
        const double m = 0.5 * (l + h);
        (g_(m) <= target ? l : h) = m;
    }
    return l;
}

PhaseInversion MonotoneInverter::invert(double target) const {
    PhaseInversion out;
    if (target <= g_lo_) {
        out.theta = lo_;
        out.clamped = target < g_lo_ - kRangeSlack;
        return out;
    }
    if (target >= g_hi_) {
        out.theta = hi_;
        out.clamped = target > g_hi_ + kRangeSlack;
        return out;
    }
    double l = lo_, h = hi_;
    for (int it = 0; it < 200 && h - l > kInversionWidth; ++it) {
        const double m = 0.5 * (l + h);
        (g_(m) < target ? l : h) = m;
    }
    out.theta = 0.5 * (l + h);
    return out;
}

PhaseInversion phase_to_theta(const DependentFamily &family, double phi) {
    const MonotoneInverter inv([&family](double t) { return family.total_phase(t); }, 0.0, family.domain_upper());
    return inv.invert(phi);
}

// ---------------------------------------------------------------------------
// Clopper-Pearson

std::pair<double, double> clopper_pearson(std::int64_t successes, std::int64_t trials, double alpha) {
    if (trials < 1 || successes < 0 || successes > trials || !(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("clopper_pearson: invalid arguments");
    }
    const double k = static_cast<double>(successes);
    const double n = static_cast<double>(trials);
    const double lo = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
    const double hi = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Adaptive procedure

AdaptiveTrace adaptive_estimate(const DependentFamily &family, double theta_true, std::int64_t total_shots, Rng &rng,
                                const AdaptiveOptions &options) {
    const int n = family.size();
    if (total_shots < 2LL * n) {
        throw DomainError("adaptive_estimate: total_shots must be at least 2n");
    }
    if (!family.contains(theta_true)) {
        throw DomainError("adaptive_estimate: theta_true lies outside the family domain");
    }
    if (!validate_family(family).cond_b) {
        throw DomainError("adaptive_estimate: family must be nondecreasing (every f'_j >= 0)");
    }

    const Povm povm = Povm::projective_pair(plus_state());
    const double stage_alpha = options.alpha / n;
    AdaptiveTrace trace;
    double a = 0.0, b = family.domain_upper();

    for (int s = 1; s <= n; ++s) {
        const std::int64_t shots = total_shots / n + (s <= total_shots % n ? 1 : 0);
        const MonotoneInverter g([&family, s](double t) { return family.total_phase(t, s); }, 0.0,
                                 family.domain_upper());

        // Prefix U_s ... U_1 applied to |+>.
        std::vector<CMatrix> prefix;
        for (int j = s - 1; j >= 0; --j) {
            prefix.push_back(family.unitary_at(j, theta_true));
        }
        const Ket out = Ket::normalized(sequential_product(prefix, 2) * plus_state().amplitudes());
        const auto probs = povm.probabilities(out);
        const std::int64_t n0 = rng.multinomial(shots, probs)[0];

        const auto [p_lo, p_hi] = clopper_pearson(n0, shots, stage_alpha);
        const double phi_a = 2.0 * std::acos(std::sqrt(std::clamp(p_hi, 0.0, 1.0)));
        const double phi_b = 2.0 * std::acos(std::sqrt(std::clamp(p_lo, 0.0, 1.0)));

        // Candidate branches of cos^2(phi/2) in [p_lo, p_hi] over the image of [a, b].
        const double ga = g(a), gb = g(b);
        std::vector<std::pair<double, double>> branches;
        const auto k_lo = static_cast<long long>(std::floor((ga - kPi) / (2.0 * kPi))) - 1;
        const auto k_hi = static_cast<long long>(std::ceil((gb + kPi) / (2.0 * kPi))) + 1;
        for (long long k = k_lo; k <= k_hi; ++k) {
            const double base = 2.0 * kPi * static_cast<double>(k);
            for (auto br : {std::pair{base + phi_a, base + phi_b}, std::pair{base - phi_b, base - phi_a}}) {
                if (br.second >= ga && br.first <= gb) {
                    branches.push_back(br);
                }
            }
        }
        std::sort(branches.begin(), branches.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto &br : branches) {
            if (!merged.empty() && br.first <= merged.back().second + kRangeSlack) {
                merged.back().second = std::max(merged.back().second, br.second);
            } else {
                merged.push_back(br);
            }
        }
        if (merged.empty()) {
            trace.note = "stage " + std::to_string(s) + ": confidence interval is inconsistent with the previous stage";
            break;
        }
        if (merged.size() > 1) {
            trace.note = "stage " + std::to_string(s) + ": branch ambiguity (" + std::to_string(merged.size()) +
                         " phase branches intersect the previous interval)";
            break;
        }
        const double u = std::max(merged.front().first, ga);
        const double v = std::min(merged.front().second, gb);
        const double new_a = g.first_at_least(u, a, b);
        const double new_b = std::max(new_a, g.last_at_most(v, a, b));

        AdaptiveStage stage;
        stage.prefix = s;
        stage.shots = shots;
        stage.n0 = n0;
        stage.phase_lo = phi_a;
        stage.phase_hi = phi_b;
        stage.theta_lo = new_a;
        stage.theta_hi = new_b;
        trace.stages.push_back(stage);
        a = new_a;
        b = new_b;
    }
    trace.complete = static_cast<int>(trace.stages.size()) == n;
    trace.final_estimate = 0.5 * (a + b);
    return trace;
}

// ---------------------------------------------------------------------------
// Monte-Carlo experiments

namespace {

struct TrialOutcome {
    double estimate = 0.0;
    RVector estimate_vector;
    Counts counts;
    bool failed = false;
    bool boundary = false;
};

void append(Counts &dst, const Counts &src) { dst.insert(dst.end(), src.begin(), src.end()); }

bool at_boundary(const Counts &c, std::int64_t shots) {
    return std::any_of(c.begin(), c.end(), [shots](std::int64_t x) { return x == 0 || x == shots; });
}

void check_phase_family_conditions(const ExperimentConfig &cfg, const ConditionReport &cond) {
    const auto kind = cfg.scheme.kind;
    if (!cond.cond_a || !cond.cond_b) {
        throw DomainError("family violates the monotonicity conditions: " + cond.describe());
    }
    if (kind == SchemeKind::MultipartiteGhz || kind == SchemeKind::Sequential) {
        if (!(cond.cond_c_pi || (cond.cond_c_2pi && cfg.sign_shots > 0))) {
            throw DomainError(
                "total phase must stay in [0, pi] (or [0, 2 pi] with sign_shots > 0): " + cond.describe());
        }
    }
    if (kind == SchemeKind::TensorMes || kind == SchemeKind::IndividualPerChannel) {
        const auto &fam = *cfg.family;
        for (int j = 0; j < fam.size(); ++j) {
            for (int i = 0; i < cond.grid_size; ++i) {
                const double t = fam.domain_upper() * i / (cond.grid_size - 1);
                const double f = fam.phase(j, t);
                if (f < -kRangeSlack || f > kPi + kRangeSlack) {
                    throw DomainError("per-channel estimation needs every f_j in [0, pi]; channel " +
                                      std::to_string(j) + " leaves it");
                }
            }
        }
    }
}

ExperimentResult run_phase_experiment(const ExperimentConfig &cfg) {
    const auto &fam = *cfg.family;
    if (fam.size() != cfg.scheme.n) {
        throw DomainError("experiment: scheme channel count differs from the family size");
    }
    if (!fam.contains(cfg.theta_true)) {
        throw DomainError("experiment: theta_true lies outside the family domain");
    }
    check_phase_family_conditions(cfg, validate_family(fam));

    const PreparedScheme prepared = prepare_phase_scheme(cfg.scheme, fam, cfg.theta_true);
    const SchemeInformation info = scheme_information(prepared);
    ExperimentResult result;
    result.qfi = info.qfi;
    const double h = info.qfi.entries(0, 0);
    result.theoretical_mse = h > 0.0 ? 1.0 / (static_cast<double>(cfg.shots) * h)
                                     : std::numeric_limits<double>::infinity();

    std::vector<std::vector<double>> probs;
    for (std::size_t i = 0; i < prepared.outputs.size(); ++i) {
        probs.push_back(prepared.povms[i].probabilities(prepared.outputs[i]));
    }
    std::vector<double> sign_probs;
    if (cfg.sign_shots > 0) {
        const Povm sp = cfg.scheme.kind == SchemeKind::MultipartiteGhz ? ghz_sign_povm(2 * cfg.scheme.n) : sign_povm();
        if (cfg.scheme.kind == SchemeKind::MultipartiteGhz || cfg.scheme.kind == SchemeKind::Sequential) {
            sign_probs = sp.probabilities(prepared.outputs.front());
        }
    }

    const auto kind = cfg.scheme.kind;
    std::optional<MonotoneInverter> total_inverter;
    std::vector<MonotoneInverter> channel_inverters;
    if (kind == SchemeKind::MultipartiteGhz || kind == SchemeKind::Sequential) {
        total_inverter.emplace([&fam](double t) { return fam.total_phase(t); }, 0.0, fam.domain_upper());
    } else if (kind == SchemeKind::TensorMes || kind == SchemeKind::IndividualPerChannel) {
        for (int j = 0; j < fam.size(); ++j) {
            channel_inverters.emplace_back([&fam, j](double t) { return fam.phase(j, t); }, 0.0, fam.domain_upper());
        }
    }

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
    parallel_for(outcomes.size(), [&](std::size_t t) {
        Rng rng = Rng::stream(cfg.seed, t);
        TrialOutcome &o = outcomes[t];
        switch (kind) {
        case SchemeKind::MultipartiteGhz:
        case SchemeKind::Sequential: {
            o.counts = rng.multinomial(cfg.shots, probs.front());
            o.boundary = at_boundary(o.counts, cfg.shots);
            double phi = invert_phase(o.counts[0], cfg.shots);
            if (cfg.sign_shots > 0) {
                const Counts ys = rng.multinomial(cfg.sign_shots, sign_probs);
                append(o.counts, ys);
                phi = disambiguate_phase(phi, ys[0], cfg.sign_shots);
            }
            const PhaseInversion inv = total_inverter->invert(phi);
            o.estimate = inv.theta;
            o.failed = inv.clamped;
            break;
        }
        case SchemeKind::TensorMes:
        case SchemeKind::IndividualPerChannel: {
            double num = 0.0, den = 0.0, plain = 0.0;
            for (int j = 0; j < fam.size(); ++j) {
                const Counts c = rng.multinomial(cfg.shots, probs[static_cast<std::size_t>(j)]);
                o.boundary = o.boundary || at_boundary(c, cfg.shots);
                append(o.counts, c);
                const PhaseInversion inv =
                    channel_inverters[static_cast<std::size_t>(j)].invert(invert_phase(c[0], cfg.shots));
                o.failed = o.failed || inv.clamped;
                const double slope = fam.phase_derivative(j, inv.theta);
                const double w = slope * slope;
                num += w * inv.theta;
                den += w;
                plain += inv.theta;
            }
            if (den > 0.0 && std::isfinite(den)) {
                o.estimate = num / den;
            } else {
                o.estimate = plain / fam.size();
                o.failed = true;
            }
            break;
        }
        case SchemeKind::Adaptive: {
            const AdaptiveTrace tr = adaptive_estimate(fam, cfg.theta_true, cfg.shots, rng);
            for (const auto &st : tr.stages) {
                o.counts.push_back(st.n0);
                o.counts.push_back(st.shots - st.n0);
                o.boundary = o.boundary || st.n0 == 0 || st.n0 == st.shots;
            }
            o.estimate = tr.final_estimate;
            o.failed = !tr.complete;
            break;
        }
        }
    });

    double sse = 0.0;
    for (auto &o : outcomes) {
        const double e = o.estimate - cfg.theta_true;
        sse += e * e;
        result.estimates.push_back(o.estimate);
        result.counts.push_back(std::move(o.counts));
        result.estimator_failures += o.failed ? 1 : 0;
        result.boundary_trials += o.boundary ? 1 : 0;
    }
    result.empirical_mse = sse / static_cast<double>(cfg.trials);
    return result;
}

ExperimentResult run_su_experiment(const ExperimentConfig &cfg) {
    const SuDChannel &channel = *cfg.channel;
    if (channel.d() != 2) {
        throw DomainError("experiment: Monte-Carlo estimation of SU(d) channels is provided for d = 2 only");
    }
    if (static_cast<int>(cfg.theta_vectors.size()) != cfg.scheme.n) {
        throw DomainError("experiment: one parameter vector per SU(d) channel is required");
    }
    const PreparedScheme prepared = prepare_su_scheme(cfg.scheme, channel, cfg.theta_vectors);
    const SchemeInformation info = scheme_information(prepared);
    const Eigen::Index p = channel.parameter_count();
    const Eigen::Index total = p * cfg.scheme.n;

    ExperimentResult result;
    result.qfi = info.qfi;
    Eigen::FullPivLU<RMatrix> lu(info.qfi.entries);
    if (!lu.isInvertible()) {
        throw NumericalError("experiment: quantum information matrix is singular at theta_true");
    }
    result.theoretical_matrix = lu.inverse() / static_cast<double>(cfg.shots);
    result.theoretical_mse = result.theoretical_matrix.trace();

    // Bell amplitudes of (U (x) I)|mes> are (cos|a|, i sin|a| a_hat) with a = theta / sqrt(2).
    // Magnitudes come from the tallies; the sign pattern is taken as known from
    // a coarse prior localization of theta, analogous to the |psi_y> sign test.
    std::vector<std::vector<double>> probs;
    std::vector<std::array<double, 4>> signs;
    const CMatrix bell = bell_basis();
    for (std::size_t j = 0; j < prepared.outputs.size(); ++j) {
        probs.push_back(prepared.povms[j].probabilities(prepared.outputs[j]));
        const CVector amp = bell.adjoint() * prepared.outputs[j].amplitudes();
        std::array<double, 4> s{};
        s[0] = amp[0].real() >= 0.0 ? 1.0 : -1.0;
        for (int k = 1; k < 4; ++k) {
            s[static_cast<std::size_t>(k)] = amp[k].imag() >= 0.0 ? 1.0 : -1.0;
        }
        for (double pk : probs.back()) {
            if (pk < kMinBellProbability) {
                throw DomainError("experiment: every Bell outcome needs probability >= 1e-3 at theta_true "
                                  "(choose parameters with all components nonzero)");
            }
        }
        if (s[0] < 0.0) {
            throw DomainError("experiment: SU(2) estimation requires |theta| < pi / sqrt(2)");
        }
        signs.push_back(s);
    }

    RVector truth(total);
    for (Eigen::Index j = 0; j < cfg.scheme.n; ++j) {
        for (Eigen::Index k = 0; k < p; ++k) {
            truth[j * p + k] = cfg.theta_vectors[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        }
    }

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
    parallel_for(outcomes.size(), [&](std::size_t t) {
        Rng rng = Rng::stream(cfg.seed, t);
        TrialOutcome &o = outcomes[t];
        o.estimate_vector = RVector::Zero(total);
        for (int j = 0; j < cfg.scheme.n; ++j) {
            const Counts c = rng.multinomial(cfg.shots, probs[static_cast<std::size_t>(j)]);
            o.boundary = o.boundary || at_boundary(c, cfg.shots);
            append(o.counts, c);
            const auto &s = signs[static_cast<std::size_t>(j)];
            const double n = static_cast<double>(cfg.shots);
            const double q0 = std::sqrt(static_cast<double>(c[0]) / n);
            Eigen::Vector3d v;
            for (int k = 0; k < 3; ++k) {
                v[k] = s[static_cast<std::size_t>(k + 1)] * std::sqrt(static_cast<double>(c[static_cast<std::size_t>(k + 1)]) / n);
            }
            const double vn = v.norm();
            if (vn == 0.0) {
                o.failed = true;
                continue;
            }
            const double angle = std::atan2(vn, q0);
            o.estimate_vector.segment(j * p, p) = std::sqrt(2.0) * angle * v / vn;
        }
    });

    result.error_matrix = RMatrix::Zero(total, total);
    for (auto &o : outcomes) {
        const RVector e = o.estimate_vector - truth;
        result.error_matrix += e * e.transpose();
        result.counts.push_back(std::move(o.counts));
        result.estimator_failures += o.failed ? 1 : 0;
        result.boundary_trials += o.boundary ? 1 : 0;
    }
    result.error_matrix /= static_cast<double>(cfg.trials);
    result.empirical_mse = result.error_matrix.trace();
    return result;
}

}  // namespace

ExperimentResult run_mse_experiment(const ExperimentConfig &config) {
    config.scheme.validate();
    if (config.shots < 1 || config.trials < 1 || config.sign_shots < 0) {
        throw DomainError("experiment: shots and trials must be >= 1, sign_shots >= 0");
    }
    ExperimentResult result;
    if (config.scheme.model == ChannelModel::PhaseFamily) {
        if (!config.family) {
            throw DomainError("experiment: a phase family is required for this scheme");
        }
        result = run_phase_experiment(config);
    } else {
        if (!config.channel) {
            throw DomainError("experiment: an SU(d) channel model is required for this scheme");
        }
        result = run_su_experiment(config);
    }
    result.trials = config.trials;
    result.seed = config.seed;
    if (2 * result.estimator_failures > config.trials) {
        throw NumericalError("experiment: estimator undefined in " + std::to_string(result.estimator_failures) +
                             " of " + std::to_string(config.trials) + " trials");
    }
    return result;
}

std::vector<SweepRow> sweep(std::span<const double> values,
                            const std::function<ExperimentConfig(double)> &instantiate, std::uint64_t seed) {
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        SweepRow row;
        row.varied_value = values[i];
        row.seed = derive_seed(seed, i);
        try {
            ExperimentConfig cfg = instantiate(values[i]);
            cfg.seed = row.seed;
            row.result = run_mse_experiment(cfg);
        } catch (const std::exception &e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace qmetro
