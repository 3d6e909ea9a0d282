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

#include "qmetro/optimize.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "qmetro/parallel.hpp"
#include "qmetro/rng.hpp"
#include "qmetro/schemes.hpp"

namespace qmetro {

Ket decode_state(std::span<const double> coords) {
    if (coords.empty() || coords.size() % 2 != 0) {
        throw DomainError("decode_state: coordinate count must be even and positive");
    }
    const auto dim = static_cast<Eigen::Index>(coords.size() / 2);
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v[i] = Complex(coords[static_cast<std::size_t>(2 * i)], coords[static_cast<std::size_t>(2 * i + 1)]);
    }
    return Ket::normalized(std::move(v));
}

std::vector<double> encode_state(const Ket &ket) {
    std::vector<double> out(static_cast<std::size_t>(2 * ket.dim()));
    for (Eigen::Index i = 0; i < ket.dim(); ++i) {
        out[static_cast<std::size_t>(2 * i)] = ket[i].real();
        out[static_cast<std::size_t>(2 * i + 1)] = ket[i].imag();
    }
    return out;
}

// ---------------------------------------------------------------------------
// TraceQfiObjective

TraceQfiObjective::TraceQfiObjective(SuDChannel channel, std::vector<std::vector<double>> thetas)
    : channel_(std::move(channel)), thetas_(std::move(thetas)) {
    if (thetas_.empty()) {
        throw DomainError("TraceQfiObjective: at least one channel is required");
    }
    std::vector<CMatrix> us;
    std::vector<std::vector<CMatrix>> dus;
    for (const auto &theta : thetas_) {
        us.push_back(channel_.unitary_at(theta));
        dus.push_back(channel_.unitary_derivatives(theta));
    }
    op_ = extended_operator(us);
    for (std::size_t j = 0; j < us.size(); ++j) {
        std::vector<CMatrix> factors = us;
        for (const auto &du : dus[j]) {
            factors[j] = du;
            derivs_.push_back(extended_operator(factors));
        }
    }
    for (const auto &dm : derivs_) {
        gram_.push_back(dm.adjoint() * dm);
        shift_.push_back(op_.adjoint() * dm);
    }
}

double TraceQfiObjective::bound() const {
    const double d = channel_.d();
    return channels() * 4.0 * (d * d - 1.0) / d;
}

QfiMatrix TraceQfiObjective::qfi(const Ket &ket) const {
    if (ket.dim() != dim()) {
        throw DomainError("TraceQfiObjective: input has dimension " + std::to_string(ket.dim()) + ", expected " +
                          std::to_string(dim()));
    }
    QfiMatrix h = qfi_pure_channel(op_, derivs_, ket);
    h.params_per_channel = channel_.parameter_count();
    return h;
}

double TraceQfiObjective::operator()(const Ket &ket) const {
    if (ket.dim() != dim()) {
        throw DomainError("TraceQfiObjective: input has dimension " + std::to_string(ket.dim()) + ", expected " +
                          std::to_string(dim()));
    }
    const CVector &psi = ket.amplitudes();
    double acc = 0.0;
    for (std::size_t m = 0; m < gram_.size(); ++m) {
        const double norm2 = psi.dot(gram_[m] * psi).real();
        const Complex mean = psi.dot(shift_[m] * psi);
        acc += 4.0 * norm2 + 4.0 * (mean * mean).real();
    }
    return acc;
}

double TraceQfiObjective::evaluate(std::span<const double> coords) const { return (*this)(decode_state(coords)); }

double trace_qfi_objective(const SuDChannel &channel, const std::vector<std::vector<double>> &thetas,
                           const Ket &ket) {
    return TraceQfiObjective(channel, thetas).qfi(ket).trace();
}

// ---------------------------------------------------------------------------
// Optimizer

std::vector<double> objective_gradient(const TraceQfiObjective &objective, std::span<const double> coords, double h) {
    std::vector<double> x(coords.begin(), coords.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double fp = objective.evaluate(x);
        x[i] = saved - h;
        const double fm = objective.evaluate(x);
        x[i] = saved;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

namespace {

struct RestartResult {
    double value = -1.0;
    std::vector<double> coords;
    int iterations = 0;
    bool converged = true;
};

void normalize(std::vector<double> &x) {
    double n2 = 0.0;
    for (double v : x) {
        n2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (double &v : x) {
        v *= inv;
    }
}

RestartResult ascend(const TraceQfiObjective &objective, const OptimizerOptions &opt, Rng rng) {
    RestartResult r;
    std::vector<double> x(static_cast<std::size_t>(2 * objective.dim()));
    for (double &v : x) {
        v = rng.normal();
    }
    normalize(x);
    double f = objective.evaluate(x);
    double step = 1.0;
    std::vector<double> trial(x.size());
    r.converged = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const auto g = objective_gradient(objective, x, opt.fd_step);
        double gnorm2 = 0.0;
        for (double v : g) {
            gnorm2 += v * v;
        }
        if (gnorm2 == 0.0) {
            r.converged = true;
            break;
        }
        step = std::min(step * 2.0, 1e3);
        double f_new = f;
        bool accepted = false;
        while (step > 1e-14) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                trial[i] = x[i] + step * g[i];
            }
            normalize(trial);
            f_new = objective.evaluate(trial);
            // Armijo sufficient increase.
            if (f_new >= f + 1e-4 * step * gnorm2 && f_new > f) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            r.converged = true;
            break;
        }
        const double improvement = f_new - f;
        x.swap(trial);
        f = f_new;
        if (improvement < opt.tolerance) {
            r.converged = true;
            ++it;
            break;
        }
    }
    r.iterations = it;
    r.value = f;
    r.coords = std::move(x);
    return r;
}

}  // namespace

OptReport maximize_trace_qfi(const TraceQfiObjective &objective, const OptimizerOptions &options, std::uint64_t seed) {
    if (options.restarts < 1) {
        throw DomainError("maximize_trace_qfi: restarts must be >= 1");
    }
    std::vector<RestartResult> results(static_cast<std::size_t>(options.restarts));
    parallel_for(results.size(), [&](std::size_t r) { results[r] = ascend(objective, options, Rng::stream(seed, r)); });

    OptReport report;
    report.restarts = options.restarts;
    std::size_t best = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
        if (results[r].value > results[best].value) {
            best = r;
        }
        report.converged = report.converged && results[r].converged;
    }
    const Ket state = decode_state(results[best].coords);
    report.best_restart = static_cast<int>(best);
    report.best_value = results[best].value;
    report.best_state = state.amplitudes();
    report.iterations = results[best].iterations;
    report.bound = objective.bound();
    report.gap = report.bound - report.best_value;
    const auto g = objective_gradient(objective, encode_state(state), options.fd_step);
    for (double v : g) {
        report.gradient_inf_norm = std::max(report.gradient_inf_norm, std::abs(v));
    }
    const std::vector<int> dims(static_cast<std::size_t>(2 * objective.channels()), objective.d());
    for (int j = 0; j < objective.channels(); ++j) {
        report.schmidt_spectra.push_back(factor_schmidt_spectrum(state, dims, 2 * j));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Ballester ratio and Schmidt spectra

double ballester_ratio(const SuDChannel &channel, std::span<const double> theta, const Ket &ket) {
    const TraceQfiObjective single(channel, {std::vector<double>(theta.begin(), theta.end())});
    const RMatrix h_mes = single.qfi(mes_state(channel.d())).entries;
    Eigen::JacobiSVD<RMatrix> svd(h_mes);
    const auto &sv = svd.singularValues();
    const double cond = sv[0] / sv[sv.size() - 1];
    if (!(cond < 1e8)) {
        throw NumericalError("ballester_ratio: H(rho_mes) is singular (condition number " + std::to_string(cond) + ")");
    }
    const RMatrix h0 = single.qfi(ket).entries;
    return h_mes.ldlt().solve(h0).trace();
}

std::vector<double> schmidt_spectrum(const Ket &ket, Eigen::Index dim_a, Eigen::Index dim_b) {
    if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != ket.dim()) {
        throw DomainError("schmidt_spectrum: bipartition does not match the state dimension");
    }
    CMatrix m(dim_a, dim_b);
    for (Eigen::Index i = 0; i < dim_a; ++i) {
        for (Eigen::Index j = 0; j < dim_b; ++j) {
            m(i, j) = ket[i * dim_b + j];
        }
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto &sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

std::vector<double> factor_schmidt_spectrum(const Ket &ket, std::span<const int> factor_dims, int factor) {
    const int nf = static_cast<int>(factor_dims.size());
    if (factor < 0 || factor >= nf) {
        throw DomainError("factor_schmidt_spectrum: factor index out of range");
    }
    Eigen::Index total = 1;
    for (int dim : factor_dims) {
        total *= dim;
    }
    if (total != ket.dim()) {
        throw DomainError("factor_schmidt_spectrum: factor dimensions do not match the state");
    }
    Eigen::Index stride = 1;
    for (int f = nf - 1; f > factor; --f) {
        stride *= factor_dims[static_cast<std::size_t>(f)];
    }
    const Eigen::Index df = factor_dims[static_cast<std::size_t>(factor)];
    const Eigen::Index rest = total / df;
    CMatrix m(df, rest);
    for (Eigen::Index idx = 0; idx < total; ++idx) {
        const Eigen::Index digit = (idx / stride) % df;
        const Eigen::Index high = idx / (stride * df);
        const Eigen::Index low = idx % stride;
        m(digit, high * stride + low) = ket[idx];
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto &sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

}  // namespace qmetro
