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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmetro/information.hpp"
#include "qmetro/schemes.hpp"
#include "random_objects.hpp"

namespace qmetro {
namespace {

using std::numbers::pi;
using testing::random_ket;

// Oracle: QFI of a pure state family from the textbook variance formula
// H_jk = 4 Re(<dpsi_j|dpsi_k> - <dpsi_j|psi><psi|dpsi_k>).
RMatrix variance_qfi(const CVector &psi, const std::vector<CVector> &dpsi) {
    const auto m = static_cast<Eigen::Index>(dpsi.size());
    RMatrix h(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
            h(j, k) = 4.0 * (dpsi[j].dot(dpsi[k]) - dpsi[j].dot(psi) * psi.dot(dpsi[k])).real();
        }
    }
    return h;
}

std::vector<CMatrix> pure_drho(const CVector &psi, const std::vector<CVector> &dpsi) {
    std::vector<CMatrix> out;
    for (const auto &d : dpsi) {
        out.push_back(d * psi.adjoint() + psi * d.adjoint());
    }
    return out;
}

TEST(Povm, RejectsInvalidElements) {
    EXPECT_THROW(Povm({CMatrix::Identity(2, 2) * 0.5}), DomainError);
    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = 1.0;
    CMatrix other = CMatrix::Zero(2, 2);
    other(0, 0) = -0.5;
    EXPECT_THROW(Povm({neg, other}), DomainError);
    EXPECT_NO_THROW(Povm({CMatrix::Identity(2, 2)}));
}

TEST(QfiPure, MesAtOriginIsScaledIdentity) {
    for (int d : {2, 3}) {
        const SuDChannel ch(d);
        const std::vector<double> zero(static_cast<std::size_t>(ch.parameter_count()), 0.0);
        const std::vector<CMatrix> us = {ch.unitary_at(zero)};
        std::vector<CMatrix> dus;
        for (const auto &du : ch.unitary_derivatives(zero)) {
            dus.push_back(extended_operator(std::vector<CMatrix>{du}));
        }
        const QfiMatrix h = qfi_pure_channel(extended_operator(us), dus, mes_state(d));
        const RMatrix expected = (4.0 / d) * RMatrix::Identity(d * d - 1, d * d - 1);
        EXPECT_LT(max_abs(RMatrix(h.entries - expected)), 1e-12) << "d=" << d;
    }
}

TEST(QfiPure, GhzAndTensorMesScalars) {
    const DependentFamily fam({forms::linear(1.0), forms::affine(2.0, 0.1), forms::power(0.5, 2.0)}, 1.0);
    const double theta = 0.4;
    double sum = 0.0, sum_sq = 0.0;
    for (int j = 0; j < fam.size(); ++j) {
        sum += fam.phase_derivative(j, theta);
        sum_sq += std::pow(fam.phase_derivative(j, theta), 2);
    }
    const CMatrix op = extended_operator(fam.unitaries(theta));
    const std::vector<CMatrix> dop = {
        extended_operator_derivative(fam.unitaries(theta), fam.unitary_derivatives(theta))};
    EXPECT_NEAR(qfi_pure_channel(op, dop, ghz_state(6)).entries(0, 0), sum * sum, 1e-12);
    const std::vector<Ket> mes(3, mes_state(2));
    EXPECT_NEAR(qfi_pure_channel(op, dop, tensor(mes)).entries(0, 0), sum_sq, 1e-12);
}

TEST(QfiPure, MatchesVarianceOracle) {
    Rng rng(61);
    for (int t = 0; t < 30; ++t) {
        const int dim = 2 + t % 5;
        const CMatrix u = matrix_exp(testing::random_skew_hermitian(rng, dim));
        std::vector<CMatrix> du = {testing::random_matrix(rng, dim, dim), testing::random_matrix(rng, dim, dim)};
        const Ket psi0 = random_ket(rng, dim);
        const CVector psi = u * psi0.amplitudes();
        // The oracle formula is exact only when <psi|dpsi> is imaginary,
        // i.e. when U^dagger dU is anti-Hermitian; enforce that.
        for (auto &m : du) {
            const CMatrix a = u.adjoint() * m;
            m = u * (0.5 * (a - a.adjoint()));
        }
        std::vector<CVector> dpsi;
        for (const auto &m : du) {
            dpsi.push_back(m * psi0.amplitudes());
        }
        const QfiMatrix h = qfi_pure_channel(u, du, psi0);
        EXPECT_LT(max_abs(RMatrix(h.entries - variance_qfi(psi, dpsi))), 1e-10);
    }
}

TEST(QfiPure, GlobalPhaseInvariance) {
    Rng rng(67);
    const SuDChannel ch(2);
    const std::vector<double> theta = {0.3, -0.2, 0.5};
    const CMatrix op = extended_operator(std::vector<CMatrix>{ch.unitary_at(theta)});
    std::vector<CMatrix> dop;
    for (const auto &du : ch.unitary_derivatives(theta)) {
        dop.push_back(extended_operator(std::vector<CMatrix>{du}));
    }
    const Ket psi = random_ket(rng, 4);
    const Ket rotated(psi.amplitudes() * std::exp(Complex(0.0, 1.234)));
    EXPECT_LT(max_abs(RMatrix(qfi_pure_channel(op, dop, psi).entries - qfi_pure_channel(op, dop, rotated).entries)),
              1e-10);
}

TEST(QfiPure, MixedInputRejected) {
    const DensityOperator mixed(CMatrix(CMatrix::Identity(2, 2) / 2.0));
    const std::vector<CMatrix> du = {CMatrix::Identity(2, 2)};
    EXPECT_THROW((void)qfi_pure_channel(CMatrix::Identity(2, 2), du, mixed), DomainError);
}

TEST(SldSolve, ZeroDerivativeGivesZero) {
    Rng rng(71);
    const DensityOperator rho = testing::random_density(rng, 3);
    const std::vector<CMatrix> drho = {CMatrix::Zero(3, 3)};
    const SldSet s = sld_solve(rho, drho);
    EXPECT_EQ(max_abs(s.operators[0]), 0.0);
    EXPECT_EQ(max_abs(qfi_from_slds(rho, s).entries), 0.0);
}

TEST(SldSolve, FullRankResidual) {
    Rng rng(73);
    for (int t = 0; t < 20; ++t) {
        const DensityOperator rho = testing::random_density(rng, 3);
        const std::vector<CMatrix> drho = {testing::random_traceless_hermitian(rng, 3)};
        const SldSet s = sld_solve(rho, drho);
        const CMatrix &l = s.operators[0];
        const CMatrix recon = 0.5 * (rho.matrix() * l + l * rho.matrix());
        EXPECT_LT(max_abs(CMatrix(recon - drho[0])), 1e-9);
        EXPECT_TRUE(is_hermitian(l, 1e-10));
    }
}

TEST(SldSolve, PureStateSldIsTwiceDerivativeOnSupport) {
    Rng rng(79);
    const Ket psi = random_ket(rng, 4);
    const CMatrix h = testing::random_hermitian(rng, 4);
    const CVector dpsi = Complex(0.0, 1.0) * h * psi.amplitudes();
    const std::vector<CMatrix> drho = pure_drho(psi.amplitudes(), {dpsi});
    const SldSet s = sld_solve(DensityOperator(psi), drho);
    const CVector lhs = s.operators[0] * psi.amplitudes();
    const CVector rhs = 2.0 * drho[0] * psi.amplitudes();
    EXPECT_LT((lhs - rhs).norm(), 1e-8);
    EXPECT_LT(s.max_residual, 1e-8);
}

TEST(SldSolve, RejectsNonTracelessDerivative) {
    const DensityOperator rho(CMatrix(CMatrix::Identity(2, 2) / 2.0));
    const std::vector<CMatrix> drho = {CMatrix::Identity(2, 2)};
    EXPECT_THROW((void)sld_solve(rho, drho), DomainError);
}

TEST(QfiFromSlds, PhaseChannelOnMes) {
    const DependentFamily fam({forms::linear(1.0)}, pi);
    const double theta = 0.9;
    const CMatrix op = extended_operator(fam.unitaries(theta));
    const CMatrix dop = extended_operator_derivative(fam.unitaries(theta), fam.unitary_derivatives(theta));
    const CVector psi = op * mes_state(2).amplitudes();
    const CVector dpsi = dop * mes_state(2).amplitudes();
    const DensityOperator rho(Ket{psi});
    const QfiMatrix h = qfi_from_slds(rho, sld_solve(rho, pure_drho(psi, {dpsi})));
    EXPECT_NEAR(h.entries(0, 0), 1.0, 1e-10);
}

TEST(QfiFromSlds, AgreesWithPureFormulaOnRandomCases) {
    Rng rng(83);
    for (int t = 0; t < 50; ++t) {
        const int d = 2 + t % 2;
        const SuDChannel ch(d);
        std::vector<double> theta(static_cast<std::size_t>(ch.parameter_count()));
        for (double &x : theta) {
            x = rng.normal();
        }
        const std::vector<CMatrix> us = {ch.unitary_at(theta)};
        const CMatrix op = extended_operator(us);
        std::vector<CMatrix> dop;
        for (const auto &du : ch.unitary_derivatives(theta)) {
            dop.push_back(extended_operator(std::vector<CMatrix>{du}));
        }
        const Ket psi0 = random_ket(rng, d * d);
        const CVector psi = op * psi0.amplitudes();
        std::vector<CVector> dpsi;
        for (const auto &m : dop) {
            dpsi.push_back(m * psi0.amplitudes());
        }
        const DensityOperator rho(Ket::normalized(psi));
        const QfiMatrix via_sld = qfi_from_slds(rho, sld_solve(rho, pure_drho(psi, dpsi)));
        const QfiMatrix direct = qfi_pure_channel(op, dop, psi0);
        EXPECT_LT(max_abs(RMatrix(via_sld.entries - direct.entries)), 1e-8);
    }
}

TEST(Fisher, SingleOutcomeIsUninformative) {
    Rng rng(89);
    const DensityOperator rho = testing::random_density(rng, 2);
    const std::vector<CMatrix> drho = {testing::random_traceless_hermitian(rng, 2)};
    const FisherMatrix f = fisher_information(Povm({CMatrix::Identity(2, 2)}), rho, drho);
    EXPECT_LT(max_abs(f.entries), 1e-24);
}

TEST(Fisher, GhzPovmSaturatesQfi) {
    const DependentFamily fam({forms::linear(1.0), forms::linear(0.5), forms::linear(1.5)}, 1.0);
    SchemeSpec spec{SchemeKind::MultipartiteGhz, 3, 2, ChannelModel::PhaseFamily};
    for (double theta : {0.1, 0.35, 0.6, 0.95}) {
        const PreparedScheme ps = prepare_phase_scheme(spec, fam, theta);
        const FisherMatrix f = fisher_information(ps.povms[0], ps.output_state(0), ps.output_derivatives(0));
        EXPECT_NEAR(f.entries(0, 0), 9.0, 1e-9) << theta;
    }
}

TEST(Fisher, PlusStateSymbolic) {
    // p0 = cos^2(theta/2), dp0 = -sin(theta)/2  =>  F = dp0^2 / (p0 (1 - p0)) = 1.
    const DependentFamily fam({forms::linear(1.0)}, pi);
    for (double theta : {0.2, 1.0, 2.0, 3.0}) {
        const CVector psi = fam.unitary_at(0, theta) * plus_state().amplitudes();
        const CVector dpsi = fam.unitary_derivative(0, theta) * plus_state().amplitudes();
        const DensityOperator rho(Ket{psi});
        const FisherMatrix f = fisher_information(Povm::projective_pair(plus_state()), rho, pure_drho(psi, {dpsi}));
        const double p0 = std::pow(std::cos(theta / 2), 2);
        const double dp0 = -std::sin(theta) / 2;
        EXPECT_NEAR(f.entries(0, 0), dp0 * dp0 / (p0 * (1 - p0)), 1e-10);
        EXPECT_NEAR(f.entries(0, 0), 1.0, 1e-10);
    }
}

TEST(Fisher, VanishingProbabilityWithSlopeRaises) {
    const std::vector<double> probs = {0.0, 1.0};
    EXPECT_THROW((void)fisher_from_distribution(probs, {{0.5, -0.5}}), NumericalError);
    EXPECT_NO_THROW((void)fisher_from_distribution(probs, {{0.0, 0.0}}));
}

TEST(CrGap, EqualityAndUninformative) {
    const DependentFamily fam({forms::linear(1.0), forms::linear(1.0)}, 1.0);
    const PreparedScheme ps =
        prepare_phase_scheme(SchemeSpec{SchemeKind::MultipartiteGhz, 2, 2, ChannelModel::PhaseFamily}, fam, 0.5);
    const SchemeInformation info = scheme_information(ps);
    ASSERT_TRUE(info.cr_gap.has_value());
    EXPECT_NEAR(*info.cr_gap, 0.0, 1e-9);
    FisherMatrix zero{RMatrix::Zero(1, 1)};
    EXPECT_NEAR(cr_dominance_gap(zero, info.qfi), info.qfi.entries(0, 0), 1e-12);
}

TEST(CrGap, RandomPovmsOnPhaseOutputs) {
    Rng rng(97);
    for (int t = 0; t < 100; ++t) {
        const DependentFamily fam({forms::linear(0.5 + rng.uniform())}, 1.0);
        const double theta = rng.uniform();
        const Ket in = random_ket(rng, 4);
        const CMatrix op = extended_operator(fam.unitaries(theta));
        const CMatrix dop = extended_operator_derivative(fam.unitaries(theta), fam.unitary_derivatives(theta));
        const CVector psi = op * in.amplitudes();
        const CVector dpsi = dop * in.amplitudes();
        const DensityOperator rho(Ket::normalized(psi));
        const Povm povm = testing::random_povm(rng, 4, 2 + t % 4);
        const FisherMatrix f = fisher_information(povm, rho, pure_drho(psi, {dpsi}));
        const std::vector<CMatrix> dops = {dop};
        EXPECT_GE(cr_dominance_gap(f, qfi_pure_channel(op, dops, in)), -1e-9);
    }
}

}  // namespace
}  // namespace qmetro
