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

#include "qmetro/optimize.hpp"
#include "qmetro/schemes.hpp"
#include "random_objects.hpp"

namespace qmetro {
namespace {

using std::numbers::pi;
const double kR = 1.0 / std::sqrt(2.0);

void expect_povm_sums_to_identity(const Povm &p) {
    CMatrix sum = CMatrix::Zero(p.dim(), p.dim());
    for (const auto &e : p.elements()) {
        sum += e;
    }
    EXPECT_LT(max_abs(CMatrix(sum - CMatrix::Identity(p.dim(), p.dim()))), 1e-12);
}

TEST(States, MesAmplitudes) {
    const Ket m2 = mes_state(2);
    EXPECT_NEAR(m2[0].real(), kR, 1e-15);
    EXPECT_NEAR(m2[3].real(), kR, 1e-15);
    EXPECT_EQ(std::abs(m2[1]) + std::abs(m2[2]), 0.0);
    const Ket m3 = mes_state(3);
    ASSERT_EQ(m3.dim(), 9);
    for (int i = 0; i < 9; ++i) {
        EXPECT_NEAR(std::abs(m3[i]), (i == 0 || i == 4 || i == 8) ? 1.0 / std::sqrt(3.0) : 0.0, 1e-15);
    }
    for (int d : {2, 3, 4}) {
        for (double c : schmidt_spectrum(mes_state(d), d, d)) {
            EXPECT_NEAR(c, 1.0 / std::sqrt(d), 1e-12);
        }
    }
}

TEST(States, Ghz) {
    EXPECT_EQ((ghz_state(2).amplitudes() - mes_state(2).amplitudes()).norm(), 0.0);
    const Ket g = ghz_state(3);
    EXPECT_NEAR(g[0].real(), kR, 1e-15);
    EXPECT_NEAR(g[7].real(), kR, 1e-15);
    EXPECT_NEAR(g.amplitudes().norm(), 1.0, 1e-15);
}

TEST(States, MultipartiteMes) {
    EXPECT_EQ((multipartite_mes(2, 2).amplitudes() - mes_state(2).amplitudes()).norm(), 0.0);
    EXPECT_EQ((multipartite_mes(3, 2).amplitudes() - mes_state(3).amplitudes()).norm(), 0.0);
    const Ket m = multipartite_mes(2, 4);
    ASSERT_EQ(m.dim(), 16);
    EXPECT_NEAR(m[0].real(), kR, 1e-15);
    EXPECT_NEAR(m[15].real(), kR, 1e-15);
    EXPECT_NEAR(m.amplitudes().segment(1, 14).norm(), 0.0, 1e-15);
    EXPECT_THROW((void)multipartite_mes(2, 3), DomainError);
}

TEST(SchemePovm, GhzTwoChannels) {
    const SchemePovms p = scheme_povm(SchemeSpec{SchemeKind::MultipartiteGhz, 2, 2, ChannelModel::PhaseFamily});
    ASSERT_EQ(p.povms.size(), 1u);
    EXPECT_EQ(p.povms[0].dim(), 16);
    const CMatrix proj = ghz_state(4).projector();
    EXPECT_LT(max_abs(CMatrix(p.povms[0][0] - proj)), 1e-15);
    EXPECT_LT(max_abs(CMatrix(p.povms[0][1] - (CMatrix::Identity(16, 16) - proj))), 1e-15);
}

TEST(SchemePovm, SequentialUsesPlusState) {
    const SchemePovms p = scheme_povm(SchemeSpec{SchemeKind::Sequential, 3, 2, ChannelModel::PhaseFamily});
    ASSERT_EQ(p.povms.size(), 1u);
    CMatrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    EXPECT_LT(max_abs(CMatrix(p.povms[0][0] - plus)), 1e-15);
}

TEST(SchemePovm, AllKindsSumToIdentity) {
    for (auto kind : {SchemeKind::TensorMes, SchemeKind::MultipartiteGhz, SchemeKind::Sequential,
                      SchemeKind::IndividualPerChannel, SchemeKind::Adaptive}) {
        for (int n : {1, 2, 3}) {
            for (const auto &p : scheme_povm(SchemeSpec{kind, n, 2, ChannelModel::PhaseFamily}).povms) {
                expect_povm_sums_to_identity(p);
            }
        }
    }
    for (const auto &p : scheme_povm(SchemeSpec{SchemeKind::TensorMes, 2, 2, ChannelModel::SpecialUnitary}).povms) {
        expect_povm_sums_to_identity(p);
        EXPECT_EQ(p.size(), 4u);
    }
    expect_povm_sums_to_identity(sign_povm());
    expect_povm_sums_to_identity(ghz_sign_povm(4));
}

TEST(SchemePovm, TensorMesIsPerChannel) {
    const SchemePovms p = scheme_povm(SchemeSpec{SchemeKind::TensorMes, 3, 2, ChannelModel::PhaseFamily});
    EXPECT_TRUE(p.per_channel);
    ASSERT_EQ(p.povms.size(), 3u);
    EXPECT_EQ(p.povms[0].dim(), 4);
}

TEST(SchemeSpec, RejectsUnsupportedCombinations) {
    EXPECT_THROW((SchemeSpec{SchemeKind::MultipartiteGhz, 2, 2, ChannelModel::SpecialUnitary}.validate()), DomainError);
    EXPECT_THROW((SchemeSpec{SchemeKind::Sequential, 2, 3, ChannelModel::PhaseFamily}.validate()), DomainError);
    EXPECT_THROW((SchemeSpec{SchemeKind::TensorMes, 0, 2, ChannelModel::PhaseFamily}.validate()), DomainError);
    EXPECT_NO_THROW((SchemeSpec{SchemeKind::IndividualPerChannel, 2, 3, ChannelModel::SpecialUnitary}.validate()));
    EXPECT_THROW((void)scheme_kind_from_string("noon"), DomainError);
    EXPECT_EQ(scheme_kind_from_string(to_string(SchemeKind::Sequential)), SchemeKind::Sequential);
}

TEST(OutcomeProbability, GhzPhasePoints) {
    const DependentFamily fam({forms::linear(1.0)}, 2 * pi);
    const SchemeSpec spec{SchemeKind::MultipartiteGhz, 1, 2, ChannelModel::PhaseFamily};
    const std::vector<std::pair<double, double>> cases = {{0.0, 1.0}, {pi / 2, 0.5}, {pi, 0.0}};
    for (const auto &[phi, p0] : cases) {
        const PreparedScheme ps = prepare_phase_scheme(spec, fam, phi);
        EXPECT_NEAR(ps.povms[0].probabilities(ps.outputs[0])[0], p0, 1e-15) << phi;
    }
}

TEST(OutcomeProbability, SignMeasurement) {
    // y-basis outcome 0 has probability (1 + sin phi) / 2 on (|0> + e^{i phi}|1>)/sqrt 2.
    const std::vector<std::pair<double, double>> cases = {{0.0, 0.5}, {pi / 2, 1.0}, {3 * pi / 2, 0.0}};
    for (const auto &[phi, p0] : cases) {
        CVector v(2);
        v << kR, std::exp(Complex(0.0, phi)) * kR;
        EXPECT_NEAR(sign_povm().probabilities(Ket{v})[0], p0, 1e-15) << phi;
    }
}

TEST(OutcomeProbability, GhzMatchesCosineSquaredOnRandomFamilies) {
    Rng rng(101);
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 3;
        std::vector<PhaseFunction> fs;
        for (int j = 0; j < n; ++j) {
            switch (static_cast<int>(rng.uniform() * 3)) {
                case 0: fs.push_back(forms::linear(rng.uniform())); break;
                case 1: fs.push_back(forms::affine(rng.uniform(), rng.uniform())); break;
                default: fs.push_back(forms::power(rng.uniform(), 1.0 + rng.uniform())); break;
            }
        }
        const DependentFamily fam(std::move(fs), 1.0);
        const double theta = rng.uniform();
        const PreparedScheme ps =
            prepare_phase_scheme(SchemeSpec{SchemeKind::MultipartiteGhz, n, 2, ChannelModel::PhaseFamily}, fam, theta);
        const double phi = fam.total_phase(theta);
        EXPECT_NEAR(ps.povms[0].probabilities(ps.outputs[0])[0], std::pow(std::cos(phi / 2), 2), 1e-12);
    }
}

TEST(Partition, DerivativeSigns) {
    const DependentFamily increasing({forms::linear(1.0), forms::affine(2.0, 0.3)}, 1.0);
    EXPECT_TRUE(partition_by_derivative_sign(increasing, 0.5).decreasing.empty());
    const DependentFamily mixed({forms::linear(1.0), forms::linear(-1.0)}, 1.0);
    for (double th : {0.0, 0.4, 1.0}) {
        const Partition p = partition_by_derivative_sign(mixed, th);
        EXPECT_EQ(p.nondecreasing, std::vector<int>{0});
        EXPECT_EQ(p.decreasing, std::vector<int>{1});
    }
    // Zero derivative at the peak of sin goes to the nondecreasing group.
    const DependentFamily peak({forms::sinusoid(1.0, 1.0)}, pi);
    EXPECT_EQ(partition_by_derivative_sign(peak, pi / 2).nondecreasing, std::vector<int>{0});
    const DependentFamily flat({forms::affine(0.0, 0.5)}, 1.0);
    EXPECT_EQ(partition_by_derivative_sign(flat, 0.3).nondecreasing, std::vector<int>{0});
}

TEST(SchemeInformation, ContrastForIdenticalSlopes) {
    const DependentFamily fam({forms::linear(1.0), forms::linear(1.0), forms::linear(1.0)}, pi / 3);
    const double theta = pi / 6;
    auto info = [&](SchemeKind kind) {
        return scheme_information(prepare_phase_scheme(SchemeSpec{kind, 3, 2, ChannelModel::PhaseFamily}, fam, theta));
    };
    const SchemeInformation ghz = info(SchemeKind::MultipartiteGhz);
    const SchemeInformation mes = info(SchemeKind::TensorMes);
    const SchemeInformation seq = info(SchemeKind::Sequential);
    const SchemeInformation ind = info(SchemeKind::IndividualPerChannel);
    EXPECT_NEAR(ghz.qfi.trace(), 9.0, 1e-9);
    EXPECT_NEAR(mes.qfi.trace(), 3.0, 1e-9);
    EXPECT_NEAR(seq.qfi.trace(), 9.0, 1e-9);
    EXPECT_NEAR(ind.qfi.trace(), 3.0, 1e-9);
    ASSERT_TRUE(ghz.fisher && seq.fisher);
    EXPECT_NEAR(ghz.fisher->trace(), 9.0, 1e-9);
    EXPECT_NEAR(seq.fisher->trace(), 9.0, 1e-9);
}

TEST(SchemeInformation, SuTensorMesStacksBlocks) {
    const SuDChannel ch(2);
    const std::vector<std::vector<double>> thetas = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    const SchemeInformation info = scheme_information(
        prepare_su_scheme(SchemeSpec{SchemeKind::TensorMes, 2, 2, ChannelModel::SpecialUnitary}, ch, thetas));
    EXPECT_LT(max_abs(RMatrix(info.qfi.entries - 2.0 * RMatrix::Identity(6, 6))), 1e-12);
    ASSERT_TRUE(info.fisher.has_value());
    EXPECT_GE(*info.cr_gap, -1e-9);
}

}  // namespace
}  // namespace qmetro
