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

#include "qmetro/optimize.hpp"
#include "qmetro/schemes.hpp"
#include "random_objects.hpp"

namespace qmetro {
namespace {

std::vector<std::vector<double>> zeros(int n, int p) {
    return std::vector<std::vector<double>>(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(p), 0.0));
}

TEST(TraceObjective, KnownValues) {
    const SuDChannel ch(2);
    EXPECT_NEAR(trace_qfi_objective(ch, zeros(1, 3), mes_state(2)), 6.0, 1e-12);
    const double product = trace_qfi_objective(ch, zeros(1, 3), Ket::basis(4, 0));
    EXPECT_LT(product, 6.0 - 1e-6);
    const std::vector<Ket> two(2, mes_state(2));
    EXPECT_NEAR(trace_qfi_objective(ch, zeros(2, 3), tensor(two)), 12.0, 1e-12);
}

TEST(TraceObjective, FastPathMatchesFullMatrix) {
    Rng rng(131);
    for (int d : {2, 3}) {
        const SuDChannel ch(d);
        std::vector<std::vector<double>> thetas(1, std::vector<double>(static_cast<std::size_t>(ch.parameter_count())));
        for (double &x : thetas[0]) {
            x = 0.3 * rng.normal();
        }
        const TraceQfiObjective obj(ch, thetas);
        for (int t = 0; t < 10; ++t) {
            const Ket k = testing::random_ket(rng, obj.dim());
            EXPECT_NEAR(obj(k), obj.qfi(k).trace(), 1e-10);
        }
    }
}

TEST(TraceObjective, RandomInputsRespectBound) {
    Rng rng(137);
    for (int d : {2, 3}) {
        const SuDChannel ch(d);
        const TraceQfiObjective obj(ch, zeros(1, ch.parameter_count()));
        for (int t = 0; t < 1000; ++t) {
            EXPECT_LE(obj(testing::random_ket(rng, obj.dim())), obj.bound() + 1e-6);
        }
    }
}

TEST(Ballester, EqualityAndBound) {
    Rng rng(139);
    for (int d : {2, 3}) {
        const SuDChannel ch(d);
        const std::vector<double> zero(static_cast<std::size_t>(ch.parameter_count()), 0.0);
        EXPECT_NEAR(ballester_ratio(ch, zero, mes_state(d)), d * d - 1.0, 1e-9);
    }
    const SuDChannel ch(2);
    const std::vector<double> zero(3, 0.0);
    for (int t = 0; t < 500; ++t) {
        EXPECT_LE(ballester_ratio(ch, zero, testing::random_ket(rng, 4)), 3.0 + 1e-6);
    }
    EXPECT_LT(ballester_ratio(ch, zero, Ket::basis(4, 0)), 3.0);
}

TEST(Schmidt, Spectra) {
    const auto mes = schmidt_spectrum(mes_state(2), 2, 2);
    EXPECT_NEAR(mes[0], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(mes[1], 1.0 / std::sqrt(2.0), 1e-15);
    const auto prod = schmidt_spectrum(Ket::basis(4, 1), 2, 2);
    EXPECT_NEAR(prod[0], 1.0, 1e-15);
    EXPECT_NEAR(prod[1], 0.0, 1e-15);
    Rng rng(149);
    const auto spec = schmidt_spectrum(testing::random_ket(rng, 12), 3, 4);
    double s = 0.0;
    for (double c : spec) {
        s += c * c;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Schmidt, FactorSpectrumMatchesPermutedBipartition) {
    // Factor 2 of (2,2,2,2) against the rest equals the bipartition of the
    // state with that qubit moved to the front.
    Rng rng(151);
    const Ket k = testing::random_ket(rng, 16);
    CVector moved(16);
    for (int idx = 0; idx < 16; ++idx) {
        const int b0 = (idx >> 3) & 1, b1 = (idx >> 2) & 1, b2 = (idx >> 1) & 1, b3 = idx & 1;
        moved[(b2 << 3) | (b0 << 2) | (b1 << 1) | b3] = k[idx];
    }
    const std::vector<int> dims = {2, 2, 2, 2};
    const auto a = factor_schmidt_spectrum(k, dims, 2);
    const auto b = schmidt_spectrum(Ket(moved), 2, 8);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], 1e-12);
    }
}

TEST(Optimizer, SingleQubitChannelAttainsBound) {
    const SuDChannel ch(2);
    const TraceQfiObjective obj(ch, zeros(1, 3));
    const OptReport r = maximize_trace_qfi(obj, OptimizerOptions{}, 2024);
    EXPECT_NEAR(r.best_value, 6.0, 1e-4);
    EXPECT_LE(r.best_value, 6.0 + 1e-6);
    EXPECT_LT(r.gradient_inf_norm, 1e-3);
    ASSERT_EQ(r.schmidt_spectra.size(), 1u);
    for (double c : r.schmidt_spectra[0]) {
        EXPECT_NEAR(c, 1.0 / std::sqrt(2.0), 1e-3);
    }
}

TEST(Optimizer, QutritChannelAttainsBound) {
    const SuDChannel ch(3);
    const TraceQfiObjective obj(ch, zeros(1, 8));
    OptimizerOptions opt;
    opt.restarts = 8;
    const OptReport r = maximize_trace_qfi(obj, opt, 7);
    EXPECT_NEAR(r.best_value, 32.0 / 3.0, 1e-4);
}

TEST(Optimizer, TwoChannelsAndMultipartiteProbe) {
    const SuDChannel ch(2);
    const TraceQfiObjective obj(ch, zeros(2, 3));
    OptimizerOptions opt;
    opt.restarts = 8;
    const OptReport r = maximize_trace_qfi(obj, opt, 9);
    EXPECT_NEAR(r.best_value, 12.0, 1e-3);
    EXPECT_LE(r.best_value, 12.0 + 1e-6);
    EXPECT_NEAR(obj(multipartite_mes(2, 4)), 12.0, 1e-9);
}

TEST(Optimizer, DeterministicAndValidated) {
    const SuDChannel ch(2);
    const TraceQfiObjective obj(ch, zeros(1, 3));
    OptimizerOptions opt;
    opt.restarts = 3;
    const OptReport a = maximize_trace_qfi(obj, opt, 5);
    const OptReport b = maximize_trace_qfi(obj, opt, 5);
    EXPECT_EQ(a.best_value, b.best_value);
    EXPECT_EQ(a.best_restart, b.best_restart);
    opt.restarts = 0;
    EXPECT_THROW((void)maximize_trace_qfi(obj, opt, 5), DomainError);
}

TEST(StateParam, RoundTrip) {
    Rng rng(157);
    const Ket k = testing::random_ket(rng, 5);
    const Ket back = decode_state(encode_state(k));
    EXPECT_LT((back.amplitudes() - k.amplitudes()).norm(), 1e-15);
    EXPECT_THROW((void)decode_state(std::vector<double>{1.0, 0.0, 2.0}), DomainError);
}

}  // namespace
}  // namespace qmetro
