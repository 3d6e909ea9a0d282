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
 * @file schemes.hpp
 * Input states, measurements and scheme descriptors for estimating a set of
 * unitary channels, plus the prepared (state, derivative, measurement)
 * bundles the information and estimation code consume.
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmetro/channels.hpp"
#include "qmetro/information.hpp"

namespace qmetro {

enum class SchemeKind {
    TensorMes,             // one maximally entangled probe per channel
    MultipartiteGhz,       // one 2n-partite probe across all channels
    Sequential,            // all channels applied in sequence to one qubit
    IndividualPerChannel,  // each channel probed on its own
    Adaptive,              // staged sequential prefixes
};

enum class ChannelModel {
    PhaseFamily,     // DependentFamily, d = 2
    SpecialUnitary,  // independent SU(d) channels
};

std::string_view to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(std::string_view name);

struct SchemeSpec {
    SchemeKind kind = SchemeKind::MultipartiteGhz;
    int n = 1;
    int d = 2;
    ChannelModel model = ChannelModel::PhaseFamily;

    /// Throws DomainError for unsupported kind/model/d combinations.
    void validate() const;
};

/// 1/sqrt(d) sum_i |ii>.
Ket mes_state(int d);
/// 1/sqrt(2) (|0...0> + |1...1>) on q qubits.
Ket ghz_state(int qubits);
/// 1/sqrt(d) sum_i |i>^{(x) parties}; parties even.
Ket multipartite_mes(int d, int parties);
/// 1/sqrt(2) (|0> + |1>).
Ket plus_state();
/// 1/sqrt(2) (|0> + i|1>).
Ket plus_i_state();
/// Generalized Bell basis (sigma_k (x) I) |mes> for d = 2, k = 0, x, y, z, as columns.
CMatrix bell_basis();

/// Either one measurement on the joint output, or one per channel.
struct SchemePovms {
    std::vector<Povm> povms;
    bool per_channel = false;
};

SchemePovms scheme_povm(const SchemeSpec &spec);

/// {|psi_y><psi_y|, I - |psi_y><psi_y|}; p_0 = (1 + sin phi)/2 on (|0> + e^{i phi}|1>)/sqrt 2.
Povm sign_povm();
/// The same sign test lifted to the 2n-qubit GHZ output: (|0..0> + i|1..1>)/sqrt 2.
Povm ghz_sign_povm(int qubits);

struct Partition {
    std::vector<int> nondecreasing;  // f'_j(theta_hat) >= 0
    std::vector<int> decreasing;     // f'_j(theta_hat) < 0
};

Partition partition_by_derivative_sign(const DependentFamily &family, double theta_hat);

/// Output states, their parameter derivatives and the scheme measurement.
/// For per-channel schemes every list has one entry per channel; otherwise one
/// entry for the joint output.
struct PreparedScheme {
    SchemeSpec spec;
    std::vector<Ket> inputs;
    std::vector<CMatrix> channel_ops;                     // U acting on each input
    std::vector<std::vector<CMatrix>> channel_op_derivs;  // dU/dtheta_k per input
    std::vector<Ket> outputs;
    std::vector<Povm> povms;

    /// d rho / d theta_k for output @p i.
    [[nodiscard]] std::vector<CMatrix> output_derivatives(std::size_t i) const;
    [[nodiscard]] DensityOperator output_state(std::size_t i) const { return DensityOperator(outputs[i]); }
};

PreparedScheme prepare_phase_scheme(const SchemeSpec &spec, const DependentFamily &family, double theta);
PreparedScheme prepare_su_scheme(const SchemeSpec &spec, const SuDChannel &channel,
                                 const std::vector<std::vector<double>> &thetas);

struct SchemeInformation {
    QfiMatrix qfi;
    std::optional<FisherMatrix> fisher;
    std::optional<double> cr_gap;
};

/// QFI of the joint output (per-channel blocks summed or stacked) and the
/// Fisher information of the scheme's measurement. Per-channel Fisher
/// contributions add because the outcomes are independent.
SchemeInformation scheme_information(const PreparedScheme &prepared);

}  // namespace qmetro
