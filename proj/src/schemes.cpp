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

#include "qmetro/schemes.hpp"

#include <cmath>

namespace qmetro {

std::string_view to_string(SchemeKind kind) {
    switch (kind) {
    case SchemeKind::TensorMes: return "tensor_mes";
    case SchemeKind::MultipartiteGhz: return "ghz";
    case SchemeKind::Sequential: return "sequential";
    case SchemeKind::IndividualPerChannel: return "individual";
    case SchemeKind::Adaptive: return "adaptive";
    }
    return "unknown";
}

SchemeKind scheme_kind_from_string(std::string_view name) {
    for (auto kind : {SchemeKind::TensorMes, SchemeKind::MultipartiteGhz, SchemeKind::Sequential,
                      SchemeKind::IndividualPerChannel, SchemeKind::Adaptive}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw DomainError("unknown scheme '" + std::string(name) +
                      "' (expected tensor_mes, ghz, sequential, individual or adaptive)");
}

void SchemeSpec::validate() const {
    if (n < 1) {
        throw DomainError("scheme: channel count must be >= 1");
    }
    if (d < 2) {
        throw DomainError("scheme: local dimension must be >= 2");
    }
    if (model == ChannelModel::PhaseFamily && d != 2) {
        throw DomainError("scheme: phase families act on qubits (d = 2)");
    }
    const bool needs_phase = kind == SchemeKind::MultipartiteGhz || kind == SchemeKind::Sequential ||
                             kind == SchemeKind::Adaptive;
    if (needs_phase && model != ChannelModel::PhaseFamily) {
        throw DomainError("scheme: " + std::string(to_string(kind)) + " requires a d = 2 phase family");
    }
}

// ---------------------------------------------------------------------------
// States

Ket mes_state(int d) {
    if (d < 2) {
        throw DomainError("mes_state: d must be >= 2");
    }
    return multipartite_mes(d, 2);
}

Ket ghz_state(int qubits) {
    if (qubits < 1) {
        throw DomainError("ghz_state: at least one qubit is required");
    }
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    CVector v = CVector::Zero(dim);
    v[0] = 1.0 / std::sqrt(2.0);
    v[dim - 1] += 1.0 / std::sqrt(2.0);
    return Ket::normalized(std::move(v));
}

Ket multipartite_mes(int d, int parties) {
    if (d < 2) {
        throw DomainError("multipartite_mes: d must be >= 2");
    }
    if (parties < 2 || parties % 2 != 0) {
        throw DomainError("multipartite_mes: party count must be even and >= 2");
    }
    Eigen::Index dim = 1;
    for (int i = 0; i < parties; ++i) {
        dim *= d;
    }
    // index of |i>^{(x) parties} is i * (1 + d + d^2 + ...)
    Eigen::Index repunit = 0;
    for (int i = 0; i < parties; ++i) {
        repunit = repunit * d + 1;
    }
    CVector v = CVector::Zero(dim);
    for (int i = 0; i < d; ++i) {
        v[i * repunit] = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return Ket::normalized(std::move(v));
}

Ket plus_state() { return Ket::normalized(CVector::Ones(2)); }

Ket plus_i_state() {
    CVector v(2);
    v << 1.0, Complex(0.0, 1.0);
    return Ket::normalized(std::move(v));
}

CMatrix bell_basis() {
    const CVector phi = mes_state(2).amplitudes();
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    z << 1, 0, 0, -1;
    const CMatrix id = CMatrix::Identity(2, 2);
    CMatrix basis(4, 4);
    basis.col(0) = phi;
    basis.col(1) = kron(x, id) * phi;
    basis.col(2) = kron(y, id) * phi;
    basis.col(3) = kron(z, id) * phi;
    return basis;
}

// ---------------------------------------------------------------------------
// Measurements

SchemePovms scheme_povm(const SchemeSpec &spec) {
    spec.validate();
    SchemePovms out;
    switch (spec.kind) {
    case SchemeKind::MultipartiteGhz:
        out.povms.push_back(Povm::projective_pair(ghz_state(2 * spec.n)));
        return out;
    case SchemeKind::Sequential:
    case SchemeKind::Adaptive:
        out.povms.push_back(Povm::projective_pair(plus_state()));
        return out;
    case SchemeKind::TensorMes:
    case SchemeKind::IndividualPerChannel: {
        out.per_channel = true;
        if (spec.model == ChannelModel::SpecialUnitary) {
            if (spec.d != 2) {
                throw DomainError("scheme_povm: no measurement is provided for SU(d) channels with d != 2");
            }
            const Povm bell = Povm::from_basis(bell_basis());
            out.povms.assign(static_cast<std::size_t>(spec.n), bell);
            return out;
        }
        const Povm single = spec.kind == SchemeKind::TensorMes ? Povm::projective_pair(mes_state(2))
                                                               : Povm::projective_pair(plus_state());
        out.povms.assign(static_cast<std::size_t>(spec.n), single);
        return out;
    }
    }
    throw DomainError("scheme_povm: unsupported scheme");
}

Povm sign_povm() { return Povm::projective_pair(plus_i_state()); }

Povm ghz_sign_povm(int qubits) {
    if (qubits < 1) {
        throw DomainError("ghz_sign_povm: at least one qubit is required");
    }
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    CVector v = CVector::Zero(dim);
    v[0] += 1.0;
    v[dim - 1] += Complex(0.0, 1.0);
    return Povm::projective_pair(Ket::normalized(std::move(v)));
}

Partition partition_by_derivative_sign(const DependentFamily &family, double theta_hat) {
    if (!family.contains(theta_hat)) {
        throw DomainError("partition_by_derivative_sign: estimate lies outside the family domain");
    }
    Partition out;
    for (int j = 0; j < family.size(); ++j) {
        if (family.phase_derivative(j, theta_hat) >= 0.0) {
            out.nondecreasing.push_back(j);
        } else {
            out.decreasing.push_back(j);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prepared schemes

std::vector<CMatrix> PreparedScheme::output_derivatives(std::size_t i) const {
    const CVector &psi = inputs[i].amplitudes();
    const CVector &out = outputs[i].amplitudes();
    std::vector<CMatrix> drho;
    for (const auto &du : channel_op_derivs[i]) {
        const CVector dpsi = du * psi;
        drho.push_back(dpsi * out.adjoint() + out * dpsi.adjoint());
    }
    return drho;
}

namespace {

void push_output(PreparedScheme &ps, Ket input, CMatrix op, std::vector<CMatrix> derivs) {
    ps.outputs.push_back(Ket::normalized(op * input.amplitudes()));
    ps.inputs.push_back(std::move(input));
    ps.channel_ops.push_back(std::move(op));
    ps.channel_op_derivs.push_back(std::move(derivs));
}

}  // namespace

PreparedScheme prepare_phase_scheme(const SchemeSpec &spec, const DependentFamily &family, double theta) {
    spec.validate();
    if (spec.model != ChannelModel::PhaseFamily) {
        throw DomainError("prepare_phase_scheme: scheme is not declared over a phase family");
    }
    if (spec.n != family.size()) {
        throw DomainError("prepare_phase_scheme: scheme channel count differs from the family size");
    }
    PreparedScheme ps;
    ps.spec = spec;
    const auto us = family.unitaries(theta);
    const auto dus = family.unitary_derivatives(theta);
    const CMatrix id2 = CMatrix::Identity(2, 2);
    switch (spec.kind) {
    case SchemeKind::MultipartiteGhz:
        push_output(ps, ghz_state(2 * spec.n), extended_operator(us), {extended_operator_derivative(us, dus)});
        break;
    case SchemeKind::Sequential:
    case SchemeKind::Adaptive:
        push_output(ps, plus_state(), sequential_product(us, 2), {sequential_product_derivative(us, dus)});
        break;
    case SchemeKind::TensorMes:
        for (int j = 0; j < spec.n; ++j) {
            push_output(ps, mes_state(2), kron(us[static_cast<std::size_t>(j)], id2),
                        {kron(dus[static_cast<std::size_t>(j)], id2)});
        }
        break;
    case SchemeKind::IndividualPerChannel:
        for (int j = 0; j < spec.n; ++j) {
            push_output(ps, plus_state(), us[static_cast<std::size_t>(j)], {dus[static_cast<std::size_t>(j)]});
        }
        break;
    }
    ps.povms = scheme_povm(spec).povms;
    return ps;
}

PreparedScheme prepare_su_scheme(const SchemeSpec &spec, const SuDChannel &channel,
                                 const std::vector<std::vector<double>> &thetas) {
    spec.validate();
    if (spec.model != ChannelModel::SpecialUnitary || spec.d != channel.d()) {
        throw DomainError("prepare_su_scheme: scheme is not declared over SU(" + std::to_string(channel.d()) + ")");
    }
    if (static_cast<int>(thetas.size()) != spec.n) {
        throw DomainError("prepare_su_scheme: one parameter vector per channel is required");
    }
    PreparedScheme ps;
    ps.spec = spec;
    const CMatrix id = CMatrix::Identity(channel.d(), channel.d());
    for (const auto &theta : thetas) {
        std::vector<CMatrix> derivs;
        for (const auto &du : channel.unitary_derivatives(theta)) {
            derivs.push_back(kron(du, id));
        }
        push_output(ps, mes_state(channel.d()), kron(channel.unitary_at(theta), id), std::move(derivs));
    }
    if (channel.d() == 2) {
        ps.povms = scheme_povm(spec).povms;
    }
    return ps;
}

SchemeInformation scheme_information(const PreparedScheme &ps) {
    const bool vector_params = ps.spec.model == ChannelModel::SpecialUnitary;
    const Eigen::Index p = static_cast<Eigen::Index>(ps.channel_op_derivs.front().size());
    const Eigen::Index total = vector_params ? p * static_cast<Eigen::Index>(ps.outputs.size()) : p;

    SchemeInformation info;
    info.qfi.entries = RMatrix::Zero(total, total);
    info.qfi.params_per_channel = vector_params ? static_cast<int>(p) : 0;
    FisherMatrix fisher;
    fisher.entries = RMatrix::Zero(total, total);
    const bool have_povms = ps.povms.size() == ps.outputs.size();

    for (std::size_t i = 0; i < ps.outputs.size(); ++i) {
        const QfiMatrix block = qfi_pure_channel(ps.channel_ops[i], ps.channel_op_derivs[i], ps.inputs[i]);
        const Eigen::Index off = vector_params ? static_cast<Eigen::Index>(i) * p : 0;
        // Independent blocks stack for vector parameters and add for a shared scalar.
        info.qfi.entries.block(off, off, p, p) += block.entries;
        if (have_povms) {
            const FisherMatrix fb =
                fisher_information(ps.povms[i], ps.output_state(i), ps.output_derivatives(i));
            fisher.entries.block(off, off, p, p) += fb.entries;
        }
    }
    if (have_povms) {
        info.cr_gap = cr_dominance_gap(fisher, info.qfi);
        info.fisher = std::move(fisher);
    }
    return info;
}

}  // namespace qmetro
