# Copyright 2026 The qmetro Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import qmetro


def linear_family(n, t):
    return {"domain_upper": t, "channels": [{"form": "linear", "a": 1.0}], "repeat": n}


def test_mes_qfi_is_scaled_identity():
    h = qmetro.su_qfi(2, [[0.0, 0.0, 0.0]], qmetro.mes_state(2))
    np.testing.assert_allclose(h, 2.0 * np.eye(3), atol=1e-12)


def test_gell_mann_orthonormal():
    basis = qmetro.gell_mann_basis(3)
    assert len(basis) == 8
    gram = np.array([[np.trace(a @ b) for b in basis] for a in basis])
    np.testing.assert_allclose(gram, np.eye(8), atol=1e-12)


def test_qfi_pure_channel_phase():
    theta = 0.7
    u = np.diag([1.0, np.exp(1j * theta)])
    du = np.diag([0.0, 1j * np.exp(1j * theta)])
    psi = np.array([1.0, 1.0]) / math.sqrt(2)
    h = qmetro.qfi_pure_channel(u, [du], psi)
    assert h[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_ballester_ratio_at_mes():
    assert qmetro.ballester_ratio(2, [0.0, 0.0, 0.0], qmetro.mes_state(2)) == pytest.approx(3.0, abs=1e-9)


def test_run_qfi_command():
    res = qmetro.run("qfi", {"version": 1, "scheme": "ghz", "family": linear_family(3, math.pi / 3), "theta": 0.5})
    assert res.exit_code == 0, res.message
    assert res.json()["trace_qfi"] == pytest.approx(9.0, abs=1e-9)


def test_run_simulate_is_deterministic():
    cfg = {
        "version": 1,
        "scheme": "ghz",
        "family": linear_family(2, math.pi / 2),
        "theta_true": math.pi / 4,
        "shots": 1000,
        "trials": 100,
        "seed": 5,
    }
    a = qmetro.run("simulate", cfg, format="both")
    b = qmetro.run("simulate", cfg, format="both")
    assert a.exit_code == 0
    assert a.artifacts == b.artifacts
    assert set(a.artifacts) == {".csv", ".json"}
    c = qmetro.run("simulate", cfg, seed=6)
    assert c.json()["seed"] == 6


def test_config_errors_map_to_exit_two():
    assert qmetro.run("simulate", {"version": 2}).exit_code == 2
    assert qmetro.run("simulate", "{not json").exit_code == 2
    with pytest.raises(qmetro.DomainError):
        qmetro.multipartite_mes(2, 3)
