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
"""Python access to the qmetro simulator."""

import json
from dataclasses import dataclass, field

from ._core import (
    DomainError,
    NumericalError,
    ballester_ratio,
    gell_mann_basis,
    mes_state,
    multipartite_mes,
    qfi_pure_channel,
    su_qfi,
    su_unitary,
)
from ._core import _run

__all__ = [
    "CommandResult",
    "DomainError",
    "NumericalError",
    "ballester_ratio",
    "gell_mann_basis",
    "mes_state",
    "multipartite_mes",
    "qfi_pure_channel",
    "run",
    "su_qfi",
    "su_unitary",
]


@dataclass
class CommandResult:
    exit_code: int
    artifacts: dict = field(default_factory=dict)
    message: str = ""

    def json(self):
        """Parsed JSON artifact, or None when the command produced none."""
        text = self.artifacts.get(".json")
        return None if text is None else json.loads(text)


def run(command, config, seed=None, format="json"):
    """Run a CLI command (qfi, simulate, sweep, verify-lemma, adaptive) on a config dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    code, artifacts, message = _run(command, text, seed, format)
    return CommandResult(code, dict(artifacts), message)
