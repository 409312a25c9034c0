# Copyright 2026 The Clover Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Catalytic entanglement transformation verifier."""

import json

from ._core import (
    BudgetError,
    CloverError,
    DenseCapError,
    FormatError,
    LayoutError,
    Party,
    PreconditionError,
    QuantumState,
    Register,
    __version__,
    certify_impossible,
    clo_target,
    conditional_entropy,
    embed_local_dims,
    entanglement_entropy,
    fidelity,
    filter_success_probability,
    load_state,
    marginal,
    max_entangled,
    mix,
    run_catalytic,
    save_state,
    schmidt_coefficients,
    schmidt_rank,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from . import _core

__all__ = [
    "BudgetError",
    "CloverError",
    "DenseCapError",
    "FormatError",
    "LayoutError",
    "Party",
    "PreconditionError",
    "QuantumState",
    "Register",
    "__version__",
    "certify_impossible",
    "clo_target",
    "conditional_entropy",
    "embed_local_dims",
    "entanglement_entropy",
    "fidelity",
    "filter_success_probability",
    "load_state",
    "marginal",
    "max_entangled",
    "mix",
    "run_catalytic",
    "save_state",
    "schmidt_coefficients",
    "schmidt_rank",
    "tensor",
    "trace_distance",
    "von_neumann_entropy",
    "sn_orthogonal_mixture",
    "sn_flagged_blocks",
    "sn_lower_fidelity",
    "sn_decomposition_upper",
    "theorem",
    "lemma1",
    "obs1",
    "obs3",
    "schmidt",
    "simulate",
]


def sn_orthogonal_mixture(state):
    """Schmidt-number certificate as a dict (lower, upper, method, exact, details)."""
    return json.loads(_core._sn_orthogonal_mixture(state))


def sn_flagged_blocks(state, flags=()):
    return json.loads(_core._sn_flagged_blocks(state, list(flags)))


def sn_lower_fidelity(state, witness):
    return json.loads(_core._sn_lower_fidelity(state, witness))


def sn_decomposition_upper(state):
    return json.loads(_core._sn_decomposition_upper(state))


def theorem(n, corrupt=0.0):
    """Separation pipeline; returns the report as a dict."""
    return json.loads(_core._pipeline_theorem(n, corrupt))


def lemma1(rho, sigma, n, corrupt=0.0):
    return json.loads(_core._pipeline_lemma1(rho, sigma, n, corrupt))


def obs1(n, corrupt=0.0, shared_randomness=False):
    return json.loads(_core._pipeline_obs1(n, corrupt, shared_randomness))


def obs3(corrupt=0.0, seed=20260415):
    return json.loads(_core._pipeline_obs3(corrupt, seed))


def schmidt(state, cut=()):
    return json.loads(_core._pipeline_schmidt(state, list(cut)))


def simulate(protocol_path, state, target=None):
    return json.loads(_core._pipeline_simulate(str(protocol_path), state, target))
