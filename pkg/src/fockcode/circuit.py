"""Gate-level simulation of the two-photon compression network.

Registers are packed into one three-mode Fock ket: frequency mode 1, frequency
mode 2 and the environment mode, in that order.  The prism and polarizing beam
splitter only route photons spatially, so they act as the identity on this
representation and are not modelled as separate stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError, ValidationError
from .fock import FockState, apply_basis_map, fidelity, inner_product

ENV_VACUUM = "env_vacuum"
ENV_ONE_PHOTON = "env_one_photon"
MODE2, ENV = 1, 2
_S = 1 / math.sqrt(2)

# +/- eigen-letters become single H/V photons
LETTER_PHOTON = {0: "H", 1: "V"}


@dataclass(frozen=True)
class CircuitState:
    state: FockState
    stage: str

    @property
    def system(self) -> FockState:
        """Mode 1 and 2 only; valid when the environment is known to be vacuum."""
        if any(k[ENV] != "." for k in self.state.terms):
            raise PreconditionError("environment is not in vacuum")
        return FockState({k[:2]: a for k, a in self.state.terms.items()}, 2)


@dataclass(frozen=True)
class MeasurementOutcome:
    result: str
    probability: float
    post_state: FockState | None


def prepare(message) -> CircuitState:
    """Load a two-letter message given in the {+,-} basis (flat, ++ +- -+ --)."""
    vec = np.asarray(message, dtype=complex).reshape(-1)
    if vec.size != 4:
        raise ValidationError("the circuit takes two-letter messages (4 amplitudes)")
    if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
        raise ValidationError("message must be normalized")
    terms = {}
    for flat, amp in enumerate(vec):
        first, second = divmod(flat, 2)
        terms[LETTER_PHOTON[first] + LETTER_PHOTON[second] + "."] = amp
    return CircuitState(FockState(terms, 3), "input")


def _swap_rule(ket: str) -> FockState:
    # exchange mode-2 and environment contents when exactly one of them holds an H photon
    if (ket[MODE2], ket[ENV]) in (("H", "."), (".", "H")):
        ket = ket[0] + ket[ENV] + ket[MODE2]
    return FockState.basis(ket)


def conditional_swap_env(s: CircuitState, require_vacuum_env: bool = True) -> CircuitState:
    """Move an H photon in mode 2 into the (empty) environment; V photons stay."""
    if require_vacuum_env and any(k[ENV] != "." for k in s.state.terms):
        raise PreconditionError("conditional swap expects the environment in vacuum")
    return CircuitState(apply_basis_map(_swap_rule, s.state), "swap")


def _env_hadamard_rule(ket: str) -> FockState:
    head = ket[:ENV]
    if ket[ENV] == "H":
        return FockState({head + ".": _S, head + "H": _S}, 3)
    if ket[ENV] == ".":
        return FockState({head + ".": _S, head + "H": -_S}, 3)
    raise DomainError("environment map is undefined on a V photon")


def env_hadamard(s: CircuitState) -> CircuitState:
    """|H> -> (|vac> + |H>)/sqrt2 and |vac> -> (|vac> - |H>)/sqrt2 on the environment."""
    return CircuitState(apply_basis_map(_env_hadamard_rule, s.state), "env_hadamard")


def measure_env(s: CircuitState) -> list[MeasurementOutcome]:
    """Both photon-counting outcomes on the environment, with Born weights."""
    outcomes = []
    for result, occ in ((ENV_VACUUM, "."), (ENV_ONE_PHOTON, "H")):
        branch = {k[:ENV]: a for k, a in s.state.terms.items() if k[ENV] == occ}
        prob = sum(abs(a) ** 2 for a in branch.values())
        post = FockState(branch, 2).normalized() if prob > 0 else None
        outcomes.append(MeasurementOutcome(result, prob, post))
    return outcomes


def _flip_mode2_v(s: FockState) -> FockState:
    return FockState({k: (-a if k[MODE2] == "V" else a) for k, a in s.terms.items()}, s.n_modes)


def conditional_phase_correction(s: FockState, outcome: MeasurementOutcome | str) -> FockState:
    result = outcome.result if isinstance(outcome, MeasurementOutcome) else outcome
    if result == ENV_ONE_PHOTON:
        return _flip_mode2_v(s)
    if result == ENV_VACUUM:
        return s
    raise ValidationError(f"unknown measurement outcome {result!r}")


def coherent_phase(s: CircuitState) -> CircuitState:
    """Phase -1 on kets with an environment photon and a V photon in mode 2."""
    terms = {
        k: (-a if k[ENV] == "H" and k[MODE2] == "V" else a) for k, a in s.state.terms.items()
    }
    return CircuitState(FockState(terms, 3), "coherent_phase")


def corrected_branches(message) -> list[MeasurementOutcome]:
    """Measured mode: every outcome with its phase-corrected post-state."""
    s = env_hadamard(conditional_swap_env(prepare(message)))
    return [
        MeasurementOutcome(o.result, o.probability, conditional_phase_correction(o.post_state, o))
        for o in measure_env(s)
        if o.post_state is not None
    ]


def coherent_state(message) -> CircuitState:
    return coherent_phase(env_hadamard(conditional_swap_env(prepare(message))))


def run_circuit(message, mode: str = "measured") -> FockState:
    """Compress a two-letter {+,-} message into a one- or two-photon state.

    In measured mode the corrected branches are checked to agree; in coherent
    mode the environment ends in (|vac> + |H>)/sqrt2 and is traced out.
    """
    if mode == "measured":
        branches = corrected_branches(message)
        first = branches[0].post_state
        for b in branches[1:]:
            if fidelity(first, b.post_state) < 1 - 1e-10:
                raise AssertionError("measurement branches disagree after correction")
        return first
    if mode == "coherent":
        full = coherent_state(message).state
        parts = [
            FockState({k[:ENV]: a for k, a in full.terms.items() if k[ENV] == occ}, 2)
            for occ in (".", "H")
        ]
        if abs(inner_product(parts[0], parts[1]) - parts[0].norm() ** 2) > 1e-10:
            raise AssertionError("environment did not factor out")
        return parts[0].normalized()
    raise ValidationError(f"unknown circuit mode {mode!r}")


def trace_circuit(message) -> list[CircuitState]:
    """Stage-by-stage states of the measured network, for inspection."""
    stages = [prepare(message)]
    stages.append(conditional_swap_env(stages[-1]))
    stages.append(env_hadamard(stages[-1]))
    return stages
