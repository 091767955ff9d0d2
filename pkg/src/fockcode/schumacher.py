"""Finite-n typical-subspace baseline, computed by exhaustive enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import source
from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class TypicalSet:
    """Eigen-sequences whose per-letter surprisal is within ``epsilon`` of S."""

    n: int
    epsilon: float
    entropy: float
    members: frozenset[tuple[int, ...]]
    total_probability: float

    @property
    def dimension(self) -> int:
        return len(self.members)


def typical_set(
    eig: source.EigenDecomposition, n: int, epsilon: float, cap: int = source.DEFAULT_CAP
) -> TypicalSet:
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    S = source.shannon_entropy(eig.values)
    digits, probs, surprisal = source.enumerate_sequences(eig, n, cap)
    with np.errstate(invalid="ignore"):
        mask = np.abs(surprisal / n - S) <= epsilon
    members = frozenset(tuple(int(x) for x in row) for row in digits[mask])
    total = float(min(1.0, probs[mask].sum()))
    return TypicalSet(n, float(epsilon), S, members, total)


def projection_fidelity(ts: TypicalSet) -> float:
    """Probability that projecting the message onto the typical subspace succeeds."""
    return ts.total_probability


def schumacher_rate(ts: TypicalSet) -> float:
    """Qubits per letter needed to index the typical subspace."""
    if ts.dimension < 1:
        raise DomainError(f"typical set is empty at n={ts.n}, epsilon={ts.epsilon}")
    return math.log2(ts.dimension) / ts.n
