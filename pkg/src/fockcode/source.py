"""Memoryless quantum sources, their density matrices and ranked letter sequences."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ResourceError, ValidationError

DEFAULT_CAP = 2**22
HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class LetterEnsemble:
    """Letter states and the probabilities with which the source emits them."""

    states: tuple[np.ndarray, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.states) != len(self.probabilities) or not self.states:
            raise ValidationError("need one probability per letter state and at least one letter")
        states = tuple(np.asarray(s, dtype=complex).reshape(-1) for s in self.states)
        dims = {s.size for s in states}
        if len(dims) != 1:
            raise ValidationError(f"letter states have different dimensions {sorted(dims)}")
        probs = tuple(float(p) for p in self.probabilities)
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ValidationError("probabilities must be non-negative and sum to 1")
        for s in states:
            if abs(np.linalg.norm(s) - 1.0) > 1e-12:
                raise ValidationError("letter states must be normalized")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probabilities", probs)

    @property
    def dim(self) -> int:
        return self.states[0].size

    @classmethod
    def from_json(cls, data: dict | str | Path) -> LetterEnsemble:
        """Parse ``{"letters": [{"amplitudes": [[re, im], ...], "p": ...}, ...]}``."""
        if isinstance(data, Path) or (isinstance(data, str) and not data.lstrip().startswith("{")):
            data = json.loads(Path(data).read_text())
        elif isinstance(data, str):
            data = json.loads(data)
        states, probs = [], []
        for letter in data["letters"]:
            states.append([complex(re, im) for re, im in letter["amplitudes"]])
            probs.append(letter["p"])
        return cls(tuple(np.array(s) for s in states), tuple(probs))

    def to_json(self) -> dict:
        return {
            "letters": [
                {"amplitudes": [[a.real, a.imag] for a in s], "p": p}
                for s, p in zip(self.states, self.probabilities)
            ]
        }


def reference_ensemble(theta: float) -> LetterEnsemble:
    """Two equiprobable letters cos(t/2)|0> + sin(t/2)|1> and sin(t/2)|0> + cos(t/2)|1>.

    Their overlap is sin(theta); they coincide at theta = pi/2 and are
    orthogonal at theta = pi.
    """
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return LetterEnsemble((np.array([c, s]), np.array([s, c])), (0.5, 0.5))


def mirrored_ensemble(theta: float) -> LetterEnsemble:
    """Two equiprobable letters a|H> + b|V> and a|H> - b|V>, a = cos(t/2), b = sin(t/2).

    Overlap cos(theta).  A different convention from :func:`reference_ensemble`.
    """
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return LetterEnsemble((np.array([c, s]), np.array([c, -s])), (0.5, 0.5))


def density_matrix(ensemble: LetterEnsemble) -> np.ndarray:
    rho = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    for psi, p in zip(ensemble.states, ensemble.probabilities):
        rho += p * np.outer(psi, psi.conj())
    return rho


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (descending) and matching eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size

    @property
    def pairs(self) -> list[tuple[float, np.ndarray]]:
        return [(float(v), self.vectors[:, i]) for i, v in enumerate(self.values)]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    @classmethod
    def from_values(cls, values) -> EigenDecomposition:
        """Eigen-system of a diagonal density matrix with the given spectrum."""
        return diagonalize(np.diag(np.asarray(values, dtype=float)))


def _canonical_phase(vectors: np.ndarray) -> np.ndarray:
    # first non-negligible component made real positive, so |-> stays (|0> - |1>)/sqrt2
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col) > 1e-9))
        out[:, j] = col * (abs(col[k]) / col[k])
    return out


def _snap_degenerate(values: np.ndarray) -> np.ndarray:
    # descending input; clusters closer than DEGENERACY_TOL become exactly equal
    vals = np.clip(values, 0.0, 1.0)
    out = vals.copy()
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[start] - vals[i] > DEGENERACY_TOL:
            out[start:i] = vals[start:i].mean()
            start = i
    return out


def diagonalize(rho: np.ndarray) -> EigenDecomposition:
    """Eigen-decompose a density matrix, eigenvalues sorted in descending order.

    Nearly equal eigenvalues (within 1e-12) are snapped to a common value so
    that sequence ties are exact, and small negative round-off is clipped to 0.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ValidationError("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(rho)
    order = np.argsort(-vals, kind="stable")
    vals = _snap_degenerate(vals[order])
    vecs = _canonical_phase(vecs[:, order])
    return EigenDecomposition(vals, vecs)


def shannon_entropy(probs) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum()) + 0.0


def von_neumann_entropy(rho: np.ndarray) -> float:
    return shannon_entropy(diagonalize(rho).values)


@dataclass(frozen=True)
class RankedSequence:
    rank: int
    indices: tuple[int, ...]
    probability: float


def sequence_label(indices, dim: int = 2) -> str:
    """Human-readable label: '+'/'-' for qubit eigenvectors, digits otherwise."""
    if dim == 2:
        return "".join("+-"[i] for i in indices)
    return "".join(str(i) for i in indices)


def parse_sequence_label(label: str, dim: int = 2) -> tuple[int, ...]:
    label = label.replace("−", "-")
    if dim == 2:
        return tuple("+-".index(c) for c in label)
    return tuple(int(c) for c in label)


def enumerate_sequences(eig: EigenDecomposition, n: int, cap: int = DEFAULT_CAP):
    """All d**n eigen-label sequences in lexicographic order.

    Returns ``(digits, probs, surprisal)``: an ``(d**n, n)`` integer array
    (row index = flat index, first letter most significant), the product
    probabilities and ``-log2`` of them.  Probabilities are computed from the
    count of each distinct eigenvalue, so sequences that are permutations of
    one another (or differ only within a degenerate eigenspace) get
    bit-identical values.
    """
    if n < 1:
        raise ValidationError("message length n must be >= 1")
    d = eig.dim
    total = d**n
    if total > cap:
        raise ResourceError(f"{d}**{n} = {total} sequences exceeds the enumeration cap {cap}")
    flat = np.arange(total, dtype=np.int64)
    powers = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    digits = (flat[:, None] // powers[None, :]) % d

    levels, level_of = np.unique(-eig.values, return_inverse=True)
    levels = -levels
    letter_level = level_of[digits]
    probs = np.ones(total)
    surprisal = np.zeros(total)
    for k, value in enumerate(levels):
        counts = (letter_level == k).sum(axis=1)
        probs *= value**counts
        if value > 0:
            surprisal += counts * -math.log2(value)
        else:
            surprisal[counts > 0] = math.inf
    return digits, probs, surprisal


def rank_order(probs: np.ndarray) -> np.ndarray:
    """Flat indices sorted by probability descending, ties lexicographic."""
    return np.lexsort((np.arange(probs.size), -probs))


def ranked_sequences(eig: EigenDecomposition, n: int, cap: int = DEFAULT_CAP) -> list[RankedSequence]:
    digits, probs, _ = enumerate_sequences(eig, n, cap)
    order = rank_order(probs)
    return [
        RankedSequence(rank, tuple(int(x) for x in digits[i]), float(probs[i]))
        for rank, i in enumerate(order, start=1)
    ]
