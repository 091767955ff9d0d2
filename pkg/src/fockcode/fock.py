"""Sparse states over frequency modes holding at most one photon each.

Every mode is in one of three occupations: vacuum, one H-polarized photon or
one V-polarized photon.  A basis ket is therefore a string over ``".HV"``
(mode 1 first) and a state is a sparse map from such strings to complex
amplitudes.  Distinct kets are orthonormal, so states with different photon
numbers are orthogonal without any extra bookkeeping.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType

from .errors import DimensionError, DomainError, ValidationError

PRUNE_TOL = 1e-14
NORM_TOL = 1e-10


class ModeOccupation(str, Enum):
    VACUUM = "."
    H = "H"
    V = "V"


_ALPHABET = frozenset(o.value for o in ModeOccupation)


def _check_ket(ket: str) -> str:
    if not isinstance(ket, str) or not ket or not set(ket) <= _ALPHABET:
        raise ValidationError(f"invalid Fock ket {ket!r}; expected a non-empty string over '.HV'")
    return ket


@dataclass(frozen=True)
class FockState:
    """Immutable sparse superposition of Fock basis kets.

    ``terms`` maps ket strings (all of length ``n_modes``) to amplitudes.
    Amplitudes below ``PRUNE_TOL`` in magnitude are dropped on construction.
    """

    terms: Mapping[str, complex]
    n_modes: int

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValidationError("a Fock state needs at least one mode")
        clean: dict[str, complex] = {}
        for ket, amp in self.terms.items():
            _check_ket(ket)
            if len(ket) != self.n_modes:
                raise DimensionError(f"ket {ket!r} has {len(ket)} modes, state has {self.n_modes}")
            amp = complex(amp)
            if abs(amp) >= PRUNE_TOL:
                clean[ket] = amp
        object.__setattr__(self, "terms", MappingProxyType(clean))

    # construction helpers

    @classmethod
    def basis(cls, ket: str, amplitude: complex = 1.0) -> FockState:
        _check_ket(ket)
        return cls({ket: amplitude}, len(ket))

    @classmethod
    def vacuum(cls, n_modes: int) -> FockState:
        return cls.basis("." * n_modes)

    @classmethod
    def superposition(cls, terms: Mapping[str, complex] | Iterable[tuple[str, complex]]) -> FockState:
        """Build a state from (ket, amplitude) pairs and normalize it."""
        items = dict(terms)
        if not items:
            raise ValidationError("empty superposition")
        lengths = {len(k) for k in items}
        if len(lengths) != 1:
            raise DimensionError(f"kets of different mode counts: {sorted(lengths)}")
        return cls(items, lengths.pop()).normalized()

    # basic queries

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> FockState:
        nrm = self.norm()
        if nrm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        return FockState({k: a / nrm for k, a in self.terms.items()}, self.n_modes)

    def scaled(self, factor: complex) -> FockState:
        return FockState({k: a * factor for k, a in self.terms.items()}, self.n_modes)

    def amplitude(self, ket: str) -> complex:
        return self.terms.get(ket, 0j)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: FockState) -> FockState:
        _check_same_modes(self, other)
        out = dict(self.terms)
        for k, a in other.terms.items():
            out[k] = out.get(k, 0j) + a
        return FockState(out, self.n_modes)

    def __sub__(self, other: FockState) -> FockState:
        return self + other.scaled(-1)

    # serialization

    def to_json(self) -> list[dict]:
        return [
            {"occupations": k, "re": a.real, "im": a.imag}
            for k, a in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, rows: list[dict]) -> FockState:
        if not rows:
            raise ValidationError("empty state")
        terms = {}
        for row in rows:
            terms[row["occupations"]] = complex(row["re"], row.get("im", 0.0))
        lengths = {len(k) for k in terms}
        if len(lengths) != 1:
            raise DimensionError("kets of different mode counts")
        return cls(terms, lengths.pop())


def _check_same_modes(s1: FockState, s2: FockState) -> None:
    if s1.n_modes != s2.n_modes:
        raise DimensionError(f"mode-count mismatch: {s1.n_modes} vs {s2.n_modes}")


def photon_count(ket: str) -> int:
    return len(ket) - ket.count(ModeOccupation.VACUUM.value)


def inner_product(s1: FockState, s2: FockState) -> complex:
    """Return <s1|s2>, antilinear in the first argument."""
    _check_same_modes(s1, s2)
    small, large = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
    total = 0j
    for ket in small.terms:
        if ket in large.terms:
            total += s1.terms[ket].conjugate() * s2.terms[ket]
    return total


def fidelity(s1: FockState, s2: FockState) -> float:
    """|<s1|s2>|^2, insensitive to global phase."""
    return abs(inner_product(s1, s2)) ** 2


def tensor(s1: FockState, s2: FockState) -> FockState:
    terms = {}
    for k1, a1 in s1.terms.items():
        for k2, a2 in s2.terms.items():
            terms[k1 + k2] = a1 * a2
    return FockState(terms, s1.n_modes + s2.n_modes)


BasisRule = Callable[[str], FockState] | Mapping[str, FockState]


def apply_basis_map(rule: BasisRule, s: FockState) -> FockState:
    """Extend ``rule`` (defined on basis kets) linearly to ``s``.

    ``rule`` may be a mapping or a callable; a missing ket (``KeyError`` or a
    ``None`` image) raises :class:`DomainError`.
    """
    lookup = rule.__getitem__ if isinstance(rule, Mapping) else rule
    out: dict[str, complex] = {}
    n_out = None
    for ket, amp in s.terms.items():
        try:
            image = lookup(ket)
        except KeyError:
            image = None
        if image is None:
            raise DomainError(f"basis map undefined on ket {ket!r}")
        if n_out is None:
            n_out = image.n_modes
        elif image.n_modes != n_out:
            raise DimensionError("basis map images have inconsistent mode counts")
        for k, a in image.terms.items():
            out[k] = out.get(k, 0j) + amp * a
    if n_out is None:
        raise DomainError("cannot apply a basis map to the zero state")
    return FockState(out, n_out)


def expected_photon_number(s: FockState) -> float:
    return sum(abs(a) ** 2 * photon_count(k) for k, a in s.terms.items())


def global_phase_aligned(reference: FockState, s: FockState) -> FockState:
    """Rotate ``s`` by the global phase that best matches ``reference``."""
    ov = inner_product(s, reference)
    if abs(ov) == 0.0:
        return s
    return s.scaled(cmath.exp(1j * cmath.phase(ov)))
