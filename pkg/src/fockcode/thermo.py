"""Energy bookkeeping (hbar = 1, energies in units of omega) and Landauer audits.

All entropies are in bits; Boltzmann-constant and temperature factors are
dropped, so an erasure cost of ``S`` means ``kT ln2 * S`` of heat.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from .coder import Codebook, average_length, codeword_ket
from .errors import DimensionError, ValidationError
from .fock import FockState
from .schumacher import TypicalSet

LANDAUER_TOL = 1e-9


def _check_freqs(freqs: Sequence[float], n_modes: int) -> tuple[float, ...]:
    omegas = tuple(float(w) for w in freqs)
    if len(omegas) != n_modes:
        raise DimensionError(f"{len(omegas)} frequencies for {n_modes} modes")
    if any(w <= 0 for w in omegas):
        raise ValidationError("mode frequencies must be positive")
    return omegas


def average_energy(s: FockState, freqs: Sequence[float] | None = None) -> float:
    """<H> = sum over kets of |amp|^2 * (sum of omega over occupied modes)."""
    omegas = (1.0,) * s.n_modes if freqs is None else _check_freqs(freqs, s.n_modes)
    total = 0.0
    for ket, amp in s.terms.items():
        total += abs(amp) ** 2 * sum(w for w, occ in zip(omegas, ket) if occ != ".")
    return total


@dataclass(frozen=True)
class EnergyReport:
    scheme: str
    n: int
    L: float
    E_initial: float
    E_final: float
    side_info_bits: float = 0.0

    @property
    def ratio(self) -> float:
        return self.E_final / self.E_initial if self.E_initial > 0 else math.nan

    @property
    def adjusted_rate(self) -> float:
        """(L + side information) per letter."""
        return (self.L + self.side_info_bits) / self.n


def energy_ratio_one_to_one(book: Codebook, freqs: Sequence[float] | None = None) -> EnergyReport:
    """Mean energy of the encoded ensemble against one photon per letter.

    ``E_final`` is the energy of the encoded mixture sum_i p_i |c_i><c_i|,
    evaluated ket by ket, so with unit frequencies it reproduces
    ``average_length(book)`` along a separate arithmetic path.
    """
    m = book.max_length
    omegas = (1.0,) * max(m, book.n) if freqs is None else tuple(freqs)
    E_final = sum(
        p * average_energy(FockState.basis(codeword_ket(cw, m)), omegas[:m])
        for p, cw in zip(book.probabilities, book.codewords)
    )
    E_initial = average_energy(FockState.basis("H" * book.n), omegas[: book.n])
    return EnergyReport(
        scheme="one-to-one",
        n=book.n,
        L=average_length(book),
        E_initial=E_initial,
        E_final=float(E_final),
        side_info_bits=math.log2(book.n),
    )


def energy_ratio_schumacher(ts: TypicalSet) -> EnergyReport:
    """Block coding into ceil(log2 |T|) modes; the untypical part is discarded."""
    m = math.ceil(math.log2(ts.dimension)) if ts.dimension > 1 else 0
    return EnergyReport(scheme="schumacher", n=ts.n, L=float(m), E_initial=float(ts.n), E_final=float(m))


@dataclass(frozen=True)
class LandauerAudit:
    S_total: float
    L: float
    side_info_bits: float

    @property
    def deficit(self) -> float:
        """Entropy not accounted for by the transmitted quantum and classical parts."""
        return self.S_total - (self.L + self.side_info_bits)

    @property
    def lossless_consistent(self) -> bool:
        return self.deficit <= LANDAUER_TOL


def landauer_audit(S_total: float, L: float, side_info_bits: float = 0.0) -> LandauerAudit:
    if min(S_total, L, side_info_bits) < 0:
        raise ValidationError("Landauer audit inputs must be non-negative")
    return LandauerAudit(S_total, L, side_info_bits)
