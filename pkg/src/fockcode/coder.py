"""Rank-ordered 1-1 codebooks and the isometric Fock-space encoder.

The most probable eigen-sequence gets the shortest codeword.  Codewords are
strings over ``HV``; codeword ``w`` of length ``l`` is realized as the Fock
ket with modes ``1..l`` holding the photons of ``w`` and vacuum in the
remaining modes.  Because the code is only 1-1 (not prefix free), decoding
needs the message length ``n`` as classical side information.
"""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import source
from .errors import (
    CapacityError,
    CorruptionError,
    DomainError,
    SideInfoMismatchError,
    ValidationError,
)
from .fock import NORM_TOL, FockState

V_FIRST = "VH"
H_FIRST = "HV"
SYMBOL_ORDERS = {"v-first": V_FIRST, "h-first": H_FIRST}


def codeword_length(rank: int) -> int:
    """ceil(log2(rank/2 + 1)), computed exactly with integers.

    Ranks 1-2 have length 1, 3-6 length 2, 7-14 length 3, ...
    """
    if rank < 1:
        raise DomainError(f"rank must be >= 1, got {rank}")
    # ceil(log2(rank/2 + 1)) == ceil(log2(rank + 2)) - 1
    return (rank + 1).bit_length() - 1


def codeword_for_rank(rank: int, symbol_order: str = V_FIRST) -> str:
    """Binary counting within each length class; ``symbol_order[0]`` plays bit 0."""
    length = codeword_length(rank)
    offset = rank - (2**length - 2) - 1
    bits = format(offset, f"0{length}b")
    return "".join(symbol_order[int(b)] for b in bits)


def codeword_ket(codeword: str, n_modes: int) -> str:
    if len(codeword) > n_modes:
        raise CapacityError(f"codeword of length {len(codeword)} needs more than {n_modes} modes")
    return codeword + "." * (n_modes - len(codeword))


def _resolve_order(symbol_order: str) -> str:
    order = SYMBOL_ORDERS.get(symbol_order.lower(), symbol_order)
    if sorted(order) != ["H", "V"]:
        raise ValidationError(f"unknown symbol order {symbol_order!r}")
    return order


@dataclass(frozen=True)
class CodebookEntry:
    rank: int
    sequence: tuple[int, ...]
    codeword: str
    probability: float

    @property
    def length(self) -> int:
        return len(self.codeword)


@dataclass(frozen=True)
class Codebook:
    """Bijection from eigen-label sequences (rank order) to HV codewords.

    ``sequences[r]`` is the flat (lexicographic) index of the sequence at
    rank ``r + 1``; ``codewords`` and ``probabilities`` are aligned with it.
    """

    n: int
    eig: source.EigenDecomposition
    sequences: np.ndarray
    probabilities: np.ndarray
    codewords: tuple[str, ...]
    symbol_order: str = V_FIRST
    _by_flat: dict = field(default_factory=dict, repr=False, compare=False)
    _by_codeword: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        d = self.eig.dim
        if len(self.codewords) != d**self.n or self.sequences.size != d**self.n:
            raise ValidationError("codebook must cover every eigen-sequence exactly once")
        if len(set(self.sequences.tolist())) != self.sequences.size:
            raise ValidationError("codebook lists a sequence twice")
        if len(set(self.codewords)) != len(self.codewords):
            raise ValidationError("codewords are not distinct; the code is not 1-1")
        for rank, (cw, p) in enumerate(zip(self.codewords, self.probabilities), start=1):
            if not cw or set(cw) - {"H", "V"}:
                raise ValidationError(f"bad codeword {cw!r}")
            if len(cw) != codeword_length(rank):
                raise ValidationError(
                    f"rank {rank} codeword {cw!r} has length {len(cw)}, expected {codeword_length(rank)}"
                )
        if np.any(np.diff(self.probabilities) > 1e-15):
            raise ValidationError("probabilities must be non-increasing in rank")
        self._by_flat.update((int(s), r) for r, s in enumerate(self.sequences))
        self._by_codeword.update((cw, r) for r, cw in enumerate(self.codewords))

    @property
    def dim(self) -> int:
        return self.eig.dim

    @property
    def max_length(self) -> int:
        return len(self.codewords[-1])

    @property
    def lengths(self) -> np.ndarray:
        return np.array([len(c) for c in self.codewords])

    def sequence_of_rank(self, rank: int) -> tuple[int, ...]:
        return _unflatten(int(self.sequences[rank - 1]), self.dim, self.n)

    def codeword_of(self, sequence: Sequence[int]) -> str:
        return self.codewords[self._by_flat[_flatten(sequence, self.dim)]]

    def entries(self) -> list[CodebookEntry]:
        return [
            CodebookEntry(r + 1, self.sequence_of_rank(r + 1), cw, float(p))
            for r, (cw, p) in enumerate(zip(self.codewords, self.probabilities))
        ]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "symbol_order": "v-first" if self.symbol_order == V_FIRST else "h-first",
            "entries": [
                {
                    "rank": e.rank,
                    "sequence": source.sequence_label(e.sequence, self.dim),
                    "codeword": e.codeword,
                    "probability": e.probability,
                }
                for e in self.entries()
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _flatten(sequence: Sequence[int], d: int) -> int:
    flat = 0
    for x in sequence:
        flat = flat * d + int(x)
    return flat


def _unflatten(flat: int, d: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        flat, x = divmod(flat, d)
        out.append(x)
    return tuple(reversed(out))


def build_codebook(
    eig: source.EigenDecomposition,
    n: int,
    symbol_order: str = V_FIRST,
    cap: int = source.DEFAULT_CAP,
) -> Codebook:
    """Canonical 1-1 codebook: rank sequences, then count in binary per length."""
    order = _resolve_order(symbol_order)
    _, probs, _ = source.enumerate_sequences(eig, n, cap)
    ranked = source.rank_order(probs)
    words = tuple(codeword_for_rank(r, order) for r in range(1, ranked.size + 1))
    return Codebook(n, eig, ranked, probs[ranked], words, order)


def table_codebook(
    eig: source.EigenDecomposition,
    rows: Sequence[tuple[str | Sequence[int], str]],
    symbol_order: str = V_FIRST,
) -> Codebook:
    """Codebook from explicit (sequence, codeword) rows listed in rank order.

    Sequences may be given as labels (``"+-+"``) or index tuples.  The rows
    must respect the probability ranking and the length law; the codebook
    constructor checks both.
    """
    d = eig.dim
    seqs = [source.parse_sequence_label(s, d) if isinstance(s, str) else tuple(s) for s, _ in rows]
    n = len(seqs[0])
    flat = np.array([_flatten(s, d) for s in seqs], dtype=np.int64)
    _, probs, _ = source.enumerate_sequences(eig, n)
    return Codebook(n, eig, flat, probs[flat], tuple(cw for _, cw in rows), _resolve_order(symbol_order))


# Reference tables for theta = 45 degrees.  The three-letter one follows
# V-first binary counting except for its last two rows; the two-letter one is
# what the two-photon circuit produces (delete mode 2 when it holds H).
REFERENCE_TABLE_N3 = (
    ("+++", "V"),
    ("++-", "H"),
    ("+-+", "VV"),
    ("-++", "VH"),
    ("+--", "HV"),
    ("-+-", "HH"),
    ("--+", "HHH"),
    ("---", "HHV"),
)
REFERENCE_TABLE_N2 = (
    ("++", "H"),
    ("-+", "V"),
    ("+-", "HV"),
    ("--", "VV"),
)


def reference_codebook_n3(eig: source.EigenDecomposition) -> Codebook:
    return table_codebook(eig, REFERENCE_TABLE_N3, V_FIRST)


def reference_codebook_n2(eig: source.EigenDecomposition) -> Codebook:
    return table_codebook(eig, REFERENCE_TABLE_N2, H_FIRST)


# message <-> Fock state


def _change_basis(message: np.ndarray, matrix: np.ndarray, n: int) -> np.ndarray:
    """Apply ``matrix`` to every letter of an n-letter vector."""
    d = matrix.shape[0]
    t = message.reshape((d,) * n)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(matrix, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def _as_message(message, book: Codebook) -> np.ndarray:
    vec = np.asarray(message, dtype=complex).reshape(-1)
    if vec.size != book.dim**book.n:
        raise ValidationError(f"message has {vec.size} amplitudes, expected {book.dim}**{book.n}")
    if abs(np.linalg.norm(vec) - 1.0) > NORM_TOL:
        raise ValidationError("message must be normalized")
    return vec


def to_eigenbasis(message, book: Codebook) -> np.ndarray:
    return _change_basis(np.asarray(message, dtype=complex), book.eig.vectors.conj().T, book.n)


def from_eigenbasis(coeffs, book: Codebook) -> np.ndarray:
    return _change_basis(np.asarray(coeffs, dtype=complex), book.eig.vectors, book.n)


def encode(message, book: Codebook, n_modes: int | None = None, basis: str = "letter") -> FockState:
    """Map an n-letter message to a variable photon-number Fock state.

    ``message`` is a flat vector of ``d**n`` amplitudes, first letter most
    significant.  With ``basis="letter"`` it is expressed in the basis the
    letter states are written in and is first rotated letter by letter into
    the eigenbasis; ``basis="eigen"`` skips that rotation.  ``n_modes``
    defaults to the longest codeword length (``n`` for qubit sources).
    """
    vec = _as_message(message, book)
    n_modes = book.max_length if n_modes is None else n_modes
    if n_modes < book.max_length:
        raise CapacityError(f"{n_modes} modes cannot hold codewords of length {book.max_length}")
    if basis == "letter":
        coeffs = to_eigenbasis(vec, book)
    elif basis == "eigen":
        coeffs = vec
    else:
        raise ValidationError(f"unknown basis {basis!r}")
    terms = {}
    for flat in np.flatnonzero(np.abs(coeffs) > 0):
        word = book.codewords[book._by_flat[int(flat)]]
        terms[codeword_ket(word, n_modes)] = coeffs[flat]
    return FockState(terms, n_modes)


def decode(encoded: FockState, book: Codebook, l_t: int, basis: str = "letter") -> np.ndarray:
    """Invert :func:`encode` given the total message length ``l_t``."""
    if l_t != book.n:
        raise SideInfoMismatchError(
            f"side information says {l_t} letters but the codebook encodes {book.n}"
        )
    coeffs = np.zeros(book.dim**book.n, dtype=complex)
    for ket, amp in encoded.terms.items():
        word = ket.rstrip(".")
        rank = book._by_codeword.get(word) if "." not in word else None
        if rank is None:
            raise CorruptionError(f"ket {ket!r} is not a codeword of this book", ket=ket)
        coeffs[int(book.sequences[rank])] = amp
    if basis == "eigen":
        return coeffs
    if basis != "letter":
        raise ValidationError(f"unknown basis {basis!r}")
    return from_eigenbasis(coeffs, book)


def average_length(book: Codebook) -> float:
    """Expected codeword length, i.e. expected photon number of the encoding."""
    return float(np.dot(book.probabilities, book.lengths))


def message_fidelity(a, b) -> float:
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    return float(abs(np.vdot(a, b)) ** 2)


# bounds


@dataclass(frozen=True)
class BoundsReport:
    """Lower bounds on the expected 1-1 codeword length for one (source, n).

    ``satisfied`` holds one flag per checked bound: ``landauer_n``,
    ``landauer_S``, ``cover`` and ``prisco``.  ``bound_prisco_log_s`` (the
    variant with log2(S) instead of log2(S + 1)) is reported but not flagged.
    """

    S_letter: float
    n: int
    S_total: float
    L_one_one: float
    side_info_bits: float
    bound_landauer_n: float
    bound_landauer_S: float
    bound_cover: float
    bound_prisco: float
    bound_prisco_log_s: float | None
    satisfied: dict[str, bool]

    @property
    def all_satisfied(self) -> bool:
        return all(self.satisfied.values())

    def bounds(self) -> dict[str, float]:
        return {
            "landauer_n": self.bound_landauer_n,
            "landauer_S": self.bound_landauer_S,
            "cover": self.bound_cover,
            "prisco": self.bound_prisco,
        }


def compression_bounds(S_letter: float, n: int, L: float) -> BoundsReport:
    if S_letter < 0 or n < 1:
        raise DomainError("need S_letter >= 0 and n >= 1")
    S = n * S_letter
    log_n = math.log2(n)
    landauer_n = S - log_n
    cover = S - log_n - 3
    if S > 0:
        landauer_S = S - math.log2(S)
        prisco = S - math.log2(S + 1) - S * math.log2(1 + 1 / S)
        prisco_log_s = S - math.log2(S) - S * math.log2(1 + 1 / S)
    else:
        landauer_S = prisco = -math.inf
        prisco_log_s = None
    values = {"landauer_n": landauer_n, "landauer_S": landauer_S, "cover": cover, "prisco": prisco}
    return BoundsReport(
        S_letter=S_letter,
        n=n,
        S_total=S,
        L_one_one=L,
        side_info_bits=log_n,
        bound_landauer_n=landauer_n,
        bound_landauer_S=landauer_S,
        bound_cover=cover,
        bound_prisco=prisco,
        bound_prisco_log_s=prisco_log_s,
        satisfied={k: L >= v for k, v in values.items()},
    )
