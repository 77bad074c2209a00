"""Signed Pauli-string algebra on a fixed register of qubits.

Strings are kept symbolic (a letter per site plus a global phase from
{1, -1, i, -i}), so products and commutators are exact and never go
through floating point. Matrices are only materialized on demand for
small registers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionError

I, X, Y, Z = 0, 1, 2, 3

_LETTER_NAMES = "IXYZ"

# Single-site multiplication tables: _PROD_LETTER[a][b] is the letter of
# a.b and _PROD_PHASE[a][b] its phase, e.g. X.Y = iZ, Y.X = -iZ.
_PROD_LETTER = (
    (I, X, Y, Z),
    (X, I, Z, Y),
    (Y, Z, I, X),
    (Z, Y, X, I),
)
_PROD_PHASE = (
    (1, 1, 1, 1),
    (1, 1, 1j, -1j),
    (1, -1j, 1, 1j),
    (1, 1j, -1j, 1),
)

_PHASES = (1 + 0j, -1 + 0j, 1j, -1j)

_SITE_MATRICES = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class PauliString:
    """A phase times a tensor product of single-site Pauli operators.

    ``letters[s]`` is the operator on site ``s`` (0-based), encoded as one
    of the module constants I, X, Y, Z. The phase is restricted to the
    fourth roots of unity so the algebra closes exactly.
    """

    letters: tuple[int, ...]
    phase: complex = 1 + 0j

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(l) for l in self.letters))
        if not self.letters:
            raise DimensionError("a Pauli string needs at least one site")
        if any(l not in (I, X, Y, Z) for l in self.letters):
            raise ValueError(f"invalid letter in {self.letters!r}")
        ph = complex(self.phase)
        if ph not in _PHASES:
            raise ValueError(f"phase must be a fourth root of unity, got {ph!r}")
        object.__setattr__(self, "phase", ph)

    @classmethod
    def identity(cls, n_sites: int) -> PauliString:
        return cls((I,) * n_sites)

    @classmethod
    def single(cls, n_sites: int, site: int, letter: int) -> PauliString:
        """The given letter on one site, identity elsewhere."""
        if not 0 <= site < n_sites:
            raise DimensionError(f"site {site} outside register of {n_sites}")
        letters = [I] * n_sites
        letters[site] = letter
        return cls(tuple(letters))

    @classmethod
    def from_label(cls, label: str, phase: complex = 1) -> PauliString:
        """Build from a letter string such as ``"ZZX"``."""
        try:
            letters = tuple(_LETTER_NAMES.index(ch) for ch in label.upper())
        except ValueError:
            raise ValueError(f"invalid Pauli label {label!r}") from None
        return cls(letters, phase)

    @property
    def n_sites(self) -> int:
        return len(self.letters)

    @property
    def label(self) -> str:
        return "".join(_LETTER_NAMES[l] for l in self.letters)

    def __str__(self) -> str:
        prefix = {1 + 0j: "+", -1 + 0j: "-", 1j: "+i", -1j: "-i"}[self.phase]
        return prefix + self.label

    def with_phase(self, phase: complex) -> PauliString:
        return PauliString(self.letters, phase)

    def __mul__(self, other: PauliString) -> PauliString:
        if not isinstance(other, PauliString):
            return NotImplemented
        if other.n_sites != self.n_sites:
            raise DimensionError("cannot multiply strings on different registers")
        phase = self.phase * other.phase
        out = []
        for a, b in zip(self.letters, other.letters):
            out.append(_PROD_LETTER[a][b])
            phase *= _PROD_PHASE[a][b]
        return PauliString(tuple(out), phase)

    def commutes_with(self, other: PauliString) -> bool:
        """Two strings either commute or anticommute; this decides which."""
        if other.n_sites != self.n_sites:
            raise DimensionError("cannot compare strings on different registers")
        clashes = sum(
            1
            for a, b in zip(self.letters, other.letters)
            if a != I and b != I and a != b
        )
        return clashes % 2 == 0

    def to_matrix(self) -> np.ndarray:
        """Dense complex matrix, phase included. Exponential in sites."""
        mat = reduce(np.kron, (_SITE_MATRICES[l] for l in self.letters))
        return self.phase * mat


def pauli_commutator(p: PauliString, q: PauliString) -> tuple[complex, PauliString]:
    """Commutator [p, q] = c * r with r carried at canonical phase +1.

    Returns (0, identity) when the strings commute; otherwise c collects
    the factor 2 together with all phases, so it lies in {±2, ±2i} times
    the product of the input phases.
    """
    if p.commutes_with(q):
        return 0j, PauliString.identity(p.n_sites)
    prod = p * q
    return 2 * prod.phase, prod.with_phase(1)


def normalized_inner(p: PauliString, q: PauliString) -> complex:
    """Hilbert-Schmidt inner product with the 2^-n trace normalization.

    Under this scaling distinct letter patterns are exactly orthogonal and
    every string has unit norm, which is the normalization the linear
    model construction assumes.
    """
    if p.n_sites != q.n_sites:
        raise DimensionError("cannot pair strings on different registers")
    if p.letters != q.letters:
        return 0j
    return np.conj(p.phase) * q.phase
