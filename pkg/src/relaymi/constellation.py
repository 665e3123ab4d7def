"""Finite signal constellations and block symbol spaces.

A constellation is a finite set of complex points with unit average energy.
A symbol space stacks 2L consecutive constellation symbols into one block
vector, enumerating all M**(2L) combinations; the mutual-information and
MMSE estimators average over exactly this set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CapacityError",
    "Constellation",
    "SymbolSpace",
    "build_constellation",
    "build_symbol_space",
    "parse_constellation_name",
]

# Hard cap on M**(2L): the estimators run an O(M**(4L)) pairwise sum, and
# anything past this point is not a realistic working set.
VECTOR_LIMIT = 2**20

_KINDS = ("psk", "pam", "qam")


class CapacityError(ValueError):
    """Raised when M**(2L) exceeds the enumeration guard."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Constellation:
    """Unit-energy complex constellation.

    Attributes
    ----------
    kind : str
        One of "psk", "pam", "qam".
    order : int
        Number of points M (power of two, >= 2).
    points : np.ndarray
        Shape (M,) complex, mean energy 1 within 1e-12, all points distinct.
    """

    kind: str
    order: int
    points: np.ndarray

    @property
    def bits_per_symbol(self) -> float:
        return float(np.log2(self.order))


def build_constellation(kind: str, order: int) -> Constellation:
    """Construct a named constellation with unit average energy.

    Conventions, frozen for reproducibility:

    * psk: points exp(2j*pi*m/M), except M=4 which is offset by pi/4 so the
      QPSK points sit on the diagonals (+-1 +-1j)/sqrt(2).  BPSK is {+1, -1}.
    * pam: real levels {..., -3, -1, +1, +3, ...} scaled to unit energy.
    * qam: square grid, M must be an even power of two (4, 16, 64, ...);
      16-QAM is {+-1, +-3}^2 / sqrt(10).

    Raises
    ------
    ValueError
        Unknown kind, M not a power of two, M < 2, or non-square QAM order.
    """
    kind = kind.lower()
    if kind not in _KINDS:
        raise ValueError(f"unknown constellation kind {kind!r}; expected one of {_KINDS}")
    if not isinstance(order, (int, np.integer)) or not _is_power_of_two(int(order)) or order < 2:
        raise ValueError(f"constellation order must be a power of two >= 2, got {order!r}")
    order = int(order)

    if kind == "psk":
        offset = np.pi / order if order == 4 else 0.0
        angles = 2.0 * np.pi * np.arange(order) / order + offset
        points = np.exp(1j * angles)
    elif kind == "pam":
        levels = 2.0 * np.arange(order) - (order - 1)
        points = levels.astype(np.complex128)
    else:  # qam
        side = int(round(np.sqrt(order)))
        if side * side != order or not _is_power_of_two(side):
            raise ValueError(
                f"qam order must be an even power of two (4, 16, 64, ...), got {order}"
            )
        levels = 2.0 * np.arange(side) - (side - 1)
        re_grid, im_grid = np.meshgrid(levels, levels, indexing="ij")
        points = (re_grid + 1j * im_grid).ravel()

    # Normalize by the measured RMS so unit energy holds to float precision
    # for every kind, not just the ones with closed-form scale factors.
    rms = np.sqrt(np.mean(np.abs(points) ** 2))
    points = points / rms
    points.setflags(write=False)
    return Constellation(kind=kind, order=order, points=points)


_NAME_RE = re.compile(r"^(\d+)[-_]?(psk|pam|qam)$")


def parse_constellation_name(name: str) -> Constellation:
    """Parse CLI-style names like "bpsk", "qpsk", "16qam", "8psk", "4pam"."""
    token = name.strip().lower()
    if token == "bpsk":
        return build_constellation("psk", 2)
    if token == "qpsk":
        return build_constellation("psk", 4)
    match = _NAME_RE.match(token)
    if match is None:
        raise ValueError(f"unrecognized constellation name {name!r}")
    return build_constellation(match.group(2), int(match.group(1)))


@dataclass(frozen=True)
class SymbolSpace:
    """All M**(2L) stacked symbol vectors for a block of 2L channel uses.

    vectors[n] lists the block whose t-th coordinate is points[d_t] with
    n = sum_t d_t * M**t: the first coordinate cycles fastest.
    """

    constellation: Constellation
    block_length: int  # L, half the vector dimension
    vectors: np.ndarray  # (M**(2L), 2L) complex

    @property
    def dim(self) -> int:
        return 2 * self.block_length

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def order(self) -> int:
        return self.constellation.order

    @property
    def bits_per_use(self) -> float:
        """Upper bound on mutual information: log2 M bits per channel use."""
        return self.constellation.bits_per_symbol


def build_symbol_space(constellation: Constellation, block_length: int) -> SymbolSpace:
    """Enumerate every length-2L symbol vector in mixed-radix order.

    Raises
    ------
    ValueError
        block_length < 1.
    CapacityError
        M**(2L) > 2**20; raised before any allocation.
    """
    if not isinstance(block_length, (int, np.integer)) or block_length < 1:
        raise ValueError(f"block_length must be a positive integer, got {block_length!r}")
    block_length = int(block_length)
    m = constellation.order
    dim = 2 * block_length
    count = m**dim  # exact integer arithmetic, no overflow risk in Python
    if count > VECTOR_LIMIT:
        raise CapacityError(
            f"M**(2L) = {m}**{dim} = {count} exceeds the enumeration limit {VECTOR_LIMIT}"
        )

    radix = m ** np.arange(dim, dtype=np.int64)
    digits = (np.arange(count, dtype=np.int64)[:, None] // radix[None, :]) % m
    vectors = constellation.points[digits]
    vectors.setflags(write=False)
    return SymbolSpace(constellation=constellation, block_length=block_length, vectors=vectors)
