"""Constellations, spatial-modulation bit mapping and exhaustive ML detection.

An SM symbol carries ``log2(M)`` symbol bits followed by ``log2(N_t)``
antenna bits. Symbol bits use Gray labels; antenna bits use natural binary,
``antenna = 1 + int(bits, 2)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ParameterError

__all__ = [
    "Scheme",
    "Constellation",
    "SmSymbol",
    "build_constellation",
    "bits_per_symbol",
    "sm_map",
    "sm_demap",
    "ml_detect",
    "hamming_distance",
    "hamming_table",
]


class Scheme(str, enum.Enum):
    PSK = "psk"
    QAM = "qam"


def _log2_exact(n: int, what: str) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1 or (int(n) & (int(n) - 1)):
        raise ParameterError(f"{what} must be a power of two, got {n!r}")
    return int(n).bit_length() - 1


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _bits(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


@dataclass(frozen=True)
class Constellation:
    """Unit-average-power symbol alphabet with Gray bit labels.

    ``points[m]`` carries the label ``labels[m]``.
    """

    scheme: Scheme
    M: int
    points: np.ndarray
    labels: tuple

    @property
    def bits(self) -> int:
        return self.M.bit_length() - 1

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ParameterError(f"no symbol labelled {label!r}") from None


@dataclass(frozen=True, order=True)
class SmSymbol:
    """Active antenna (1-based) and constellation index."""

    antenna: int
    symbol_index: int


def build_constellation(scheme: Union[Scheme, str], M: int) -> Constellation:
    """Gray-labelled M-PSK or square M-QAM with ``mean |s|^2 = 1``.

    PSK point ``m`` sits at ``exp(2j*pi*m/M)`` and carries the Gray code of
    ``m``. QAM uses the grid ``{+-1, +-3, ...}^2`` scaled by
    ``sqrt(3 / (2(M-1)))`` with independent Gray codes on each axis, the
    in-phase bits first. ``M = 1`` gives the single point ``1`` with an
    empty label, which turns SM into space shift keying.
    """
    scheme = Scheme(scheme.lower() if isinstance(scheme, str) else scheme)
    k = _log2_exact(M, "M")
    if M == 1:
        points = np.ones(1, dtype=complex)
        labels = ("",)
    elif scheme is Scheme.PSK:
        m = np.arange(M)
        points = np.exp(2j * np.pi * m / M)
        # snap the axis points so BPSK/QPSK are exact
        points.real[np.abs(points.real) < 1e-15] = 0.0
        points.imag[np.abs(points.imag) < 1e-15] = 0.0
        labels = tuple(_bits(_gray(i), k) for i in range(M))
    else:
        if k % 2:
            raise ParameterError(f"QAM needs a square order (4, 16, 64, ...), got M={M}")
        side = 1 << (k // 2)
        levels = 2.0 * np.arange(side) - (side - 1)
        scale = math.sqrt(3.0 / (2.0 * (M - 1)))
        pts, labels = [], []
        for i in range(side):
            for q in range(side):
                pts.append(complex(levels[i], levels[q]) * scale)
                labels.append(_bits(_gray(i), k // 2) + _bits(_gray(q), k // 2))
        points = np.array(pts)
        labels = tuple(labels)
    points.setflags(write=False)
    return Constellation(scheme, int(M), points, labels)


def bits_per_symbol(N_t: int, constellation: Constellation) -> int:
    return _log2_exact(N_t, "N_t") + constellation.bits


def sm_map(bits: Union[str, Sequence[int]], N_t: int, constellation: Constellation) -> SmSymbol:
    """Map one block of ``log2(M) + log2(N_t)`` bits to an SM symbol."""
    if not isinstance(bits, str):
        bits = "".join(str(int(b)) for b in bits)
    n_ant = _log2_exact(N_t, "N_t")
    k = constellation.bits
    if len(bits) != k + n_ant or set(bits) - {"0", "1"}:
        raise ParameterError(f"expected {k + n_ant} bits, got {bits!r}")
    m = constellation.index_of(bits[:k])
    antenna = 1 + (int(bits[k:], 2) if n_ant else 0)
    return SmSymbol(antenna, m)


def sm_demap(sym: SmSymbol, N_t: int, constellation: Constellation) -> str:
    """Inverse of :func:`sm_map`."""
    n_ant = _log2_exact(N_t, "N_t")
    return constellation.labels[sym.symbol_index] + _bits(sym.antenna - 1, n_ant)


def ml_detect(y: complex, gains, constellation: Constellation, P_t: float) -> SmSymbol:
    """Exhaustive ML search over every (antenna, symbol) hypothesis.

    Minimizes ``|y - sqrt(P_t) * gains[n] * s_m|^2``; ties resolve to the
    lexicographically smallest ``(n, m)``.
    """
    gains = np.asarray(gains, dtype=complex)
    if constellation.points.size == 0 or gains.size == 0:
        raise ParameterError("empty hypothesis set")
    if not P_t > 0:
        raise ParameterError(f"P_t must be positive, got {P_t!r}")
    hyp = math.sqrt(P_t) * gains[:, None] * constellation.points[None, :]
    flat = int(np.argmin(np.abs(y - hyp).ravel() ** 2))
    n, m = divmod(flat, constellation.M)
    return SmSymbol(n + 1, m)


def hamming_distance(a: SmSymbol, b: SmSymbol, N_t: int, constellation: Constellation) -> int:
    """Number of differing bits between the labels of ``a`` and ``b``."""
    return sum(x != y for x, y in zip(sm_demap(a, N_t, constellation), sm_demap(b, N_t, constellation)))


def hamming_table(N_t: int, constellation: Constellation) -> np.ndarray:
    """Pairwise Hamming distances over hypotheses ``(n-1)*M + m``."""
    M = constellation.M
    words = np.array(
        [int(sm_demap(SmSymbol(i // M + 1, i % M), N_t, constellation) or "0", 2) for i in range(N_t * M)]
    )
    x = np.bitwise_xor.outer(words, words)
    return np.array([[bin(v).count("1") for v in row] for row in x], dtype=np.int64)
