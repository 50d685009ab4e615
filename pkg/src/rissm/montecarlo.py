"""Seeded Monte Carlo bit error rate estimation for RIS-assisted SM.

Each trial draws a fresh fading realization, a uniformly random SM symbol,
re-aligns the RIS to the active antenna, perturbs the phases, transmits
over AWGN with ``N_0 = 1`` and ``P_t = 10**(snr_db/10)``, and runs the
exhaustive ML detector with the exact composite gains of every candidate
antenna under the realized RIS profile.

Trials are processed in fixed-size vectorized batches. Every SNR point owns
a PCG64 stream derived from ``SeedSequence(seed, spawn_key=(key,))`` where
``key`` is the IEEE-754 bit pattern of ``snr_db``, so a point's estimate does
not depend on its position in the sweep or on scheduling.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channel import TWO_PI, PhaseErrorSpec
from .errors import ParameterError
from .modem import Scheme, build_constellation, hamming_table, _log2_exact

__all__ = [
    "SimConfig",
    "CurvePoint",
    "BerCurve",
    "point_rng",
    "simulate_point",
    "simulate_curve",
]

_SCALE = 1.0 / math.sqrt(2.0)


def _cn(rng, shape):
    """Unit-variance circularly-symmetric complex Gaussian samples."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * _SCALE


@dataclass(frozen=True)
class SimConfig:
    N_t: int
    M: int
    L: int
    scheme: Scheme = Scheme.PSK
    phase_error: PhaseErrorSpec = field(default_factory=PhaseErrorSpec.ideal)
    snr_db: tuple = ()
    min_bit_errors: int = 100
    max_trials: int = 1_000_000
    seed: int = 0
    batch_size: int = 10_000

    def __post_init__(self):
        _log2_exact(self.N_t, "N_t")
        _log2_exact(self.M, "M")
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "snr_db", tuple(float(v) for v in self.snr_db))
        if self.N_t * self.M < 2:
            raise ParameterError("need N_t * M >= 2")
        if self.L < 1:
            raise ParameterError(f"L must be >= 1, got {self.L}")
        if self.min_bit_errors < 1 or self.max_trials < 1 or self.batch_size < 1:
            raise ParameterError("min_bit_errors, max_trials and batch_size must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must fit in 64 unsigned bits")
        for v in self.snr_db:
            if not math.isfinite(v):
                raise ParameterError(f"SNR must be finite, got {v}")
        # builds and validates the constellation (square QAM etc.)
        build_constellation(self.scheme, self.M)

    @property
    def bits_per_trial(self) -> int:
        return int(math.log2(self.N_t * self.M))


@dataclass(frozen=True)
class CurvePoint:
    """BER estimate at one SNR. ``converged`` is False when the trial cap
    was hit before ``min_bit_errors`` were counted."""

    snr_db: float
    ber: float
    bit_errors: int
    bits: int
    trials: int
    converged: bool

    @property
    def std_error(self) -> float:
        """Binomial standard error of ``ber`` over the simulated bits."""
        p = self.ber
        return math.sqrt(p * (1.0 - p) / self.bits)


@dataclass(frozen=True)
class BerCurve:
    points: tuple
    config: SimConfig


def point_rng(seed: int, snr_db: float) -> np.random.Generator:
    """Independent generator for one SNR point of a seeded sweep."""
    key = struct.unpack("<Q", struct.pack("<d", float(snr_db) + 0.0))[0]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def _run_batch(rng, B, cfg, points, ham, amp):
    """Simulate ``B`` trials; returns the total number of bit errors."""
    L, N_t, M = cfg.L, cfg.N_t, cfg.M
    h = _cn(rng, (B, L, N_t))
    g = _cn(rng, (B, L))
    tx = rng.integers(0, N_t * M, size=B)
    ant, sym = np.divmod(tx, M)

    # per-element cascade g_l * h_{l,n}; co-phasing it for the active antenna
    # is exp(1j*theta_l) with theta_l = phase(g_l) + phase(h_{l,n})
    cascade = g[:, :, None] * h
    active = np.take_along_axis(cascade, ant[:, None, None], axis=2)[:, :, 0]
    refl = np.conj(active) / np.abs(active)
    pe = cfg.phase_error
    if pe.kind == "uniform":
        refl = refl * np.exp(1j * rng.uniform(-math.pi / pe.k, math.pi / pe.k, size=(B, L)))
    elif pe.kind == "random":
        refl = np.exp(1j * rng.uniform(0.0, TWO_PI, size=(B, L)))
    gains = np.matmul(refl[:, None, :], cascade)[:, 0, :]

    y = amp * gains[np.arange(B), ant] * points[sym] + _cn(rng, B)
    hyp = amp * gains[:, :, None] * points[None, None, :]
    metric = np.abs(y[:, None, None] - hyp).reshape(B, N_t * M)
    detected = np.argmin(metric, axis=1)
    return int(ham[tx, detected].sum())


def simulate_point(cfg: SimConfig, snr_db: float, rng: Optional[np.random.Generator] = None) -> CurvePoint:
    """Estimate the BER at one SNR.

    Runs batches until ``min_bit_errors`` are counted or ``max_trials``
    trials are spent; the last batch is truncated to respect the cap.
    ``rng`` defaults to :func:`point_rng` of the config seed.
    """
    snr_db = float(snr_db)
    if not math.isfinite(snr_db):
        raise ParameterError(f"SNR must be finite, got {snr_db}")
    if rng is None:
        rng = point_rng(cfg.seed, snr_db)
    c = build_constellation(cfg.scheme, cfg.M)
    ham = hamming_table(cfg.N_t, c)
    amp = math.sqrt(10.0 ** (snr_db / 10.0))
    errors = trials = 0
    while errors < cfg.min_bit_errors and trials < cfg.max_trials:
        B = min(cfg.batch_size, cfg.max_trials - trials)
        errors += _run_batch(rng, B, cfg, c.points, ham, amp)
        trials += B
    bits = trials * cfg.bits_per_trial
    return CurvePoint(snr_db, errors / bits, errors, bits, trials, errors >= cfg.min_bit_errors)


def simulate_curve(cfg: SimConfig, snr_db: Optional[Sequence[float]] = None, workers: int = 1) -> BerCurve:
    """Run :func:`simulate_point` over the SNR grid (``cfg.snr_db`` unless
    given). With ``workers > 1`` points run on a thread pool; results are
    identical to the serial run."""
    grid = cfg.snr_db if snr_db is None else tuple(float(v) for v in snr_db)
    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = tuple(pool.map(lambda v: simulate_point(cfg, v), grid))
    else:
        points = tuple(simulate_point(cfg, v) for v in grid)
    return BerCurve(points, cfg)
