"""Rayleigh fading realizations, RIS phase configuration and composite gains.

Every complex link coefficient is unit-variance circularly-symmetric
Gaussian, so amplitudes are Rayleigh with ``E[a^2] = 1`` and phases are
uniform on ``[0, 2pi)``. Path loss is folded into the SNR.

A link is stored as amplitude and phase with the sign convention
``h = a * exp(-1j * phase)``. Antenna indices are 1-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, ParameterError

__all__ = [
    "FadingChannel",
    "PhaseErrorSpec",
    "RisProfile",
    "sample_fading",
    "align_phases",
    "apply_phase_error",
    "composite_gain",
    "composite_gains",
    "phase_residual_pdf",
]

TWO_PI = 2.0 * math.pi
_RAYLEIGH_SCALE = 1.0 / math.sqrt(2.0)


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FadingChannel:
    """One realization of the BS->RIS and RIS->UE links.

    ``h_amp`` and ``h_phase`` are ``(L, N_t)``; ``g_amp`` and ``g_phase``
    have length ``L``.
    """

    h_amp: np.ndarray
    h_phase: np.ndarray
    g_amp: np.ndarray
    g_phase: np.ndarray

    def __post_init__(self):
        for name in ("h_amp", "h_phase", "g_amp", "g_phase"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self.h_amp.ndim != 2 or self.h_amp.shape != self.h_phase.shape:
            raise DimensionError("h_amp and h_phase must be matching L x N_t matrices")
        if self.g_amp.shape != (self.h_amp.shape[0],) or self.g_phase.shape != self.g_amp.shape:
            raise DimensionError("g_amp and g_phase must be length-L vectors")
        if self.h_amp.size == 0:
            raise DimensionError("channel needs L >= 1 and N_t >= 1")

    @property
    def L(self) -> int:
        return self.h_amp.shape[0]

    @property
    def N_t(self) -> int:
        return self.h_amp.shape[1]


@dataclass(frozen=True)
class PhaseErrorSpec:
    """How the RIS phases deviate from their ideal alignment.

    ``kind`` is ``"ideal"``, ``"uniform"`` (offsets drawn i.i.d. from
    ``U[-pi/k, pi/k]``) or ``"random"`` (phases drawn afresh from
    ``U[0, 2pi)``). ``k`` is only meaningful for ``"uniform"``.
    """

    kind: str = "ideal"
    k: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("ideal", "uniform", "random"):
            raise ParameterError(f"unknown phase error kind {self.kind!r}")
        if self.kind == "uniform":
            if self.k is None or not math.isfinite(self.k) or self.k <= 0:
                raise ParameterError(f"uniform phase error needs k > 0, got {self.k!r}")
            object.__setattr__(self, "k", float(self.k))
        elif self.k is not None:
            raise ParameterError(f"k is only used by the uniform model, got k={self.k!r}")

    @classmethod
    def ideal(cls) -> "PhaseErrorSpec":
        return cls("ideal")

    @classmethod
    def uniform(cls, k: float) -> "PhaseErrorSpec":
        return cls("uniform", k)

    @classmethod
    def random(cls) -> "PhaseErrorSpec":
        return cls("random")

    @classmethod
    def parse(cls, text: str) -> "PhaseErrorSpec":
        """Parse ``ideal``, ``random`` or ``uniform:<k>``."""
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "uniform":
            try:
                return cls.uniform(float(arg))
            except ValueError:
                raise ParameterError(f"bad phase error spec {text!r}") from None
        if arg:
            raise ParameterError(f"bad phase error spec {text!r}")
        return cls(kind)

    def __str__(self):
        if self.kind == "uniform":
            return f"uniform:{self.k:g}"
        return self.kind


@dataclass(frozen=True)
class RisProfile:
    """Reflection phases ``theta`` (length ``L``) with unit amplitudes."""

    theta: np.ndarray
    aligned_to: Optional[int] = None
    error_model: PhaseErrorSpec = field(default_factory=PhaseErrorSpec.ideal)

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen(self.theta))
        if self.theta.ndim != 1 or self.theta.size == 0:
            raise DimensionError("theta must be a non-empty vector")


def sample_fading(L: int, N_t: int, rng: np.random.Generator) -> FadingChannel:
    """Draw one i.i.d. Rayleigh realization with unit-power links."""
    if L < 1 or N_t < 1:
        raise DimensionError(f"need L >= 1 and N_t >= 1, got L={L}, N_t={N_t}")
    h_amp = rng.rayleigh(_RAYLEIGH_SCALE, size=(L, N_t))
    h_phase = rng.uniform(0.0, TWO_PI, size=(L, N_t))
    g_amp = rng.rayleigh(_RAYLEIGH_SCALE, size=L)
    g_phase = rng.uniform(0.0, TWO_PI, size=L)
    return FadingChannel(h_amp, h_phase, g_amp, g_phase)


def _check_antenna(ch: FadingChannel, n_t: int) -> int:
    if not 1 <= n_t <= ch.N_t:
        raise IndexError(f"antenna index {n_t} outside 1..{ch.N_t}")
    return n_t - 1


def align_phases(ch: FadingChannel, n_t: int) -> RisProfile:
    """Co-phase every RIS element for transmit antenna ``n_t``."""
    col = _check_antenna(ch, n_t)
    theta = np.mod(ch.g_phase + ch.h_phase[:, col], TWO_PI)
    return RisProfile(theta, aligned_to=n_t)


def _wrap(theta):
    out = np.mod(theta, TWO_PI)
    # mod can round up to exactly 2pi for tiny negative inputs
    out[out >= TWO_PI] = 0.0
    return out


def apply_phase_error(
    profile: RisProfile, spec: PhaseErrorSpec, rng: np.random.Generator
) -> RisProfile:
    """Perturb ``profile`` according to ``spec``."""
    if spec.kind == "ideal":
        return profile
    n = profile.theta.size
    if spec.kind == "uniform":
        half = math.pi / spec.k
        theta = _wrap(profile.theta + rng.uniform(-half, half, size=n))
        return RisProfile(theta, profile.aligned_to, spec)
    return RisProfile(rng.uniform(0.0, TWO_PI, size=n), None, spec)


def composite_gain(ch: FadingChannel, profile: RisProfile, n_t: int) -> complex:
    """Effective BS antenna ``n_t`` -> RIS -> UE gain ``g^T Theta h_{n_t}``."""
    if profile.theta.shape != (ch.L,):
        raise DimensionError(f"profile has {profile.theta.size} phases, channel has L={ch.L}")
    col = _check_antenna(ch, n_t)
    phase = profile.theta - ch.g_phase - ch.h_phase[:, col]
    return complex(np.sum(ch.h_amp[:, col] * ch.g_amp * np.exp(1j * phase)))


def composite_gains(ch: FadingChannel, profile: RisProfile) -> np.ndarray:
    """Composite gains of all ``N_t`` antennas under one profile."""
    if profile.theta.shape != (ch.L,):
        raise DimensionError(f"profile has {profile.theta.size} phases, channel has L={ch.L}")
    phase = profile.theta[:, None] - ch.g_phase[:, None] - ch.h_phase
    return np.sum(ch.h_amp * ch.g_amp[:, None] * np.exp(1j * phase), axis=0)


def phase_residual_pdf(phi):
    """Triangular density of the difference of two independent
    ``U[0, 2pi)`` phases, supported on ``[-2pi, 2pi]``."""
    phi = np.asarray(phi, dtype=float)
    out = np.where(np.abs(phi) <= TWO_PI, (TWO_PI - np.abs(phi)) / (4.0 * math.pi**2), 0.0)
    return float(out) if out.ndim == 0 else out
