"""Closed-form error-probability chain for RIS-assisted spatial modulation.

The composite gains are treated as Gaussian (CLT over the ``L`` RIS
elements). Unconditional pairwise error probabilities are Craig-form
averages of an MGF, evaluated with the Chebyshev-node rule from
:mod:`rissm.quadrature`, and combined into the union bound on the average
bit error probability.

All probabilities use the SNR ``rho = P_t / N_0`` on a linear scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .modem import Constellation, hamming_table, _log2_exact
from .quadrature import craig_average, gcq_nodes, q_function

__all__ = [
    "XiMoments",
    "MomentSet",
    "AbepCurve",
    "cpep",
    "xi_moments",
    "mgf_gain_square",
    "correct_antenna_integrand",
    "upep_correct_antenna",
    "pair_moments",
    "mgf_quadratic_form",
    "cross_antenna_integrand",
    "upep_cross_antenna",
    "abep_union_bound",
    "abep_curve",
    "DEFAULT_Q",
]

DEFAULT_Q = 64

# per-element moments of a product of two unit-power Rayleigh amplitudes
_MEAN_AB = math.pi / 4.0
_VAR_AB = (16.0 - math.pi**2) / 16.0


def _check_L(L):
    if isinstance(L, bool) or int(L) != L or L < 1:
        raise ParameterError(f"L must be a positive integer, got {L!r}")
    return int(L)


def _check_rho(rho):
    if not (rho >= 0.0 and math.isfinite(rho)):
        raise ParameterError(f"rho must be finite and non-negative, got {rho!r}")
    return float(rho)


@dataclass(frozen=True)
class XiMoments:
    """Mean and variance of the aligned gain ``xi = sum_l a_l b_l``."""

    mu_xi: float
    var_xi: float


@dataclass(frozen=True)
class MomentSet:
    """Gaussian model of ``z = [gamma_re, gamma_im]`` for one (s, s_hat) pair.

    The error metric is the quadratic form ``z^T A z`` with ``A = I``.
    """

    mu: np.ndarray
    V: np.ndarray
    A: np.ndarray = field(default_factory=lambda: np.eye(2))


def cpep(G_true: complex, G_cross: complex, s: complex, s_hat: complex, rho: float) -> float:
    """Pairwise error probability conditioned on the composite gains.

    The decision statistic between the two hypotheses is real Gaussian with
    mean ``-rho*d2`` and variance ``2*rho*d2`` (unit noise power), where
    ``d2 = |G_true*s - G_cross*s_hat|^2``; it exceeds zero with probability
    ``Q(sqrt(rho*d2/2))``.
    """
    rho = _check_rho(rho)
    d2 = abs(G_true * s - G_cross * s_hat) ** 2
    return q_function(math.sqrt(rho * d2 / 2.0))


def xi_moments(L: int) -> XiMoments:
    L = _check_L(L)
    return XiMoments(mu_xi=L * _MEAN_AB, var_xi=L * _VAR_AB)


def mgf_gain_square(x, m: XiMoments):
    """MGF of ``xi^2`` for ``xi ~ N(mu_xi, var_xi)`` (non-central chi-square
    with one degree of freedom).

    Raises :class:`DomainError` at or past the pole ``1 - 2*x*var_xi = 0``.
    """
    x = np.asarray(x, dtype=float)
    den = 1.0 - 2.0 * x * m.var_xi
    if np.any(den <= 0.0):
        raise DomainError(f"MGF pole: 1 - 2*x*var_xi must be positive (x={x})")
    out = np.exp(x * m.mu_xi**2 / den) / np.sqrt(den)
    return float(out) if out.ndim == 0 else out


def correct_antenna_integrand(theta, s: complex, s_hat: complex, rho: float, L: int):
    """Craig-form integrand of the UPEP when the antenna is detected
    correctly, i.e. ``MGF_{xi^2}(-rho*|s - s_hat|^2 / (4 sin^2 theta))``."""
    m = xi_moments(L)
    c = rho * abs(s - s_hat) ** 2
    s2 = np.sin(np.asarray(theta, dtype=float)) ** 2
    if c == 0.0:
        return np.ones_like(s2)
    return np.sqrt(2.0 * s2 / (2.0 * s2 + c * m.var_xi)) * np.exp(
        -c * m.mu_xi**2 / (4.0 * s2 + 2.0 * c * m.var_xi)
    )


def upep_correct_antenna(
    s: complex, s_hat: complex, rho: float, L: int, Q: int = DEFAULT_Q, rule: str = "fejer"
) -> float:
    """Average PEP between ``(n, s)`` and ``(n, s_hat)`` on the same antenna."""
    rho = _check_rho(rho)
    nodes = gcq_nodes(Q, rule)
    return craig_average(lambda th: correct_antenna_integrand(th, s, s_hat, rho, L), nodes)


def pair_moments(s: complex, s_hat: complex, L: int) -> MomentSet:
    """Mean vector and covariance of ``[gamma_re, gamma_im]``.

    ``gamma = sum_l b_l (a_{l,n} s - a_{l,n_hat} exp(-1j*phi_l) s_hat)``
    with the residual phases ``phi_l`` uniform modulo ``2pi``.
    """
    L = _check_L(L)
    sr, si = float(np.real(s)), float(np.imag(s))
    shat2 = abs(s_hat) ** 2
    mu = np.array([_MEAN_AB * L * sr, _MEAN_AB * L * si])
    v_rr = _VAR_AB * sr * sr * L + shat2 * L / 2.0
    v_ii = _VAR_AB * si * si * L + shat2 * L / 2.0
    v_ri = _VAR_AB * sr * si * L
    V = np.array([[v_rr, v_ri], [v_ri, v_ii]])
    return MomentSet(mu=mu, V=V, A=np.eye(2))


def _det2(a, b, c, d):
    return a * d - b * c


def mgf_quadratic_form(x, m: MomentSet):
    """MGF of ``z^T A z`` for ``z ~ N(mu, V)``:

    ``det(I - 2xAV)^{-1/2} exp(-mu^T (I - (I - 2xAV)^{-1}) V^{-1} mu / 2)``.

    With ``B = I - 2xAV`` the exponent matrix simplifies to
    ``-2x B^{-1} A``, which is what is evaluated (no cancellation for small
    ``|x|``). Accepts scalar or array ``x``.
    """
    x = np.asarray(x, dtype=float)
    (v11, v12), (v21, v22) = m.V
    if _det2(v11, v12, v21, v22) <= 0.0:
        raise DomainError("covariance matrix V is singular or indefinite")
    AV = m.A @ m.V
    b11 = 1.0 - 2.0 * x * AV[0, 0]
    b12 = -2.0 * x * AV[0, 1]
    b21 = -2.0 * x * AV[1, 0]
    b22 = 1.0 - 2.0 * x * AV[1, 1]
    det = _det2(b11, b12, b21, b22)
    # both eigenvalues of B must be positive: det > 0 and trace > 0
    if np.any(det <= 0.0) or np.any(b11 + b22 <= 0.0):
        raise DomainError(f"I - 2xAV is not positive definite (x={x})")
    # adjugate inverse of B, then B^{-1} A mu
    Amu = m.A @ m.mu
    w1 = (b22 * Amu[0] - b12 * Amu[1]) / det
    w2 = (-b21 * Amu[0] + b11 * Amu[1]) / det
    quad = m.mu[0] * w1 + m.mu[1] * w2
    out = np.exp(x * quad) / np.sqrt(det)
    return float(out) if out.ndim == 0 else out


def cross_antenna_integrand(theta, s: complex, s_hat: complex, rho: float, L: int):
    """Craig-form integrand of the UPEP when the antenna is wrong,
    ``MGF_Gamma(-rho / (4 sin^2 theta))``; equals 0 at ``theta = 0`` for
    ``rho > 0``."""
    theta = np.asarray(theta, dtype=float)
    if rho == 0.0:
        return np.ones_like(theta)
    m = pair_moments(s, s_hat, L)
    s2 = np.sin(theta) ** 2
    with np.errstate(divide="ignore"):
        x = np.where(s2 > 0.0, -rho / (4.0 * s2), -np.inf)
    finite = np.isfinite(x)
    out = np.zeros_like(theta)
    if np.any(finite):
        out[finite] = mgf_quadratic_form(x[finite], m)
    return out


@lru_cache(maxsize=4096)
def _upep_cross_cached(s: complex, s_hat: complex, rho: float, L: int, Q: int, rule: str) -> float:
    m = pair_moments(s, s_hat, L)
    nodes = gcq_nodes(Q, rule)
    x = -rho / (4.0 * np.sin(nodes.theta) ** 2)
    return craig_average(lambda _th: mgf_quadratic_form(x, m), nodes)


def upep_cross_antenna(
    s: complex, s_hat: complex, rho: float, L: int, Q: int = DEFAULT_Q, rule: str = "fejer"
) -> float:
    """Average PEP between ``(n, s)`` and ``(n_hat, s_hat)``, ``n_hat != n``.

    Depends only on ``(s, s_hat, L, rho)``; results are memoized.
    """
    rho = _check_rho(rho)
    L = _check_L(L)
    gcq_nodes(Q, rule)  # validate before touching the cache
    return _upep_cross_cached(complex(s), complex(s_hat), rho, L, int(Q), rule)


def abep_union_bound(
    N_t: int, constellation: Constellation, L: int, rho: float, Q: int = DEFAULT_Q, rule: str = "fejer"
) -> float:
    """Union upper bound on the average bit error probability.

    Sums every ordered hypothesis pair's UPEP weighted by its Hamming
    distance and normalizes by ``N_t * M * log2(N_t * M)``. Pairs on the
    same antenna use the correct-antenna UPEP; identical hypotheses have
    zero weight and are skipped. The bound is exact for ``N_t = 2, M = 1``.
    """
    _log2_exact(N_t, "N_t")
    M = constellation.M
    size = N_t * M
    if size < 2:
        raise ParameterError("need at least two hypotheses (N_t * M >= 2)")
    rho = _check_rho(rho)
    pts = constellation.points
    same = np.zeros((M, M))
    cross = np.zeros((M, M))
    for i in range(M):
        for j in range(M):
            if i != j:
                same[i, j] = upep_correct_antenna(pts[i], pts[j], rho, L, Q, rule)
            if N_t > 1:
                cross[i, j] = upep_cross_antenna(pts[i], pts[j], rho, L, Q, rule)
    ham = hamming_table(N_t, constellation)
    total = 0.0
    for a in range(size):
        na, ma = divmod(a, M)
        for b in range(size):
            if a == b:
                continue
            nb, mb = divmod(b, M)
            pep = same[ma, mb] if na == nb else cross[ma, mb]
            total += pep * ham[a, b]
    return total / (size * math.log2(size))


@dataclass(frozen=True)
class AbepCurve:
    """Union-bound values on an SNR grid."""

    snr_db: tuple
    abep: tuple
    N_t: int
    M: int
    scheme: str
    L: int
    Q: int


def abep_curve(
    N_t: int, constellation: Constellation, L: int, snr_db: Sequence[float], Q: int = DEFAULT_Q
) -> AbepCurve:
    snr_db = tuple(float(v) for v in snr_db)
    values = tuple(abep_union_bound(N_t, constellation, L, 10.0 ** (v / 10.0), Q) for v in snr_db)
    return AbepCurve(snr_db, values, N_t, constellation.M, constellation.scheme.value, int(L), int(Q))
