"""Numerical kernels: Gaussian Q-function, Chebyshev-node quadrature on the
Craig interval, and an adaptive Simpson integrator used as a reference.

Craig-form averages have the shape ``(1/pi) * int_0^{pi/2} I(theta) dtheta``.
They are evaluated by mapping ``theta = pi*w/4 + pi/4`` onto ``w in [-1, 1]``
and summing over the Chebyshev nodes ``w_q = cos((2q-1)pi/(2Q))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfc

from .errors import AccuracyError, ParameterError

__all__ = [
    "GcqNodes",
    "q_function",
    "gcq_nodes",
    "craig_average",
    "integrate_reference",
]

_SQRT2 = math.sqrt(2.0)

RULES = ("fejer", "chebyshev")


def q_function(x):
    """Gaussian tail probability ``Q(x) = P[N(0, 1) > x]``.

    Accepts scalars or arrays; computed as ``erfc(x / sqrt(2)) / 2``, which
    keeps full relative accuracy deep in the upper tail.
    """
    out = 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GcqNodes:
    """Chebyshev nodes on ``[-1, 1]`` with their Craig-interval images.

    Attributes
    ----------
    Q : int
        Number of nodes.
    nodes : ndarray
        ``w_q = cos((2q-1)pi/(2Q))`` for ``q = 1..Q``, strictly decreasing.
    theta : ndarray
        ``pi*w_q/4 + pi/4``, the matching angles in ``(0, pi/2)``.
    weights : ndarray
        Quadrature weights for ``int_{-1}^{1} g(w) dw``.
    rule : str
        ``"fejer"`` (interpolatory weights on the Chebyshev nodes, default)
        or ``"chebyshev"`` (classical ``(pi/Q) sqrt(1 - w_q^2)`` weights).
    """

    Q: int
    nodes: np.ndarray
    theta: np.ndarray
    weights: np.ndarray
    rule: str = "fejer"


def gcq_nodes(Q: int, rule: str = "fejer") -> GcqNodes:
    """Build the ``Q``-point Chebyshev rule for the Craig interval.

    Both rules share the nodes ``cos((2q-1)pi/(2Q))``. The Fejer weights make
    the rule exact for polynomials of degree ``Q-1`` in ``w`` and converge
    geometrically for the analytic integrands used here. The classical
    Gauss-Chebyshev weights carry the ``sqrt(1 - w^2)`` factor that undoes
    the Chebyshev weight function; they converge only as ``O(Q^-2)``.
    """
    if isinstance(Q, bool) or int(Q) != Q or Q < 1:
        raise ParameterError(f"Q must be a positive integer, got {Q!r}")
    if rule not in RULES:
        raise ParameterError(f"unknown quadrature rule {rule!r}; choose from {RULES}")
    Q = int(Q)
    t = (2.0 * np.arange(1, Q + 1) - 1.0) * math.pi / (2.0 * Q)
    nodes = np.cos(t)
    if rule == "fejer":
        j = np.arange(1, Q // 2 + 1)
        corr = np.cos(2.0 * np.outer(t, j)) / (4.0 * j**2 - 1.0)
        weights = (2.0 / Q) * (1.0 - 2.0 * corr.sum(axis=1))
    else:
        weights = (math.pi / Q) * np.sqrt(1.0 - nodes**2)
    theta = math.pi * nodes / 4.0 + math.pi / 4.0
    for arr in (nodes, theta, weights):
        arr.setflags(write=False)
    return GcqNodes(Q=Q, nodes=nodes, theta=theta, weights=weights, rule=rule)


def craig_average(integrand: Callable[[np.ndarray], np.ndarray], nodes: GcqNodes) -> float:
    """Approximate ``(1/pi) * int_0^{pi/2} integrand(theta) dtheta``.

    ``integrand`` must accept an array of angles. With ``dtheta = (pi/4) dw``
    the prefactor collapses to ``1/4``.
    """
    values = np.asarray(integrand(nodes.theta), dtype=float)
    return float(0.25 * np.dot(nodes.weights, values))


def _simpson(fa, fm, fb, a, b):
    return (b - a) * (fa + 4.0 * fm + fb) / 6.0


def integrate_reference(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    rel_tol: float = 0.0,
    max_depth: int = 50,
    panels: int = 16,
) -> float:
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]``.

    The interval is first cut into ``panels`` equal pieces, each refined by
    bisection until the Richardson-corrected local error estimate is below
    its share of the tolerance. The tolerance is absolute, or
    ``rel_tol * |coarse estimate|`` when that is larger, which makes the
    routine usable for integrals that are many orders of magnitude below 1.

    Raises
    ------
    AccuracyError
        If some subinterval hits ``max_depth`` before converging. The best
        estimate is attached to the exception.
    """
    if not tol >= 0.0 or not rel_tol >= 0.0 or (tol == 0.0 and rel_tol == 0.0):
        raise ParameterError("need tol > 0 or rel_tol > 0")
    if a == b:
        return 0.0
    edges = np.linspace(a, b, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    fe = [float(f(x)) for x in edges]
    fm = [float(f(x)) for x in mids]
    coarse = sum(
        _simpson(fe[i], fm[i], fe[i + 1], edges[i], edges[i + 1]) for i in range(panels)
    )
    target = max(tol, rel_tol * abs(coarse))

    total = 0.0
    converged = True
    # explicit stack of (a, b, fa, fm, fb, whole, eps, depth)
    stack = [
        (
            edges[i],
            edges[i + 1],
            fe[i],
            fm[i],
            fe[i + 1],
            _simpson(fe[i], fm[i], fe[i + 1], edges[i], edges[i + 1]),
            target / panels,
            0,
        )
        for i in range(panels)
    ]
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = float(f(lm))
        frm = float(f(rm))
        left = _simpson(flo, flm, fmid, lo, mid)
        right = _simpson(fmid, frm, fhi, mid, hi)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        elif depth >= max_depth:
            converged = False
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
    if not converged:
        raise AccuracyError(
            f"adaptive Simpson did not reach tolerance {target:g} within depth {max_depth}",
            total,
        )
    return total
