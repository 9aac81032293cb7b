"""Adaptive composite Gauss-Legendre quadrature on an interval.

Each panel is integrated with a 15-point rule and compared against the sum of
its two halves; panels whose discrepancy exceeds their share of the tolerance
are bisected. The accepted (refined) values are summed with ``math.fsum`` in
panel order, so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NODES, WEIGHTS = np.polynomial.legendre.leggauss(15)
DEFAULT_REL_TOL = 1e-10
DEFAULT_MAX_PANELS = 1_000_000


class QuadratureNoConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int
    l1: float


def _gauss(f, lo: np.ndarray, hi: np.ndarray):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = mid[:, None] + half[:, None] * NODES[None, :]
    y = np.asarray(f(t.ravel()), dtype=float).reshape(t.shape)
    return half * (y @ WEIGHTS), half * (np.abs(y) @ WEIGHTS)


def integrate(f, a: float, b: float, rel_tol: float = DEFAULT_REL_TOL,
              max_panels: int = DEFAULT_MAX_PANELS, initial_panels: int = 8) -> QuadResult:
    """Integrate the vectorised function ``f`` over [a, b].

    The tolerance is relative to the L1 norm of the integrand, which keeps the
    stopping rule meaningful when the signed integral cancels to zero.
    """
    if b == a:
        return QuadResult(0.0, 0.0, 0, 0.0)
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    coarse, coarse_abs = _gauss(f, lo, hi)
    length = abs(b - a)

    done_lo, done_val, done_err, done_abs = [], [], [], []
    total_panels = initial_panels
    while lo.size:
        mid = 0.5 * (lo + hi)
        left, left_abs = _gauss(f, lo, mid)
        right, right_abs = _gauss(f, mid, hi)
        fine = left + right
        err = np.abs(fine - coarse)

        l1 = math.fsum(done_abs) + float(np.sum(left_abs + right_abs))
        tol = rel_tol * max(l1, 1e-300)
        ok = err <= tol * np.abs(hi - lo) / length
        done_lo.extend(lo[ok])
        done_val.extend(fine[ok])
        done_err.extend(err[ok])
        done_abs.extend((left_abs + right_abs)[ok])

        bad = ~ok
        if not bad.any():
            break
        total_panels += int(bad.sum())
        if total_panels > max_panels:
            raise QuadratureNoConvergence(
                f"tolerance {rel_tol:g} not reached within {max_panels} panels"
            )
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])
        coarse = np.concatenate([left[bad], right[bad]])

    order = np.argsort(np.asarray(done_lo), kind="stable")
    vals = np.asarray(done_val)[order]
    return QuadResult(
        math.fsum(vals),
        math.fsum(done_err),
        len(done_lo),
        math.fsum(done_abs),
    )
