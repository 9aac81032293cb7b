"""First-order Moyal machinery in the plane: star product, Bopp shifts, field shift.

Conventions: ``Theta_ij = theta * eps_ij`` and ``ThetaBar_ij = theta_bar * eps_ij``
with ``eps_12 = +1``. Only terms linear in the deformation are kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import em_fields

EPS2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
FD_STEP = 1e-6
NOISE_FLOOR = 1e-14


class InvalidNCParams(ValueError):
    pass


class DegenerateFit(ArithmeticError):
    def __init__(self, message, deltas=()):
        super().__init__(message)
        self.deltas = tuple(deltas)


class InsufficientGrid(ValueError):
    pass


@dataclass(frozen=True)
class NCParams:
    """Deformation parameters; ``theta_bar`` follows from theta*theta_bar = 4 a^2 (1 - a^2)."""

    theta: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise InvalidNCParams("theta must be finite")
        if not (0.0 < self.alpha <= 1.0):
            raise InvalidNCParams(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.theta == 0.0 and self.alpha != 1.0:
            raise InvalidNCParams("theta = 0 admits only alpha = 1 (theta * theta_bar would vanish)")

    @property
    def theta_bar(self) -> float:
        if self.alpha == 1.0:
            return 0.0
        return 4.0 * self.alpha**2 * (1.0 - self.alpha**2) / self.theta


def _points(x):
    pts = np.asarray(x, dtype=float)
    return np.atleast_2d(pts), pts.ndim == 1


@dataclass(frozen=True)
class PlaneFunction:
    """Scalar (real or complex) function on the plane with optional analytic partials.

    ``grad`` returns shape (N, 2); ``hess`` returns (N, 2, 2). Missing partials
    fall back to central differences with step ``FD_STEP`` and are flagged via
    :attr:`approximate`.
    """

    value: Callable[[np.ndarray], np.ndarray]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def approximate(self) -> bool:
        return self.grad is None

    def __call__(self, x):
        pts, single = _points(x)
        v = np.asarray(self.value(pts))
        return v[0] if single else v

    def gradient(self, x):
        pts, single = _points(x)
        if self.grad is not None:
            g = np.asarray(self.grad(pts))
        else:
            g = _fd_grad(self.value, pts)
        return g[0] if single else g

    def hessian(self, x):
        pts, single = _points(x)
        if self.hess is not None:
            h = np.asarray(self.hess(pts))
        else:
            h = _fd_grad(lambda q: self.gradient(q), pts)
            # rows of _fd_grad index the differentiation direction
            h = 0.5 * (h + np.swapaxes(h, -1, -2))
        return h[0] if single else h

    def check_partials(self, x, rtol: float = 1e-5) -> bool:
        """Cross-check the analytic gradient against central differences."""
        pts, _ = _points(x)
        a = self.gradient(pts)
        fd = _fd_grad(self.value, pts)
        scale = np.maximum(np.abs(a), np.abs(fd)).max()
        return bool(np.all(np.abs(a - fd) <= rtol * max(scale, 1e-300)))


def _fd_grad(f, pts, h=FD_STEP):
    cols = []
    for j in range(2):
        step = np.zeros(2)
        step[j] = h
        cols.append((np.asarray(f(pts + step)) - np.asarray(f(pts - step))) / (2 * h))
    # result[..., j, ...] = d_j f
    return np.stack(cols, axis=1)


def coordinate(i: int) -> PlaneFunction:
    """The coordinate function x_i (i = 0 or 1)."""
    e = np.zeros(2)
    e[i] = 1.0
    return PlaneFunction(
        lambda p: p[:, i],
        lambda p: np.broadcast_to(e, p.shape).copy(),
        lambda p: np.zeros((p.shape[0], 2, 2)),
    )


def plane_wave(p) -> PlaneFunction:
    """exp(i p . x), the momentum eigenfunction used as the star-product test state."""
    p = np.asarray(p, dtype=float)
    val = lambda x: np.exp(1j * (x @ p))  # noqa: E731
    return PlaneFunction(
        val,
        lambda x: 1j * val(x)[:, None] * p,
        lambda x: -val(x)[:, None, None] * np.outer(p, p),
    )


def field_components(field) -> tuple[PlaneFunction, PlaneFunction]:
    """(F^01, F^02) of a field as plane functions with analytic gradients."""
    return tuple(
        PlaneFunction(
            lambda x, l=l: em_fields.eval_E(field, x)[:, l],
            lambda x, l=l: em_fields.grad_E(field, x)[:, :, l],
        )
        for l in range(2)
    )


def star_first_order(f: PlaneFunction, g: PlaneFunction, theta: float) -> PlaneFunction:
    """f * g = f g + (i theta / 2) eps^{ij} d_i f d_j g, truncated at first order."""

    def value(x):
        base = f(x) * g(x)
        if theta == 0.0:
            return base
        gf, gg = f.gradient(x), g.gradient(x)
        return base + 0.5j * theta * (gf[:, 0] * gg[:, 1] - gf[:, 1] * gg[:, 0])

    grad = None
    if f.hess is not None and g.hess is not None and f.grad is not None and g.grad is not None:
        def grad(x):
            fv, gv = f(x), g(x)
            gf, gg = f.gradient(x), g.gradient(x)
            out = gf * gv[:, None] + fv[:, None] * gg
            if theta != 0.0:
                hf, hg = f.hessian(x), g.hessian(x)
                # d_k (d_1 f d_2 g - d_2 f d_1 g)
                d = hf[:, :, 0] * gg[:, 1, None] + gf[:, 0, None] * hg[:, :, 1] \
                    - hf[:, :, 1] * gg[:, 0, None] - gf[:, 1, None] * hg[:, :, 0]
                out = out + 0.5j * theta * d
            return out

    return PlaneFunction(value, grad)


def bopp_shift(x, p, theta: float) -> np.ndarray:
    """x_i -> x_i - (theta/2) eps_ij p_j."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    return x - 0.5 * theta * (p @ EPS2.T)


def generalized_bopp_shift(x, p, nc: NCParams) -> tuple[np.ndarray, np.ndarray]:
    """Phase-space shift with scaling alpha; returns (x_hat, p_hat)."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    a = nc.alpha
    x_hat = a * x - (nc.theta / (2 * a)) * (p @ EPS2.T)
    p_hat = a * p + (nc.theta_bar / (2 * a)) * (x @ EPS2.T)
    return x_hat, p_hat


def field_shift(F, p, nc: NCParams) -> tuple[PlaneFunction, PlaneFunction]:
    """F -> alpha F + (theta / 2 alpha) eps^{ij} p_i d_j F for each component of ``F``."""
    p = np.asarray(p, dtype=float)
    a, th = nc.alpha, nc.theta

    def shifted(comp: PlaneFunction) -> PlaneFunction:
        def value(x):
            v = a * comp(x)
            if th != 0.0:
                g = comp.gradient(x)
                v = v + (th / (2 * a)) * (p[0] * g[:, 1] - p[1] * g[:, 0])
            return v

        return PlaneFunction(value)

    return tuple(shifted(c) for c in F)


def sample_grid(field=None, n: int = 20, half_width: float = 2.0, exclusion: float = 0.25) -> np.ndarray:
    """Fixed n x n grid on [-w, w]^2 minus disks of radius ``exclusion`` around filaments."""
    g = np.linspace(-half_width, half_width, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    for f in getattr(field, "filaments", ()):
        pts = pts[np.linalg.norm(pts - f.position, axis=1) > exclusion]
    return pts


@dataclass(frozen=True)
class ConvergenceReport:
    thetas: tuple[float, ...]
    deltas: tuple[float, ...]
    first_order_gaps: tuple[float, ...]
    slope: float
    n_points: int

    @property
    def certified(self) -> bool:
        return self.slope >= 1.9


def star_shift_equivalence(field, p, theta_grid, points=None) -> ConvergenceReport:
    """Measure how fast the field-shift form approaches the star-product form.

    The test state is the plane wave psi = exp(i p.x). Acting on it, the star
    product resums to a translation, so ``(F * psi)(x) = F(bopp_shift(x, p, theta)) psi(x)``
    exactly; this is compared with the first-order shifted field ``F_hat psi``.
    The gap Delta(theta) should scale as theta**2. ``first_order_gaps`` records
    the difference between the truncated star product and ``F_hat psi``, which
    should sit at rounding level.
    """
    thetas = sorted(float(t) for t in theta_grid)
    if len(set(thetas)) < 2:
        raise InsufficientGrid("need at least two distinct theta values to fit an order")
    if thetas[0] <= 0:
        raise InsufficientGrid("theta values must be positive for a log-log fit")
    if math.log10(thetas[-1] / thetas[0]) < 2.0 - 1e-12:
        raise InsufficientGrid("theta grid must span at least two decades")
    if points is None:
        points = sample_grid(field)
    points = np.asarray(points, dtype=float)
    p = np.asarray(p, dtype=float)

    F = field_components(field)
    psi = plane_wave(p)
    psi_x = psi(points)
    deltas, gaps = [], []
    for th in thetas:
        nc = NCParams(th, 1.0)
        shifted_x = bopp_shift(points, p, th)
        star_exact = em_fields.eval_E(field, shifted_x) * psi_x[:, None]
        F_hat = field_shift(F, p, nc)
        shift_form = np.column_stack([c(points) for c in F_hat]) * psi_x[:, None]
        deltas.append(float(np.max(np.abs(star_exact - shift_form))))
        star1 = np.column_stack([star_first_order(c, psi, th)(points) for c in F])
        gaps.append(float(np.max(np.abs(star1 - shift_form))))

    d = np.asarray(deltas)
    keep = d > NOISE_FLOOR
    if keep.sum() < 2:
        raise DegenerateFit("Delta is below the noise floor for (almost) every theta", deltas)
    slope = float(np.polyfit(np.log(np.asarray(thetas)[keep]), np.log(d[keep]), 1)[0])
    return ConvergenceReport(tuple(thetas), tuple(deltas), tuple(gaps), slope, len(points))
