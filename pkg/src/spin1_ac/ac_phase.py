"""Aharonov-Casher phase of a neutral spin-1 particle around line charges.

The spin operator xi_3 enters through its eigenvalue ``s3`` (one spin sector at
a time). The dipole vector is ``mu = 2 mu_m s3 z_hat`` so that
``mu x E = 2 mu_m s3 (-E2, E1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import em_fields
from .em_fields import EPS_SING
from .moyal_deformation import NCParams
from .quadrature import DEFAULT_MAX_PANELS, DEFAULT_REL_TOL, integrate


class SingularPath(ValueError):
    pass


class PointOnLoop(ValueError):
    pass


# loops

@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    radius: float
    winding: int = 1

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")
        if self.winding == 0 or int(self.winding) != self.winding:
            raise ValueError("circle winding must be a non-zero integer")

    @property
    def orientation(self) -> int:
        return 1 if self.winding > 0 else -1

    def segments(self):
        c = np.array([self.cx, self.cy])
        r, s = self.radius, self.orientation

        def point(t):
            return c + r * np.column_stack([np.cos(s * t), np.sin(s * t)])

        def tangent(t):
            return r * s * np.column_stack([-np.sin(s * t), np.cos(s * t)])

        turns = abs(self.winding)
        yield point, tangent, 0.0, 2 * math.pi * turns, 16 * turns

    def clearance(self, q) -> float:
        return abs(math.hypot(q[0] - self.cx, q[1] - self.cy) - self.radius)

    def signed_area(self) -> float:
        """(1/2) loop integral of (x dy - y dx)."""
        return self.winding * math.pi * self.radius**2


@dataclass(frozen=True)
class Polygon:
    vertices: tuple

    def __post_init__(self):
        v = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(v) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for i in range(len(v)):
            if v[i] == v[(i + 1) % len(v)]:
                raise ValueError(f"repeated consecutive vertex at index {i}")
        object.__setattr__(self, "vertices", v)

    @property
    def orientation(self) -> int:
        return 1 if self.signed_area() >= 0 else -1

    def edges(self):
        v = np.asarray(self.vertices)
        return v, np.roll(v, -1, axis=0)

    def segments(self):
        for a, b in zip(*self.edges()):
            d = b - a
            yield (lambda t, a=a, d=d: a + t[:, None] * d), (lambda t, d=d: np.broadcast_to(d, (t.size, 2))), 0.0, 1.0, 4

    def clearance(self, q) -> float:
        a, b = self.edges()
        d = b - a
        t = np.clip(np.einsum("ni,ni->n", np.asarray(q) - a, d) / np.einsum("ni,ni->n", d, d), 0.0, 1.0)
        return float(np.min(np.linalg.norm(a + t[:, None] * d - q, axis=1)))

    def signed_area(self) -> float:
        a, b = self.edges()
        return 0.5 * math.fsum(a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1])


Loop = Union[Circle, Polygon]


def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 0.0), aspect: float = 1.0) -> Polygon:
    """Counter-clockwise n-gon inscribed in a circle (or an ellipse when aspect != 1)."""
    t = 2 * math.pi * np.arange(n) / n
    return Polygon(tuple(zip(center[0] + radius * np.cos(t), center[1] + aspect * radius * np.sin(t))))


def winding_number(loop: Loop, point, tol: float = EPS_SING) -> int:
    """Signed number of turns the loop makes around ``point``."""
    q = np.asarray(point, dtype=float)
    if loop.clearance(q) < tol:
        raise PointOnLoop(f"point {tuple(q)} lies on the loop")
    if isinstance(loop, Circle):
        inside = math.hypot(q[0] - loop.cx, q[1] - loop.cy) < loop.radius
        return loop.winding if inside else 0
    a, b = loop.edges()
    da, db = a - q, b - q
    ang = np.arctan2(da[:, 0] * db[:, 1] - da[:, 1] * db[:, 0], np.einsum("ni,ni->n", da, db))
    return int(round(math.fsum(ang) / (2 * math.pi)))


def check_clearance(loop: Loop, field) -> None:
    for f in getattr(field, "filaments", ()):
        if loop.clearance(f.position) < EPS_SING:
            raise SingularPath(f"loop passes within {EPS_SING} of the filament at ({f.x}, {f.y})")


# particle / results

@dataclass(frozen=True)
class ParticleState:
    m: float = 1.0
    mu_m: float = 0.5
    s3: int = 1
    k: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("mass must be positive")
        if self.s3 not in (-1, 0, 1):
            raise ValueError(f"s3 must be -1, 0 or 1, got {self.s3}")
        object.__setattr__(self, "k", tuple(float(c) for c in self.k))


@dataclass(frozen=True)
class PhaseResult:
    phi_ac: float
    delta_ncs: float
    delta_ncps: float
    total: float
    quadrature_error_estimate: float

    FIELDS = ("phi_ac", "delta_ncs", "delta_ncps", "total", "error_estimate")

    def as_dict(self) -> dict:
        return dict(zip(self.FIELDS, (self.phi_ac, self.delta_ncs, self.delta_ncps,
                                      self.total, self.quadrature_error_estimate)))


@dataclass(frozen=True)
class QuadSettings:
    rel_tol: float = DEFAULT_REL_TOL
    max_panels: int = DEFAULT_MAX_PANELS


def contour_integral(loop: Loop, integrand, quad: QuadSettings = QuadSettings()):
    """Loop integral of ``integrand(x, dx)`` where dx is the tangent; returns (value, error)."""
    values, errors = [], []
    for point, tangent, t0, t1, n0 in loop.segments():
        res = integrate(lambda t: integrand(point(t), tangent(t)), t0, t1,
                        quad.rel_tol, quad.max_panels, n0)
        values.append(res.value)
        errors.append(res.error)
    return math.fsum(values), math.fsum(errors)


# integrands

def ac_vector_potential(field, x, mu_m: float) -> np.ndarray:
    """A' = (-2 mu_m F^02, 2 mu_m F^01)."""
    f01, f02 = em_fields.f_tensor_0l(field, x)
    return np.stack([-2 * mu_m * f02, 2 * mu_m * f01], axis=-1)


def flux_integrand(field):
    """eps^{lk} E_l dx_k = E1 dx2 - E2 dx1."""
    def g(x, dx):
        e = em_fields.eval_E(field, x)
        return e[:, 0] * dx[:, 1] - e[:, 1] * dx[:, 0]
    return g


def nc_integrand(field, k, mu_m: float, s3: int):
    """eps^{ij} eps^{lk} [k_i - (mu x E)_i] d_j E_l dx_k, with E at the loop point."""
    k = np.asarray(k, dtype=float)

    def g(x, dx):
        e = em_fields.eval_E(field, x)
        jac = em_fields.grad_E(field, x)  # jac[:, j, l] = d_j E_l
        # P = k - mu x E = k + 2 mu_m s3 (E2, -E1)
        p1 = k[0] + 2 * mu_m * s3 * e[:, 1]
        p2 = k[1] - 2 * mu_m * s3 * e[:, 0]
        q = p1[:, None] * jac[:, 1, :] - p2[:, None] * jac[:, 0, :]
        return q[:, 0] * dx[:, 1] - q[:, 1] * dx[:, 0]
    return g


# phases

def commutative_phase(loop: Loop, field, particle: ParticleState,
                      quad: QuadSettings = QuadSettings(), with_error: bool = False):
    """2 mu_m s3 times the loop integral of (E1 dx2 - E2 dx1)."""
    check_clearance(loop, field)
    if particle.s3 == 0:
        return (0.0, 0.0) if with_error else 0.0
    val, err = contour_integral(loop, flux_integrand(field), quad)
    c = 2 * particle.mu_m * particle.s3
    return (c * val, abs(c) * err) if with_error else c * val


def _nc_loop_integral(loop, field, k, particle, quad):
    return contour_integral(loop, nc_integrand(field, k, particle.mu_m, particle.s3), quad)


def ncs_correction(loop: Loop, field, particle: ParticleState, theta: float,
                   quad: QuadSettings = QuadSettings(), with_error: bool = False):
    """Space-space non-commutative correction, mu_m s3 theta times the nc loop integral."""
    check_clearance(loop, field)
    if theta == 0.0 or particle.s3 == 0:
        return (0.0, 0.0) if with_error else 0.0
    val, err = _nc_loop_integral(loop, field, particle.k, particle, quad)
    c = particle.mu_m * particle.s3 * theta
    return (c * val, abs(c) * err) if with_error else c * val


def area_term(loop: Loop, nc: NCParams) -> float:
    """(theta_bar / 2 alpha^2) times the loop integral of (x2 dx1 - x1 dx2)."""
    if nc.theta_bar == 0.0:
        return 0.0
    return -nc.theta_bar * loop.signed_area() / nc.alpha**2


def ncps_correction(loop: Loop, field, particle: ParticleState, nc: NCParams,
                    quad: QuadSettings = QuadSettings(), with_error: bool = False):
    """Momentum-momentum correction: area term plus the (1/alpha^2 - 1) weighted nc integral."""
    check_clearance(loop, field)
    if nc.alpha == 1.0:
        return (0.0, 0.0) if with_error else 0.0
    area = area_term(loop, nc)
    val, err = 0.0, 0.0
    weight = (1.0 / nc.alpha**2 - 1.0) * particle.mu_m * particle.s3 * nc.theta
    if weight != 0.0:
        k_prime = tuple(c / nc.alpha for c in particle.k)
        val, err = _nc_loop_integral(loop, field, k_prime, particle, quad)
    out = area + weight * val
    return (out, abs(weight) * err) if with_error else out


def total_phase(loop: Loop, field, particle: ParticleState, nc: NCParams,
                quad: QuadSettings = QuadSettings()) -> PhaseResult:
    phi, e1 = commutative_phase(loop, field, particle, quad, with_error=True)
    ncs, e2 = ncs_correction(loop, field, particle, nc.theta, quad, with_error=True)
    ncps, e3 = ncps_correction(loop, field, particle, nc, quad, with_error=True)
    return PhaseResult(phi, ncs, ncps, phi + ncs + ncps, e1 + e2 + e3)


def gauss_law_phase(field, particle: ParticleState, windings: Sequence[int] | None = None,
                    loop: Loop | None = None) -> float:
    """Closed-form 2 mu_m s3 sum_f w_f lambda_f; winding per filament from ``loop`` if given."""
    if windings is None:
        windings = [winding_number(loop, f.position) for f in field.filaments]
    return 2 * particle.mu_m * particle.s3 * math.fsum(
        w * f.lambda_e for w, f in zip(windings, field.filaments)
    )
