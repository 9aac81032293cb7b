"""Planar electric field of straight line charges normal to the plane.

A filament of charge density ``lambda_e`` at ``r_f`` contributes
``lambda_e / (2 pi) * (r - r_f) / |r - r_f|**2``; the 2 pi makes the outward
flux through any loop that encloses it once equal to ``lambda_e``.

Every evaluator takes points of shape ``(2,)`` or ``(N, 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS_SING = 1e-9


class SingularPoint(ValueError):
    pass


@dataclass(frozen=True)
class Filament:
    x: float
    y: float
    lambda_e: float

    def __post_init__(self):
        for name in ("x", "y", "lambda_e"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"filament {name} must be finite")

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


def _as_points(point) -> tuple[np.ndarray, bool]:
    pts = np.asarray(point, dtype=float)
    single = pts.ndim == 1
    return np.atleast_2d(pts), single


@dataclass(frozen=True)
class LineChargeField:
    filaments: tuple[Filament, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "filaments", tuple(self.filaments))

    @classmethod
    def single(cls, lambda_e: float = 1.0, x: float = 0.0, y: float = 0.0) -> LineChargeField:
        return cls((Filament(x, y, lambda_e),))

    def _offsets(self, pts: np.ndarray):
        for f in self.filaments:
            d = pts - f.position
            r2 = np.einsum("ni,ni->n", d, d)
            if np.any(r2 < EPS_SING**2):
                raise SingularPoint(f"point within {EPS_SING} of filament at ({f.x}, {f.y})")
            yield f, d, r2

    def min_distance(self, point) -> float:
        pts, _ = _as_points(point)
        if not self.filaments:
            return math.inf
        return float(min(np.min(np.linalg.norm(pts - f.position, axis=1)) for f in self.filaments))


def eval_E(field, point) -> np.ndarray:
    """Field vector(s) (E1, E2) at ``point``."""
    if not isinstance(field, LineChargeField):
        return field.eval_E(point)
    pts, single = _as_points(point)
    out = np.zeros_like(pts)
    for f, d, r2 in field._offsets(pts):
        out += (f.lambda_e / (2 * math.pi)) * d / r2[:, None]
    return out[0] if single else out


def grad_E(field, point) -> np.ndarray:
    """Jacobian ``J[..., j, l] = d_j E_l``."""
    if not isinstance(field, LineChargeField):
        return field.grad_E(point)
    pts, single = _as_points(point)
    out = np.zeros((pts.shape[0], 2, 2))
    eye = np.eye(2)
    for f, d, r2 in field._offsets(pts):
        c = f.lambda_e / (2 * math.pi)
        out += c * (eye / r2[:, None, None] - 2 * d[:, :, None] * d[:, None, :] / (r2**2)[:, None, None])
    return out[0] if single else out


def f_tensor_0l(field, point) -> tuple:
    """Field-strength components (F^01, F^02), identified with (E1, E2)."""
    e = eval_E(field, point)
    return e[..., 0], e[..., 1]


@dataclass(frozen=True)
class LinearField:
    """Affine field E(x) = e0 + x @ jacobian, where jacobian[j, l] = d_j E_l.

    Has no physical source; exists as a fixture whose second derivatives vanish.
    """

    e0: tuple[float, float] = (0.0, 0.0)
    jacobian: tuple[tuple[float, float], tuple[float, float]] = ((1.0, 0.0), (0.0, -1.0))

    def eval_E(self, point) -> np.ndarray:
        pts, single = _as_points(point)
        out = np.asarray(self.e0, dtype=float) + pts @ np.asarray(self.jacobian, dtype=float)
        return out[0] if single else out

    def grad_E(self, point) -> np.ndarray:
        pts, single = _as_points(point)
        out = np.broadcast_to(np.asarray(self.jacobian, dtype=float), (pts.shape[0], 2, 2)).copy()
        return out[0] if single else out

    def min_distance(self, point) -> float:
        return math.inf
