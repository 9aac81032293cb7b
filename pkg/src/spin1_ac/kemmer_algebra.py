"""Kemmer beta-matrices for spin 1 and the identities the phase factorisation needs.

The ten components are ordered as three 3-vectors followed by one scalar slot.
All algebra is exact (see :mod:`spin1_ac.gaussian`); floating point is only
used to extract eigenvalues.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .gaussian import GaussianMatrix, OddEntryError, anticommutator, commutator, dump_matrix

METRIC = (1, -1, -1, -1)
SPECTRUM_TOL = 1e-10


class OddCommutatorEntry(ArithmeticError):
    pass


class OddContraction(ArithmeticError):
    pass


class SpectrumOutOfRange(ValueError):
    pass


# 3x3 building blocks

def _spin1_blocks() -> list[np.ndarray]:
    # S^j without the overall factor i; S^j = i * s[j]
    s1 = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]])
    s2 = np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]])
    s3 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]])
    return [s1, s2, s3]


def _block(pieces: dict) -> np.ndarray:
    out = np.zeros((10, 10), dtype=np.int64)
    offsets = (0, 3, 6, 9)
    for (bi, bj), blk in pieces.items():
        blk = np.atleast_2d(blk)
        r0, c0 = offsets[bi], offsets[bj]
        out[r0:r0 + blk.shape[0], c0:c0 + blk.shape[1]] = blk
    return out


@dataclass(frozen=True)
class KemmerRep:
    beta_upper: tuple[GaussianMatrix, ...]
    metric: tuple[int, ...] = METRIC

    def __post_init__(self):
        if len(self.beta_upper) != 4 or any(b.dim != 10 for b in self.beta_upper):
            raise ValueError("a Kemmer representation needs four 10x10 matrices")

    def lower(self, nu: int) -> GaussianMatrix:
        return self.beta_upper[nu] * self.metric[nu]

    def with_beta(self, nu: int, matrix: GaussianMatrix) -> KemmerRep:
        betas = list(self.beta_upper)
        betas[nu] = matrix
        return KemmerRep(tuple(betas), self.metric)


def build_betas() -> KemmerRep:
    """The explicit 10x10 beta-matrices, block by block."""
    eye = np.eye(3, dtype=np.int64)
    beta0 = _block({(0, 2): eye, (2, 0): eye})
    betas = [GaussianMatrix(beta0, np.zeros_like(beta0))]
    for j, s in enumerate(_spin1_blocks()):
        # real part: none; S^j = i s, so +/-S^j blocks are purely imaginary
        k_col = np.zeros((3, 1), dtype=np.int64)
        k_col[j, 0] = -1  # -i K^{j dagger}
        k_row = k_col.T  # -i K^j
        im = _block({(1, 2): s, (2, 1): -s, (0, 3): k_col, (3, 0): k_row})
        betas.append(GaussianMatrix(np.zeros_like(im), im))
    return KemmerRep(tuple(betas))


@dataclass
class AlgebraReport:
    violations: list[tuple[int, int, int]] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_beta_algebra(rep: KemmerRep) -> AlgebraReport:
    """Check b_n b_l b_r + b_r b_l b_n == b_n g_lr + b_r g_nl for all 64 lower-index triples."""
    g = rep.metric
    low = [rep.lower(n) for n in range(4)]
    report = AlgebraReport()
    for n, l, r in itertools.product(range(4), repeat=3):
        lhs = low[n] @ low[l] @ low[r] + low[r] @ low[l] @ low[n]
        rhs = (low[n] * (g[l] if l == r else 0)) + (low[r] * (g[n] if n == l else 0))
        if lhs != rhs:
            report.violations.append((n, l, r))
        report.checked += 1
    return report


def spin_tensor(rep: KemmerRep, require_integral: bool = False) -> tuple[tuple[GaussianMatrix, ...], ...]:
    """S_{lr} = (b_l b_r - b_r b_l) / 2 with lower indices.

    For the standard representation the commutators have odd entries, so the
    components live in (1/2)Z[i]. ``require_integral=True`` insists on
    Gaussian-integer output and raises :class:`OddCommutatorEntry` otherwise.
    """
    rows = []
    for l in range(4):
        row = []
        for r in range(4):
            c = commutator(rep.lower(l), rep.lower(r))
            if require_integral:
                try:
                    row.append(c.halve_integral())
                except OddEntryError as exc:
                    raise OddCommutatorEntry(f"S_{l}{r}: {exc}") from None
            else:
                row.append(c.over(2))
        rows.append(tuple(row))
    return tuple(rows)


def levi_civita(*idx: int) -> int:
    """Totally antisymmetric symbol with eps_{0123} = +1."""
    if len(set(idx)) != len(idx):
        return 0
    sign = 1
    p = list(idx)
    for i in range(len(p)):
        for k in range(i + 1, len(p)):
            if p[i] > p[k]:
                sign = -sign
    return sign


def xi(rep: KemmerRep) -> tuple[GaussianMatrix, ...]:
    """xi_nu = (i/2) eps_{nu l r s} b^l b^r b^s, summed over all index orderings."""
    out = []
    for nu in range(4):
        total = GaussianMatrix.zeros(10)
        for lam, rho, sig in itertools.permutations([k for k in range(4) if k != nu]):
            e = levi_civita(nu, lam, rho, sig)
            b = rep.beta_upper
            total = total + (b[lam] @ b[rho] @ b[sig]) * e
        try:
            out.append((total * 1j).halve_integral())
        except OddEntryError:
            raise OddContraction(f"xi_{nu} is not a Gaussian-integer matrix") from None
    return tuple(out)


@dataclass(frozen=True)
class SpinOperators:
    spin_tensor: tuple[tuple[GaussianMatrix, ...], ...]
    xi: tuple[GaussianMatrix, ...]


def spin_operators(rep: KemmerRep) -> SpinOperators:
    return SpinOperators(spin_tensor(rep), xi(rep))


@dataclass(frozen=True)
class CommutatorEntry:
    nu: int
    commutator: GaussianMatrix
    norm: float

    @property
    def vanishes(self) -> bool:
        return self.commutator.is_zero()


def commutator_condition(rep: KemmerRep) -> list[CommutatorEntry]:
    """[xi_3, beta^nu] for each nu, exactly."""
    xi3 = xi(rep)[3]
    out = []
    for nu, b in enumerate(rep.beta_upper):
        c = commutator(xi3, b)
        out.append(CommutatorEntry(nu, c, c.frobenius_norm()))
    return out


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]
    multiplicities: dict

    @property
    def max_abs(self) -> float:
        return max(abs(v) for v in self.eigenvalues)


def sector_spectrum(m: GaussianMatrix, allowed, tol: float = SPECTRUM_TOL) -> Spectrum:
    """Eigenvalues of ``m`` snapped onto the ``allowed`` set of real values."""
    a = m.to_complex()
    if m == m.H:
        ev = np.linalg.eigvalsh(a)
    else:
        ev = np.linalg.eigvals(a)
        if np.max(np.abs(ev.imag)) > tol:
            raise SpectrumOutOfRange(f"complex eigenvalues found: {ev}")
        ev = np.sort(ev.real)
    allowed = sorted(allowed)
    counts = Counter()
    for v in ev:
        nearest = min(allowed, key=lambda a_: abs(v - a_))
        if abs(v - nearest) > tol:
            raise SpectrumOutOfRange(f"eigenvalue {v!r} is not within {tol} of {allowed}")
        counts[nearest] += 1
    return Spectrum(tuple(float(v) for v in ev), {a_: counts.get(a_, 0) for a_ in allowed})


def xi3_spectrum(rep: KemmerRep, tol: float = SPECTRUM_TOL) -> Spectrum:
    return sector_spectrum(xi(rep)[3], (-1, 0, 1), tol)


@dataclass(frozen=True)
class DiracRep:
    gamma: tuple[GaussianMatrix, ...]
    sigma12: GaussianMatrix
    half_g0_sigma12: GaussianMatrix
    spectrum: Spectrum

    def clifford_violations(self, metric=METRIC) -> list[tuple[int, int]]:
        bad = []
        for mu, nu in itertools.product(range(4), repeat=2):
            expected = GaussianMatrix.identity(4) * (2 * metric[mu] if mu == nu else 0)
            if anticommutator(self.gamma[mu], self.gamma[nu]) != expected:
                bad.append((mu, nu))
        return bad


def dirac_gammas() -> tuple[GaussianMatrix, ...]:
    """Standard Dirac basis: gamma^0 diagonal, gamma^k off-diagonal in Pauli blocks."""
    pauli = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    z = np.zeros((2, 2))
    g0 = np.block([[np.eye(2), z], [z, -np.eye(2)]])
    gammas = [GaussianMatrix.from_complex(g0)]
    for s in pauli:
        gammas.append(GaussianMatrix.from_complex(np.block([[z, s], [-s, z]])))
    return tuple(gammas)


def spin_half_counterpart(tol: float = SPECTRUM_TOL) -> DiracRep:
    """Dirac-side operator (1/2) gamma^0 sigma^{12} with sigma^{mn} = (i/2)[g^m, g^n]."""
    g = dirac_gammas()
    sigma12 = (commutator(g[1], g[2]) * 1j).over(2)
    half = (g[0] @ sigma12).over(2)
    return DiracRep(g, sigma12, half, sector_spectrum(half, (-0.5, 0.5), tol))


def spin_ratio(rep: KemmerRep) -> float:
    """Largest |eigenvalue| of xi_3 over that of the spin-1/2 operator."""
    return xi3_spectrum(rep).max_abs / spin_half_counterpart().spectrum.max_abs


def dump_rep(rep: KemmerRep) -> str:
    """Plain-text dump, one matrix per block, entries written as ``a+bi``."""
    parts = [f"# metric {' '.join(str(g) for g in rep.metric)}"]
    for nu, b in enumerate(rep.beta_upper):
        parts.append(f"[beta^{nu}]")
        parts.append(dump_matrix(b))
    return "\n".join(parts) + "\n"


def perturbed_betas(nu: int = 1, row: int = 0, col: int = 9) -> KemmerRep:
    """Standard representation with a single entry of beta^nu set to zero (test hook)."""
    rep = build_betas()
    b = rep.beta_upper[nu]
    re, im = b.re.copy(), b.im.copy()
    re[row, col] = 0
    im[row, col] = 0
    return rep.with_beta(nu, GaussianMatrix(re, im, b.den))
