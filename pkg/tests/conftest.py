import itertools
import sys
import json
from pathlib import Path

import numpy as np
import pytest

from spin1_ac.ac_phase import ParticleState
from spin1_ac.em_fields import LineChargeField
from spin1_ac.kemmer_algebra import build_betas

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def reference_betas_complex():
    """Float-complex beta^nu assembled entry by entry from the printed block layout.

    Independent of the library's exact construction; used as an oracle.
    """
    O = np.zeros((3, 3))
    o = np.zeros((1, 3))
    I = np.eye(3)
    S = [
        1j * np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]]),
        1j * np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]]),
        1j * np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
    ]
    K = [np.array([[1, 0, 0]]), np.array([[0, 1, 0]]), np.array([[0, 0, 1]])]
    b0 = np.block([[O, O, I, o.T], [O, O, O, o.T], [I, O, O, o.T], [o, o, o, np.zeros((1, 1))]])
    out = [b0.astype(complex)]
    for j in range(3):
        out.append(np.block([
            [O, O, O, -1j * K[j].T],
            [O, O, S[j], o.T],
            [O, -S[j], O, o.T],
            [-1j * K[j], o, o, np.zeros((1, 1))],
        ]))
    return out


def brute_force_violations(betas):
    low = [METRIC[n, n] * betas[n] for n in range(4)]
    bad = []
    for n, l, r in itertools.product(range(4), repeat=3):
        lhs = low[n] @ low[l] @ low[r] + low[r] @ low[l] @ low[n]
        rhs = low[n] * METRIC[l, r] + low[r] * METRIC[n, l]
        if not np.allclose(lhs, rhs, atol=0, rtol=0):
            bad.append((n, l, r))
    return bad


@pytest.fixture(scope="session")
def rep():
    return build_betas()


@pytest.fixture
def unit_filament():
    return LineChargeField.single(1.0)


@pytest.fixture
def particle():
    return ParticleState(m=1.0, mu_m=0.5, s3=1, k=(1.0, 0.0))


def base_config(**overrides):
    cfg = {
        "schema": 1,
        "filaments": [{"x": 0.0, "y": 0.0, "lambda_e": 1.0}],
        "loop": {"type": "circle", "cx": 0.0, "cy": 0.0, "r": 1.0, "winding": 1},
        "particle": {"m": 1.0, "mu_m": 0.5, "s3": 1, "kx": 1.0, "ky": 0.5},
        "nc": {"theta": 0.0, "alpha": 1.0},
    }
    cfg.update(overrides)
    return cfg


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="run.json"):
        path = Path(tmp_path) / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return _write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)
