"""Spin-1 Aharonov-Casher phase in commutative and non-commutative planes."""

from .ac_phase import (
    Circle,
    ParticleState,
    PhaseResult,
    Polygon,
    commutative_phase,
    ncps_correction,
    ncs_correction,
    total_phase,
    winding_number,
)
from .em_fields import Filament, LineChargeField
from .kemmer_algebra import build_betas, verify_beta_algebra, xi, xi3_spectrum
from .moyal_deformation import NCParams

__version__ = "0.1.0"
