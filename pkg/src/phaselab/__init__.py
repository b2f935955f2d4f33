"""Numerical laboratory for wave packet decompositions of L^2(R^d),
adapted function space norms, and property-based verification."""

from .grid import Field, Grid, fourier_forward, fourier_inverse, lp_norm
from .spectral import (
    OperatorSpec,
    ResourceGuardError,
    SigmaGrid,
    SpectralDecomp,
    Window,
    eigendecompose,
    make_window,
)
from .critical import (
    CriticalPartition,
    Potential,
    build_partition,
    critical_radius,
    critical_radius_field,
    reverse_holder_constant,
)
from .packets import (
    Channel,
    ChannelIndex,
    CriticalFrame,
    DirectionalFrame,
    GaussHermiteFrame,
    LittlewoodPaleyFrame,
    ModulationFrame,
    OperatorFrame,
    PhaseSpaceField,
)
from .norms import NormSpec, phase_norm, s_p, sobolev_norm
from .verify import Ensemble, SweepReport
from .report import write_report

__version__ = "0.1.0"

__all__ = [
    "Field", "Grid", "fourier_forward", "fourier_inverse", "lp_norm",
    "OperatorSpec", "ResourceGuardError", "SigmaGrid", "SpectralDecomp",
    "Window", "eigendecompose", "make_window",
    "CriticalPartition", "Potential", "build_partition", "critical_radius",
    "critical_radius_field", "reverse_holder_constant",
    "Channel", "ChannelIndex", "CriticalFrame", "DirectionalFrame",
    "GaussHermiteFrame", "LittlewoodPaleyFrame", "ModulationFrame",
    "OperatorFrame", "PhaseSpaceField",
    "NormSpec", "phase_norm", "s_p", "sobolev_norm",
    "Ensemble", "SweepReport", "write_report",
    "__version__",
]
