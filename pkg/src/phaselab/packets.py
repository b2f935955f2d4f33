"""The six wave packet analysis/synthesis pairs.

Each frame lifts a Field to a PhaseSpaceField (channels x position x
scale slots, with quadrature weights) and synthesizes back with the
exact weighted adjoint.  In discrete-normalized mode (the default) every
analysis symbol is divided by the square root of its discrete
resolution-of-identity sum, which makes synthesize(analyze(f)) = f and
the phase-space isometry machine-exact on the admissible range.  Raw
mode keeps the analytic window calibration; its reconstruction defect is
the sigma-quadrature error.

Two families need care beyond Fourier multipliers:

* the Gaussian (Ornstein-Uhlenbeck) frame truncates scales at
  rho(x) = min(1, 1/|x|).  The truncation is applied to the input before
  the calculus, and the complementary mass is carried by a positive
  semidefinite remainder operator and its square root, so the pair stays
  an exact decomposition of the identity on the range of the operator.
* the critical-cube frame localizes to a partition by critical cubes;
  each cube carries scales up to rho(x_j) plus a remainder block
  R_j = 1_Q tail(A) 1_Q whose square root lives on the cube exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .critical import CriticalPartition
from .grid import Field, Grid, fourier_forward, fourier_inverse
from .spectral import SigmaGrid, SpectralDecomp, Window, smooth_bump

__all__ = [
    "ChannelIndex",
    "Channel",
    "PhaseSpaceField",
    "RemainderOperator",
    "LittlewoodPaleyFrame",
    "ModulationFrame",
    "DirectionalFrame",
    "OperatorFrame",
    "GaussHermiteFrame",
    "CriticalFrame",
]

S_FLOOR = 1e-4  # below this coverage a spectral point is routed to completion


@dataclass(frozen=True)
class ChannelIndex:
    """Identity of one channel within a decomposition family."""

    variant: str  # scalar | completion | eta | omega | cube | cube_remainder | gauss_main | gauss_remainder
    eta: tuple | None = None
    omega: float | None = None
    cube: int | None = None
    sigma_band: tuple | None = None


@dataclass
class Channel:
    index: ChannelIndex
    values: np.ndarray = field(repr=False)  # (npoints, nslots)
    slot_sigmas: np.ndarray = field(repr=False)
    slot_weights: np.ndarray = field(repr=False)
    weight: float = 1.0

    def copy(self) -> "Channel":
        return Channel(
            self.index,
            self.values.copy(),
            self.slot_sigmas,
            self.slot_weights,
            self.weight,
        )


@dataclass
class PhaseSpaceField:
    """Discretized element of the phase-space function space."""

    family: str
    grid: Grid
    point_weights: np.ndarray = field(repr=False)
    channels: list = field(repr=False)

    def squared_mass(self) -> float:
        total = 0.0
        for ch in self.channels:
            total += ch.weight * float(
                np.sum(
                    ch.slot_weights[None, :]
                    * self.point_weights[:, None]
                    * np.abs(ch.values) ** 2
                )
            )
        return total

    def norm(self) -> float:
        return float(np.sqrt(self.squared_mass()))

    def inner(self, other: "PhaseSpaceField") -> complex:
        self._check_compatible(other)
        total = 0.0 + 0.0j
        for a, b in zip(self.channels, other.channels):
            total += a.weight * np.sum(
                a.slot_weights[None, :]
                * self.point_weights[:, None]
                * a.values
                * np.conj(b.values)
            )
        return complex(total)

    def _check_compatible(self, other: "PhaseSpaceField"):
        if self.family != other.family or len(self.channels) != len(other.channels):
            raise ValueError("phase-space fields from different families")

    def copy(self) -> "PhaseSpaceField":
        return PhaseSpaceField(
            self.family,
            self.grid,
            self.point_weights,
            [ch.copy() for ch in self.channels],
        )

    def scaled(self, a) -> "PhaseSpaceField":
        out = self.copy()
        for ch in out.channels:
            ch.values *= a
        return out

    def __add__(self, other: "PhaseSpaceField") -> "PhaseSpaceField":
        self._check_compatible(other)
        out = self.copy()
        for ch, o in zip(out.channels, other.channels):
            ch.values += o.values
        return out

    def __sub__(self, other: "PhaseSpaceField") -> "PhaseSpaceField":
        return self + other.scaled(-1.0)


def _structure_like(F: PhaseSpaceField) -> PhaseSpaceField:
    out = F.copy()
    for ch in out.channels:
        ch.values[:] = 0.0
    return out


# --- shared helpers ----------------------------------------------------------

def _normalize_symbols(symbols, weights, mode, analytic_const):
    """Per-spectral-point normalization of a (nslots, npts) symbol table.

    Returns the effective symbols and the completion profile; in
    normalized mode the discrete resolution of identity is exactly 1
    wherever the coverage s exceeds S_FLOOR, and the completion carries
    the points below the floor.
    """
    s = np.sum(weights[:, None] * symbols**2, axis=0)
    if mode == "normalized":
        covered = s >= S_FLOOR
        denom = np.where(covered, np.sqrt(np.where(covered, s, 1.0)), 1.0)
        eff = np.where(covered[None, :], symbols / denom[None, :], 0.0)
        completion = np.where(covered, 0.0, 1.0)
    else:
        eff = symbols / np.sqrt(analytic_const)
        completion = np.sqrt(np.clip(1.0 - s / analytic_const, 0.0, None))
    return eff, completion


class _FrameBase:
    family = "base"

    def reconstruct(self, f: Field) -> Field:
        return self.synthesize(self.analyze(f))

    def project(self, f: Field) -> Field:
        """Projection onto the admissible range (identity unless overridden)."""
        return f.copy()

    def random_phase_field(self, rng) -> PhaseSpaceField:
        """Ambient random phase-space field with unit-variance slot values."""
        F = self.analyze(self.project(self._zero_field()))
        for ch in F.channels:
            shape = ch.values.shape
            ch.values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        self._apply_structural_mask(F)
        return F

    def _zero_field(self) -> Field:
        return Field(self.grid, np.zeros(self.grid.npoints, dtype=complex))

    def _apply_structural_mask(self, F: PhaseSpaceField):
        pass


# --- radial dilation (Littlewood-Paley) --------------------------------------

class LittlewoodPaleyFrame(_FrameBase):
    """Radial dilation lifting f -> psi(sigma |D|) f plus a low-frequency
    completion channel."""

    family = "littlewood_paley"

    def __init__(self, grid: Grid, window: Window, sigma_grid: SigmaGrid,
                 mode: str = "normalized"):
        self.grid = grid
        self.window = window
        self.sigma_grid = sigma_grid
        self.mode = mode
        m = grid.freq_radius()
        table = window(np.outer(sigma_grid.nodes, m))
        self.symbols, self.completion = _normalize_symbols(
            table, sigma_grid.weights, mode, window.resolution_constant(1)
        )
        self.point_weights = np.full(grid.npoints, grid.cell_measure)

    def analyze(self, f: Field) -> PhaseSpaceField:
        fhat = fourier_forward(f).values
        sg = self.sigma_grid
        shape = self.grid.shape()
        main = np.empty((self.grid.npoints, sg.nodes.size), dtype=complex)
        for j in range(sg.nodes.size):
            spec = (self.symbols[j] * fhat).reshape(shape)
            main[:, j] = np.fft.ifftn(np.fft.ifftshift(spec), norm="ortho").ravel()
        comp = np.fft.ifftn(
            np.fft.ifftshift((self.completion * fhat).reshape(shape)), norm="ortho"
        ).ravel()
        channels = [
            Channel(ChannelIndex("scalar"), main, sg.nodes, sg.weights),
            Channel(
                ChannelIndex("completion", sigma_band=(1.0, np.e)),
                comp[:, None],
                np.array([1.0]),
                np.array([1.0]),
            ),
        ]
        return PhaseSpaceField(self.family, self.grid, self.point_weights, channels)

    def synthesize(self, F: PhaseSpaceField) -> Field:
        if F.family != self.family:
            raise ValueError("phase-space field family mismatch")
        shape = self.grid.shape()
        main, comp = F.channels
        acc = np.zeros(self.grid.npoints, dtype=complex)
        for j in range(self.sigma_grid.nodes.size):
            spec = np.fft.fftshift(
                np.fft.fftn(main.values[:, j].reshape(shape), norm="ortho")
            ).ravel()
            acc += main.slot_weights[j] * self.symbols[j] * spec
        spec = np.fft.fftshift(
            np.fft.fftn(comp.values[:, 0].reshape(shape), norm="ortho")
        ).ravel()
        acc += self.completion * spec
        out = np.fft.ifftn(np.fft.ifftshift(acc.reshape(shape)), norm="ortho")
        return Field(self.grid, out.ravel())


# --- frequency translation (modulation) --------------------------------------

class ModulationFrame(_FrameBase):
    """Frequency-shift lifting psi(D + eta) f over a sublattice of shifts."""

    family = "modulation"

    def __init__(self, grid: Grid, step: int = 4, mode: str = "normalized",
                 radius_factor: float = 8.0):
        if grid.n % step != 0:
            raise ValueError("eta step must divide the frequency lattice")
        self.grid = grid
        self.mode = mode
        dxi = np.pi / grid.half_extent
        self.eta_spacing = step * dxi
        self.radius = radius_factor * self.eta_spacing
        # profile: radial smooth bump, continuum-L2 normalized
        vol_int = self._bump_l2_mass()
        self._amp = 1.0 / np.sqrt(vol_int)

        freq = np.stack(grid.freq_coords(), axis=1)
        xmax = np.abs(freq).max()
        pad = int(np.ceil(self.radius / self.eta_spacing)) + 1
        per_axis = np.arange(
            -(grid.n // (2 * step)) - pad, grid.n // (2 * step) + pad + 1
        )
        mesh = np.meshgrid(*([per_axis] * grid.d), indexing="ij")
        etas = np.stack([m.ravel() for m in mesh], axis=1) * self.eta_spacing
        keep = np.all(np.abs(etas) <= xmax + self.radius + 1e-9, axis=1)
        self.etas = etas[keep]
        table = np.stack(
            [self._profile_raw(freq + eta) for eta in self.etas]
        )  # (neta, npts)
        cw = self.eta_spacing**grid.d
        s = cw * np.sum(table**2, axis=0)
        if mode == "normalized":
            if np.min(s) < S_FLOOR:
                raise ValueError("eta lattice does not cover the frequency lattice")
            self.table = table / np.sqrt(s)[None, :]
        else:
            self.table = table  # continuum normalization; defect = aliasing of s
        self.channel_weight = cw
        self.point_weights = np.full(grid.npoints, grid.cell_measure)

    def _profile_raw(self, xi):
        r = np.sqrt(np.sum(np.asarray(xi) ** 2, axis=-1))
        return getattr(self, "_amp", 1.0) * smooth_bump(r / self.radius)

    def _bump_l2_mass(self) -> float:
        from scipy.integrate import quad

        d = self.grid.d
        surf = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}[d]
        val, _ = quad(
            lambda r: smooth_bump(np.array([r / self.radius]))[0] ** 2 * r ** (d - 1),
            0.0,
            self.radius,
        )
        return surf * val

    def analyze(self, f: Field) -> PhaseSpaceField:
        fhat = fourier_forward(f).values
        shape = self.grid.shape()
        channels = []
        for i, eta in enumerate(self.etas):
            spec = (self.table[i] * fhat).reshape(shape)
            vals = np.fft.ifftn(np.fft.ifftshift(spec), norm="ortho").ravel()
            channels.append(
                Channel(
                    ChannelIndex("eta", eta=tuple(eta)),
                    vals[:, None],
                    np.array([1.0]),
                    np.array([1.0]),
                    weight=self.channel_weight,
                )
            )
        return PhaseSpaceField(self.family, self.grid, self.point_weights, channels)

    def synthesize(self, F: PhaseSpaceField) -> Field:
        if F.family != self.family:
            raise ValueError("phase-space field family mismatch")
        shape = self.grid.shape()
        acc = np.zeros(self.grid.npoints, dtype=complex)
        for i, ch in enumerate(F.channels):
            spec = np.fft.fftshift(
                np.fft.fftn(ch.values[:, 0].reshape(shape), norm="ortho")
            ).ravel()
            acc += self.channel_weight * self.table[i] * spec
        out = np.fft.ifftn(np.fft.ifftshift(acc.reshape(shape)), norm="ortho")
        return Field(self.grid, out.ravel())


# --- directional parabolic (d = 2) -------------------------------------------

class DirectionalFrame(_FrameBase):
    """Parabolic angular refinement of the dyadic decomposition, d = 2."""

    family = "directional"

    def __init__(self, grid: Grid, window: Window, sigma_grid: SigmaGrid,
                 omega_count: int, mode: str = "normalized",
                 angular_width: float = 1.0):
        if grid.d != 2:
            raise ValueError("directional frame is implemented for d = 2 only")
        if omega_count < 8:
            raise ValueError("omega_count must be at least 8")
        if sigma_grid.sigma_max >= 1.0:
            raise ValueError("directional scales are restricted to sigma < 1")
        self.grid = grid
        self.window = window
        self.sigma_grid = sigma_grid
        self.mode = mode
        self.omegas = 2.0 * np.pi * np.arange(omega_count) / omega_count
        self.omega_weight = 2.0 * np.pi / omega_count

        xi = np.stack(grid.freq_coords(), axis=1)
        r = np.sqrt(np.sum(xi**2, axis=1))
        theta = np.arctan2(xi[:, 1], xi[:, 0])
        # angular bumps eta_b(|xi|^(1/2) angdist / width), discretely normalized
        ang = np.empty((omega_count, grid.npoints))
        nonzero = r > 0
        for i, om in enumerate(self.omegas):
            delta = np.angle(np.exp(1j * (theta - om)))
            arg = np.where(nonzero, np.sqrt(r) * np.abs(delta) / angular_width, 2.0)
            ang[i] = smooth_bump(arg)
        nxi = self.omega_weight * np.sum(ang**2, axis=0)

        rad = window(np.outer(sigma_grid.nodes, r))
        s_rad = np.sum(sigma_grid.weights[:, None] * rad**2, axis=0)
        if mode == "normalized":
            rad_covered = s_rad >= S_FLOOR
        else:
            rad_covered = s_rad / window.resolution_constant(1) >= S_FLOOR
        uncoverable = rad_covered & nonzero & (nxi < S_FLOOR)
        if np.any(uncoverable):
            needed = int(
                np.ceil(np.pi * np.sqrt(r[uncoverable].max()) / angular_width)
            )
            raise ValueError(
                f"omega_count {omega_count} under-samples the parabolic width; "
                f"need at least {max(needed, 8)}"
            )
        self.angular = np.where(
            (nxi >= S_FLOOR)[None, :], ang / np.sqrt(np.maximum(nxi, S_FLOOR)), 0.0
        )
        eff_rad, completion = _normalize_symbols(
            rad, sigma_grid.weights, mode, window.resolution_constant(1)
        )
        self.radial = eff_rad
        # where the angular normalization failed (tiny nxi), route to completion
        ang_total = self.omega_weight * np.sum(self.angular**2, axis=0)
        leftover = np.clip(1.0 - ang_total * (1.0 - completion**2), 0.0, None)
        self.completion = np.sqrt(leftover)
        self.point_weights = np.full(grid.npoints, grid.cell_measure)

    def analyze(self, f: Field) -> PhaseSpaceField:
        fhat = fourier_forward(f).values
        sg = self.sigma_grid
        shape = self.grid.shape()
        channels = []
        for i, om in enumerate(self.omegas):
            vals = np.empty((self.grid.npoints, sg.nodes.size), dtype=complex)
            for j in range(sg.nodes.size):
                spec = (self.radial[j] * self.angular[i] * fhat).reshape(shape)
                vals[:, j] = np.fft.ifftn(
                    np.fft.ifftshift(spec), norm="ortho"
                ).ravel()
            channels.append(
                Channel(
                    ChannelIndex("omega", omega=float(om)),
                    vals,
                    sg.nodes,
                    sg.weights,
                    weight=self.omega_weight,
                )
            )
        comp = np.fft.ifftn(
            np.fft.ifftshift((self.completion * fhat).reshape(shape)), norm="ortho"
        ).ravel()
        channels.append(
            Channel(
                ChannelIndex("completion", sigma_band=(1.0, np.e)),
                comp[:, None],
                np.array([1.0]),
                np.array([1.0]),
            )
        )
        return PhaseSpaceField(self.family, self.grid, self.point_weights, channels)

    def synthesize(self, F: PhaseSpaceField) -> Field:
        if F.family != self.family:
            raise ValueError("phase-space field family mismatch")
        shape = self.grid.shape()
        acc = np.zeros(self.grid.npoints, dtype=complex)
        for i, ch in enumerate(F.channels[:-1]):
            for j in range(self.sigma_grid.nodes.size):
                spec = np.fft.fftshift(
                    np.fft.fftn(ch.values[:, j].reshape(shape), norm="ortho")
                ).ravel()
                acc += (
                    ch.weight
                    * ch.slot_weights[j]
                    * self.radial[j]
                    * self.angular[i]
                    * spec
                )
        comp = F.channels[-1]
        spec = np.fft.fftshift(
            np.fft.fftn(comp.values[:, 0].reshape(shape), norm="ortho")
        ).ravel()
        acc += self.completion * spec
        out = np.fft.ifftn(np.fft.ifftshift(acc.reshape(shape)), norm="ortho")
        return Field(self.grid, out.ravel())


# --- operator-adapted calculus -----------------------------------------------

class OperatorFrame(_FrameBase):
    """Heat-calculus lifting f -> psi(sigma^2 A) f for a spectral decomposition."""

    family = "operator"

    def __init__(self, decomp: SpectralDecomp, window: Window,
                 sigma_grid: SigmaGrid, mode: str = "normalized"):
        self.decomp = decomp
        self.grid = decomp.grid
        self.window = window
        self.sigma_grid = sigma_grid
        self.mode = mode
        lam = decomp.lambdas
        table = window(np.outer(sigma_grid.nodes**2, lam))
        self.symbols, self.completion = _normalize_symbols(
            table, sigma_grid.weights, mode, window.resolution_constant(2)
        )
        self.point_weights = decomp.point_weights
        self._U = decomp.modes
        self._UW = self._U.conj().T * self.point_weights[None, :]

    def analyze(self, f: Field) -> PhaseSpaceField:
        sg = self.sigma_grid
        c = self._UW @ f.values
        main = self._U @ (self.symbols.T * c[:, None])
        comp = self._U @ (self.completion * c)
        channels = [
            Channel(ChannelIndex("scalar_op"), main, sg.nodes, sg.weights),
            Channel(
                ChannelIndex("completion", sigma_band=(1.0, np.e)),
                comp[:, None],
                np.array([1.0]),
                np.array([1.0]),
            ),
        ]
        return PhaseSpaceField(self.family, self.grid, self.point_weights, channels)

    def synthesize(self, F: PhaseSpaceField) -> Field:
        if F.family != self.family:
            raise ValueError("phase-space field family mismatch")
        main, comp = F.channels
        C = self._UW @ main.values  # (nmodes, nslots)
        c_out = np.sum(main.slot_weights[None, :] * self.symbols.T * C, axis=1)
        c_out += self.completion * (self._UW @ comp.values[:, 0])
        return Field(self.grid, self._U @ c_out)

    def project(self, f: Field) -> Field:
        """Projection onto the span of the resolved modes."""
        return Field(f.grid, self._U @ (self._UW @ f.values))


# --- Gaussian measure / Ornstein-Uhlenbeck -----------------------------------

class GaussHermiteFrame(_FrameBase):
    """Lifting adapted to the Ornstein-Uhlenbeck operator with scale
    truncation at rho(x) = min(1, 1/|x|) and a PSD remainder channel."""

    family = "gauss"

    def __init__(self, decomp: SpectralDecomp, window: Window,
                 sigma_grid: SigmaGrid, mode: str = "normalized"):
        if decomp.kind != "ornstein_uhlenbeck":
            raise ValueError("gauss frame needs an ornstein_uhlenbeck decomposition")
        if window.variant != "gaussian_poly":
            raise ValueError("gauss frame needs a gaussian_poly window")
        self.decomp = decomp
        self.grid = decomp.grid
        self.window = window
        self.sigma_grid = sigma_grid
        self.mode = mode
        self.point_weights = decomp.point_weights
        x = self.grid.coords()[0]
        self.rho = np.minimum(1.0, 1.0 / np.maximum(np.abs(x), 1e-30))
        lam = decomp.lambdas
        table = window(np.outer(sigma_grid.nodes**2, lam))
        self.symbols, comp = _normalize_symbols(
            table, sigma_grid.weights, mode, window.resolution_constant(2)
        )
        self.symbols[:, lam == 0.0] = 0.0  # zero mode excluded from the range
        self._U = decomp.modes
        self._UW = self._U.conj().T * self.point_weights[None, :]
        self.masks = self.rho[:, None] >= sigma_grid.nodes[None, :]
        self._positive = lam > 0.0
        self._build_remainder()

    def _build_remainder(self):
        """R = Pi - sum_m wgt psi_m M_m psi_m on mode coefficients.

        The truncation mask M_m (keep the point x at scale sigma_m only
        when sigma_m <= rho(x)) acts on the packet coefficients, i.e.
        after the calculus, so each term psi M psi is dominated by psi^2
        and R is positive semidefinite by construction.
        """
        sg = self.sigma_grid
        R = np.diag(self._positive.astype(float))
        for m in range(sg.nodes.size):
            Cm = self._UW @ (self.masks[:, m : m + 1] * self._U)
            R -= sg.weights[m] * (
                self.symbols[m][:, None] * Cm * self.symbols[m][None, :]
            )
        R = 0.5 * (R + R.conj().T)
        evals, vecs = np.linalg.eigh(R)
        scale = max(np.max(np.abs(evals)), 1e-30)
        self.remainder_min_eig = float(np.min(evals) / scale)
        evals = np.clip(evals, 0.0, None)
        self._R_coeff = (vecs * evals) @ vecs.conj().T
        self._R_half = (vecs * np.sqrt(evals)) @ vecs.conj().T

    def project(self, f: Field) -> Field:
        c = self._UW @ f.values
        return Field(f.grid, self._U @ (self._positive * c))

    def analyze(self, f: Field) -> PhaseSpaceField:
        sg = self.sigma_grid
        fv = self.project(f).values
        c = self._UW @ fv
        main = self.masks * (self._U @ (self.symbols.T * c[:, None]))
        rem = self._U @ (self._R_half @ c)
        channels = [
            Channel(ChannelIndex("gauss_main"), main, sg.nodes, sg.weights),
            Channel(
                ChannelIndex("gauss_remainder", sigma_band=(1.0, np.e)),
                rem[:, None],
                np.array([1.0]),
                np.array([1.0]),
            ),
        ]
        return PhaseSpaceField(self.family, self.grid, self.point_weights, channels)

    def synthesize(self, F: PhaseSpaceField) -> Field:
        if F.family != self.family:
            raise ValueError("phase-space field family mismatch")
        main, rem = F.channels
        C = self._UW @ (self.masks * main.values)
        c_out = np.sum(main.slot_weights[None, :] * self.symbols.T * C, axis=1)
        c_out += self._R_half @ (self._UW @ rem.values[:, 0])
        return Field(self.grid, self._U @ c_out)

    def _apply_structural_mask(self, F: PhaseSpaceField):
        F.channels[0].values[~self.masks] = 0.0


# --- critical-cube Schrodinger frame -----------------------------------------

@dataclass
class RemainderOperator:
    """Cube-local tail operator R_j = 1_Q tail(A) 1_Q with its PSD square root."""

    label: int
    mask: np.ndarray = field(repr=False)  # boolean over grid points
    block: np.ndarray = field(repr=False)  # dense PSD block on the cube points
    half_block: np.ndarray = field(repr=False)
    min_eig_ratio: float = 0.0

    def apply(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros_like(values, dtype=complex)
        out[self.mask] = self.block @ values[self.mask]
        return out

    def apply_half(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros_like(values, dtype=complex)
        out[self.mask] = self.half_block @ values[self.mask]
        return out


class CriticalFrame(_FrameBase):
    """Critical-cube wave packets for a Schrodinger operator A = -Delta + V."""

    family = "critical"

    def __init__(self, decomp: SpectralDecomp, window: Window,
                 sigma_grid: SigmaGrid, partition: CriticalPartition,
                 mode: str = "normalized"):
        self.decomp = decomp
        self.grid = decomp.grid
        self.window = window
        self.sigma_grid = sigma_grid
        self.partition = partition
        self.mode = mode
        self.point_weights = decomp.point_weights
        lam = decomp.lambdas
        table = window(np.outer(sigma_grid.nodes**2, lam))
        # eigenvalues the sigma grid leaves uncovered are carried entirely
        # by the cube tail operators, so no completion channel is needed
        self.symbols, _ = _normalize_symbols(
            table, sigma_grid.weights, mode, window.resolution_constant(2)
        )
        self._U = decomp.modes
        self._UW = self._U.conj().T * self.point_weights[None, :]
        self.masks = partition.masks()  # (ncubes, npts) bool
        self.rho = partition.rho
        self.R_sup = partition.R_sup
        # slots carried by cube j: sigma <= rho_j
        self.slot_sets = [
            np.nonzero(sigma_grid.nodes <= r)[0] for r in self.rho
        ]
        self.remainders = [
            self._build_remainder(j) for j in range(len(partition.cubes))
        ]

    def _tail_profile(self, j: int) -> np.ndarray:
        """1 - sum_{sigma <= rho_j} wgt psi_eff(sigma^2 lam)^2, per eigenvalue."""
        sel = self.slot_sets[j]
        s_low = np.sum(
            self.sigma_grid.weights[sel, None] * self.symbols[sel] ** 2, axis=0
        )
        return np.clip(1.0 - s_low, 0.0, None)

    def _build_remainder(self, j: int) -> RemainderOperator:
        mask = self.masks[j]
        tail = self._tail_profile(j)
        Uq = self._U[mask]
        block = (Uq * tail) @ Uq.conj().T * self.grid.cell_measure
        block = 0.5 * (block + block.conj().T)
        evals, vecs = np.linalg.eigh(block)
        scale = max(np.max(np.abs(evals)), 1e-30)
        ratio = float(np.min(evals) / scale)
        evals = np.clip(evals, 0.0, None)
        half = (vecs * np.sqrt(evals)) @ vecs.conj().T
        blk = (vecs * evals) @ vecs.conj().T
        return RemainderOperator(j, mask, blk, half, ratio)

    def remainder_quadratic_form(self, j: int, f: Field) -> float:
        """<R_j f, f> evaluated through the assembled block."""
        v = self.remainders[j].apply(f.values)
        return float(
            np.real(np.sum(v * np.conj(f.values)) * self.grid.cell_measure)
        )

    def analyze(self, f: Field, parts=("main", "remainder")) -> PhaseSpaceField:
        sg = self.sigma_grid
        ncubes = len(self.partition.cubes)
        channels = []
        masked = self.masks.T * f.values[:, None]  # (npts, ncubes)
        C = self._UW @ masked  # (nmodes, ncubes)
        for j in range(ncubes):
            vals = np.zeros((self.grid.npoints, sg.nodes.size), dtype=complex)
            if "main" in parts:
                sel = self.slot_sets[j]
                vals[:, sel] = self._U @ (self.symbols[sel].T * C[:, j : j + 1])
            channels.append(
                Channel(ChannelIndex("cube", cube=j), vals, sg.nodes, sg.weights)
            )
        band = (self.R_sup, 2.0 * self.R_sup)
        for j in range(ncubes):
            if "remainder" in parts:
                rem = self.remainders[j].apply_half(f.values) / np.sqrt(np.log(2.0))
            else:
                rem = np.zeros(self.grid.npoints, dtype=complex)
            channels.append(
                Channel(
                    ChannelIndex("cube_remainder", cube=j, sigma_band=band),
                    rem[:, None],
                    np.array([np.sqrt(band[0] * band[1])]),
                    np.array([np.log(2.0)]),
                )
            )
        return PhaseSpaceField(self.family, self.grid, self.point_weights, channels)

    def synthesize(self, F: PhaseSpaceField, parts=("main", "remainder")) -> Field:
        if F.family != self.family:
            raise ValueError("phase-space field family mismatch")
        ncubes = len(self.partition.cubes)
        acc = np.zeros(self.grid.npoints, dtype=complex)
        if "main" in parts:
            for j in range(ncubes):
                ch = F.channels[j]
                sel = self.slot_sets[j]
                if sel.size == 0:
                    continue
                C = self._UW @ ch.values[:, sel]
                coeff = np.sum(
                    ch.slot_weights[None, sel] * self.symbols[sel].T * C, axis=1
                )
                acc[self.masks[j]] += (self._U @ coeff)[self.masks[j]]
        if "remainder" in parts:
            for j in range(ncubes):
                ch = F.channels[ncubes + j]
                acc += (
                    np.log(2.0)
                    / np.sqrt(np.log(2.0))
                    * self.remainders[j].apply_half(ch.values[:, 0])
                )
        return Field(self.grid, acc)

    def _apply_structural_mask(self, F: PhaseSpaceField):
        ncubes = len(self.partition.cubes)
        for j in range(ncubes):
            ch = F.channels[j]
            off = np.setdiff1d(
                np.arange(self.sigma_grid.nodes.size), self.slot_sets[j]
            )
            ch.values[:, off] = 0.0
