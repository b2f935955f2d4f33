"""Periodic box discretization of R^d with a unitary discrete Fourier calculus.

The box is [-L, L)^d sampled with n points per axis (n a power of two).
Position samples sit at x_k = -L + k*h with h = 2L/n, and the frequency
lattice is xi_k = (pi/L)*k for k in {-n/2, ..., n/2 - 1}.  All L^2
quantities carry the measure weight h^d so that discrete norms approximate
their continuum counterparts, and the Fourier transform is unitary with
respect to that same weight.

Multi-dimensional data is stored flat in row-major (C) order over the
axes, which fixes the layout of every exported file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "fourier_forward",
    "fourier_inverse",
    "lp_norm",
    "inner_product",
    "sample_function",
    "save_field",
    "load_field",
    "save_field_csv",
    "load_field_csv",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-half_extent, half_extent)^d.

    Parameters
    ----------
    d : int
        Spatial dimension, 1, 2 or 3.
    n : int
        Points per axis; power of two, at least 8.
    half_extent : float
        Half-width L of the box.
    """

    d: int
    n: int
    half_extent: float

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if not _is_power_of_two(self.n) or self.n < 8:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.half_extent > 0:
            raise ValueError("half_extent must be positive")
        if self.n**self.d > 2**26:
            raise ValueError("grid too large for the addressable index space")

    @property
    def h(self) -> float:
        """Grid spacing 2L/n."""
        return 2.0 * self.half_extent / self.n

    @property
    def npoints(self) -> int:
        return self.n**self.d

    @property
    def cell_measure(self) -> float:
        """Quadrature weight h^d of one cell."""
        return self.h**self.d

    @property
    def axis(self) -> np.ndarray:
        """Position samples along one axis."""
        return -self.half_extent + self.h * np.arange(self.n)

    @property
    def freq_axis(self) -> np.ndarray:
        """Frequency lattice (pi/L)*k for k = -n/2 .. n/2-1 along one axis."""
        k = np.arange(-self.n // 2, self.n // 2)
        return (np.pi / self.half_extent) * k

    def coords(self) -> list[np.ndarray]:
        """Flat (row-major) position coordinate arrays, one per axis."""
        mesh = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        return [m.ravel() for m in mesh]

    def freq_coords(self) -> list[np.ndarray]:
        """Flat frequency coordinate arrays matching `fourier_forward` layout."""
        mesh = np.meshgrid(*([self.freq_axis] * self.d), indexing="ij")
        return [m.ravel() for m in mesh]

    def radius(self) -> np.ndarray:
        """|x| at every grid point."""
        return np.sqrt(sum(c**2 for c in self.coords()))

    def freq_radius(self) -> np.ndarray:
        """|xi| at every frequency lattice point."""
        return np.sqrt(sum(c**2 for c in self.freq_coords()))

    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d


@dataclass
class Field:
    """Complex-valued function sampled on a Grid, stored flat row-major."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128).ravel()
        if v.size != self.grid.npoints:
            raise ValueError(
                f"values length {v.size} != grid point count {self.grid.npoints}"
            )
        self.values = v

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "Field":
        return Field(self.grid, self.values * scalar)

    __rmul__ = __mul__


def _check_same_grid(f: Field, g: Field):
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")


def fourier_forward(f: Field) -> Field:
    """Unitary DFT; output samples follow the freq_coords() lattice order."""
    v = f.values.reshape(f.grid.shape())
    out = np.fft.fftshift(np.fft.fftn(v, norm="ortho"))
    return Field(f.grid, out.ravel())


def fourier_inverse(F: Field) -> Field:
    """Two-sided inverse of `fourier_forward`."""
    v = F.values.reshape(F.grid.shape())
    out = np.fft.ifftn(np.fft.ifftshift(v), norm="ortho")
    return Field(F.grid, out.ravel())


def lp_norm(f: Field, p: float) -> float:
    """Discrete L^p norm (sum |f|^p h^d)^(1/p); max norm for p = inf."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    return float((np.sum(a**p) * f.grid.cell_measure) ** (1.0 / p))


def inner_product(f: Field, g: Field) -> complex:
    """Sesquilinear pairing <f, g> = sum f conj(g) h^d (linear in f)."""
    _check_same_grid(f, g)
    return complex(np.sum(f.values * np.conj(g.values)) * f.grid.cell_measure)


def sample_function(grid: Grid, rule) -> Field:
    """Sample `rule(*coords)` on the grid; rule gets one flat array per axis."""
    vals = rule(*grid.coords())
    vals = np.broadcast_to(np.asarray(vals, dtype=np.complex128), (grid.npoints,))
    return Field(grid, vals.copy())


# --- import/export -----------------------------------------------------------

def save_field(path, f: Field):
    """Binary export; bit-exact roundtrip via load_field."""
    np.savez(
        path,
        d=f.grid.d,
        n=f.grid.n,
        half_extent=f.grid.half_extent,
        values=f.values,
    )


def load_field(path) -> Field:
    with np.load(path) as data:
        grid = Grid(int(data["d"]), int(data["n"]), float(data["half_extent"]))
        return Field(grid, data["values"])


def save_field_csv(path, f: Field):
    """CSV export: one JSON header line, then rows of index, re, im."""
    header = json.dumps(
        {"d": f.grid.d, "n": f.grid.n, "half_extent": f.grid.half_extent}
    )
    with open(path, "w") as fh:
        fh.write(f"# {header}\n")
        fh.write("index,re,im\n")
        for i, v in enumerate(f.values):
            fh.write(f"{i},{float(v.real)!r},{float(v.imag)!r}\n")


def load_field_csv(path) -> Field:
    with open(path) as fh:
        header = json.loads(fh.readline().lstrip("# ").strip())
        fh.readline()  # column names
        rows = [line.split(",") for line in fh if line.strip()]
    grid = Grid(int(header["d"]), int(header["n"]), float(header["half_extent"]))
    vals = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
    return Field(grid, vals)
