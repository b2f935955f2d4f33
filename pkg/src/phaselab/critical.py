"""Reverse-Holder diagnostics, the critical radius of a potential, and
critical-cube partitions.

The critical radius rho(x) is the scale at which the averaged potential
mass r^(2-d) int_{B(x,r)} V reaches 1.  For continuous V the sublevel
set {r : r^(2-d) int <= 1} contains a neighborhood of 0, so the radius
is computed as the monotone crossing of that function (bisection), not a
literal minimum.  Balls are discretized as grid-cell sets with a
partial-cell weight so the ball integral is continuous and monotone in
the radius; the quadrature error is O(h/r).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Field, Grid
from .spectral import ResourceGuardError

__all__ = [
    "Potential",
    "CriticalRadiusField",
    "CriticalPartition",
    "Cube",
    "reverse_holder_constant",
    "ball_average",
    "critical_radius",
    "critical_radius_field",
    "build_partition",
    "overlap_constant",
]


@dataclass
class Potential:
    """Nonnegative potential sampled on a grid, with a requested RH exponent."""

    field: Field
    rh_exponent: float = 2.0

    def __post_init__(self):
        v = self.field.values
        if np.max(np.abs(v.imag)) > 0 or np.min(v.real) < 0:
            raise ValueError("potential must be real and nonnegative")
        if np.max(v.real) == 0:
            raise ValueError("potential must not vanish identically")
        if self.rh_exponent <= self.field.grid.d / 2:
            raise ValueError("reverse-Holder exponent must exceed d/2")

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values.real


def _cell_weights(grid: Grid, center, r: float) -> np.ndarray:
    """Smoothed indicator of B(center, r): per-cell overlap fraction.

    Exact in d=1; a radial partial-cell approximation for d=2,3.  The
    weight is continuous and nondecreasing in r, which is what the
    bisection in `critical_radius` relies on.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    dist = np.sqrt(
        sum((c - center[i]) ** 2 for i, c in enumerate(grid.coords()))
    )
    return np.clip((r - dist) / grid.h + 0.5, 0.0, 1.0)


def ball_integral(V: Potential, center, r: float, power: float = 1.0) -> float:
    """int_{B(center,r)} V^power by partial-cell quadrature."""
    w = _cell_weights(V.grid, center, r)
    return float(np.sum(w * V.values**power) * V.grid.cell_measure)


def ball_average(V: Potential, center, r: float, power: float = 1.0) -> float:
    w = _cell_weights(V.grid, center, r)
    vol = float(np.sum(w) * V.grid.cell_measure)
    if vol == 0:
        raise ValueError("empty ball")
    return float(np.sum(w * V.values**power) * V.grid.cell_measure / vol)


def reverse_holder_constant(V: Potential, q: float, centers, radii) -> float:
    """Best (largest) sampled ratio (avg_B V^q)^(1/q) / (avg_B V)."""
    if q <= V.grid.d / 2:
        raise ValueError("q must exceed d/2")
    L = V.grid.half_extent
    best = 0.0
    for x in centers:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        for r in radii:
            if np.any(np.abs(x) + r > L):
                raise ValueError(f"ball B({x}, {r}) exits the box")
            den = ball_average(V, x, r, 1.0)
            if den == 0:
                raise ValueError("potential averages to zero on a sampled ball")
            num = ball_average(V, x, r, q) ** (1.0 / q)
            best = max(best, num / den)
    return best


@dataclass
class CriticalRadiusField:
    """rho sampled on the grid, with its supremum over the box."""

    grid: Grid
    rho: np.ndarray
    flagged: np.ndarray  # True where the crossing was clamped

    @property
    def R_sup(self) -> float:
        return float(np.max(self.rho))


def _mass_function(V: Potential, x, r: float) -> float:
    d = V.grid.d
    return r ** (2 - d) * ball_integral(V, x, r)


def critical_radius(V: Potential, x, tol: float = 1e-6):
    """Monotone crossing of r -> r^(2-d) int_{B(x,r)} V = 1.

    Returns (rho, flagged); flagged is True when no crossing exists below
    the clamp (box diameter) and the clamp was returned.  The result is
    never below the grid spacing h.
    """
    g = V.grid
    h = g.h
    diam = 2.0 * g.half_extent * np.sqrt(g.d)
    lo, hi = h, diam
    f_lo = _mass_function(V, x, lo)
    if f_lo >= 1.0:
        return h, False
    # bracket the first crossing on a geometric scan
    f_hi = None
    for r in np.geomspace(lo, hi, 64)[1:]:
        fr = _mass_function(V, x, r)
        if fr >= 1.0:
            hi, f_hi = r, fr
            break
        lo = r
    if f_hi is None:
        return diam, True
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = _mass_function(V, x, mid)
        if abs(fm - 1.0) <= tol:
            return mid, False
        if fm < 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * diam:
            break
    return 0.5 * (lo + hi), False


def critical_radius_field(V: Potential) -> CriticalRadiusField:
    g = V.grid
    pts = np.stack(g.coords(), axis=1)
    rho = np.empty(g.npoints)
    flags = np.zeros(g.npoints, dtype=bool)
    for i, x in enumerate(pts):
        rho[i], flags[i] = critical_radius(V, x)
    return CriticalRadiusField(g, rho, flags)


# --- critical-cube partitions ------------------------------------------------

@dataclass(frozen=True)
class Cube:
    center: tuple
    side: float
    address: tuple  # dyadic path from the root, one child index per level

    @property
    def level(self) -> int:
        return len(self.address)

    def children(self):
        d = len(self.center)
        half = self.side / 2.0
        out = []
        for m in range(2**d):
            offs = [((m >> ax) & 1) * 2 - 1 for ax in range(d)]
            c = tuple(self.center[ax] + offs[ax] * half / 2.0 for ax in range(d))
            out.append(Cube(c, half, self.address + (m,)))
        return out


@dataclass
class CriticalPartition:
    """Partition of the box into dyadic cubes with side comparable to rho."""

    grid: Grid
    cubes: list
    rho: np.ndarray  # rho at each cube center

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)

    @property
    def R_sup(self) -> float:
        return float(np.max(self.rho))

    def sides(self) -> np.ndarray:
        return np.array([c.side for c in self.cubes])

    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.cubes])

    def point_labels(self) -> np.ndarray:
        """Index of the owning cube for every grid point (half-open cubes)."""
        g = self.grid
        pts = np.stack(g.coords(), axis=1)
        labels = np.full(g.npoints, -1, dtype=int)
        for j, c in enumerate(self.cubes):
            inside = np.ones(g.npoints, dtype=bool)
            for ax in range(g.d):
                lo = c.center[ax] - c.side / 2.0
                hi = c.center[ax] + c.side / 2.0
                inside &= (pts[:, ax] >= lo - 1e-12) & (pts[:, ax] < hi - 1e-12)
            labels[inside] = j
        if np.any(labels < 0):
            raise RuntimeError("partition does not cover all grid points")
        return labels

    def masks(self) -> np.ndarray:
        """Boolean (ncubes, npoints) indicator matrix of the tiling."""
        labels = self.point_labels()
        return labels[None, :] == np.arange(len(self.cubes))[:, None]


def build_partition(V: Potential, resolution_guard: bool = True) -> CriticalPartition:
    """Stopping-time extraction of a critical-cube partition.

    Splits a dyadic cube while its side exceeds 2 rho(center); accepts
    once side <= 2 rho(center); cubes that land below rho(center)/2 are
    repaired by single-level merges with their siblings.
    """
    g = V.grid
    root = Cube((0.0,) * g.d, 2.0 * g.half_extent, ())
    rho_cache: dict[tuple, float] = {}

    def rho_at(cube: Cube) -> float:
        if cube.address not in rho_cache:
            r, flagged = critical_radius(V, cube.center)
            rho_cache[cube.address] = r
        return rho_cache[cube.address]

    accepted: list[Cube] = []
    stack = [root]
    max_level = int(np.log2(g.n))
    while stack:
        cube = stack.pop()
        r = rho_at(cube)
        if resolution_guard and r < 4 * g.h:
            raise ResourceGuardError(
                f"critical radius {r:.3g} below the resolution guard 4h at "
                f"{cube.center}"
            )
        if cube.side > 2.0 * r and cube.level < max_level:
            stack.extend(cube.children())
        else:
            accepted.append(cube)

    # repair lower-bound failures (side < rho/2) by merging into the parent
    def parent_of(cube: Cube) -> Cube:
        d = g.d
        side = cube.side * 2.0
        m = cube.address[-1]
        offs = [((m >> ax) & 1) * 2 - 1 for ax in range(d)]
        c = tuple(cube.center[ax] - offs[ax] * cube.side / 2.0 for ax in range(d))
        return Cube(c, side, cube.address[:-1])

    changed = True
    while changed:
        changed = False
        by_addr = {c.address: c for c in accepted}
        for cube in list(accepted):
            if cube.address not in by_addr:
                continue
            if cube.side >= rho_at(cube) / 2.0 or not cube.address:
                continue
            parent = parent_of(cube)
            sibling_addrs = [parent.address + (m,) for m in range(2**g.d)]
            if not all(a in by_addr for a in sibling_addrs):
                continue  # siblings were split further; cannot merge cleanly
            if parent.side > 2.0 * rho_at(parent):
                continue  # merging would break the upper bound
            for a in sibling_addrs:
                del by_addr[a]
            by_addr[parent.address] = parent
            accepted = list(by_addr.values())
            changed = True
            break

    accepted.sort(key=lambda c: c.center)
    rho = np.array([rho_at(c) for c in accepted])
    sides = np.array([c.side for c in accepted])
    bad = (sides < rho / 2.0 - 1e-12) | (sides > 2.0 * rho + 1e-12)
    if np.any(bad):
        offenders = [accepted[i] for i in np.nonzero(bad)[0]]
        raise RuntimeError(f"criticality unattainable for cubes {offenders}")
    part = CriticalPartition(g, accepted, rho)
    total = np.sum(sides**g.d)
    if not np.isclose(total, (2.0 * g.half_extent) ** g.d, rtol=1e-12):
        raise RuntimeError("accepted cubes do not tile the box")
    return part


def overlap_constant(p: CriticalPartition) -> int:
    """max_j #{k : interior(2 Q_j) meets interior(Q_k)}."""
    centers = p.centers()
    sides = p.sides()
    n = len(p.cubes)
    best = 0
    for j in range(n):
        hits = 0
        for k in range(n):
            sep = np.abs(centers[j] - centers[k])
            if np.all(sep < sides[j] + sides[k] / 2.0 - 1e-12):
                hits += 1
        best = max(best, hits)
    return best
