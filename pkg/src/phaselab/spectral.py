"""Self-adjoint operators, their functional calculus, and spectral windows.

Everything is phrased through the nonnegative operator A = -L: the
Laplacian kind has A = -Delta (Fourier-diagonal), the Schrodinger kind
A = -Delta + V discretized by second-order centered differences, and the
Ornstein-Uhlenbeck kind lives in a Hermite basis on a one-dimensional
grid carrying the Gaussian measure weight exp(-x^2) dx.

Windows are scalar profiles w on the spectral variable, calibrated so
that int_0^inf w(sigma^2)^2 dsigma/sigma = 1.  Three variants:

* ``compact_bump`` -- the standard smooth bump exp(-1/(1-t^2)) mapped
  log-symmetrically onto a support [a, b] in the spectral variable;
* ``gaussian_poly`` -- c z^((N+1)/2) exp(-(1+a^2)/alpha z), the window
  used with the Ornstein-Uhlenbeck calculus;
* ``cosine_bump`` -- Psi(sqrt(z)) where Psi is the cosine transform of a
  zero-mean compactly supported profile phi; applying it to A moves
  supports by at most ``speed * sigma`` (finite speed of propagation),
  which is what the critical-cube decomposition needs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.hermite import hermval
from scipy.integrate import IntegrationWarning, quad, simpson

from .grid import Field, Grid, fourier_forward, fourier_inverse

__all__ = [
    "OperatorSpec",
    "SpectralDecomp",
    "Window",
    "SigmaGrid",
    "eigendecompose",
    "apply_calculus",
    "fourier_multiplier",
    "propagator",
    "kernel_matrix",
    "make_window",
    "window_tail",
    "smooth_bump",
    "ResourceGuardError",
]

DENSE_GUARD = 4096


class ResourceGuardError(RuntimeError):
    """A requested computation exceeds the dense-regime resource guards."""


def smooth_bump(t):
    """C^inf bump exp(-1/(1-t^2)) on (-1, 1), zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti**2))
    return out


# --- windows -----------------------------------------------------------------

@dataclass
class Window:
    """Calibrated spectral window.

    ``profile`` maps the spectral variable z >= 0 to w(z); the
    calibration constant is already folded in.  ``support`` is the
    interval outside which the profile is guaranteed negligible (exactly
    zero for compact_bump).  ``speed`` is the propagation bound of the
    cosine_bump variant and None otherwise.
    """

    variant: str
    profile: object = field(repr=False)
    support: tuple[float, float]
    params: dict
    speed: float | None = None
    tail_fn: object | None = field(default=None, repr=False)

    def __call__(self, z):
        return self.profile(np.asarray(z, dtype=float))

    def resolution_constant(self, power: int) -> float:
        """int_0^inf w(sigma^power)^2 dsigma/sigma, given I_2 = 1."""
        return 2.0 / power

    def tail(self, t: float) -> float:
        return window_tail(self, t)


def _calibrate(raw_profile, support) -> float:
    """Constant c with int_0^inf (c w(sigma^2))^2 dsigma/sigma = 1.

    Evaluated as (1/2) int w(z)^2 dz/z on a log axis; the integrand is
    smooth and decays at both ends, so adaptive quadrature reaches 1e-10.
    """
    lo, hi = support
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            lambda u: raw_profile(np.array([np.exp(u)]))[0] ** 2,
            np.log(max(lo, 1e-300)) if lo > 0 else -40.0,
            np.log(hi),
            epsabs=1e-13,
            epsrel=1e-13,
            limit=400,
        )
    mass = 0.5 * val
    if not mass > 0:
        raise ValueError("window profile has zero calibration mass")
    return 1.0 / np.sqrt(mass)


def _make_compact_bump(a: float, b: float) -> Window:
    if not (0 < a < b):
        raise ValueError(f"compact bump needs 0 < a < b, got [{a}, {b}]")
    la, lb = np.log(a), np.log(b)

    def raw(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        pos = z > 0
        t = np.empty_like(z)
        t[pos] = 2.0 * (np.log(z[pos]) - la) / (lb - la) - 1.0
        out[pos] = smooth_bump(t[pos])
        return out

    c = _calibrate(raw, (a, b))
    return Window("compact_bump", lambda z: c * raw(z), (a, b), {"a": a, "b": b})


def _make_gaussian_poly(N: int, a_g: float, alpha: float) -> Window:
    if N < 1 or alpha <= 0:
        raise ValueError("gaussian_poly needs N >= 1 and alpha > 0")
    beta = (1.0 + a_g**2) / alpha
    expo = (N + 1) / 2.0

    def raw(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        pos = z > 0
        out[pos] = z[pos] ** expo * np.exp(-beta * z[pos])
        return out

    # support cutoff where the squared profile drops below 1e-30 of its peak
    zpeak = expo / beta
    zhi = zpeak
    while raw(np.array([zhi]))[0] > 1e-16 * raw(np.array([zpeak]))[0]:
        zhi *= 2.0
    c = _calibrate(raw, (1e-12, zhi))
    return Window(
        "gaussian_poly",
        lambda z: c * raw(z),
        (0.0, zhi),
        {"N": N, "a_g": a_g, "alpha": alpha},
    )


def _make_cosine_bump(a: float, b: float, quad_nodes: int = 1024) -> Window:
    """Window Psi(sqrt(z)) with Psi the cosine transform of phi = -B'.

    B is the smooth bump on [a, b]; phi = -B' has zero mean, so Psi
    vanishes quadratically at 0 and the dsigma/sigma calibration integral
    converges.  supp phi = [a, b] gives propagation speed b.  Psi is
    oscillatory with sub-exponential decay, so the dsigma/sigma integrals
    use a dedicated composite-Simpson path instead of adaptive quadrature.
    """
    if not (0 < a < b):
        raise ValueError(f"cosine bump needs 0 < a < b, got [{a}, {b}]")
    c0, w0 = 0.5 * (a + b), 0.5 * (b - a)
    # phi(xi) = -d/dxi bump((xi - c0)/w0); Gauss-Legendre nodes on [a, b]
    gl_x, gl_w = np.polynomial.legendre.leggauss(quad_nodes)
    xi = c0 + w0 * gl_x
    t = (xi - c0) / w0
    dbump = smooth_bump(t) * (-2.0 * t / (1.0 - t**2) ** 2) / w0
    phi_w = -dbump * (w0 * gl_w)

    def psi(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty(s.size)
        for i in range(0, s.size, 4096):  # cap the outer-product size
            out[i : i + 4096] = np.cos(np.outer(s[i : i + 4096], xi)) @ phi_w
        return np.sqrt(2.0 / np.pi) * out

    # decay cutoff: Psi decays like exp(-c sqrt(s)); stop where the local
    # envelope is below 1e-10 of the peak (GL stays accurate to ~2000)
    probe = np.linspace(0.01, 50.0, 1000)
    peak = np.max(np.abs(psi(probe)))
    s_cut = 2000.0
    for s0 in np.arange(100.0, 2000.0, 100.0):
        if np.max(np.abs(psi(np.linspace(s0, s0 + 100.0, 200)))) < 1e-10 * peak:
            s_cut = s0 + 100.0
            break

    def sq_mass(lo: float, hi: float) -> float:
        """int_lo^hi psi(s)^2 ds/s by composite Simpson on two panels."""
        hi = min(hi, s_cut)
        if hi <= lo:
            return 0.0
        total = 0.0
        split = min(hi, max(lo * 1.0000001, 2.0))
        if lo < split:
            u = np.linspace(np.log(max(lo, 1e-8)), np.log(split), 4097)
            total += simpson(psi(np.exp(u)) ** 2, x=u)
        if split < hi:
            npts = int(40.0 * b * (hi - split) / np.pi) | 1
            s = np.linspace(split, hi, max(npts, 101))
            total += simpson(psi(s) ** 2 / s, x=s)
        return total

    c2 = 1.0 / sq_mass(0.0, s_cut)
    c = np.sqrt(c2)

    def profile(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape)
        pos = (z > 0) & (z < s_cut**2)
        out[pos] = c * psi(np.sqrt(z[pos]).ravel()).reshape(out[pos].shape)
        return out

    return Window(
        "cosine_bump",
        profile,
        (0.0, s_cut**2),
        {"a": a, "b": b},
        speed=b,
        tail_fn=lambda t: c2 * sq_mass(t, s_cut),
    )


def make_window(variant: str, **params) -> Window:
    if variant == "compact_bump":
        return _make_compact_bump(params["a"], params["b"])
    if variant == "gaussian_poly":
        return _make_gaussian_poly(
            params.get("N", 2), params.get("a_g", 1.0), params.get("alpha", 4.0)
        )
    if variant == "cosine_bump":
        return _make_cosine_bump(params["a"], params["b"])
    raise ValueError(f"unknown window variant {variant!r}")


def window_tail(w: Window, t: float) -> float:
    """Phi(t) = int_t^inf w(u^2)^2 du/u, by adaptive quadrature.

    Phi(0) = 1 by calibration and Phi is decreasing to 0.
    """
    if t < 0:
        raise ValueError("tail argument must be nonnegative")
    if w.tail_fn is not None:
        return float(w.tail_fn(t))
    hi = np.sqrt(w.support[1])
    if t >= hi:
        return 0.0
    lo_log = np.log(t) if t > 0 else np.log(max(np.sqrt(w.support[0]), 1e-300)) - 1.0
    lo_log = min(lo_log, np.log(hi))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            lambda u: w(np.array([np.exp(2 * u)]))[0] ** 2,
            max(lo_log, -40.0),
            np.log(hi),
            epsabs=1e-12,
            epsrel=1e-12,
            limit=400,
        )
    return float(val)


# --- sigma grids -------------------------------------------------------------

@dataclass(frozen=True)
class SigmaGrid:
    """Log-uniform quadrature grid for the dsigma/sigma measure."""

    sigma_min: float
    sigma_max: float
    points_per_decade: int = 48

    def __post_init__(self):
        if not (0 < self.sigma_min < self.sigma_max):
            raise ValueError("need 0 < sigma_min < sigma_max")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be positive")

    @cached_property
    def nodes(self) -> np.ndarray:
        count = int(
            np.ceil(
                self.points_per_decade
                * np.log10(self.sigma_max / self.sigma_min)
            )
        )
        return np.exp(
            np.linspace(np.log(self.sigma_min), np.log(self.sigma_max), count + 1)
        )

    @cached_property
    def weights(self) -> np.ndarray:
        """Uniform log-spacing weight per node."""
        step = np.log(self.nodes[1] / self.nodes[0])
        return np.full(self.nodes.size, step)

    def calibration(self, window: Window, spectral_values, power: int = 2):
        """Discrete resolution-of-identity sums s(m) = sum_j wgt w(sigma_j^power m)^2."""
        m = np.atleast_1d(np.asarray(spectral_values, dtype=float))
        args = np.outer(self.nodes**power, m)
        return (self.weights[:, None] * window(args) ** 2).sum(axis=0)

    def coverage_defect(self, window: Window, spectral_values, power: int = 2):
        """Truncation defect of the analytic calibration over [smin, smax]."""
        s = self.calibration(window, spectral_values, power)
        return np.abs(s - window.resolution_constant(power))


# --- operators ---------------------------------------------------------------

@dataclass
class OperatorSpec:
    """Specification of a self-adjoint operator L (used through A = -L)."""

    kind: str  # laplacian | schrodinger | ornstein_uhlenbeck
    grid: Grid | None = None
    potential: Field | None = None
    modes: int = 0

    def __post_init__(self):
        if self.kind in ("laplacian", "schrodinger") and self.grid is None:
            raise ValueError(f"{self.kind} operator needs a grid")
        if self.kind == "schrodinger":
            if self.potential is None:
                raise ValueError("schrodinger operator needs a potential")
            v = self.potential.values
            if np.max(np.abs(v.imag)) > 0 or np.min(v.real) < 0:
                raise ValueError("potential must be real-valued and nonnegative")
        if self.kind == "ornstein_uhlenbeck" and self.modes < 16:
            raise ValueError("ornstein_uhlenbeck needs modes >= 16")


def _second_difference_matrix(n: int, h: float) -> np.ndarray:
    """Periodic centered second-difference discretization of -d^2/dx^2."""
    A = np.zeros((n, n))
    idx = np.arange(n)
    A[idx, idx] = 2.0
    A[idx, (idx + 1) % n] = -1.0
    A[idx, (idx - 1) % n] = -1.0
    return A / h**2


@dataclass
class SpectralDecomp:
    """Eigenpairs of A = -L, with A-orthonormal modes.

    ``modes`` has one column per eigenvector, orthonormal with respect to
    the ``point_weights`` quadrature (h^d for Lebesgue kinds, exp(-x^2) h
    for the Ornstein-Uhlenbeck kind).  The Laplacian kind keeps a fast
    Fourier-diagonal path and only materializes ``modes`` on demand.
    """

    kind: str
    grid: Grid | None
    lambdas: np.ndarray
    point_weights: np.ndarray = field(repr=False)
    _modes: np.ndarray | None = field(default=None, repr=False)
    _fourier_lams: np.ndarray | None = field(default=None, repr=False)

    @property
    def fourier_diagonal(self) -> bool:
        return self._fourier_lams is not None

    @property
    def modes(self) -> np.ndarray:
        if self._modes is None:
            self._modes = self._build_plane_waves()
        return self._modes

    def _build_plane_waves(self) -> np.ndarray:
        g = self.grid
        if g.npoints > DENSE_GUARD:
            raise ResourceGuardError(
                f"dense mode matrix needs n^d <= {DENSE_GUARD}, got {g.npoints}"
            )
        coords = np.stack(g.coords(), axis=1)
        freqs = np.stack(g.freq_coords(), axis=1)
        vol = (2.0 * g.half_extent) ** g.d
        U = np.exp(1j * coords @ freqs.T) / np.sqrt(vol)
        # column order must match the sorted lambdas
        return U[:, self._fourier_sort]

    @cached_property
    def _fourier_sort(self):
        return np.argsort(self._fourier_lams, kind="stable")

    def to_coeffs(self, values: np.ndarray) -> np.ndarray:
        return self.modes.conj().T @ (self.point_weights * values)

    def from_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        return self.modes @ coeffs

    def apply(self, g, values: np.ndarray) -> np.ndarray:
        """g(A) applied to raw sample values."""
        if self.fourier_diagonal:
            v = values.reshape(self.grid.shape())
            V = np.fft.fftshift(np.fft.fftn(v, norm="ortho"))
            V *= g(self._fourier_lams).reshape(self.grid.shape())
            return np.fft.ifftn(np.fft.ifftshift(V), norm="ortho").ravel()
        c = self.to_coeffs(values)
        return self.from_coeffs(np.asarray(g(self.lambdas)) * c)

    def apply_diag(self, gvals: np.ndarray, values: np.ndarray) -> np.ndarray:
        """Same as `apply` with precomputed g(lambda) in sorted-lambda order."""
        if self.fourier_diagonal:
            v = values.reshape(self.grid.shape())
            V = np.fft.fftshift(np.fft.fftn(v, norm="ortho")).ravel()
            diag = np.empty_like(gvals)
            diag[self._fourier_sort] = gvals
            V = V * diag
            V = V.reshape(self.grid.shape())
            return np.fft.ifftn(np.fft.ifftshift(V), norm="ortho").ravel()
        c = self.to_coeffs(values)
        return self.from_coeffs(gvals * c)


def eigendecompose(spec: OperatorSpec) -> SpectralDecomp:
    """Eigendecomposition of A = -L for the requested operator kind."""
    if spec.kind == "laplacian":
        g = spec.grid
        lam_lattice = g.freq_radius() ** 2
        lambdas = np.sort(lam_lattice)
        weights = np.full(g.npoints, g.cell_measure)
        return SpectralDecomp(
            "laplacian", g, lambdas, weights, _fourier_lams=lam_lattice
        )

    if spec.kind == "schrodinger":
        g = spec.grid
        if g.npoints > DENSE_GUARD:
            raise ResourceGuardError(
                f"dense eigensolve needs n^d <= {DENSE_GUARD}, got {g.npoints}"
            )
        lap1 = _second_difference_matrix(g.n, g.h)
        A = np.zeros((g.npoints, g.npoints))
        eye = np.eye(g.n)
        for axis in range(g.d):
            mats = [eye] * g.d
            mats[axis] = lap1
            term = mats[0]
            for m in mats[1:]:
                term = np.kron(term, m)
            A += term
        A += np.diag(spec.potential.values.real)
        lambdas, vecs = np.linalg.eigh(A)
        lam_max = np.max(np.abs(lambdas))
        if np.min(lambdas) < -1e-10 * lam_max:
            raise ValueError("negative eigenvalue beyond tolerance")
        lambdas = np.clip(lambdas, 0.0, None)
        weights = np.full(g.npoints, g.cell_measure)
        modes = vecs / np.sqrt(g.cell_measure)
        return SpectralDecomp("schrodinger", g, lambdas, weights, modes)

    if spec.kind == "ornstein_uhlenbeck":
        g = spec.grid or Grid(1, 1024, 10.0)
        x = g.coords()[0]
        weights = np.exp(-(x**2)) * g.h
        K = spec.modes
        # physicists' Hermite polynomials, L2(gamma)-normalized, then
        # re-orthonormalized against the discrete measure so the Gram is
        # the identity to machine precision
        basis = np.empty((g.npoints, K))
        for k in range(K):
            coef = np.zeros(k + 1)
            coef[k] = 1.0
            norm = np.sqrt(np.sqrt(np.pi) * 2.0**k * float(math.factorial(k)))
            basis[:, k] = hermval(x, coef) / norm
        W = np.sqrt(weights)[:, None]
        Q, R = np.linalg.qr(W * basis)
        signs = np.sign(np.diag(R))
        modes = (Q * signs) / W
        lambdas = np.arange(K, dtype=float)
        return SpectralDecomp("ornstein_uhlenbeck", g, lambdas, weights, modes)

    raise ValueError(f"unknown operator kind {spec.kind!r}")


def apply_calculus(decomp: SpectralDecomp, g, f: Field) -> Field:
    """g(A) f via the spectral theorem."""
    if decomp.grid is not None and f.grid != decomp.grid:
        raise ValueError("field grid does not match the decomposition")
    return Field(f.grid, decomp.apply(g, f.values))


def fourier_multiplier(symbol, f: Field) -> Field:
    """Multiplication by symbol(xi) on the Fourier side."""
    F = fourier_forward(f)
    F.values *= np.asarray(symbol(*f.grid.freq_coords()), dtype=np.complex128)
    return fourier_inverse(F)


def propagator(decomp: SpectralDecomp, kind: str, t: float, f: Field) -> Field:
    """Evolution operators defined through the calculus of A = -L."""
    if kind == "schrodinger_flow":
        g = lambda lam: np.exp(-1j * t * lam)
    elif kind == "half_wave":
        g = lambda lam: np.exp(1j * t * np.sqrt(lam))
    elif kind == "cosine_wave":
        g = lambda lam: np.cos(t * np.sqrt(lam))
    elif kind == "heat":
        if t < 0:
            raise ValueError("heat time must be nonnegative")
        g = lambda lam: np.exp(-t * lam)
    else:
        raise ValueError(f"unknown propagator kind {kind!r}")
    return apply_calculus(decomp, g, f)


def kernel_matrix(decomp: SpectralDecomp, g) -> np.ndarray:
    """Dense integral kernel K(x,y) = sum_i g(lam_i) u_i(x) conj(u_i(y)).

    Applying K by quadrature (sum_y K(x,y) f(y) w_y) reproduces
    `apply_calculus`.
    """
    if decomp.lambdas.size and decomp.modes.shape[0] > DENSE_GUARD:
        raise ResourceGuardError("kernel matrix restricted to the dense regime")
    U = decomp.modes
    gvals = np.asarray(g(decomp.lambdas))
    return (U * gvals) @ U.conj().T
