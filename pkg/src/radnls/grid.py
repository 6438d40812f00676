"""Radial grids and the spherically symmetric 3D Fourier transform.

For a radial function u(r) in three dimensions the Fourier transform
(convention ``f_hat(xi) = integral f(x) exp(-i x.xi) dx``) reduces to an
odd sine transform of ``psi = r * u``::

    u_hat(rho) = (4 pi / rho) * integral_0^inf sin(rho r) r u(r) dr

On the uniform grid r_k = k * dr, k = 1..n, with rho_m = m pi / r_max this
is exactly a DST-I of the interior samples of psi, so the discrete pair is
unitary: round trips and Parseval hold to rounding.  The top frequency node
rho_n is the null mode of the grid (sin(rho_n r_k) = 0 at every sample) and
is carried as an explicit zero.

Quadrature is the trapezoid rule with weight 4 pi r^2 dr; the origin
contributes nothing because of the r^2 weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
import scipy.fft as _fft

from .errors import AliasingError, ConfigurationError, TailLeakError

DIMENSION = 3

# Default ceiling on the mass fraction beyond 0.9 * r_max.  Global-norm
# operations refuse fields that leak past it rather than silently truncate.
BOUNDARY_TOL = 1e-6

# Spectral-derivative guard: fraction of L2 mass allowed in the top octave.
TOP_OCTAVE_TOL = 1e-4

MultiplierLike = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid on (0, r_max] and its conjugate frequency axis."""

    r_max: float
    n: int
    d: int = DIMENSION
    r: np.ndarray = field(init=False, repr=False, compare=False)
    rho: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d != DIMENSION:
            raise ConfigurationError("only d = 3 is supported")
        if not (isinstance(self.n, int) and _is_power_of_two(self.n) and self.n >= 256):
            raise ConfigurationError(f"n must be a power of two >= 256, got {self.n}")
        if not (np.isfinite(self.r_max) and self.r_max > 0):
            raise ConfigurationError(f"r_max must be positive, got {self.r_max}")
        dr = self.r_max / self.n
        object.__setattr__(self, "r", dr * np.arange(1, self.n + 1))
        object.__setattr__(self, "rho", (np.pi / self.r_max) * np.arange(1, self.n + 1))
        self.r.setflags(write=False)
        self.rho.setflags(write=False)

    @property
    def dr(self) -> float:
        return self.r_max / self.n

    @property
    def drho(self) -> float:
        return np.pi / self.r_max

    @property
    def rho_max(self) -> float:
        return np.pi / self.dr

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RadialGrid)
            and self.r_max == other.r_max
            and self.n == other.n
        )

    def __hash__(self) -> int:
        return hash((self.r_max, self.n))


def make_grid(r_max: float, n: int) -> RadialGrid:
    """Build a radial grid; n must be a power of two >= 256."""
    return RadialGrid(float(r_max), int(n))


@dataclass(frozen=True)
class RadialField:
    """Complex radial samples u_k ~ u(r_k) on a RadialGrid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n,):
            raise ConfigurationError(
                f"field has {v.shape} samples, grid expects ({self.grid.n},)"
            )
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ConfigurationError("field samples must be finite")
        object.__setattr__(self, "values", v)
        v.setflags(write=False)

    def with_values(self, values: np.ndarray) -> "RadialField":
        return RadialField(self.grid, values)

    def __add__(self, other: "RadialField") -> "RadialField":
        _require_same_grid(self, other)
        return RadialField(self.grid, self.values + other.values)

    def __sub__(self, other: "RadialField") -> "RadialField":
        _require_same_grid(self, other)
        return RadialField(self.grid, self.values - other.values)

    def __mul__(self, c) -> "RadialField":
        return RadialField(self.grid, self.values * c)

    __rmul__ = __mul__

    def conj(self) -> "RadialField":
        return RadialField(self.grid, np.conj(self.values))


def _require_same_grid(a: RadialField, b: RadialField) -> None:
    if a.grid != b.grid:
        raise ConfigurationError("fields live on different grids")


def field_from_profile(grid: RadialGrid, profile: Callable[[np.ndarray], np.ndarray]) -> RadialField:
    """Sample a radial profile r -> u(r) on the grid."""
    return RadialField(grid, np.asarray(profile(grid.r), dtype=np.complex128))


def zero_field(grid: RadialGrid) -> RadialField:
    return RadialField(grid, np.zeros(grid.n, dtype=np.complex128))


def embed_field(u: RadialField, factor: int) -> RadialField:
    """Zero-pad onto a grid enlarged by an integer factor (same dr).

    Sample locations of the source grid are a prefix of the target's, so the
    embedding is exact.
    """
    if factor < 1 or not isinstance(factor, int):
        raise ConfigurationError("embedding factor must be a positive integer")
    if factor == 1:
        return u
    g = make_grid(u.grid.r_max * factor, u.grid.n * factor)
    v = np.zeros(g.n, dtype=np.complex128)
    v[: u.grid.n] = u.values
    return RadialField(g, v)


def coarsen_field(u: RadialField, factor: int, loss_tol: float = 1e-10) -> RadialField:
    """Project onto the grid with n/factor samples at the same r_max.

    The coarse grid's frequency nodes are a prefix of the fine grid's, so
    the projection just keeps the low modes.  Refuses to discard more than
    loss_tol of the spectral mass.
    """
    if factor < 1 or not isinstance(factor, int):
        raise ConfigurationError("coarsening factor must be a positive integer")
    if factor == 1:
        return u
    if u.grid.n % factor:
        raise ConfigurationError("coarsening factor must divide n")
    g = make_grid(u.grid.r_max, u.grid.n // factor)
    spec = forward_values(u.grid, u.values)
    dens = u.grid.rho**2 * np.abs(spec) ** 2
    total = float(np.sum(dens))
    discarded = float(np.sum(dens[g.n :]))
    if total > 0 and discarded > loss_tol * total:
        raise AliasingError(
            f"coarsening by {factor} would discard {discarded / total:.3e} "
            f"of the spectral mass (tol {loss_tol:.1e})"
        )
    return RadialField(g, inverse_values(g, spec[: g.n]))


# ---------------------------------------------------------------------------
# Transforms (array-level kernels; RadialField wrappers below)
# ---------------------------------------------------------------------------

def forward_values(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    """DST-I realization of the radial transform; returns n nodes, last 0."""
    psi = grid.r * values
    s = _fft.dst(psi[:-1], type=1)
    out = np.zeros(grid.n, dtype=np.complex128)
    # 4 pi / rho * (s / 2) * dr
    out[:-1] = (2.0 * np.pi * grid.dr) * s / grid.rho[:-1]
    return out


def inverse_values(grid: RadialGrid, spectrum: np.ndarray) -> np.ndarray:
    weighted = grid.rho[:-1] * spectrum[:-1]
    t = _fft.dst(weighted, type=1)
    out = np.zeros(grid.n, dtype=np.complex128)
    out[:-1] = (grid.drho / (4.0 * np.pi**2)) * t / grid.r[:-1]
    return out


def to_frequency(u: RadialField) -> np.ndarray:
    """Spectrum on the rho nodes under the exp(-i x.xi) convention."""
    return forward_values(u.grid, u.values)


def from_frequency(grid: RadialGrid, spectrum: np.ndarray) -> RadialField:
    """Inverse transform, carrying the (2 pi)^-3 factor of the convention."""
    spectrum = np.asarray(spectrum, dtype=np.complex128)
    if spectrum.shape != (grid.n,):
        raise ConfigurationError("spectrum length does not match the grid")
    return RadialField(grid, inverse_values(grid, spectrum))


def apply_multiplier(u: RadialField, m: MultiplierLike) -> RadialField:
    """Fourier multiplier m(|xi|) acting on a radial field."""
    marr = m(u.grid.rho) if callable(m) else np.asarray(m)
    if marr.shape != (u.grid.n,):
        raise ConfigurationError("multiplier length does not match the grid")
    if not np.all(np.isfinite(np.real(marr))) or not np.all(np.isfinite(np.imag(marr))):
        raise ConfigurationError("multiplier must be finite on grid frequencies")
    spec = forward_values(u.grid, u.values)
    spec *= marr
    return RadialField(u.grid, inverse_values(u.grid, spec))


# ---------------------------------------------------------------------------
# Quadrature and checks
# ---------------------------------------------------------------------------

def _trapezoid_radial(grid: RadialGrid, samples: np.ndarray) -> float:
    """integral_0^r_max f(r) 4 pi r^2 dr with f sampled at r_1..r_n, f(0)=0."""
    w = grid.r**2 * samples
    return float(4.0 * np.pi * grid.dr * (np.sum(w[:-1]) + 0.5 * w[-1]))


def boundary_mass_fraction(u: RadialField) -> float:
    """Mass fraction in r > 0.9 r_max; 0 for the zero field."""
    dens = np.abs(u.values) ** 2
    total = _trapezoid_radial(u.grid, dens)
    if total == 0.0:
        return 0.0
    outer = u.grid.r > 0.9 * u.grid.r_max
    w = u.grid.r**2 * dens
    tail = 4.0 * np.pi * u.grid.dr * (np.sum(w[outer][:-1]) + 0.5 * w[-1])
    return float(tail / total)


def ensure_interior(u: RadialField, tol: float = BOUNDARY_TOL) -> None:
    """Raise TailLeakError if the boundary mass fraction exceeds tol."""
    frac = boundary_mass_fraction(u)
    if frac > tol:
        raise TailLeakError(
            f"boundary mass fraction {frac:.3e} exceeds {tol:.1e}; "
            "enlarge r_max instead of truncating"
        )


def radial_integral(
    u: RadialField,
    q: float = 2.0,
    alpha: float = 0.0,
    boundary_tol: float | None = BOUNDARY_TOL,
) -> float:
    """integral r^alpha |u|^q 4 pi r^2 dr (q=2, alpha=0 gives the mass)."""
    if q < 1:
        raise ConfigurationError(f"exponent q must be >= 1, got {q}")
    if alpha < 0:
        raise ConfigurationError(f"weight power alpha must be >= 0, got {alpha}")
    if boundary_tol is not None:
        ensure_interior(u, boundary_tol)
    dens = np.abs(u.values) ** q
    if alpha != 0.0:
        dens = dens * u.grid.r**alpha
    return _trapezoid_radial(u.grid, dens)


def lebesgue_norm(u: RadialField, q: float, boundary_tol: float | None = BOUNDARY_TOL) -> float:
    """The L^q norm (with respect to 4 pi r^2 dr)."""
    return radial_integral(u, q=q, alpha=0.0, boundary_tol=boundary_tol) ** (1.0 / q)


def sup_norm(u: RadialField) -> float:
    return float(np.max(np.abs(u.values)))


def top_octave_fraction(u: RadialField) -> float:
    """Fraction of spectral L2 mass carried by rho > rho_max / 2."""
    spec = forward_values(u.grid, u.values)
    dens = u.grid.rho**2 * np.abs(spec) ** 2
    total = np.sum(dens)
    if total == 0.0:
        return 0.0
    top = u.grid.rho > 0.5 * u.grid.rho_max
    return float(np.sum(dens[top]) / total)


def radial_derivative(u: RadialField, octave_tol: float = TOP_OCTAVE_TOL) -> RadialField:
    """Spectral d/dr via d_r u = (d_r psi)/r - psi/r^2 with psi = r u.

    psi is a sine series, so d_r psi is the matching cosine series; it is
    evaluated with a DCT-I on the sine coefficients.
    """
    frac = top_octave_fraction(u)
    if frac > octave_tol:
        raise AliasingError(
            f"top-octave spectral fraction {frac:.3e} exceeds {octave_tol:.1e}"
        )
    grid = u.grid
    psi = grid.r * u.values
    s = _fft.dst(psi[:-1], type=1)
    coeff = s / grid.n  # sine coefficients of psi
    padded = np.zeros(grid.n + 1, dtype=np.complex128)
    padded[1:grid.n] = coeff * grid.rho[:-1]
    dpsi = 0.5 * _fft.dct(padded, type=1)  # d_r psi at r_0..r_n
    dpsi_i = dpsi[1:]
    return RadialField(grid, (dpsi_i - psi / grid.r) / grid.r)


def frequency_integral(grid: RadialGrid, samples: np.ndarray) -> float:
    """(2 pi)^-3 integral g(rho) 4 pi rho^2 d rho over the resolved band."""
    w = grid.rho**2 * np.asarray(samples)
    return float((2.0 * np.pi) ** -3 * 4.0 * np.pi * grid.drho * (np.sum(w[:-1]) + 0.5 * w[-1]))
