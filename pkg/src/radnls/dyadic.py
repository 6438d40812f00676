"""Dyadic frequency projections, Besov/Sobolev norms, and tail radii.

The partition of unity uses the smooth step

    eta(s) = g(2 - s) / (g(2 - s) + g(s - 1)),   g(t) = exp(-1/t) for t > 0

which is exactly 1 for s <= 1 and exactly 0 for s >= 2.  Shell multipliers
are phi_j(rho) = eta(rho / 2^j) - eta(rho / 2^(j-1)), supported in
[2^(j-1), 2^(j+1)], and they telescope to 1 on the resolved band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainTooSmallError, RangeError, TruncationError
from .grid import (
    BOUNDARY_TOL,
    RadialField,
    RadialGrid,
    apply_multiplier,
    ensure_interior,
    forward_values,
    frequency_integral,
    inverse_values,
    radial_integral,
    to_frequency,
)

# A truncated homogeneous sum is trusted only if the four outermost shells
# carry at most this fraction of it.
SHELL_BUDGET = 0.01


def _bridge(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(s) -> np.ndarray:
    """eta(s): 1 for s <= 1, 0 for s >= 2, smooth and nonincreasing."""
    s = np.asarray(s, dtype=float)
    a = _bridge(2.0 - s)
    b = _bridge(s - 1.0)
    return a / (a + b)


@dataclass(frozen=True)
class CutoffProfile:
    """Smooth radial bump: 1 on |x| <= 1, supported on |x| <= 2."""

    def __call__(self, x) -> np.ndarray:
        return smooth_step(np.abs(np.asarray(x, dtype=float)))


SMOOTH_CUTOFF = CutoffProfile()


@dataclass(frozen=True)
class DyadicPartition:
    """Shell multipliers phi_j for j_min <= j <= j_max on a given grid."""

    grid: RadialGrid
    j_min: int
    j_max: int
    _shells: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise ConfigurationError("empty dyadic range")
        object.__setattr__(self, "_shells", {})

    @property
    def indices(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def shell_multiplier(self, j: int) -> np.ndarray:
        if j not in self.indices:
            raise RangeError(f"dyadic index {j} outside [{self.j_min}, {self.j_max}]")
        cached = self._shells.get(j)
        if cached is None:
            rho = self.grid.rho
            cached = smooth_step(rho / 2.0**j) - smooth_step(rho / 2.0 ** (j - 1))
            cached.setflags(write=False)
            self._shells[j] = cached
        return cached

    def partition_sum(self) -> np.ndarray:
        return sum(self.shell_multiplier(j) for j in self.indices)


def default_partition(grid: RadialGrid) -> DyadicPartition:
    """Dyadic range resolved by the grid: lowest node to rho_max / 2."""
    j_min = math.ceil(math.log2(2.0 * np.pi / grid.r_max))
    j_max = math.floor(math.log2(grid.rho_max / 2.0))
    return DyadicPartition(grid, j_min, j_max)


def critical_exponent(p: float, d: int = 3) -> float:
    """Scaling-critical Sobolev regularity s_c = d/2 - 2/(p - 1)."""
    if p <= 1:
        raise ConfigurationError(f"nonlinearity power must exceed 1, got {p}")
    if d < 3:
        raise ConfigurationError(f"dimension must be >= 3, got {d}")
    return d / 2.0 - 2.0 / (p - 1.0)


def project(u: RadialField, j: int, partition: DyadicPartition | None = None) -> RadialField:
    """Littlewood-Paley projection onto the annulus |xi| ~ 2^j."""
    part = partition if partition is not None else default_partition(u.grid)
    return apply_multiplier(u, part.shell_multiplier(j))


def besov_shells(
    u: RadialField,
    s: float,
    partition: DyadicPartition | None = None,
    boundary_tol: float | None = BOUNDARY_TOL,
) -> dict[int, float]:
    """Per-shell contributions 2^(j s) * ||P_j u||_L1.

    The leak check applies to the input field; individual shell pieces are
    integrated unchecked (their fidelity is audited collectively by the
    boundary-shell budget in besov_norm).
    """
    if boundary_tol is not None:
        ensure_interior(u, boundary_tol)
    part = partition if partition is not None else default_partition(u.grid)
    spec = to_frequency(u)
    out: dict[int, float] = {}
    for j in part.indices:
        piece = RadialField(
            u.grid, inverse_values(u.grid, spec * part.shell_multiplier(j))
        )
        out[j] = 2.0 ** (j * s) * radial_integral(piece, q=1.0, boundary_tol=None)
    return out


def besov_norm(
    u: RadialField,
    s: float,
    partition: DyadicPartition | None = None,
    check_truncation: bool = True,
    boundary_tol: float | None = BOUNDARY_TOL,
) -> float:
    """Homogeneous B^s_{1,1} norm: sum_j 2^(j s) ||P_j u||_L1, truncated.

    The homogeneous sum over all of Z cannot live on a grid, so the four
    boundary shells are audited: if they carry more than SHELL_BUDGET of the
    sum the truncation is not trustworthy and a TruncationError is raised.
    """
    shells = besov_shells(u, s, partition, boundary_tol=boundary_tol)
    total = sum(shells.values())
    if total == 0.0:
        return 0.0
    if check_truncation:
        part = partition if partition is not None else default_partition(u.grid)
        edge = [part.j_min, part.j_min + 1, part.j_max - 1, part.j_max]
        edge_sum = sum(shells.get(j, 0.0) for j in set(edge))
        if edge_sum > SHELL_BUDGET * total:
            raise TruncationError(
                f"boundary shells carry {edge_sum / total:.2%} of the dyadic sum "
                f"(budget {SHELL_BUDGET:.0%}); enlarge the grid"
            )
    return total


def sobolev_norm(u: RadialField, s: float) -> float:
    """Homogeneous Sobolev norm ||rho^s u_hat|| via Parseval."""
    if not 0.0 <= s <= 2.0:
        raise ConfigurationError(f"regularity s must lie in [0, 2], got {s}")
    spec = forward_values(u.grid, u.values)
    return math.sqrt(frequency_integral(u.grid, u.grid.rho ** (2.0 * s) * np.abs(spec) ** 2))


def tail_sums(
    u0: RadialField,
    radius: float,
    s_low: float,
    s_high: float,
    partition: DyadicPartition | None = None,
    chi: CutoffProfile = SMOOTH_CUTOFF,
) -> tuple[float, float]:
    """The two dyadic tail sums outside the cutoff at the given radius.

    Returns (sum_j 2^(j s_low) ||(1-chi(./R)) P_j u0||_L2,
             sum_j 2^(j s_high) ||(1-chi(./R)) P_j u0||_L1).
    R = 0 means no cutoff: the sums are evaluated on the full shells.
    """
    part = partition if partition is not None else default_partition(u0.grid)
    grid = u0.grid
    if radius > 0:
        outside = 1.0 - chi(grid.r / radius)
    else:
        outside = np.ones(grid.n)
    spec = to_frequency(u0)
    s1 = 0.0
    s2 = 0.0
    for j in part.indices:
        piece = inverse_values(grid, spec * part.shell_multiplier(j))
        cut = RadialField(grid, outside * piece)
        s1 += 2.0 ** (j * s_low) * math.sqrt(
            radial_integral(cut, q=2.0, boundary_tol=None)
        )
        s2 += 2.0 ** (j * s_high) * radial_integral(cut, q=1.0, boundary_tol=None)
    return s1, s2


def tail_radius(
    u0: RadialField,
    eps: float,
    chi: CutoffProfile = SMOOTH_CUTOFF,
    p: float = 3.0,
    partition: DyadicPartition | None = None,
) -> float:
    """Smallest grid-aligned R <= r_max / 4 with both tail sums <= eps.

    The exponents are s_c and d/2 + s_c for the given nonlinearity power
    (1/2 and 2 in the cubic case).  The cutoff family is pointwise monotone
    in R, so a bisection over grid nodes finds the smallest admissible R.
    """
    if eps <= 0:
        raise ConfigurationError("tail smallness eps must be positive")
    ensure_interior(u0)
    s_c = critical_exponent(p)
    s_high = u0.grid.d / 2.0 + s_c

    def ok(radius: float) -> bool:
        a, b = tail_sums(u0, radius, s_c, s_high, partition, chi)
        return a <= eps and b <= eps

    if ok(0.0):
        return 0.0
    k_max = u0.grid.n // 4  # R <= r_max / 4
    dr = u0.grid.dr
    if not ok(k_max * dr):
        raise DomainTooSmallError(
            f"no tail radius <= r_max/4 = {k_max * dr:g} achieves eps = {eps:g}"
        )
    lo, hi = 0, k_max  # ok(hi * dr) holds, ok(lo * dr) fails
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid * dr):
            hi = mid
        else:
            lo = mid
    return hi * dr
