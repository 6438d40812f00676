"""Scalar functionals: conserved quantities, pseudoconformal energy,
space-time norms, dispersive-decay ratios, and dyadic local bounds.

The pseudoconformal energy of a solution v of the defocusing equation is

    E_pc(t) = ||(x + 2it grad) v||_L2^2 + (8/(p+1)) t^2 ||v||_{p+1}^{p+1}

and the virial computation gives, for v solving the full equation,

    d/dt E_pc(t) = -(4 (d(p-1) - 4) / (p+1)) t ||v(t)||_{p+1}^{p+1}

(the cubic case in d = 3 is d/dt E_pc = -2 t ||v||_4^4).  The coefficient
vanishes at the mass-critical power d(p-1) = 4 and is negative throughout
the intercritical range, which is the monotonicity the solver verifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .dyadic import besov_norm, critical_exponent, sobolev_norm
from .errors import ConfigurationError, StrideError
from .evolution import Trajectory, free_flow, spacetime_norm  # noqa: F401  (re-export)
from .grid import (
    BOUNDARY_TOL,
    RadialField,
    apply_multiplier,
    ensure_interior,
    radial_derivative,
    radial_integral,
    sup_norm,
)


def mass(u: RadialField) -> float:
    """Conserved L2 mass, integral |u|^2 dx."""
    return radial_integral(u, q=2.0)


def energy(u: RadialField, p: float) -> float:
    """Conserved energy, integral [ |grad u|^2 / 2 + |u|^(p+1) / (p+1) ] dx."""
    du = radial_derivative(u)
    return 0.5 * radial_integral(du, q=2.0, boundary_tol=None) + radial_integral(
        u, q=p + 1.0
    ) / (p + 1.0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_PHI = 2.0 * np.pi * (np.arange(16) + 0.5) / 16.0


def momentum(u: RadialField) -> np.ndarray:
    """Momentum integral Im[conj(u) grad u] dx as a 3-vector residual.

    For radial fields the angular factor integrates to zero identically;
    the angular quadrature is evaluated explicitly so the returned vector is
    an honest rounding-level residual rather than a hard-coded zero.
    """
    du = radial_derivative(u)
    integrand = np.imag(np.conj(u.values) * du.values) * u.grid.r**2
    i_rad = float(u.grid.dr * (np.sum(integrand[:-1]) + 0.5 * integrand[-1]))
    mu = _GL_NODES
    sin_t = np.sqrt(1.0 - mu**2)
    dphi = 2.0 * np.pi / _PHI.size
    sx = float(np.sum(_GL_WEIGHTS * sin_t) * np.sum(np.cos(_PHI)) * dphi)
    sy = float(np.sum(_GL_WEIGHTS * sin_t) * np.sum(np.sin(_PHI)) * dphi)
    sz = float(np.sum(_GL_WEIGHTS * mu) * 2.0 * np.pi)
    return i_rad * np.array([sx, sy, sz])


def vector_field(v: RadialField, t: float) -> RadialField:
    """The scalar r v + 2 i t d_r v, whose modulus is |(x + 2it grad) v|."""
    dv = radial_derivative(v)
    return RadialField(v.grid, v.grid.r * v.values + 2j * t * dv.values)


def pseudoconformal_decay_coefficient(p: float, d: int = 3) -> float:
    """The positive constant c(p) in d/dt E_pc = -c(p) t ||v||_{p+1}^{p+1}."""
    return 4.0 * (d * (p - 1.0) - 4.0) / (p + 1.0)


@dataclass(frozen=True)
class PseudoconformalRecord:
    """E_pc(t) split into its two nonnegative parts, with the decay rhs."""

    t: float
    part_vector: float
    part_potential: float
    rhs: float

    @property
    def total(self) -> float:
        return self.part_vector + self.part_potential


def pseudoconformal_energy(
    v: RadialField, t: float, p: float, boundary_tol: float = BOUNDARY_TOL / 100.0
) -> PseudoconformalRecord:
    """Evaluate E_pc(t); the r weight makes boundary mass fatal, hence the
    hundredfold tighter leak threshold."""
    if t < 0:
        raise ConfigurationError("pseudoconformal energy is tracked for t >= 0")
    ensure_interior(v, boundary_tol)
    vec = vector_field(v, t)
    part_vector = radial_integral(vec, q=2.0, boundary_tol=None)
    lp1 = radial_integral(v, q=p + 1.0, boundary_tol=None)
    part_potential = 8.0 / (p + 1.0) * t**2 * lp1
    rhs = -pseudoconformal_decay_coefficient(p) * t * lp1
    return PseudoconformalRecord(t, part_vector, part_potential, rhs)


def pseudoconformal_observers(p: float, boundary_tol: float = BOUNDARY_TOL / 100.0):
    """Observer callables recording E_pc, its parts, and ||v||_{p+1}^{p+1}."""

    def e_pc(t, v):
        return pseudoconformal_energy(v, t, p, boundary_tol).total

    def part_vector(t, v):
        return radial_integral(vector_field(v, t), q=2.0, boundary_tol=None)

    def lp1(t, v):
        return radial_integral(v, q=p + 1.0, boundary_tol=None)

    return {"E_pc": e_pc, "pc_vector": part_vector, "Lp1": lp1}


@dataclass(frozen=True)
class MonotonicityReport:
    times: np.ndarray
    e_pc: np.ndarray
    dE_dt: np.ndarray
    rhs: np.ndarray
    defect: np.ndarray
    max_relative_defect: float
    nonincreasing: bool


def monotonicity_defect(
    traj: Trajectory,
    window: tuple[float, float] = (1.0, 8.0),
    rel_floor_factor: float = 1e-8,
) -> MonotonicityReport:
    """Centered-difference d/dt E_pc against the decay identity.

    The trajectory must carry the "E_pc" and "Lp1" observers on a stride
    fine enough for differencing.  The relative defect is measured against
    max(|rhs|, floor) with floor = rel_floor_factor * E_pc at the window
    start, so late tiny right-hand sides cannot blow up the ratio.
    """
    for name in ("E_pc", "Lp1"):
        if name not in traj.observers:
            raise ConfigurationError(f"trajectory lacks the {name!r} observer")
    t_all, e_all = traj.observers["E_pc"]
    _, lp1_all = traj.observers["Lp1"]
    a, b = window
    sel = (t_all >= a - 1e-12) & (t_all <= b + 1e-12)
    t = t_all[sel]
    e = e_all[sel]
    lp1 = lp1_all[sel]
    if t.size < 9:
        raise StrideError(f"only {t.size} pseudoconformal samples in the window")
    h = np.diff(t)
    if np.max(h) > 0.02 * (b - a):
        raise StrideError(
            f"observer stride {np.max(h):g} too coarse for differencing on [{a}, {b}]"
        )
    dE = (e[2:] - e[:-2]) / (t[2:] - t[:-2])
    tm = t[1:-1]
    rhs = -pseudoconformal_decay_coefficient(traj.p) * tm * lp1[1:-1]
    floor = rel_floor_factor * e[0]
    denom = np.maximum(np.abs(rhs), floor)
    defect = np.abs(dE - rhs) / denom
    tol = float(np.max(np.abs(dE)) * np.max(h))
    nonincreasing = bool(np.all(np.diff(e) <= tol + 1e-30))
    return MonotonicityReport(
        times=tm,
        e_pc=e[1:-1],
        dE_dt=dE,
        rhs=rhs,
        defect=defect,
        max_relative_defect=float(np.max(defect)),
        nonincreasing=nonincreasing,
    )


def weighted_sup(u: RadialField, alpha: float) -> float:
    """max over the grid of r^alpha |u(r)|."""
    if alpha < 0:
        raise ConfigurationError(f"weight power must be >= 0, got {alpha}")
    if alpha == 0.0:
        return sup_norm(u)
    return float(np.max(u.grid.r**alpha * np.abs(u.values)))


def dispersive_ratio(
    u0: RadialField,
    p: float,
    ts: np.ndarray,
    besov: float | None = None,
) -> dict[str, np.ndarray]:
    """Decay-normalized free-flow ratios against the critical Besov norm.

    Returns the three series

        sup:  t^(1/(p-1))        * ||e^{it Delta} u0||_inf        / B
        grad: t^(1/(p-1) + 1/2)  * ||grad e^{it Delta} u0||_inf   / B
        frac: t^(2/(p-1))        * ||D^(2/(p-1)) e^{it Delta} u0||_inf / B

    with B the B^{d/2+s_c}_{1,1} norm of the data.
    """
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0):
        raise ConfigurationError("dispersive ratios need strictly positive times")
    s_c = critical_exponent(p, u0.grid.d)
    b = besov if besov is not None else besov_norm(u0, u0.grid.d / 2.0 + s_c)
    if b == 0.0:
        zero = np.zeros_like(ts)
        return {"t": ts, "sup": zero, "grad": zero.copy(), "frac": zero.copy()}
    a = 1.0 / (p - 1.0)
    frac_mult = u0.grid.rho ** (2.0 * a)
    r_sup = np.empty_like(ts)
    r_grad = np.empty_like(ts)
    r_frac = np.empty_like(ts)
    for i, t in enumerate(ts):
        w = free_flow(u0, t)
        r_sup[i] = t**a * sup_norm(w) / b
        r_grad[i] = t ** (a + 0.5) * sup_norm(radial_derivative(w)) / b
        r_frac[i] = t ** (2.0 * a) * sup_norm(apply_multiplier(w, frac_mult)) / b
    return {"t": ts, "sup": r_sup, "grad": r_grad, "frac": r_frac}


def morawetz_rhs(u0: RadialField) -> float:
    """(1 + ||u0||_{H^1/2}^3) ||u0||_{H^1}^3 ||u0||_{L2}^3, the non-scale-
    invariant a priori bound that the two-bump experiment contrasts with the
    measured scattering size."""
    h_half = sobolev_norm(u0, 0.5)
    h_one = sobolev_norm(u0, 1.0)
    l2 = math.sqrt(radial_integral(u0, q=2.0))
    return (1.0 + h_half**3) * h_one**3 * l2**3


def local_dyadic_bound(
    traj: Trajectory,
    u0: RadialField,
    octaves: range = range(-6, 0),
    besov: float | None = None,
    min_samples: int = 8,
) -> dict[int, float]:
    """Per-octave ratios of ||grad u||_{L2_t L6_x([2^j, 2^j+1])} against the
    dyadic dispersive normalization 2^(j (s_c - 1)/2) * B(u0).

    Needs the per-step "grad_L6" observer on the trajectory.
    """
    if "grad_L6" not in traj.observers:
        raise ConfigurationError("trajectory lacks the 'grad_L6' observer")
    t, g = traj.observers["grad_L6"]
    s_c = critical_exponent(traj.p, u0.grid.d)
    b = besov if besov is not None else besov_norm(u0, u0.grid.d / 2.0 + s_c)
    out: dict[int, float] = {}
    for j in octaves:
        lo, hi = 2.0**j, 2.0 ** (j + 1)
        sel = (t >= lo - 1e-12) & (t <= hi + 1e-12)
        if np.count_nonzero(sel) < min_samples:
            raise StrideError(
                f"octave [{lo:g}, {hi:g}] holds {np.count_nonzero(sel)} samples "
                f"(need {min_samples}); reduce dt"
            )
        lhs = math.sqrt(max(simpson(g[sel] ** 2, x=t[sel]), 0.0))
        out[j] = lhs / (2.0 ** (j * (s_c - 1.0) / 2.0) * b)
    return out


def grad_l6_observer():
    """Observer recording ||grad u(t)||_{L6}."""

    def fn(t, u):
        du = radial_derivative(u)
        return radial_integral(du, q=6.0, boundary_tol=None) ** (1.0 / 6.0)

    return fn


@dataclass(frozen=True)
class NormReport:
    """Named scalar diagnostics of a single field, with grid metadata."""

    r_max: float
    n: int
    p: float
    entries: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"r_max": self.r_max, "n": self.n, "p": self.p, **self.entries}


def norm_report(u: RadialField, p: float) -> NormReport:
    """The standard battery of norms for a data recipe."""
    s_c = critical_exponent(p, u.grid.d)
    entries: dict[str, float] = {
        "mass": mass(u),
        "energy": energy(u, p),
        "momentum_residual": float(np.linalg.norm(momentum(u))),
    }
    for q in sorted({2.0, 3.0, 4.0, p + 1.0}):
        entries[f"L{q:g}"] = radial_integral(u, q=q) ** (1.0 / q)
    for s in sorted({0.0, s_c, 0.5, 1.0}):
        entries[f"Hdot{s:g}"] = sobolev_norm(u, s)
    entries[f"B{u.grid.d / 2 + s_c:g}_11"] = besov_norm(u, u.grid.d / 2.0 + s_c)
    for alpha in sorted({0.0, 1.0, 2.0 / (p - 1.0)}):
        entries[f"sup_r{alpha:g}"] = weighted_sup(u, alpha)
    entries["morawetz_rhs"] = morawetz_rhs(u)
    return NormReport(u.grid.r_max, u.grid.n, p, entries)
