"""Time integration: exact free propagator and Strang split stepping.

The equation is i u_t + Delta u = |u|^(p-1) u (defocusing).  One Strang step
is

    u <- exp(-i dt/2 |u|^(p-1)) u          (exact nonlinear phase)
    u <- F^-1 [ exp(-i rho^2 dt) F u ]     (exact free flow)
    u <- exp(-i dt/2 |u|^(p-1)) u

Both substeps preserve |u| pointwise or are unitary, so the discrete mass is
conserved to rounding; the energy error is the usual second-order splitting
residual.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.fft as _fft
from scipy.integrate import simpson

from .errors import (
    ConfigurationError,
    InstabilityError,
    MassDriftError,
    PhaseGuardError,
    RescaleFailureError,
    StrideError,
    TailLeakError,
)
from .grid import (
    BOUNDARY_TOL,
    RadialField,
    RadialGrid,
    apply_multiplier,
    boundary_mass_fraction,
    ensure_interior,
    forward_values,
    inverse_values,
    make_grid,
    radial_derivative,
    radial_integral,
)

THEOREM_RANGE = (7.0 / 3.0, 3.0)  # (exclusive, inclusive) in p
RESCALE_CAP = 2**16


@dataclass(frozen=True)
class StepPolicy:
    """Base step, snapshot/observer stride, and stability knobs.

    dt * rho_max^2 <= 2 pi * oversample is enforced before stepping: the
    split scheme is unconditionally stable but silently loses phase accuracy
    once the fastest resolved mode turns more than ~oversample cycles per
    step.  dealias=None means "on exactly for the cubic power".
    """

    dt: float
    decimation: int = 10
    dealias: bool | None = None
    oversample: float = 8.0

    def __post_init__(self):
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.decimation < 1:
            raise ConfigurationError("decimation stride must be >= 1")
        if self.oversample <= 0:
            raise ConfigurationError("oversample factor must be positive")

    def dealias_for(self, p: float) -> bool:
        return (p == 3.0) if self.dealias is None else self.dealias

    def check_guard(self, grid: RadialGrid) -> None:
        if self.dt * grid.rho_max**2 > 2.0 * np.pi * self.oversample + 1e-12:
            raise PhaseGuardError(
                f"dt = {self.dt:g} violates dt * rho_max^2 <= 2 pi * {self.oversample:g} "
                f"(rho_max = {grid.rho_max:g})"
            )


def guard_limited_dt(grid: RadialGrid, requested: float, oversample: float = 8.0) -> float:
    """Largest step <= requested satisfying the phase guard on this grid."""
    return min(requested, 2.0 * np.pi * oversample / grid.rho_max**2)


@dataclass
class Trajectory:
    """Per-step record of a single run plus requested observables."""

    grid: RadialGrid
    p: float
    policy: StepPolicy
    linear_only: bool
    times: np.ndarray
    mass_series: np.ndarray
    norm_samples: dict[tuple[float, float], np.ndarray]
    energy_times: np.ndarray
    energy_series: np.ndarray
    observers: dict[str, tuple[np.ndarray, np.ndarray]]
    captured: dict[float, RadialField]
    final: RadialField
    t0: float
    t_end: float

    @property
    def in_theorem_range(self) -> bool:
        lo, hi = THEOREM_RANGE
        return lo < self.p <= hi

    @property
    def mass_drift(self) -> float:
        m0 = self.mass_series[0]
        if m0 == 0.0:
            return 0.0
        return float(np.max(np.abs(self.mass_series - m0)) / m0)

    @property
    def energy_drift(self) -> float:
        e0 = self.energy_series[0]
        scale = abs(e0) if e0 != 0.0 else 1.0
        return float(np.max(np.abs(self.energy_series - e0)) / scale)

    def merge(self, later: "Trajectory") -> "Trajectory":
        """Concatenate with a continuation run (dropping its t0 sample)."""
        if later.grid != self.grid or later.p != self.p:
            raise ConfigurationError("cannot merge trajectories from different setups")
        if not np.isclose(later.t0, self.t_end, rtol=0, atol=1e-9):
            raise ConfigurationError("continuation does not start where this run ends")
        norm = {}
        for pair, series in self.norm_samples.items():
            norm[pair] = np.concatenate([series, later.norm_samples[pair][1:]])
        obs = {}
        for name, (t, v) in self.observers.items():
            lt, lv = later.observers[name]
            obs[name] = (np.concatenate([t, lt]), np.concatenate([v, lv]))
        cap = dict(self.captured)
        cap.update(later.captured)
        return Trajectory(
            grid=self.grid,
            p=self.p,
            policy=self.policy,
            linear_only=self.linear_only,
            times=np.concatenate([self.times, later.times[1:]]),
            mass_series=np.concatenate([self.mass_series, later.mass_series[1:]]),
            norm_samples=norm,
            energy_times=np.concatenate([self.energy_times, later.energy_times]),
            energy_series=np.concatenate([self.energy_series, later.energy_series]),
            observers=obs,
            captured=cap,
            final=later.final,
            t0=self.t0,
            t_end=later.t_end,
        )


def free_flow(u0: RadialField, t: float, boundary_tol: float | None = BOUNDARY_TOL) -> RadialField:
    """Exact linear propagation e^{i t Delta} via the e^{-i rho^2 t} multiplier."""
    if not np.isfinite(t):
        raise ConfigurationError("free-flow time must be finite")
    out = apply_multiplier(u0, np.exp(-1j * u0.grid.rho**2 * t))
    if boundary_tol is not None:
        ensure_interior(out, boundary_tol)
    return out


def _nonlinear_phase(values: np.ndarray, tau: float, p: float) -> np.ndarray:
    if p == 3.0:
        amp = np.abs(values) ** 2
    else:
        amp = np.abs(values) ** (p - 1.0)
    return values * np.exp(-1j * tau * amp)


def nls_step(u: RadialField, dt: float, p: float, dealias: bool | None = None) -> RadialField:
    """One Strang step of i u_t + Delta u = |u|^(p-1) u."""
    if dt == 0.0:
        return u
    stepper = _Stepper(u.grid, p, dt, (p == 3.0) if dealias is None else dealias)
    v = stepper.step(u.values.copy())
    if not np.all(np.isfinite(v.view(np.float64))):
        raise InstabilityError(0, dt)
    return RadialField(u.grid, v)


class _Stepper:
    """Precomputed kernels for repeated Strang steps on one grid."""

    def __init__(self, grid: RadialGrid, p: float, dt: float, dealias: bool):
        self.grid = grid
        self.p = p
        self.dt = dt
        phase = np.exp(-1j * grid.rho**2 * dt)
        if dealias:
            phase = phase * (grid.rho <= (2.0 / 3.0) * grid.rho_max)
        self.phase = phase[:-1]
        self.r_interior = grid.r[:-1]
        self.half = 0.5 * dt

    def step(self, values: np.ndarray) -> np.ndarray:
        v = _nonlinear_phase(values, self.half, self.p)
        psi = self.grid.r * v
        spec = _fft.dst(psi[:-1], type=1)
        spec *= self.phase
        psi_new = _fft.dst(spec, type=1) / (2.0 * self.grid.n)
        v = np.empty_like(values)
        v[:-1] = psi_new / self.r_interior
        v[-1] = 0.0
        return _nonlinear_phase(v, self.half, self.p)


def _energy_values(grid: RadialGrid, values: np.ndarray, p: float) -> float:
    u = RadialField(grid, values)
    du = radial_derivative(u)
    kin = 0.5 * radial_integral(du, q=2.0, boundary_tol=None)
    pot = radial_integral(u, q=p + 1.0, boundary_tol=None) / (p + 1.0)
    return kin + pot


Observer = tuple[str, int, Callable[[float, RadialField], float]]


def simulate(
    u0: RadialField,
    p: float,
    t_end: float,
    policy: StepPolicy,
    norm_pairs: Sequence[tuple[float, float]] = (),
    observers: Sequence[Observer] = (),
    capture_times: Sequence[float] = (),
    linear_only: bool = False,
    t0: float = 0.0,
    energy_stride: int | None = None,
    boundary_tol: float = BOUNDARY_TOL,
) -> Trajectory:
    """Run the split-step integrator from t0 to t_end, recording norms.

    norm_pairs configures the (q_t, r_x) accumulators: the L^{r_x} norm of
    each step's state is recorded so space-time norms can be integrated
    later.  Observers are (name, stride, fn) triples evaluated on decimated
    steps; capture_times stores whole fields at the nearest step time.
    """
    if p <= 1:
        raise ConfigurationError(f"nonlinearity power must exceed 1, got {p}")
    if t_end < t0:
        raise ConfigurationError("t_end must be >= t0")
    policy.check_guard(u0.grid)
    ensure_interior(u0, boundary_tol)

    grid = u0.grid
    n_steps = int(round((t_end - t0) / policy.dt))
    if n_steps == 0 and t_end > t0:
        n_steps = 1
    stepper = _Stepper(grid, p, policy.dt, policy.dealias_for(p) and not linear_only)
    if linear_only:
        stepper.half = 0.0

    pairs = [(float(q), float(r)) for (q, r) in norm_pairs]
    norm_series: dict[tuple[float, float], list[float]] = {pr: [] for pr in pairs}
    times = np.empty(n_steps + 1)
    mass = np.empty(n_steps + 1)
    e_times: list[float] = []
    e_vals: list[float] = []
    obs_series: dict[str, tuple[list[float], list[float]]] = {
        name: ([], []) for (name, _, _) in observers
    }
    captured: dict[float, RadialField] = {}
    want_capture = sorted(float(t) for t in capture_times)
    e_stride = energy_stride if energy_stride is not None else max(1, n_steps // 64)

    w = 4.0 * np.pi * grid.dr * grid.r**2
    w_trap = w.copy()
    w_trap[-1] *= 0.5

    def record(k: int, values: np.ndarray) -> None:
        t = t0 + k * policy.dt
        times[k] = t
        m = float(np.sum(w_trap * np.abs(values) ** 2))
        if not np.isfinite(m):
            raise InstabilityError(_initial_step + k, t)
        mass[k] = m
        for (qt, rx) in pairs:
            norm_series[(qt, rx)].append(
                float(np.sum(w_trap * np.abs(values) ** rx) ** (1.0 / rx))
            )
        if k % e_stride == 0 or k == n_steps:
            e_times.append(t)
            e_vals.append(_energy_values(grid, values, p))
        fld = None
        for (name, stride, fn) in observers:
            if k % stride == 0 or k == n_steps:
                if fld is None:
                    fld = RadialField(grid, values.copy())
                ts, vs = obs_series[name]
                ts.append(t)
                vs.append(float(fn(t, fld)))
        while want_capture and t >= want_capture[0] - 0.5 * policy.dt:
            captured[want_capture.pop(0)] = RadialField(grid, values.copy())

    values = u0.values.copy()
    record(0, values)
    for k in range(1, n_steps + 1):
        values = stepper.step(values)
        record(k, values)

    final = RadialField(grid, values)
    frac = boundary_mass_fraction(final)
    if frac > boundary_tol:
        raise TailLeakError(
            f"radiation reached the boundary: mass fraction {frac:.3e} beyond 0.9 r_max "
            f"at t = {t0 + n_steps * policy.dt:g} (tol {boundary_tol:.1e})"
        )

    traj = Trajectory(
        grid=grid,
        p=p,
        policy=policy,
        linear_only=linear_only,
        times=times,
        mass_series=mass,
        norm_samples={pr: np.asarray(v) for pr, v in norm_series.items()},
        energy_times=np.asarray(e_times),
        energy_series=np.asarray(e_vals),
        observers={k: (np.asarray(t), np.asarray(v)) for k, (t, v) in obs_series.items()},
        captured=captured,
        final=final,
        t0=t0,
        t_end=t0 + n_steps * policy.dt,
    )
    if traj.mass_drift > 1e-10:
        raise MassDriftError(
            f"relative mass drift {traj.mass_drift:.3e} exceeds 1e-10; "
            "the run is under-resolved"
        )
    return traj


def scattering_pair(p: float, d: int = 3) -> tuple[float, float]:
    """The L^{(p+1)/(1-s_c)}_t L^{p+1}_x exponents whose finiteness gives scattering."""
    from .dyadic import critical_exponent

    s_c = critical_exponent(p, d)
    if s_c >= 1:
        raise ConfigurationError("scattering pair needs s_c < 1")
    return ((p + 1.0) / (1.0 - s_c), p + 1.0)


def smallness_exponent(p: float, d: int = 3) -> float:
    """The scale-invariant space-time Lebesgue exponent (d+2)(p-1)/2."""
    return (d + 2.0) * (p - 1.0) / 2.0


def rescale_field(u0: RadialField, lam: float, p: float) -> RadialField:
    """Zoom-out rescaling u0 -> lam^(-2/(p-1)) u0(x / lam) on the lam-adapted grid.

    For grid-aligned lam the adapted grid keeps n and multiplies r_max by
    lam, so the samples map exactly (no interpolation).
    """
    g = make_grid(u0.grid.r_max * lam, u0.grid.n)
    return RadialField(g, u0.values * lam ** (-2.0 / (p - 1.0)))


def rescale_initial_data(
    u0: RadialField,
    delta: float,
    p: float,
    policy: StepPolicy | None = None,
) -> tuple[float, RadialField]:
    """Doubling search for lam = 2^k making the unit-window norm small.

    Finds the smallest lam = 2^k (k >= 0) such that the simulated
    L^{(d+2)(p-1)/2}_{t,x} norm of the rescaled solution on [0, 1] is at
    most delta.  The measured norm must decrease along the search (the
    critical norm is invariant while the window shrinks in rescaled time).
    """
    if not 0.0 < delta < 1.0:
        raise ConfigurationError(f"smallness target must lie in (0,1), got {delta}")
    q = smallness_exponent(p)
    previous = None
    lam = 1.0
    while lam <= RESCALE_CAP:
        candidate = rescale_field(u0, lam, p)
        dt = guard_limited_dt(candidate.grid, 1.0 / 256.0)
        pol = StepPolicy(dt=dt, dealias=False)
        traj = simulate(candidate, p, 1.0, pol, norm_pairs=[(q, q)])
        norm = spacetime_norm(traj, q, q)
        if previous is not None and norm > previous * (1.0 + 1e-9):
            raise RescaleFailureError(
                f"space-time norm rose from {previous:g} to {norm:g} at lam = {lam:g}"
            )
        previous = norm
        if norm <= delta:
            return lam, candidate
        lam *= 2.0
    raise RescaleFailureError(f"no lam <= {RESCALE_CAP} reaches delta = {delta:g}")


def spacetime_norm(
    traj: Trajectory,
    q_t: float,
    r_x: float,
    window: tuple[float, float] | None = None,
) -> float:
    """(integral over the window of ||u(t)||_{L^{r_x}}^{q_t} dt)^{1/q_t}.

    Integrates the recorded per-step samples with Simpson's rule; the pair
    must have been configured before the run.
    """
    key = (float(q_t), float(r_x))
    if key not in traj.norm_samples:
        raise ConfigurationError(
            f"norm pair {key} was not configured for this trajectory"
        )
    t = traj.times
    y = traj.norm_samples[key] ** q_t
    if window is not None:
        a, b = window
        sel = (t >= a - 1e-12) & (t <= b + 1e-12)
        t = t[sel]
        y = y[sel]
        if t.size < 3:
            raise StrideError(
                f"only {t.size} samples in window [{a:g}, {b:g}]; reduce dt"
            )
    if t.size < 2:
        return 0.0
    val = simpson(y, x=t)
    return float(max(val, 0.0) ** (1.0 / q_t))


# ---------------------------------------------------------------------------
# Checkpointing
# ---------------------------------------------------------------------------

CHECKPOINT_FORMAT = "radnls-checkpoint-1"


def _encode(a: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(a).tobytes()).decode("ascii")


def _decode(s: str, dtype) -> np.ndarray:
    return np.frombuffer(base64.b64decode(s.encode("ascii")), dtype=dtype)


def save_checkpoint(path, traj: Trajectory, t_end_target: float) -> None:
    """Serialize a run in progress; float arrays round-trip bit-exactly."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "grid": {"r_max": traj.grid.r_max, "n": traj.grid.n},
        "p": traj.p,
        "t0": traj.t0,
        "t": traj.t_end,
        "t_end_target": t_end_target,
        "step_index": int(round((traj.t_end - traj.t0) / traj.policy.dt)),
        "linear_only": traj.linear_only,
        "policy": {
            "dt": traj.policy.dt,
            "decimation": traj.policy.decimation,
            "dealias": traj.policy.dealias,
            "oversample": traj.policy.oversample,
        },
        "norm_pairs": sorted(traj.norm_samples.keys()),
        "field_re": _encode(traj.final.values.real),
        "field_im": _encode(traj.final.values.imag),
        "times": _encode(traj.times),
        "mass": _encode(traj.mass_series),
        "norm_series": {
            f"{q}:{r}": _encode(v) for (q, r), v in traj.norm_samples.items()
        },
        "energy_times": _encode(traj.energy_times),
        "energy": _encode(traj.energy_series),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, sort_keys=True)


def load_checkpoint(path) -> dict:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ConfigurationError(f"not a {CHECKPOINT_FORMAT} file: {path}")
    return doc


def resume_checkpoint(path, t_end: float | None = None) -> Trajectory:
    """Continue a checkpointed run to its recorded (or overridden) t_end.

    The restart state is bit-identical to the saved field and subsequent
    step times reuse the global step index, so a resumed run reproduces the
    uninterrupted one to rounding.
    """
    doc = load_checkpoint(path)
    grid = make_grid(doc["grid"]["r_max"], doc["grid"]["n"])
    values = _decode(doc["field_re"], np.float64) + 1j * _decode(doc["field_im"], np.float64)
    u = RadialField(grid, values)
    pol = StepPolicy(**doc["policy"])
    pairs = [tuple(pr) for pr in doc["norm_pairs"]]
    target = doc["t_end_target"] if t_end is None else t_end
    tail = simulate(
        u,
        doc["p"],
        target,
        pol,
        norm_pairs=pairs,
        linear_only=doc["linear_only"],
        t0=doc["t"],
    )
    head = Trajectory(
        grid=grid,
        p=doc["p"],
        policy=pol,
        linear_only=doc["linear_only"],
        times=_decode(doc["times"], np.float64),
        mass_series=_decode(doc["mass"], np.float64),
        norm_samples={
            tuple(float(x) for x in k.split(":")): _decode(v, np.float64)
            for k, v in doc["norm_series"].items()
        },
        energy_times=_decode(doc["energy_times"], np.float64),
        energy_series=_decode(doc["energy"], np.float64),
        observers={},
        captured={},
        final=u,
        t0=doc["t0"],
        t_end=doc["t"],
    )
    return head.merge(tail)
