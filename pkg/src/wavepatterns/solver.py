"""Explicit finite-volume solver for the heat-conductive inviscid gas in Lagrangian form.

    v_t - u_x = 0,   u_t + p_x = 0,   E_t + (p u)_x = kappa (theta_x / v)_x,

with E = R theta/(gamma-1) + u^2/2. Cells are centred on the nodes
x_j = -L + j dx (j = 0..N); the two end nodes hold the frozen far-field states.
The hyperbolic part uses a local Lax-Friedrichs flux on van Leer-limited
reconstructions of (v, u, theta); heat conduction and the optional artificial
viscosity use centred face gradients. Time stepping is three-stage SSP Runge-Kutta.
"""
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .composite import eval_composite
from .diagnostics import HeatKernelWeight, NormTracker, norms, perturbation
from .errors import ConfigurationError, NumericalAbort

# Shu-Osher weights of each stage's flux in the final update
_RK3_FLUX_WEIGHTS = (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0)


@dataclass(frozen=True)
class Grid:
    L: float = 600.0
    N: int = 6000

    def __post_init__(self):
        if self.N < 16:
            raise ConfigurationError("grid needs N >= 16 cells")
        if not self.L > 0:
            raise ConfigurationError("grid half-width L must be positive")

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def x(self):
        return -self.L + self.dx * np.arange(self.N + 1)


@dataclass
class FieldState:
    t: float
    x: np.ndarray
    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray

    def copy(self):
        return FieldState(self.t, self.x, self.v.copy(), self.u.copy(), self.theta.copy())

    def is_physical(self):
        return bool(np.all(np.isfinite(self.v)) and np.all(np.isfinite(self.u))
                    and np.all(np.isfinite(self.theta)) and np.all(self.v > 0)
                    and np.all(self.theta > 0))


@dataclass(frozen=True)
class PerturbationSpec:
    """Smooth, localized initial perturbation (phi0, psi0, xi0).

    ``gaussian``: amplitudes[i] * epsilon * exp(-((x - center)/width)^2).
    ``fourier``: a seeded sum of ``n_modes`` sinusoids with wavenumbers up to
    ``k_max``, random phases and unit-scale amplitudes, under a Gaussian envelope
    of half-width ``envelope``; each component is normalized to sup = epsilon.
    """
    mode: str = "gaussian"
    epsilon: float = 0.01
    amplitudes: tuple = (1.0, 1.0, 1.0)
    width: float = 2.0
    center: float = 0.0
    n_modes: int = 6
    k_max: float = 2.0
    envelope: float = 10.0
    seed: int = 42

    def __post_init__(self):
        if self.mode not in ("gaussian", "fourier"):
            raise ConfigurationError(f"unknown perturbation mode {self.mode!r}")
        if len(self.amplitudes) != 3:
            raise ConfigurationError("amplitudes needs one entry per component (phi, psi, xi)")
        if not (self.width > 0 and self.envelope > 0):
            raise ConfigurationError("perturbation width and envelope must be positive")

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        amps = np.asarray(self.amplitudes, dtype=float)[:, None]
        if self.mode == "gaussian":
            return self.epsilon * amps * np.exp(-((x - self.center) / self.width) ** 2)[None, :]
        rng = np.random.default_rng(self.seed)
        env = np.exp(-((x - self.center) / self.envelope) ** 2)
        out = np.empty((3, x.size))
        for i in range(3):
            k = rng.uniform(0.1, self.k_max, self.n_modes)
            ph = rng.uniform(0.0, 2 * np.pi, self.n_modes)
            a = rng.uniform(0.5, 1.0, self.n_modes)
            s = np.sum(a[:, None] * np.sin(k[:, None] * (x - self.center) + ph[:, None]), axis=0)
            s /= np.max(np.abs(s * env)) or 1.0
            out[i] = s * env
        return self.epsilon * amps * out


@dataclass(frozen=True)
class SolverConfig:
    cfl: float = 0.8
    art_visc: float = 0.05
    t_end: float = 200.0
    snapshot_every: float = 20.0
    diag_every: float = 1.0
    limiter: str = "vanleer"
    boundary_tol: float = 1e-8
    alpha: float = 1.0

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ConfigurationError("cfl must lie in (0, 1]")
        if self.art_visc < 0:
            raise ConfigurationError("art_visc must be non-negative")
        if self.t_end < 0:
            raise ConfigurationError("t_end must be non-negative")
        if self.limiter not in ("vanleer", "none"):
            raise ConfigurationError("limiter must be 'vanleer' or 'none' (first order)")


def to_conservative(params, v, u, theta):
    return v, u, params.R * theta / (params.gamma - 1.0) + 0.5 * u * u


def from_conservative(params, v, u, E):
    return v, u, (params.gamma - 1.0) / params.R * (E - 0.5 * u * u)


def initialize(wave, params, grid, pert=None):
    """Composite profile at t = 0 plus the perturbation; end nodes set to z-, z+.

    Returns (state, h2) with h2 the discrete H^2 norm of (phi0, psi0, xi0).
    """
    x = grid.x
    f = eval_composite(wave, params, x, 0.0)
    d = np.zeros((3, x.size)) if pert is None else pert.evaluate(x)
    if np.max(np.abs(d[:, [0, -1]])) > 1e-12:
        raise ConfigurationError("perturbation does not decay below 1e-12 at the domain ends")
    zl, zr = wave.pattern.z_minus, wave.pattern.z_plus
    if max(np.max(np.abs(f.state()[:, 0] - zl.as_array())),
           np.max(np.abs(f.state()[:, -1] - zr.as_array()))) > 1e-10:
        raise ConfigurationError("domain too small: composite has not reached z-/z+ at the ends")
    state = FieldState(0.0, x, f.V + d[0], f.U + d[1], f.Theta + d[2])
    for arr, (a, b) in ((state.v, (zl.v, zr.v)), (state.u, (zl.u, zr.u)),
                        (state.theta, (zl.theta, zr.theta))):
        arr[0], arr[-1] = a, b
    if not state.is_physical():
        raise ConfigurationError("initial data not positive: reduce the perturbation amplitude")
    h2 = norms(perturbation(state, wave, params)).H2
    return state, h2


def dt_limits(state, params, grid, config):
    """Separate acoustic, heat-conduction and artificial-viscosity step limits."""
    dx = grid.dx
    g = params.gamma
    p = params.R * state.theta / state.v
    out = {"acoustic": float(dx / np.max(np.sqrt(g * p / state.v)))}
    if params.kappa > 0:
        out["heat"] = float(dx * dx * params.R * np.min(state.v) / (2.0 * params.kappa * (g - 1.0)))
    if config.art_visc > 0:
        out["viscosity"] = float(dx * dx / (2.0 * config.art_visc * dx))
    return out


def stable_dt(state, params, grid, config):
    """cfl / sum(1 / limit): the limits add because the stiffnesses act together."""
    return config.cfl / sum(1.0 / lim for lim in dt_limits(state, params, grid, config).values())


def _van_leer(w):
    """Van Leer limited slopes of a 1-D array (zero at the two end nodes)."""
    dl = w[1:-1] - w[:-2]
    dr = w[2:] - w[1:-1]
    prod = dl * dr
    s = np.zeros_like(w)
    pos = prod > 0
    s[1:-1][pos] = 2.0 * prod[pos] / (dl[pos] + dr[pos])
    return s


def _faces(w, limiter):
    if limiter == "none":
        return w[:-1], w[1:]
    s = _van_leer(w)
    return w[:-1] + 0.5 * s[:-1], w[1:] - 0.5 * s[1:]


def _rhs(params, dx, art_visc, limiter, v, u, E):
    """Semi-discrete right side at interior nodes, and the two boundary face fluxes."""
    R, g, kappa = params.R, params.gamma, params.kappa
    theta = (g - 1.0) / R * (E - 0.5 * u * u)
    vl, vr = _faces(v, limiter)
    ul, ur = _faces(u, limiter)
    tl, tr = _faces(theta, limiter)
    pl, pr = R * tl / vl, R * tr / vr
    a = np.sqrt(g * np.maximum(pl / vl, pr / vr))
    el = R * tl / (g - 1.0) + 0.5 * ul * ul
    er = R * tr / (g - 1.0) + 0.5 * ur * ur
    F = np.empty((3, v.size - 1))
    F[0] = -0.5 * (ul + ur) - 0.5 * a * (vr - vl)
    F[1] = 0.5 * (pl + pr) - 0.5 * a * (ur - ul)
    F[2] = 0.5 * (pl * ul + pr * ur) - 0.5 * a * (er - el)
    if kappa > 0:
        F[2] -= kappa * (theta[1:] - theta[:-1]) / (dx * 0.5 * (v[1:] + v[:-1]))
    if art_visc > 0:
        F[1] -= art_visc * (u[1:] - u[:-1])          # (art_visc dx) u_x
    rhs = -(F[:, 1:] - F[:, :-1]) / dx
    return rhs, F[:, 0], F[:, -1]


def step(state, params, grid, config, dt):
    """One SSP-RK3 step. Returns (new_state, boundary_flux_difference) where the
    latter is the time-weighted (F_right - F_left) applied to the domain totals."""
    v, u, E = to_conservative(params, state.v, state.u, state.theta)
    q0 = np.stack([v, u, E])
    dx = grid.dx
    args = (params, dx, config.art_visc, config.limiter)

    def stage(q):
        r, fl, fr = _rhs(*args, *q)
        out = q.copy()
        out[:, 1:-1] += dt * r
        return out, fr - fl

    q1, b0 = stage(q0)
    q2s, b1 = stage(q1)
    q2 = 0.75 * q0 + 0.25 * q2s
    q3s, b2 = stage(q2)
    q3 = q0 / 3.0 + 2.0 / 3.0 * q3s
    # the end nodes never change: restore them exactly from q0
    q3[:, [0, -1]] = q0[:, [0, -1]]
    flux = dt * (_RK3_FLUX_WEIGHTS[0] * b0 + _RK3_FLUX_WEIGHTS[1] * b1 + _RK3_FLUX_WEIGHTS[2] * b2)
    nv, nu, nth = from_conservative(params, *q3)
    return FieldState(state.t + dt, state.x, nv, nu, nth), flux


def domain_totals(params, state, dx):
    """dx * sum over the interior cells of (v, u, E)."""
    q = np.stack(to_conservative(params, state.v, state.u, state.theta))
    return dx * np.sum(q[:, 1:-1], axis=1)


@dataclass
class RunRecord:
    snapshots: list = field(default_factory=list)      # FieldState copies
    diagnostics: list = field(default_factory=list)    # NormRecord per diagnostic time
    ledger: dict = field(default_factory=dict)
    steps: int = 0
    valid: bool = True
    messages: list = field(default_factory=list)
    initial_h2: float = 0.0
    wall_time: float = 0.0


def max_wave_speed(wave, params):
    pat = wave.pattern
    speeds = [abs(wave.rarefaction_1.w_l), abs(wave.rarefaction_3.w_r)]
    for z in (pat.z_minus, pat.z_plus, pat.z_minus_m, pat.z_plus_m):
        speeds.append(np.sqrt(params.gamma * params.R * z.theta) / z.v)
    return float(max(speeds))


def _times(every, t_end):
    if every <= 0 or t_end == 0:
        return [0.0] if t_end == 0 else [0.0, t_end]
    n = int(np.floor(t_end / every + 1e-9))
    ts = [k * every for k in range(n + 1)]
    if ts[-1] < t_end - 1e-12:
        ts.append(t_end)
    return ts


def run(wave, params, grid, pert=None, config=SolverConfig(), delta=None, on_diag=None):
    """Integrate to ``config.t_end`` with snapshots, diagnostics and a conservation ledger."""
    t_start = time.perf_counter()
    reach = max_wave_speed(wave, params) * config.t_end + 5.0
    rec = RunRecord()
    if reach >= grid.L:
        rec.valid = False
        rec.messages.append(f"domain too small: waves reach {reach:.1f} >= L = {grid.L}")
    state, rec.initial_h2 = initialize(wave, params, grid, pert)
    if delta is None:
        delta = wave.pattern.delta
    tracker = NormTracker(delta=delta, weight=HeatKernelWeight(config.alpha))
    snap_times = _times(config.snapshot_every, config.t_end)
    diag_times = _times(config.diag_every, config.t_end)
    stops = sorted(set(snap_times) | set(diag_times))

    dx = grid.dx
    totals0 = domain_totals(params, state, dx)
    boundary = np.zeros(3)
    rec.snapshots.append(state.copy())
    tracker.update(state, wave, params)
    steps = 0
    for target in stops[1:]:
        while state.t < target - 1e-12:
            dt = min(stable_dt(state, params, grid, config), target - state.t)
            new, flux = step(state, params, grid, config, dt)
            steps += 1
            if not new.is_physical():
                raise NumericalAbort(f"non-physical state at t = {new.t:.6g} (step {steps})",
                                     state=state, step_index=steps)
            state = new
            boundary += flux
        state.t = target
        if target in snap_times:
            rec.snapshots.append(state.copy())
        if target in diag_times:
            r, _ = tracker.update(state, wave, params)
            if on_diag is not None:
                on_diag(r)

    totals = domain_totals(params, state, dx)
    change = totals - totals0
    scale = np.abs(totals0) + np.abs(boundary) + dx * np.sum(np.abs(
        np.stack(to_conservative(params, state.v, state.u, state.theta))[:, 1:-1]), axis=1)
    rec.ledger = {
        "change": change.tolist(),
        "boundary_flux": (-boundary).tolist(),
        "residual": (change + boundary).tolist(),
        "relative_residual": (np.abs(change + boundary) / scale).tolist(),
    }
    drift = _far_field_drift(state, wave)
    rec.ledger["far_field_drift"] = drift
    if drift > config.boundary_tol:
        rec.valid = False
        rec.messages.append(f"far-field drift {drift:.3g} exceeds {config.boundary_tol:g}")
    rec.diagnostics = tracker.records
    rec.steps = steps
    rec.wall_time = time.perf_counter() - t_start
    return rec


def _far_field_drift(state, wave, cells=10):
    zl, zr = wave.pattern.z_minus, wave.pattern.z_plus
    s = np.stack([state.v, state.u, state.theta])
    return float(max(np.max(np.abs(s[:, :cells] - zl.as_array()[:, None])),
                     np.max(np.abs(s[:, -cells:] - zr.as_array()[:, None]))))


def self_convergence(wave, params, L, N, t_end, config=SolverConfig(), pert=None):
    """Observed order from runs at N, 2N, 4N (nested nodes), sup norm on coarse nodes.

    Returns (order, (e1, e2)) with e1 = |q_N - q_2N|, e2 = |q_2N - q_4N|, where q is
    the deviation of the numerical solution from the composite wave.
    """
    cfg = replace(config, t_end=t_end, snapshot_every=t_end, diag_every=t_end)
    devs = []
    for k in range(3):
        grid = Grid(L, N * 2 ** k)
        rec = run(wave, params, grid, pert, cfg)
        st = rec.snapshots[-1]
        f = eval_composite(wave, params, st.x, st.t)
        dev = np.stack([st.v - f.V, st.u - f.U, st.theta - f.Theta])
        devs.append(dev[:, :: 2 ** k])
    e1 = float(np.max(np.abs(devs[0] - devs[1])))
    e2 = float(np.max(np.abs(devs[1] - devs[2])))
    return float(np.log2(e1 / e2)), (e1, e2)


def isobaric_diffusion(params, p, theta0, dx, t_end, cfl=0.8):
    """Solve theta_t = a (theta_x / theta)_x with the solver's heat stencil.

    This is the reduction of the full system when the pressure is held at the
    constant p (v = R theta / p, u slaved to the heat flux). End values are frozen.
    """
    a = params.kappa * p * (params.gamma - 1.0) / (params.gamma * params.R ** 2)
    th = np.array(theta0, dtype=float)

    def rhs(q):
        flux = a * (q[1:] - q[:-1]) / (dx * 0.5 * (q[1:] + q[:-1]))
        return (flux[1:] - flux[:-1]) / dx

    t = 0.0
    while t < t_end - 1e-12:
        dt = min(cfl * dx * dx * np.min(th) / (2.0 * a), t_end - t)
        q1 = th.copy()
        q1[1:-1] += dt * rhs(th)
        q2 = q1.copy()
        q2[1:-1] += dt * rhs(q1)
        q2 = 0.75 * th + 0.25 * q2
        q3 = q2.copy()
        q3[1:-1] += dt * rhs(q2)
        th = th / 3.0 + 2.0 / 3.0 * q3
        t += dt
    return th
