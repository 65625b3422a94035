"""Perturbation norms, energy functionals, heat-kernel weights and rate fits.

All spatial derivatives use second-order central differences with second-order
one-sided stencils at the two end nodes (``np.gradient(..., edge_order=2)``), and
all spatial integrals use the composite trapezoid rule. Fixing these choices
module-wide keeps the norms reproducible bit-for-bit across runs.
"""
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import erf
from scipy.stats import linregress

from .composite import eval_composite
from .errors import DiagnosticError, DomainError


def ddx(f, dx):
    return np.gradient(f, dx, axis=-1, edge_order=2)


@dataclass
class PerturbationSnapshot:
    t: float
    x: np.ndarray
    dx: float
    phi: np.ndarray
    psi: np.ndarray
    xi: np.ndarray
    V: np.ndarray               # composite fields on the same grid
    U: np.ndarray
    Theta: np.ndarray

    def __post_init__(self):
        f = np.stack([self.phi, self.psi, self.xi])
        self.d1 = ddx(f, self.dx) if f.shape[1] > 2 else np.zeros_like(f)
        self.d2 = ddx(self.d1, self.dx) if f.shape[1] > 2 else np.zeros_like(f)
        self.xi_d3 = ddx(self.d2[2], self.dx) if f.shape[1] > 2 else np.zeros_like(self.xi)

    @property
    def fields(self):
        return np.stack([self.phi, self.psi, self.xi])


def perturbation(state, wave, params):
    """(phi, psi, xi) = (v, u, theta) - (V, U, Theta) on the state's grid."""
    x = np.asarray(state.x)
    for name in ("v", "u", "theta"):
        if np.shape(getattr(state, name)) != x.shape:
            raise DiagnosticError(f"grid mismatch: {name} has shape {np.shape(getattr(state, name))}, "
                                  f"grid has {x.shape}")
    f = eval_composite(wave, params, x, state.t)
    snap = PerturbationSnapshot(t=float(state.t), x=x, dx=float(x[1] - x[0]),
                                phi=state.v - f.V, psi=state.u - f.U, xi=state.theta - f.Theta,
                                V=f.V, U=f.U, Theta=f.Theta)
    return snap


def _sq(f, x):
    return float(trapezoid(np.sum(np.atleast_2d(f) ** 2, axis=0), x))


@dataclass
class NormValues:
    """Spatial norms of one perturbation snapshot; dissipation is a squared norm."""
    t: float
    L2: float
    H1: float
    H2: float
    sup: float
    dissipation: float      # ||(phi_x, psi_x)||_1^2 + ||xi_x||_2^2


def norms(snap):
    f, d1, d2, x = snap.fields, snap.d1, snap.d2, snap.x
    l2 = _sq(f, x)
    h1 = l2 + _sq(d1, x)
    h2 = h1 + _sq(d2, x)
    diss = (_sq(d1[:2], x) + _sq(d2[:2], x)
            + _sq(d1[2], x) + _sq(d2[2], x) + _sq(snap.xi_d3, x))
    return NormValues(t=snap.t, L2=np.sqrt(l2), H1=np.sqrt(h1), H2=np.sqrt(h2),
                      sup=float(np.max(np.abs(f))), dissipation=diss)


def phi_function(s):
    """Phi(s) = s - 1 - ln s, evaluated without cancellation near s = 1."""
    h = np.asarray(s, dtype=float) - 1.0
    return h - np.log1p(h)


def relative_entropy(state, wave, params, composite=None):
    """Integral of R Theta Phi(v/V) + psi^2/2 + R Theta/(gamma-1) Phi(theta/Theta).

    ``composite`` may supply precomputed (V, U, Theta) on the state's grid.
    """
    f = composite if composite is not None else eval_composite(wave, params, state.x, state.t)
    if np.any(~(state.v > 0)) or np.any(~(state.theta > 0)):
        raise DomainError("relative entropy needs positive v and theta")
    R, g = params.R, params.gamma
    h_v = (state.v - f.V) / f.V
    h_t = (state.theta - f.Theta) / f.Theta
    dens = (R * f.Theta * (h_v - np.log1p(h_v)) + 0.5 * (state.u - f.U) ** 2
            + R * f.Theta / (g - 1.0) * (h_t - np.log1p(h_t)))
    return float(trapezoid(dens, state.x))


def quadratic_entropy(snap, params):
    """Second-order Taylor part of the relative entropy (the weighted L2 norm it is equivalent to)."""
    R, g = params.R, params.gamma
    dens = (R * snap.Theta / (2 * snap.V ** 2) * snap.phi ** 2 + 0.5 * snap.psi ** 2
            + R / (2 * (g - 1.0) * snap.Theta) * snap.xi ** 2)
    return float(trapezoid(dens, snap.x))


@dataclass(frozen=True)
class HeatKernelWeight:
    """omega = (1+t)^(-1/2) exp(-alpha x^2/(1+t)) and its primitive g.

    normalization "printed": g is the exact primitive of omega, so
    sup g = sqrt(pi/alpha) and 4 alpha g_t = g_xx. "raw": g is the primitive of
    the Gaussian without the (1+t)^(-1/2) prefactor, sup g = sqrt(pi (1+t)/alpha).
    """
    alpha: float = 1.0
    normalization: str = "printed"

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if self.normalization not in ("printed", "raw"):
            raise ValueError("normalization must be 'printed' or 'raw'")


def weight_eval(w, x, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    x = np.asarray(x, dtype=float)
    s = np.sqrt(1.0 + t)
    omega = np.exp(-w.alpha * x ** 2 / (1.0 + t)) / s
    g = 0.5 * np.sqrt(np.pi / w.alpha) * (1.0 + erf(np.sqrt(w.alpha) * x / s))
    if w.normalization == "raw":
        g = g * s
    return omega, g


def weighted_norms(snap, w, params, P=None):
    """The three omega^2-weighted integrals of the localized estimates."""
    omega, _ = weight_eval(w, snap.x, snap.t)
    if P is None:
        P = params.R * snap.Theta / snap.V
    R, g = params.R, params.gamma
    w2 = omega ** 2
    phi, psi, xi = snap.phi, snap.psi, snap.xi
    return (float(trapezoid(w2 * (phi ** 2 + psi ** 2 + xi ** 2), snap.x)),
            float(trapezoid(w2 * ((R * xi - P * phi) ** 2 + psi ** 2), snap.x)),
            float(trapezoid(w2 * (R * xi + (g - 1.0) * P * phi) ** 2, snap.x)))


@dataclass
class NormRecord:
    t: float
    L2: float
    H1: float
    H2: float
    sup: float
    dissipation: float
    dissipation_integral: float
    N: float                       # running max of H2
    entropy: float
    weighted: tuple
    weighted_integrals: tuple
    ratio: float | None = None

    def row(self):
        d = asdict(self)
        w, wi = d.pop("weighted"), d.pop("weighted_integrals")
        for k in range(3):
            d[f"weighted_{k + 1}"] = w[k]
            d[f"weighted_integral_{k + 1}"] = wi[k]
        return d


@dataclass
class NormTracker:
    """Single-writer accumulator of norms, running maxima and time integrals."""
    delta: float
    weight: HeatKernelWeight = field(default_factory=HeatKernelWeight)
    records: list = field(default_factory=list)

    def update(self, state, wave, params):
        snap = perturbation(state, wave, params)
        nv = norms(snap)
        ent = relative_entropy(state, wave, params, composite=snap)
        wn = weighted_norms(snap, self.weight, params)
        if self.records:
            prev = self.records[-1]
            dt = nv.t - prev.t
            diss_int = prev.dissipation_integral + 0.5 * dt * (prev.dissipation + nv.dissipation)
            w_int = tuple(a + 0.5 * dt * (b + c)
                          for a, b, c in zip(prev.weighted_integrals, prev.weighted, wn))
            n_run = max(prev.N, nv.H2)
        else:
            diss_int, w_int, n_run = 0.0, (0.0, 0.0, 0.0), nv.H2
        rec = NormRecord(t=nv.t, L2=nv.L2, H1=nv.H1, H2=nv.H2, sup=nv.sup,
                         dissipation=nv.dissipation, dissipation_integral=diss_int, N=n_run,
                         entropy=ent, weighted=wn, weighted_integrals=w_int)
        init = self.records[0].H2 if self.records else nv.H2
        rec.ratio = _ratio(rec, init, self.delta)
        self.records.append(rec)
        return rec, snap


def _ratio(rec, init_h2, delta):
    den = init_h2 ** 2 + delta
    if den == 0:
        return None
    return (rec.N ** 2 + rec.dissipation_integral) / den


def apriori_ratio(records, delta, initial_norm=None):
    """Ratio of the a-priori-estimate left side to ||init||_2^2 + delta, per record.

    Entries are None when the denominator vanishes (unperturbed pure contact).
    """
    if not records:
        return []
    init = records[0].H2 if initial_norm is None else initial_norm
    return [_ratio(r, init, delta) for r in records]


@dataclass
class DecayFit:
    exponent: float
    r2: float
    n: int
    intercept: float


def decay_fit(t, values, window=None, min_points=8):
    """Least-squares slope of log(value) against log(1 + t) within ``window``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    if window is not None:
        sel = (t >= window[0]) & (t <= window[1])
        t, y = t[sel], y[sel]
    if t.size < min_points:
        raise DiagnosticError(f"decay fit needs at least {min_points} points, got {t.size}")
    if np.any(~(y > 0)):
        raise DiagnosticError("decay fit needs positive values in the window")
    if np.all(y == y[0]):
        return DecayFit(0.0, 1.0, int(t.size), float(np.log(y[0])))
    fit = linregress(np.log1p(t), np.log(y))
    return DecayFit(float(fit.slope), float(fit.rvalue ** 2), int(t.size), float(fit.intercept))


def eventually_nonincreasing(values, tail=0.25, slack=0.05):
    """True when the final ``tail`` fraction never rises by more than ``slack`` per step."""
    y = np.asarray(values, dtype=float)
    k = max(2, int(np.ceil(tail * y.size)))
    y = y[-k:]
    return bool(np.all(y[1:] <= (1.0 + slack) * y[:-1]))
