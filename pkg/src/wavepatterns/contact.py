"""Viscous contact wave driven by heat conduction.

The temperature is self-similar, ``theta(x, t) = th(xi)`` with ``xi = x / sqrt(1 + t)``,
where ``th`` solves the two-point problem

    -(xi / 2) th' = a (th' / th)',   th(-inf) = theta_minus,  th(+inf) = theta_plus,

with ``a = kappa p_plus (gamma - 1) / (gamma R**2)``. Volume and velocity follow as

    V = R th / p_plus,   U = u_minus + kappa (gamma - 1) / (gamma R) * theta_x / theta.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .errors import DiagnosticError, DomainError, SolverError, TruncationError
from .fields import WaveFields


def diffusion_coefficient(params, p_plus):
    return params.kappa * p_plus * (params.gamma - 1.0) / (params.gamma * params.R ** 2)


@dataclass(frozen=True)
class ContactProfile:
    theta_minus: float
    theta_plus: float
    p_plus: float
    a: float
    xi_max: float
    xi: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    dtheta: np.ndarray = field(repr=False)
    d2theta: np.ndarray = field(repr=False)
    u_minus: float = 0.0
    residual: float = 0.0
    iterations: int = 0

    @property
    def delta(self):
        return abs(self.theta_plus - self.theta_minus)

    @property
    def is_constant(self):
        return self.theta_plus == self.theta_minus

    @cached_property
    def _splines(self):
        return (CubicSpline(self.xi, self.theta), CubicSpline(self.xi, self.dtheta),
                CubicSpline(self.xi, self.d2theta))

    def shape(self, xi, order=0):
        """th and its derivatives up to ``order`` (0..3) at arbitrary xi.

        Outside the table the far-field constants are returned with zero derivatives.
        """
        xi = np.asarray(xi, dtype=float)
        inside = np.abs(xi) <= self.xi_max
        far = np.where(xi < 0, self.theta_minus, self.theta_plus)
        s0, s1, s2 = self._splines
        out = [np.where(inside, s0(xi), far)]
        if order >= 1:
            out.append(np.where(inside, s1(xi), 0.0))
        if order >= 2:
            out.append(np.where(inside, s2(xi), 0.0))
        if order >= 3:
            out.append(np.where(inside, s2(xi, 1), 0.0))
        return out

    def residual_field(self):
        """Pointwise ODE residual a (th'/th)' + (xi/2) th' on the table."""
        th, d1, d2 = self.theta, self.dtheta, self.d2theta
        return self.a * (d2 / th - (d1 / th) ** 2) + 0.5 * self.xi * d1


def _d1(f, h):
    """Fourth-order central first derivative, second-order one-sided near the ends."""
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[1] = (f[2] - f[0]) / (2.0 * h)
    d[-2] = (f[-1] - f[-3]) / (2.0 * h)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return d


def _discrete_residual(th, xi, h, a):
    # interior rows 2..n-3 use five-point stencils, rows 1 and n-2 three-point ones
    L = np.log(th)
    F = np.empty(th.size - 2)
    F[1:-1] = (a * (-L[:-4] + 16.0 * L[1:-3] - 30.0 * L[2:-2] + 16.0 * L[3:-1] - L[4:]) / (12.0 * h ** 2)
               + 0.5 * xi[2:-2] * (th[:-4] - 8.0 * th[1:-3] + 8.0 * th[3:-1] - th[4:]) / (12.0 * h))
    for k, i in ((0, 1), (-1, th.size - 2)):
        F[k] = (a * (L[i + 1] - 2.0 * L[i] + L[i - 1]) / h ** 2
                + 0.25 * xi[i] * (th[i + 1] - th[i - 1]) / h)
    return F


def _jacobian_bands(th, xi, h, a):
    """Banded (2, 2) Jacobian of the discrete residual w.r.t. interior unknowns."""
    n = th.size - 2
    ab = np.zeros((5, n))
    c2 = a / (12.0 * h ** 2)
    c1 = 0.5 / (12.0 * h)
    rows = np.arange(1, n - 1)          # residual rows with five-point stencils
    i = rows + 1                        # node index of the row centre
    coef = {
        -2: -c2 / th[i - 2] + c1 * xi[i],
        -1: 16.0 * c2 / th[i - 1] - 8.0 * c1 * xi[i],
        0: -30.0 * c2 / th[i],
        1: 16.0 * c2 / th[i + 1] + 8.0 * c1 * xi[i],
        2: -c2 / th[i + 2] - c1 * xi[i],
    }
    for off, val in coef.items():
        col = rows + off
        ok = (col >= 0) & (col < n)     # boundary nodes are fixed
        ab[2 - off, col[ok]] = val[ok]
    for r in (0, n - 1):
        i = r + 1
        coef3 = {-1: a / (h ** 2 * th[i - 1]) - 0.25 * xi[i] / h,
                 0: -2.0 * a / (h ** 2 * th[i]),
                 1: a / (h ** 2 * th[i + 1]) + 0.25 * xi[i] / h}
        for off, val in coef3.items():
            col = r + off
            if 0 <= col < n:
                ab[2 - off, col] = val
    return ab


def solve_selfsimilar(params, theta_minus, theta_plus, p_plus, xi_max=12.0,
                      grid_points=4001, tol=1e-10, u_minus=0.0, max_iter=60):
    """Solve the self-similar boundary-value problem by damped Newton iteration."""
    if not (theta_minus > 0 and theta_plus > 0 and p_plus > 0):
        raise DomainError("boundary temperatures and pressure must be positive")
    if grid_points < 11 or xi_max <= 0:
        raise DomainError("need xi_max > 0 and at least 11 grid points")
    a = diffusion_coefficient(params, p_plus)
    xi = np.linspace(-xi_max, xi_max, grid_points)
    h = xi[1] - xi[0]
    mid, half = 0.5 * (theta_plus + theta_minus), 0.5 * (theta_plus - theta_minus)
    th = mid + half * np.tanh(xi)
    th[0], th[-1] = theta_minus, theta_plus
    floor = 0.1 * min(theta_minus, theta_plus)

    F = _discrete_residual(th, xi, h, a)
    res = np.max(np.abs(F))
    it = 0
    while res >= tol:
        if it >= max_iter:
            raise SolverError(f"self-similar Newton did not converge, residual {res:.3e}",
                              residual=res, iterations=it)
        it += 1
        step = solve_banded((2, 2), _jacobian_bands(th, xi, h, a), -F)
        lam = 1.0
        while True:
            trial = th.copy()
            trial[1:-1] = np.maximum(th[1:-1] + lam * step, floor)
            F_trial = _discrete_residual(trial, xi, h, a)
            res_trial = np.max(np.abs(F_trial))
            if res_trial < res or lam < 1e-4:
                break
            lam *= 0.5
        th, F, res = trial, F_trial, res_trial

    # flat tails carry roundoff of either sign; project onto monotone data and
    # zero derivative entries that are indistinguishable from roundoff
    if theta_plus > theta_minus:
        th = np.minimum(np.maximum.accumulate(th), theta_plus)
    elif theta_plus < theta_minus:
        th = np.maximum(np.minimum.accumulate(th), theta_plus)
    eps = 1e3 * np.finfo(float).eps * max(theta_minus, theta_plus)
    d1 = _d1(th, h)
    d1[np.abs(d1) < eps / h] = 0.0
    d2 = _d1(d1, h)
    d2[np.abs(d2) < eps / h ** 2] = 0.0
    prof = ContactProfile(float(theta_minus), float(theta_plus), float(p_plus), a,
                          float(xi_max), xi, th, d1, d2, float(u_minus), float(res), it)
    _check_tails(prof)
    return prof


def _check_tails(prof):
    delta = prof.delta
    if delta == 0:
        return
    edge = np.abs(prof.xi) >= 0.9 * prof.xi_max
    far = np.where(prof.xi < 0, prof.theta_minus, prof.theta_plus)
    dev = np.max(np.abs(prof.theta[edge] - far[edge]))
    if dev > 1e-9 * delta:
        raise TruncationError(
            f"profile tail not flat at |xi| >= {0.9 * prof.xi_max:g}: deviation {dev:.2e}; "
            "increase xi_max")


def contact_coefficient(params):
    """Factor kappa (gamma - 1) / (gamma R) multiplying theta_x/theta in U."""
    return params.kappa * (params.gamma - 1.0) / (params.gamma * params.R)


def eval_contact(profile, params, x, t):
    """Contact wave (V, U, Theta) with x- and t-derivatives at (x, t)."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("time must be non-negative")
    x = np.asarray(x, dtype=float)
    s = np.sqrt(1.0 + np.asarray(t, dtype=float))
    xi = x / s
    th, d1, d2, d3 = profile.shape(xi, order=3)
    rp = params.R / profile.p_plus
    b = contact_coefficient(params)

    q = d1 / th                               # (log th)'
    dq = d2 / th - q ** 2                     # (log th)''
    ddq = d3 / th - 3.0 * d1 * d2 / th ** 2 + 2.0 * q ** 3
    xi_t = -0.5 * xi / s ** 2

    Theta = th
    Theta_x = d1 / s
    Theta_xx = d2 / s ** 2
    Theta_t = d1 * xi_t
    U = profile.u_minus + b * q / s
    U_x = b * dq / s ** 2
    U_xx = b * ddq / s ** 3
    U_t = -0.5 * b / s ** 3 * (q + xi * dq)
    return WaveFields(
        V=rp * Theta, U=U, Theta=Theta,
        V_x=rp * Theta_x, U_x=U_x, Theta_x=Theta_x,
        V_xx=rp * Theta_xx, U_xx=U_xx, Theta_xx=Theta_xx,
        V_t=rp * Theta_t, U_t=U_t, Theta_t=Theta_t,
    )


@dataclass
class Envelope:
    """Gaussian envelope |f(xi)| <= amplitude * exp(-c xi^2) fitted on one tail."""
    quantity: str
    side: str
    c: float
    amplitude: float
    C: float
    r2: float
    n_samples: int


@dataclass
class ContactDecayReport:
    delta: float
    envelopes: list
    message: str = ""

    @property
    def zero(self):
        return self.delta == 0

    def get(self, quantity, side):
        for e in self.envelopes:
            if e.quantity == quantity and e.side == side:
                return e
        raise KeyError((quantity, side))


def _fit_gaussian_tail(xi, f, floor, quantity, side, delta):
    keep = (np.abs(xi) > 1.0) & (np.abs(f) > floor)
    if np.count_nonzero(keep) < 10:
        raise DiagnosticError(f"fewer than 10 usable tail samples for {quantity} ({side})")
    X = xi[keep] ** 2
    Y = np.log(np.abs(f[keep]))
    slope, intercept = np.polyfit(X, Y, 1)
    pred = slope * X + intercept
    ss_res = np.sum((Y - pred) ** 2)
    ss_tot = np.sum((Y - Y.mean()) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    amp = float(np.exp(intercept))
    return Envelope(quantity, side, float(-slope), amp, amp / delta, float(r2), int(keep.sum()))


def check_contact_decay(profile):
    """Fit Gaussian envelopes to |th - theta_pm|, |th'| and |th''| on both tails."""
    delta = profile.delta
    if delta == 0:
        return ContactDecayReport(0.0, [], "identically zero deviation")
    xi, h = profile.xi, profile.xi[1] - profile.xi[0]
    eps = np.finfo(float).eps * max(profile.theta_minus, profile.theta_plus)
    far = np.where(xi < 0, profile.theta_minus, profile.theta_plus)
    data = [("theta", profile.theta - far, 1e3 * eps),
            ("dtheta", profile.dtheta, 1e3 * eps / h),
            ("d2theta", profile.d2theta, 1e3 * eps / h ** 2)]
    envs = []
    for name, f, floor in data:
        for side, mask in (("left", xi < 0), ("right", xi > 0)):
            envs.append(_fit_gaussian_tail(xi[mask], f[mask], floor, name, side, delta))
    return ContactDecayReport(delta, envs)
