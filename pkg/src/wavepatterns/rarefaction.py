"""Smooth rarefaction waves built on the inviscid Burgers equation.

The Burgers solution with datum ``w0(x) = m + h tanh(x)`` (``m, h`` the mean and half
jump of the end speeds) is evaluated exactly through its characteristics,
``w = w0(x0)`` with ``x0 + t w0(x0) = x``. The gas profile follows by inverting
``lambda_i(V, s) = w`` along the isentrope through the anchor state.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.special import expit

from .errors import ConfigurationError, DomainError
from .fields import WaveFields
from .gas import (
    ThermoState,
    _speed_coefficient,
    char_speed,
    entropy,
    invert_char_speed,
    isentrope_theta,
    rarefaction_velocity_integral,
)


@dataclass(frozen=True)
class RarefactionSpec:
    family: int
    anchor: ThermoState
    s_anchor: float
    w_l: float
    w_r: float

    def __post_init__(self):
        if self.family not in (1, 3):
            raise DomainError("family must be 1 or 3")
        if not self.w_l <= self.w_r:
            raise ConfigurationError(
                f"rarefaction ordering violated: w_l={self.w_l} > w_r={self.w_r}")

    @property
    def trivial(self):
        return self.w_l == self.w_r


def make_rarefaction(params, family, anchor, v_other):
    """Rarefaction of ``family`` anchored at ``anchor`` reaching volume ``v_other``.

    Family 1 is anchored at the left state z_-, family 3 at the right state z_+.
    """
    s = float(entropy(params, anchor.v, anchor.theta))
    a = float(char_speed(params, anchor.v, s, family))
    b = float(char_speed(params, v_other, s, family))
    w_l, w_r = (a, b) if family == 1 else (b, a)
    return RarefactionSpec(family, anchor, s, w_l, w_r)


def state_at_volume(spec, params, V):
    """(V, U, Theta) on the wave curve of ``spec`` at volume V."""
    a = spec.anchor
    U = a.u - rarefaction_velocity_integral(params, a.v, V, spec.s_anchor, spec.family)
    Theta = isentrope_theta(params, a.v, a.theta, V)
    return V, U, Theta


def end_states(spec, params):
    """Constant states to the left and right of the wave."""
    out = []
    for w in (spec.w_l, spec.w_r):
        V = float(invert_char_speed(params, w, spec.s_anchor, spec.family))
        if w == char_speed(params, spec.anchor.v, spec.s_anchor, spec.family):
            V = spec.anchor.v
        out.append(ThermoState(*(float(c) for c in state_at_volume(spec, params, V))))
    return tuple(out)


@dataclass
class BurgersSolution:
    w: np.ndarray
    w_x: np.ndarray
    w_xx: np.ndarray
    w_t: np.ndarray
    x0: np.ndarray
    dw_l: np.ndarray        # w - w_l, accurate to full relative precision
    dw_r: np.ndarray        # w_r - w
    residual: float
    iterations: int


def _solve_foot(x, t, m, h, max_iter=60):
    """Root of G(x0) = x0 + t (m + h tanh x0) - x, bracketed by [x - w_r t, x - w_l t]."""
    lo = x - (m + h) * t
    hi = x - (m - h) * t
    x0 = np.clip(x - m * t, lo, hi)
    if np.all(t == 0):
        return x.copy(), 0
    dx_old = hi - lo
    it = 0
    for it in range(1, max_iter + 1):
        th = np.tanh(x0)
        G = x0 + t * (m + h * th) - x
        dG = 1.0 + t * h * (1.0 - th * th)
        lo = np.where(G < 0, x0, lo)
        hi = np.where(G > 0, x0, hi)
        newton = x0 - G / dG
        # bisect when Newton leaves the bracket or fails to halve the previous step
        bad = ~((newton > lo) & (newton < hi)) | (np.abs(2.0 * G) > np.abs(dx_old * dG))
        new = np.where(bad, 0.5 * (lo + hi), newton)
        new = np.where(G == 0, x0, new)
        dx_old = new - x0
        tolx = 4 * np.finfo(float).eps * (np.abs(x) + np.abs(t * (m + h)) + 1.0)
        x0 = new
        if np.all(np.abs(dx_old) <= tolx):
            break
    return x0, it


def burgers_eval(spec, x, t):
    """Exact solution of w_t + w w_x = 0 with the tanh datum, and its derivatives."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    x = np.asarray(x, dtype=float)
    x, t = np.broadcast_arrays(x, t)
    m = 0.5 * (spec.w_r + spec.w_l)
    h = 0.5 * (spec.w_r - spec.w_l)
    if h == 0:
        zero = np.zeros_like(x)
        return BurgersSolution(np.full_like(x, spec.w_l), zero, zero, zero, x - spec.w_l * t,
                               zero, zero, 0.0, 0)
    x0, it = _solve_foot(x, t, m, h)
    pl = expit(2.0 * x0)                 # (1 + tanh x0) / 2
    pr = expit(-2.0 * x0)                # (1 - tanh x0) / 2
    dw_l = 2.0 * h * pl
    dw_r = 2.0 * h * pr
    w = np.where(x0 < 0, spec.w_l + dw_l, spec.w_r - dw_r)
    d1 = 4.0 * h * pl * pr                     # w0'(x0)
    d2 = -2.0 * d1 * (pl - pr)                 # w0''(x0)
    den = 1.0 + t * d1
    w_x = d1 / den
    w_xx = d2 / den ** 3
    w_t = -w * w_x
    F = w - (m + h * np.tanh(x - w * t))
    return BurgersSolution(w, w_x, w_xx, w_t, x0, dw_l, dw_r, float(np.max(np.abs(F), initial=0.0)), it)


def _volume_derivatives(params, spec, w):
    k = 2.0 / (params.gamma + 1.0)
    V = invert_char_speed(params, w, spec.s_anchor, spec.family)
    dV = -k * V / w
    d2V = k * (k + 1.0) * V / w ** 2
    return V, dV, d2V


def eval_rarefaction(spec, params, x, t):
    """Smooth rarefaction (V, U, Theta) with x- and t-derivatives."""
    bs = burgers_eval(spec, x, t)
    a = spec.anchor
    if spec.trivial:
        zero = np.zeros_like(bs.w)
        return WaveFields(zero + a.v, zero + a.u, zero + a.theta, *([zero] * 9))
    V, dV, d2V = _volume_derivatives(params, spec, bs.w)
    g = params.gamma
    _, U, Theta = state_at_volume(spec, params, V)
    dTh = -(g - 1.0) * Theta / V
    d2Th = g * (g - 1.0) * Theta / V ** 2

    V_x = dV * bs.w_x
    V_xx = d2V * bs.w_x ** 2 + dV * bs.w_xx
    V_t = dV * bs.w_t
    return WaveFields(
        V=V, U=U, Theta=Theta,
        V_x=V_x, U_x=-bs.w * V_x, Theta_x=dTh * V_x,
        V_xx=V_xx, U_xx=-bs.w_x * V_x - bs.w * V_xx, Theta_xx=d2Th * V_x ** 2 + dTh * V_xx,
        V_t=V_t, U_t=-bs.w * V_t, Theta_t=dTh * V_t,
    )


def deviation_from_end(spec, params, x, t, side):
    """(V, U, Theta) minus the left or right end state, without cancellation error."""
    bs = burgers_eval(spec, x, t)
    if spec.trivial:
        z = np.zeros_like(bs.w)
        return np.stack([z, z, z])
    left, right = end_states(spec, params)
    if side == "left":
        end, w_end, dw = left, spec.w_l, bs.dw_l
    elif side == "right":
        end, w_end, dw = right, spec.w_r, -bs.dw_r
    else:
        raise ValueError("side must be 'left' or 'right'")
    g = params.gamma
    k = 2.0 / (g + 1.0)
    q = (1.0 - g) / 2.0
    r = -k * np.log1p(dw / w_end)        # log(V / V_end)
    sign = -1.0 if spec.family == 1 else 1.0
    K = _speed_coefficient(params, spec.s_anchor)
    dV = end.v * np.expm1(r)
    dU = sign * 2.0 * K / (g - 1.0) * end.v ** q * np.expm1(q * r)
    dTh = end.theta * np.expm1(-(g - 1.0) * r)
    return np.stack([dV, dU, dTh])


def exact_fan(spec, params, xi):
    """Centered rarefaction fan z(x/t) connecting the two end states."""
    xi = np.asarray(xi, dtype=float)
    left, right = end_states(spec, params)
    if spec.trivial:
        return np.stack([np.full_like(xi, left.v), np.full_like(xi, left.u),
                         np.full_like(xi, left.theta)])
    inner = np.clip(xi, spec.w_l, spec.w_r)
    V, U, Theta = state_at_volume(spec, params,
                                  invert_char_speed(params, inner, spec.s_anchor, spec.family))
    out = np.stack([V, U, Theta])
    for state, mask in ((left, xi <= spec.w_l), (right, xi >= spec.w_r)):
        out[:, mask] = np.array(state.to_list())[:, None]
    return out


def strength(spec, params):
    """Largest componentwise jump across the wave."""
    left, right = end_states(spec, params)
    return float(np.max(np.abs(right.as_array() - left.as_array())))


def fan_window(spec, t, margin=40.0):
    return spec.w_l * t - margin, spec.w_r * t + margin


def lp_norm(f, x, p):
    """L^p norm on a uniform grid: composite Simpson, grid max for p = inf."""
    f = np.abs(np.asarray(f))
    if np.isinf(p):
        return float(np.max(f))
    return float(simpson(f ** p, x=x) ** (1.0 / p))


def derivative_norms(spec, params, t, dx=0.02, margin=40.0, ps=(1, 2, np.inf)):
    """L^p norms of (V_x, U_x, Theta_x) and (V_xx, U_xx, Theta_xx) at time t.

    The vector norm sums the p-th powers of the components (max for p = inf).
    """
    a, b = fan_window(spec, t, margin)
    n = int(np.ceil((b - a) / dx)) + 1
    n += (n + 1) % 2                     # odd count for Simpson
    x = np.linspace(a, b, n)
    f = eval_rarefaction(spec, params, x, t)
    out = {}
    for tag, comps in (("d1", (f.V_x, f.U_x, f.Theta_x)), ("d2", (f.V_xx, f.U_xx, f.Theta_xx))):
        for p in ps:
            if np.isinf(p):
                val = max(lp_norm(c, x, p) for c in comps)
            else:
                val = sum(lp_norm(c, x, p) ** p for c in comps) ** (1.0 / p)
            out[(tag, p)] = val
    return out


def fan_distance(spec, params, t, dx=0.02, margin=40.0):
    """sup_x |Z^r(x, t) - z^r(x / t)| (max over components)."""
    a, b = fan_window(spec, t, margin)
    x = np.arange(a, b + dx, dx)
    f = eval_rarefaction(spec, params, x, t)
    z = exact_fan(spec, params, x / t)
    return float(np.max(np.abs(f.state() - z)))
