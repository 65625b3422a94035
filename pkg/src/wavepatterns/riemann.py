"""Rarefaction / contact / rarefaction decomposition of Riemann data.

Given end states z- and z+, find the intermediate states z-^m (on the
1-rarefaction isentrope through z-) and z+^m (on the 3-rarefaction isentrope
through z+) that share pressure p_m and velocity u_m. The contact wave then
connects z-^m to z+^m.
"""
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigurationError, SolverError
from .gas import (
    ThermoState,
    char_speed,
    entropy,
    pressure,
    pressure_from_entropy,
    rarefaction_velocity_integral,
    theta_from_entropy,
)


@dataclass(frozen=True)
class WavePattern:
    z_minus: ThermoState
    z_plus: ThermoState
    z_minus_m: ThermoState
    z_plus_m: ThermoState
    p_m: float
    u_m: float
    s_minus: float
    s_plus: float
    delta: float
    residuals: tuple = (0.0, 0.0)
    iterations: int = 0
    method: str = "exact"

    @property
    def pure_contact(self):
        return self.z_minus_m == self.z_minus and self.z_plus_m == self.z_plus

    def closeness(self):
        """|z-^m - z-|_1 + |z+^m - z+|_1, the quantity bounded by |theta+ - theta-|."""
        return float(np.sum(np.abs(self.z_minus_m.as_array() - self.z_minus.as_array()))
                     + np.sum(np.abs(self.z_plus_m.as_array() - self.z_plus.as_array())))

    def to_dict(self):
        out = asdict(self)
        out["residuals"] = list(self.residuals)
        return out


def is_pure_contact(params, z_minus, z_plus, rtol=1e-12):
    """True when u and p agree across the data, so a single contact connects them."""
    p_l, p_r = pressure(params, z_minus.v, z_minus.theta), pressure(params, z_plus.v, z_plus.theta)
    u_scale = max(1.0, abs(z_minus.u), abs(z_plus.u))
    return bool(abs(z_minus.u - z_plus.u) <= rtol * u_scale
                and abs(p_l - p_r) <= rtol * max(p_l, p_r))


def _left_velocity(params, z, s, v):
    return z.u - rarefaction_velocity_integral(params, z.v, v, s, 1)


def _right_velocity(params, z, s, v):
    return z.u - rarefaction_velocity_integral(params, z.v, v, s, 3)


def _residual(params, zl, zr, sl, sr, y):
    vl, vr = np.exp(y)
    p_l = pressure_from_entropy(params, vl, sl)
    p_r = pressure_from_entropy(params, vr, sr)
    return np.array([p_l - p_r,
                     _left_velocity(params, zl, sl, vl) - _right_velocity(params, zr, sr, vr)])


def _newton(params, zl, zr, sl, sr, tol, max_iter):
    y = np.log([zl.v, zr.v])
    F = _residual(params, zl, zr, sl, sr, y)
    h = 1e-7
    for it in range(max_iter + 1):
        if np.max(np.abs(F)) < tol:
            return y, F, it
        if it == max_iter:
            break
        J = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            J[:, k] = (_residual(params, zl, zr, sl, sr, y + e)
                       - _residual(params, zl, zr, sl, sr, y - e)) / (2 * h)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-4:
            trial = _residual(params, zl, zr, sl, sr, y + lam * step)
            if np.linalg.norm(trial) < (1.0 - 0.5 * lam) * np.linalg.norm(F):
                break
            lam *= 0.5
        else:
            break                          # stalled; let the caller fall back
        y = y + lam * step
        F = trial
    return None, F, it


def _bisect_pressure(params, zl, zr, sl, sr, tol):
    """Fallback: the velocity mismatch is decreasing in the common pressure."""
    g = params.gamma

    def vols(p):
        return ((pressure_from_entropy(params, 1.0, sl) / p) ** (1 / g),
                (pressure_from_entropy(params, 1.0, sr) / p) ** (1 / g))

    def mismatch(p):
        vl, vr = vols(p)
        return _left_velocity(params, zl, sl, vl) - _right_velocity(params, zr, sr, vr)

    p_l, p_r = pressure(params, zl.v, zl.theta), pressure(params, zr.v, zr.theta)
    lo, hi = min(p_l, p_r), max(p_l, p_r)
    for _ in range(200):
        if mismatch(lo) >= 0:
            break
        lo *= 0.5
    for _ in range(200):
        if mismatch(hi) <= 0:
            break
        hi *= 2.0
    if not (mismatch(lo) >= 0 >= mismatch(hi)):
        raise SolverError("could not bracket the intermediate pressure",
                          residual=float(min(abs(mismatch(lo)), abs(mismatch(hi)))))
    p_m = brentq(mismatch, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return np.log(vols(p_m))


def decompose(params, z_minus, z_plus, tol=1e-12, max_iter=50):
    """Intermediate states of the 1-rarefaction / contact / 3-rarefaction pattern.

    Solves for (v-^m, v+^m) by damped Newton (finite-difference Jacobian, log
    variables) with a bisection-on-pressure fallback. Raises ConfigurationError
    when the solved pattern is not of rarefaction type.
    """
    s_l = float(entropy(params, z_minus.v, z_minus.theta))
    s_r = float(entropy(params, z_plus.v, z_plus.theta))
    delta = abs(z_plus.theta - z_minus.theta)
    if is_pure_contact(params, z_minus, z_plus):
        return WavePattern(z_minus, z_plus, z_minus, z_plus,
                           p_m=float(pressure(params, z_minus.v, z_minus.theta)), u_m=z_minus.u,
                           s_minus=s_l, s_plus=s_r, delta=delta)

    y, F, it = _newton(params, z_minus, z_plus, s_l, s_r, tol, max_iter)
    method = "newton"
    if y is None:
        y = _bisect_pressure(params, z_minus, z_plus, s_l, s_r, tol)
        F = _residual(params, z_minus, z_plus, s_l, s_r, y)
        method = "bisection"
        if np.max(np.abs(F)) >= tol * 10:
            raise SolverError("decomposition did not converge", residual=float(np.max(np.abs(F))),
                              iterations=it)
    vl, vr = (float(c) for c in np.exp(y))
    _check_ordering(params, z_minus, z_plus, s_l, s_r, vl, vr)

    u_m = float(_left_velocity(params, z_minus, s_l, vl))
    zl_m = ThermoState(vl, u_m, float(theta_from_entropy(params, vl, s_l)))
    zr_m = ThermoState(vr, u_m, float(theta_from_entropy(params, vr, s_r)))
    return WavePattern(z_minus, z_plus, zl_m, zr_m,
                       p_m=float(pressure_from_entropy(params, vl, s_l)), u_m=u_m,
                       s_minus=s_l, s_plus=s_r, delta=delta,
                       residuals=tuple(float(f) for f in F), iterations=it, method=method)


def _check_ordering(params, zl, zr, sl, sr, vl_m, vr_m, rtol=1e-12):
    lam1_m, lam1 = char_speed(params, vl_m, sl, 1), char_speed(params, zl.v, sl, 1)
    if lam1_m < lam1 - rtol * abs(lam1):
        raise ConfigurationError(
            "not rarefaction/contact/rarefaction data: 1-wave ordering "
            f"lambda1(v-^m, s-) >= lambda1(v-, s-) fails ({lam1_m:.6g} < {lam1:.6g})")
    lam3, lam3_m = char_speed(params, zr.v, sr, 3), char_speed(params, vr_m, sr, 3)
    if lam3 < lam3_m - rtol * abs(lam3_m):
        raise ConfigurationError(
            "not rarefaction/contact/rarefaction data: 3-wave ordering "
            f"lambda3(v+, s+) >= lambda3(v+^m, s+) fails ({lam3:.6g} < {lam3_m:.6g})")


def build_forward(params, z_minus, v_minus_m, theta_plus_m, theta_plus):
    """Construct a pattern forward from its intermediate states.

    Moves from z- along the 1-isentrope to volume ``v_minus_m``, crosses the
    contact at constant pressure to temperature ``theta_plus_m``, then follows
    the 3-isentrope back to the right state with temperature ``theta_plus``.
    Returns the exact WavePattern; ``pattern.z_plus`` is the Riemann datum.
    """
    g = params.gamma
    s_l = float(entropy(params, z_minus.v, z_minus.theta))
    u_m = float(_left_velocity(params, z_minus, s_l, v_minus_m))
    zl_m = ThermoState(v_minus_m, u_m, float(theta_from_entropy(params, v_minus_m, s_l)))
    p_m = float(pressure(params, zl_m.v, zl_m.theta))
    zr_m = ThermoState(params.R * theta_plus_m / p_m, u_m, theta_plus_m)
    s_r = float(entropy(params, zr_m.v, zr_m.theta))
    v_plus = zr_m.v * (theta_plus_m / theta_plus) ** (1.0 / (g - 1.0))
    u_plus = u_m + rarefaction_velocity_integral(params, v_plus, zr_m.v, s_r, 3)
    z_plus = ThermoState(v_plus, float(u_plus), theta_plus)
    return WavePattern(z_minus, z_plus, zl_m, zr_m, p_m=p_m, u_m=u_m,
                       s_minus=s_l, s_plus=s_r, delta=abs(theta_plus - z_minus.theta),
                       method="forward")
