"""Superposition of the 1-rarefaction, contact and 3-rarefaction waves.

The composite (V, U, Theta) is the sum of the three profiles minus the
intermediate constants, so it telescopes to z- and z+ in the far field. The
defects it leaves in the momentum and energy equations are the residuals
R1 and R2 that drive the perturbation.
"""
from dataclasses import dataclass

import numpy as np

from .contact import ContactProfile, eval_contact, solve_selfsimilar
from .errors import DiagnosticError, DomainError
from .gas import char_speed
from .rarefaction import RarefactionSpec, deviation_from_end, eval_rarefaction, make_rarefaction
from .riemann import WavePattern


@dataclass(frozen=True)
class CompositeWave:
    pattern: WavePattern
    contact: ContactProfile
    rarefaction_1: RarefactionSpec
    rarefaction_3: RarefactionSpec


def build_composite(params, pattern, xi_max=12.0, grid_points=4001, tol=1e-10):
    """Contact between z-^m and z+^m at pressure p_m, plus the two rarefactions."""
    zl, zr = pattern.z_minus_m, pattern.z_plus_m
    contact = solve_selfsimilar(params, zl.theta, zr.theta, pattern.p_m, xi_max=xi_max,
                                grid_points=grid_points, tol=tol, u_minus=pattern.u_m)
    r1 = make_rarefaction(params, 1, pattern.z_minus, zl.v)
    r3 = make_rarefaction(params, 3, pattern.z_plus, zr.v)
    return CompositeWave(pattern, contact, r1, r3)


def components(wave, params, x, t):
    """The three component fields (rarefaction 1, contact, rarefaction 3)."""
    return (eval_rarefaction(wave.rarefaction_1, params, x, t),
            eval_contact(wave.contact, params, x, t),
            eval_rarefaction(wave.rarefaction_3, params, x, t))


def _superpose(wave, f1, fc, f3):
    # contact + (Z1 - z-^m) + (Z3 - z+^m); trivial rarefactions drop out exactly
    out = fc
    for spec, f, z in ((wave.rarefaction_1, f1, wave.pattern.z_minus_m),
                       (wave.rarefaction_3, f3, wave.pattern.z_plus_m)):
        if not spec.trivial:
            out = out + f.shifted(z.v, z.u, z.theta)
    return out


def eval_composite(wave, params, x, t):
    return _superpose(wave, *components(wave, params, x, t))


@dataclass
class Residuals:
    """Momentum and energy defects of the composite.

    The momentum row is ``U_t + P_x = -R1`` with ``R1 = R1_1 - Uc_t``;
    ``R1_printed = R1_1 + Uc_t`` keeps the alternative sign of the contact term
    so the two conventions can be compared (they differ only by 2 Uc_t).
    The energy row is ``R/(gamma-1) Theta_t + P U_x - kappa (Theta_x/V)_x = -R2``.
    """
    R1: np.ndarray
    R2: np.ndarray
    R1_1: np.ndarray
    Uc_t: np.ndarray
    R2_1: np.ndarray
    R2_2: np.ndarray

    @property
    def R1_printed(self):
        return self.R1_1 + self.Uc_t


def _pressure_and_gradient(params, f):
    P = params.R * f.Theta / f.V
    P_x = params.R * (f.Theta_x / f.V - f.Theta * f.V_x / f.V ** 2)
    return P, P_x


def _heat_flux_gradient(f):
    """(Theta_x / V)_x."""
    return f.Theta_xx / f.V - f.Theta_x * f.V_x / f.V ** 2


def residuals(wave, params, x, t):
    f1, fc, f3 = components(wave, params, x, t)
    f = _superpose(wave, f1, fc, f3)
    P, P_x = _pressure_and_gradient(params, f)
    P1, P1_x = _pressure_and_gradient(params, f1)
    P3, P3_x = _pressure_and_gradient(params, f3)
    p_m = wave.pattern.p_m

    R1_1 = -(P_x - P1_x - P3_x)
    R2_1 = (p_m - P) * fc.U_x + (P1 - P) * f1.U_x + (P3 - P) * f3.U_x
    R2_2 = params.kappa * (_heat_flux_gradient(f) - _heat_flux_gradient(fc))
    return Residuals(R1=R1_1 - fc.U_t, R2=R2_1 + R2_2, R1_1=R1_1, Uc_t=fc.U_t,
                     R2_1=R2_1, R2_2=R2_2)


def region_boundaries(pattern, params):
    """Slopes (lambda_1(v-^m, s-), lambda_3(v+^m, s+)) of the lines 2x = lambda t."""
    return (float(char_speed(params, pattern.z_minus_m.v, pattern.s_minus, 1)),
            float(char_speed(params, pattern.z_plus_m.v, pattern.s_plus, 3)))


def region_of(pattern, params, x, t):
    """Region tags 'omega1', 'omega_c', 'omega3' (boundary points belong to omega_c)."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("time must be non-negative")
    l1, l3 = region_boundaries(pattern, params)
    x2 = 2.0 * np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.where(x2 < l1 * t, "omega1", np.where(x2 > l3 * t, "omega3", "omega_c"))


def _log_slope(t, y, label):
    t, y = np.asarray(t, float), np.asarray(y, float)
    ok = y > 0
    if ok.sum() < 3:
        raise DiagnosticError(f"{label}: fewer than 3 positive samples to fit")
    slope, intercept = np.polyfit(t[ok], np.log(y[ok]), 1)
    return float(slope), float(np.exp(intercept))


@dataclass
class CrossRegionReport:
    t: list
    sup_rarefaction_1: list      # sup over omega_c of |Z1 - z-^m| + |Z1_x|
    sup_rarefaction_3: list      # sup over omega_c of |Z3 - z+^m| + |Z3_x|
    sup_contact: list            # sup over omega_1 and omega_3 of |Zc - z(+/-)^m| + |Zc_x|
    rates: dict                  # fitted c in sup ~ C exp(-c t), per series (None if zero)


def _window(wave, t, margin=40.0):
    lo = min(wave.rarefaction_1.w_l, 0.0) * t - margin
    hi = max(wave.rarefaction_3.w_r, 0.0) * t + margin
    return lo, hi


def check_cross_region_smallness(wave, params, t_list, dx=0.05):
    """Check that each wave is exponentially small outside its own region."""
    pat = wave.pattern
    l1, l3 = region_boundaries(pat, params)
    out = {"r1": [], "r3": [], "c": []}
    for t in t_list:
        lo, hi = _window(wave, t)
        x = np.arange(lo, hi + dx, dx)
        tags = region_of(pat, params, x, t)
        mid = tags == "omega_c"
        left, right = tags == "omega1", tags == "omega3"
        # the sup over omega_c is attained at its edges; include them exactly
        xc = np.concatenate([x[mid], [0.5 * l1 * t, 0.5 * l3 * t]])
        d1 = _rarefaction_gap(wave.rarefaction_1, params, xc, t, "right")
        d3 = _rarefaction_gap(wave.rarefaction_3, params, xc, t, "left")
        fc = eval_contact(wave.contact, params, x, t)
        dev_l = (np.abs(fc.V - pat.z_minus_m.v) + np.abs(fc.U - pat.u_m)
                 + np.abs(fc.Theta - pat.z_minus_m.theta))
        dev_r = (np.abs(fc.V - pat.z_plus_m.v) + np.abs(fc.U - pat.u_m)
                 + np.abs(fc.Theta - pat.z_plus_m.theta))
        grad = np.abs(fc.V_x) + np.abs(fc.U_x) + np.abs(fc.Theta_x)
        dc = np.concatenate([(dev_l + grad)[left], (dev_r + grad)[right], [0.0]])
        out["r1"].append(float(np.max(d1)))
        out["r3"].append(float(np.max(d3)))
        out["c"].append(float(np.max(dc)))

    rates = {}
    for key, series in out.items():
        if max(series) == 0.0:
            rates[key] = None
            continue
        slope, _ = _log_slope(t_list, series, key)
        rates[key] = -slope
    return CrossRegionReport(list(map(float, t_list)), out["r1"], out["r3"], out["c"], rates)


def _rarefaction_gap(spec, params, x, t, side):
    if spec.trivial:
        return np.zeros_like(x)
    dev = deviation_from_end(spec, params, x, t, side)
    f = eval_rarefaction(spec, params, x, t)
    return np.abs(dev).sum(axis=0) + np.abs(f.x_derivative()).sum(axis=0)


@dataclass
class ResidualDecayReport:
    t: list
    sup_R1: list
    sup_R2: list
    sup_Uc_t: list
    sup_R1_x: list
    sup_R1_xx: list
    sup_R2_x: list
    sup_R2_xx: list
    exponents: dict              # fitted exponent against (1 + t), per series


def residual_decay(wave, params, t_list, dx=0.05):
    """Sup-norms of the residuals and their x-derivatives, with power-law fits."""
    keys = ("R1", "R2", "Uc_t", "R1_x", "R1_xx", "R2_x", "R2_xx")
    sups = {k: [] for k in keys}
    for t in t_list:
        lo, hi = _window(wave, t)
        x = np.arange(lo, hi + dx, dx)
        res = residuals(wave, params, x, t)
        sups["R1"].append(np.max(np.abs(res.R1)))
        sups["R2"].append(np.max(np.abs(res.R2)))
        sups["Uc_t"].append(np.max(np.abs(res.Uc_t)))
        for name, field in (("R1", res.R1), ("R2", res.R2)):
            fx = np.gradient(field, dx)
            sups[name + "_x"].append(np.max(np.abs(fx)))
            sups[name + "_xx"].append(np.max(np.abs(np.gradient(fx, dx))))
    ts = np.asarray(t_list, dtype=float)
    exponents = {}
    for k in keys:
        y = np.asarray(sups[k])
        exponents[k] = float(np.polyfit(np.log1p(ts), np.log(y), 1)[0]) if np.all(y > 0) else None
    return ResidualDecayReport(list(map(float, ts)), *[list(map(float, sups[k])) for k in keys],
                               exponents=exponents)


def substitution_defect(wave, params, x, t, h=1e-4):
    """Left sides of the momentum and energy rows, with x-derivatives by differencing.

    Returns (U_t + P_x, R/(gamma-1) Theta_t + P U_x - kappa (Theta_x/V)_x). The time
    derivatives are analytic; the spatial ones use central differences of step h,
    so this is independent of the assembled residual formulas.
    """
    R, k = params.R, params.kappa
    f = eval_composite(wave, params, x, t)
    fp, fm = eval_composite(wave, params, x + h, t), eval_composite(wave, params, x - h, t)
    P_x = (R * fp.Theta / fp.V - R * fm.Theta / fm.V) / (2 * h)
    U_x = (fp.U - fm.U) / (2 * h)
    # (Theta_x / V)_x from Theta on a 3-point stencil at half steps
    q_p = (fp.Theta - f.Theta) / h / (0.5 * (fp.V + f.V))
    q_m = (f.Theta - fm.Theta) / h / (0.5 * (f.V + fm.V))
    heat = (q_p - q_m) / h
    P = R * f.Theta / f.V
    return f.U_t + P_x, R / (params.gamma - 1.0) * f.Theta_t + P * U_x - k * heat


def far_field_error(wave, params, t, reach=1e4):
    """Max deviation of the composite from z- and z+ at x = -/+ reach."""
    f = eval_composite(wave, params, np.array([-reach, reach]), t)
    s = f.state()
    return float(max(np.max(np.abs(s[:, 0] - wave.pattern.z_minus.as_array())),
                     np.max(np.abs(s[:, 1] - wave.pattern.z_plus.as_array()))))


def assert_positive(f):
    if np.any(~(np.asarray(f.V) > 0)) or np.any(~(np.asarray(f.Theta) > 0)):
        raise DomainError("composite wave lost positivity")
