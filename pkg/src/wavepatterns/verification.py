"""Pass/fail checks shared by ``wavepatterns verify`` and the acceptance tests.

Construction checks certify the waves before any time stepping. Stability
checks read the diagnostic series of a finished run and apply the decay,
monotone-tail, a-priori-ratio and weighted-integral criteria.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .composite import build_composite, eval_composite, far_field_error, residuals, substitution_defect
from .diagnostics import decay_fit, eventually_nonincreasing
from .errors import DiagnosticError
from .riemann import decompose


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        val = "" if self.value is None else f" value={self.value:.4g}"
        thr = "" if self.threshold is None else f" threshold={self.threshold:.4g}"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}{val}{thr}{extra}"

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class StabilityCriteria:
    decay_factor: float = 0.5
    tail: float = 0.25
    slack: float = 0.05
    ratio_bound: float = 50.0
    weighted_check: bool = False
    weighted_window: tuple | None = None     # default: last three quarters of the run


def construction_checks(params, z_minus, z_plus, t_sample=(0.5, 5.0, 50.0)):
    """Build the pattern and composite and certify them. Returns (checks, wave)."""
    pattern = decompose(params, z_minus, z_plus)
    wave = build_composite(params, pattern)
    out = [Check("contact_ode_residual", wave.contact.residual < 1e-8, wave.contact.residual, 1e-8)]

    x = np.linspace(-60.0, 60.0, 100)
    X, T = np.meshgrid(x, np.linspace(0.5, 50.0, 10), indexing="ij")
    f = eval_composite(wave, params, X, T)
    mass = float(np.max(np.abs(f.V_t - f.U_x)))
    out.append(Check("mass_row", mass < 1e-6, mass, 1e-6))

    ff = max(far_field_error(wave, params, t) for t in t_sample)
    out.append(Check("far_field", ff < 1e-10, ff, 1e-10))

    X, T = np.meshgrid(np.linspace(-60.0, 60.0, 400), np.linspace(0.5, 40.0, 20), indexing="ij")
    res = residuals(wave, params, X, T)
    mom, energy = substitution_defect(wave, params, X, T)
    sub = float(max(np.max(np.abs(mom + res.R1)), np.max(np.abs(energy + res.R2))))
    out.append(Check("residual_substitution", sub < 1e-5, sub, 1e-5))
    return out, wave


def stability_checks(record, criteria=StabilityCriteria()):
    """Criteria on the diagnostic series of one run."""
    recs = record.diagnostics
    t = np.array([r.t for r in recs])
    sup = np.array([r.sup for r in recs])
    ent = np.array([r.entropy for r in recs])
    out = [Check("run_valid", bool(record.valid), detail="; ".join(record.messages))]

    bound = criteria.decay_factor * sup[0]
    out.append(Check("sup_decay", bool(sup[-1] <= bound), float(sup[-1]), float(bound),
                     f"initial sup {sup[0]:.4g}"))
    out.append(Check("sup_tail_nonincreasing",
                     eventually_nonincreasing(sup, criteria.tail, criteria.slack)))
    out.append(Check("entropy_tail_nonincreasing",
                     eventually_nonincreasing(ent, criteria.tail, criteria.slack)))

    ratios = [r.ratio for r in recs if r.ratio is not None]
    if ratios:
        m = float(max(ratios))
        out.append(Check("apriori_ratio", m < criteria.ratio_bound, m, criteria.ratio_bound))
    else:
        out.append(Check("apriori_ratio", True, detail="undefined: zero denominator"))

    if criteria.weighted_check:
        out.append(weighted_increment_check(t, recs, criteria.weighted_window))
    return out


def weighted_increment_check(t, recs, window=None):
    """Increments of the first weighted time integral must decay (fitted exponent < 0)."""
    w = np.array([r.weighted_integrals[0] for r in recs])
    inc = np.diff(w) / np.diff(t)
    tm = 0.5 * (t[1:] + t[:-1])
    if window is None:
        window = (0.25 * t[-1], t[-1])
    try:
        fit = decay_fit(tm, inc, window)
    except DiagnosticError as exc:
        return Check("weighted_increment_decay", False, detail=str(exc))
    return Check("weighted_increment_decay", fit.exponent < 0, fit.exponent, 0.0,
                 f"R^2 {fit.r2:.3f} over t in [{window[0]:g}, {window[1]:g}]")


def all_passed(checks):
    return all(c.passed for c in checks)
