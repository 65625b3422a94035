"""Ideal polytropic gas in Lagrangian mass coordinates.

State equations::

    p = R theta / v = A v**(-gamma) exp((gamma - 1) s / R)
    e = R theta / (gamma - 1)

All functions accept scalars or numpy arrays.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GasParams:
    R: float = 1.0
    gamma: float = 5.0 / 3.0
    A: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("R", "A", "kappa"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.gamma > 1:
            raise DomainError(f"gamma must exceed 1, got {self.gamma!r}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ThermoState:
    v: float
    u: float
    theta: float

    def __post_init__(self):
        if not self.v > 0:
            raise DomainError(f"specific volume must be positive, got {self.v!r}")
        if not self.theta > 0:
            raise DomainError(f"temperature must be positive, got {self.theta!r}")

    def as_array(self):
        return np.array([self.v, self.u, self.theta])

    def to_list(self):
        return [float(self.v), float(self.u), float(self.theta)]


def _check_positive(name, x):
    if np.any(~(np.asarray(x) > 0)):
        raise DomainError(f"{name} must be positive")


def _check_family(family):
    if family not in (1, 3):
        raise DomainError(f"family must be 1 or 3, got {family!r}")


def pressure(params, v, theta):
    _check_positive("v", v)
    _check_positive("theta", theta)
    return params.R * np.asarray(theta, dtype=float) / v


def pressure_from_entropy(params, v, s):
    """Second form of the state equation, p = A v^-gamma exp((gamma-1) s / R)."""
    _check_positive("v", v)
    g = params.gamma
    return params.A * np.power(v, -g) * np.exp((g - 1.0) * np.asarray(s) / params.R)


def entropy(params, v, theta):
    _check_positive("v", v)
    _check_positive("theta", theta)
    R, g = params.R, params.gamma
    return R / (g - 1.0) * np.log(R * np.asarray(theta, dtype=float) / params.A) + R * np.log(v)


def theta_from_entropy(params, v, s):
    _check_positive("v", v)
    R, g = params.R, params.gamma
    return params.A / R * np.exp((g - 1.0) / R * (np.asarray(s) - R * np.log(v)))


def internal_energy(params, theta):
    return params.R / (params.gamma - 1.0) * np.asarray(theta)


def sound_speed(params, v, theta):
    """Lagrangian sound speed sqrt(gamma p / v)."""
    return np.sqrt(params.gamma * pressure(params, v, theta) / v)


def _speed_coefficient(params, s):
    # lambda_3(v, s) = K(s) v^(-(gamma+1)/2)
    g = params.gamma
    return np.sqrt(g * params.A * np.exp((g - 1.0) * np.asarray(s) / params.R))


def char_speed(params, v, s, family):
    """Characteristic speed lambda_1 = -sqrt(gamma p / v) or lambda_3 = -lambda_1."""
    _check_family(family)
    _check_positive("v", v)
    sign = -1.0 if family == 1 else 1.0
    return sign * _speed_coefficient(params, s) * np.power(v, -(params.gamma + 1.0) / 2.0)


def invert_char_speed(params, w, s, family):
    """Volume V with char_speed(V, s, family) == w (closed-form power law)."""
    _check_family(family)
    w = np.asarray(w, dtype=float)
    sign = -1.0 if family == 1 else 1.0
    ratio = sign * w / _speed_coefficient(params, s)
    if np.any(~(ratio > 0)):
        raise DomainError(f"speed {w!r} has the wrong sign for family {family}")
    return np.power(ratio, -2.0 / (params.gamma + 1.0))


def rarefaction_velocity_integral(params, v_from, v_to, s, family):
    """Closed form of  int_{v_from}^{v_to} lambda_family(eta, s) d eta."""
    _check_family(family)
    _check_positive("v_from", v_from)
    _check_positive("v_to", v_to)
    g = params.gamma
    q = (1.0 - g) / 2.0
    sign = -1.0 if family == 1 else 1.0
    k = _speed_coefficient(params, s)
    return sign * 2.0 * k / (g - 1.0) * (np.power(v_from, q) - np.power(v_to, q))


def isentrope_theta(params, v_anchor, theta_anchor, v):
    """Temperature along the isentrope through (v_anchor, theta_anchor)."""
    _check_positive("v", v)
    g = params.gamma
    return theta_anchor * (v_anchor / np.asarray(v, dtype=float)) ** (g - 1.0)
