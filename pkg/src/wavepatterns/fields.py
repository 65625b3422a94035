from dataclasses import dataclass, fields

import numpy as np


@dataclass
class WaveFields:
    """Values of a wave profile (V, U, Theta) and its x- and t-derivatives."""
    V: np.ndarray
    U: np.ndarray
    Theta: np.ndarray
    V_x: np.ndarray
    U_x: np.ndarray
    Theta_x: np.ndarray
    V_xx: np.ndarray
    U_xx: np.ndarray
    Theta_xx: np.ndarray
    V_t: np.ndarray
    U_t: np.ndarray
    Theta_t: np.ndarray

    def __add__(self, other):
        return WaveFields(**{f.name: getattr(self, f.name) + getattr(other, f.name)
                             for f in fields(self)})

    def shifted(self, dv, du, dtheta):
        """Copy with constants subtracted from (V, U, Theta)."""
        out = WaveFields(**{f.name: getattr(self, f.name) for f in fields(self)})
        out.V = self.V - dv
        out.U = self.U - du
        out.Theta = self.Theta - dtheta
        return out

    def state(self):
        return np.stack([np.asarray(self.V), np.asarray(self.U), np.asarray(self.Theta)])

    def x_derivative(self):
        return np.stack([np.asarray(self.V_x), np.asarray(self.U_x), np.asarray(self.Theta_x)])
