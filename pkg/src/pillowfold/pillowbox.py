"""The fully folded box: crease, quarter surface, assembled mesh.

At the folded state the crease is c(s) = (int_0^s sigma, zeta, zeta) with
sigma = sqrt(1 - 2 zeta'^2), the ruling of the strip above the crease is the
constant (0, 0, -1) and below the constant (0, -1, 0).  Both facts follow
from the strip equations but are used directly here, since the Frenet-based
formulas degenerate at the interval ends (sigma -> 0) while the surface
itself stays perfectly smooth there.
"""

from __future__ import annotations

import numpy as np

from .curves import ProfileCrease, SIGMA_MIN
from .errors import OutOfDomain
from .folding import DevelopableStrip, OrigamiMapRecord
from .mesh import TriMesh, assemble_reflected
from .profiles import FundamentalData, safe_sqrt

XI_UPPER = np.array([0.0, 0.0, -1.0])
XI_LOWER = np.array([0.0, -1.0, 0.0])


def crease_curve(data: FundamentalData) -> ProfileCrease:
    """Folded crease; derivative evaluations guard against sigma < SIGMA_MIN."""
    return ProfileCrease(data, lam=1.0)


def _alpha_functions(data: FundamentalData):
    zeta = data.zeta

    def sigma(s):
        return safe_sqrt(1.0 - 2.0 * np.asarray(zeta.eval(s, 1)) ** 2)

    def alpha(s):
        return np.arctan2(1.0, sigma(s))

    def alpha_prime(s):
        z1 = np.asarray(zeta.eval(s, 1))
        z2 = np.asarray(zeta.eval(s, 2))
        sig = sigma(s)
        return 2.0 * z1 * z2 / (sig * (sig ** 2 + 1.0))

    return alpha, alpha_prime


class QuarterParametrization:
    """Embedding X(s, v) of one quarter of the box, v in [zeta - b, zeta].

    v >= 0 is the strip that folds down (ruling (0, 0, -1)), v < 0 the strip
    that folds sideways (ruling (0, -1, 0)); v = 0 is the crease.
    """

    def __init__(self, data: FundamentalData):
        self.data = data
        self.length = data.length
        self.crease = crease_curve(data)
        alpha, alpha_prime = _alpha_functions(data)
        self.alpha = alpha
        self.alpha_prime = alpha_prime
        zeta = data.zeta
        self.upper_strip = DevelopableStrip(
            self.crease, alpha, alpha_prime,
            0.0, lambda s: np.asarray(zeta.eval(s, 0)))
        self.lower_strip = DevelopableStrip(
            self.crease, lambda s: -np.asarray(alpha(s)),
            lambda s: -np.asarray(alpha_prime(s)),
            lambda s: np.asarray(zeta.eval(s, 0)) - data.b, 0.0)

    def record(self) -> OrigamiMapRecord:
        return OrigamiMapRecord(self.upper_strip, self.lower_strip)

    def X(self, s, v, domain_slack: float = 0.0) -> np.ndarray:
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        v_arr = np.broadcast_to(np.asarray(v, dtype=float), s_arr.shape)
        z0 = np.asarray(self.data.zeta.eval(s_arr, 0))
        tol = 1e-9 * max(self.length, self.data.b) + domain_slack
        if np.any(v_arr > z0 + tol) or np.any(v_arr < z0 - self.data.b - tol):
            raise OutOfDomain("v outside [zeta - b, zeta]")
        base = self.crease.point(s_arr)
        ruling = np.where((v_arr >= 0.0)[..., None], XI_UPPER, XI_LOWER)
        return base + v_arr[..., None] * ruling

    def __call__(self, s, v):
        return self.X(s, v)

    def sampler(self, slack: float = 0.0):
        return lambda s, v: self.X(s, v, domain_slack=slack)

    def vertical_end(self, s) -> np.ndarray:
        z0 = np.asarray(self.data.zeta.eval(np.atleast_1d(np.asarray(s, float)), 0))
        return self.X(s, z0 - self.data.b)

    def horizontal_end(self, s) -> np.ndarray:
        z0 = np.asarray(self.data.zeta.eval(np.atleast_1d(np.asarray(s, float)), 0))
        return self.X(s, z0)

    def cos_beta(self, s):
        """cos of the ruling angle, equal to -zeta' on both strips."""
        return -np.asarray(self.data.zeta.eval(s, 1))

    def sigma(self, s):
        return self.crease.sigma(s)


def quarter_parametrization(data: FundamentalData) -> QuarterParametrization:
    return QuarterParametrization(data)


def assemble_box(data: FundamentalData, n_s: int, n_v: int) -> TriMesh:
    """Closed box mesh from four reflected quarters.

    All four boundary correspondences (vertical end, horizontal end, endpoint
    columns) are required here; any miss raises WeldFailure.
    """
    quarter = QuarterParametrization(data)
    return assemble_reflected(quarter.X, data, n_s, n_v,
                              require_horizontal_weld=True)


__all__ = ["XI_UPPER", "XI_LOWER", "SIGMA_MIN", "crease_curve",
           "QuarterParametrization", "quarter_parametrization", "assemble_box"]
