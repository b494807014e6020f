"""The one-parameter family of crease-preserving isometric deformations.

Every deformation of the box that keeps both strips flat and the crease
pattern fixed is, up to rigid motion, given by a fold parameter lam and a
drift mu: the crease becomes c = (mu + int sigma_lam, zeta, lam zeta) with
sigma_lam = sqrt(1 - (1 + lam^2) zeta'^2), the lower ruling stays (0, -1, 0)
and the upper ruling rotates to (0, lam^2 - 1, -2 lam)/(1 + lam^2).  lam = 1
is the closed box, lam = 0 the flat double rectangle; in between the
horizontal end leaves the plane z = 0 by

    depth(s) = -lam (1 - lam^2) / (1 + lam^2) * zeta(s),

so no intermediate state closes up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import ProfileCrease
from .development import pattern_graph
from .errors import DomainError, IoError, OutOfDomain, ScheduleViolation
from .mesh import TriMesh, assemble_reflected
from .pillowbox import XI_LOWER
from .profiles import FundamentalData, graph_to_arclength_profile

_T_TOL = 1e-12


class DeformationSchedule:
    """Fold parameter lam(t) and drift mu(t) over t in [0, 1]."""

    def __init__(self, lam, mu=None, kind: str = "custom", params: dict | None = None):
        self._lam = lam
        self._mu = mu if mu is not None else (lambda t: np.zeros_like(np.asarray(t, dtype=float)))
        self.kind = kind
        self.params = dict(params or {})

    def _check_t(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(arr < -_T_TOL) or np.any(arr > 1.0 + _T_TOL):
            raise DomainError("t must lie in [0, 1]")
        return np.clip(arr, 0.0, 1.0)

    def lam(self, t):
        out = np.asarray(self._lam(self._check_t(t)), dtype=float)
        return float(out) if np.ndim(t) == 0 else out

    def mu(self, t):
        out = np.asarray(self._mu(self._check_t(t)), dtype=float)
        return float(out) if np.ndim(t) == 0 else out

    @classmethod
    def linear(cls) -> "DeformationSchedule":
        return cls(lambda t: 1.0 - np.asarray(t, dtype=float), kind="linear")

    @classmethod
    def cosine(cls) -> "DeformationSchedule":
        return cls(lambda t: np.cos(0.5 * np.pi * np.asarray(t, dtype=float)),
                   kind="cosine")

    @classmethod
    def from_table(cls, t_knots, lam_values, mu_values=None) -> "DeformationSchedule":
        t_knots = np.asarray(t_knots, dtype=float)
        lam_values = np.asarray(lam_values, dtype=float)
        if np.any(np.diff(t_knots) <= 0):
            raise DomainError("table t values must be strictly increasing")
        mu_values = (np.zeros_like(t_knots) if mu_values is None
                     else np.asarray(mu_values, dtype=float))
        params = {"t": t_knots.tolist(), "lam": lam_values.tolist(),
                  "mu": mu_values.tolist()}
        return cls(lambda t: np.interp(t, t_knots, lam_values),
                   lambda t: np.interp(t, t_knots, mu_values),
                   kind="table", params=params)

    @classmethod
    def from_descriptor(cls, desc: dict) -> "DeformationSchedule":
        kind = desc.get("kind", "linear")
        if kind == "linear":
            return cls.linear()
        if kind == "cosine":
            return cls.cosine()
        if kind == "table":
            return cls.from_table(desc["t"], desc["lam"], desc.get("mu"))
        raise IoError(f"unknown schedule kind {kind!r}")

    def descriptor(self) -> dict:
        if self.kind == "custom":
            raise IoError("custom schedules do not serialize")
        return {"kind": self.kind, **self.params}


@dataclass
class ScheduleReport:
    entries: list
    valid: bool

    def to_dict(self) -> dict:
        return {"valid": self.valid, "entries": self.entries}


def admissibility_margin(data: FundamentalData, lam: float,
                         n_samples: int = 511) -> float:
    """min over the open s grid of 1 - (1 + lam^2) zeta'^2; must stay > 0."""
    L = data.length
    s = L * np.arange(1, n_samples + 1) / (n_samples + 1)
    z1 = np.asarray(data.zeta.eval(s, 1))
    return float(np.min(1.0 - (1.0 + lam * lam) * z1 ** 2))


def validate_schedule(data: FundamentalData, schedule: DeformationSchedule,
                      n_t: int = 21, n_samples: int = 99,
                      bc_tol: float = 1e-9) -> ScheduleReport:
    """Endpoint values lam(0) = 1, lam(1) = 0 and a positive admissibility
    margin at every sampled t."""
    entries = []
    lam0, lam1 = schedule.lam(0.0), schedule.lam(1.0)
    entries.append({"name": "starts-folded", "t": 0.0,
                    "passed": bool(abs(lam0 - 1.0) <= bc_tol),
                    "margin": float(bc_tol - abs(lam0 - 1.0))})
    entries.append({"name": "ends-flat", "t": 1.0,
                    "passed": bool(abs(lam1) <= bc_tol),
                    "margin": float(bc_tol - abs(lam1))})
    for t in np.linspace(0.0, 1.0, n_t):
        lam = schedule.lam(float(t))
        mu = schedule.mu(float(t))
        margin = admissibility_margin(data, lam, n_samples)
        entries.append({"name": "fold-margin", "t": float(t), "lam": lam,
                        "mu": mu, "margin": margin,
                        "passed": bool(margin > 0 and np.isfinite(mu))})
    return ScheduleReport(entries, all(e["passed"] for e in entries))


class DeformedQuarter:
    """Embedding X(s, v) of one quarter at fold parameter lam, drift mu."""

    def __init__(self, data: FundamentalData, lam: float, mu: float = 0.0):
        if not np.isfinite(lam) or not np.isfinite(mu):
            raise DomainError("fold parameter and drift must be finite")
        margin = admissibility_margin(data, lam)
        if margin <= 0.0:
            raise ScheduleViolation(
                f"fold parameter {lam} makes sigma^2 reach {margin:.3e} <= 0")
        self.data = data
        self.lam = float(lam)
        self.mu = float(mu)
        self.length = data.length
        self.crease = ProfileCrease(data, lam=self.lam, mu=self.mu)
        denom = 1.0 + self.lam ** 2
        self.xi_upper = np.array([0.0, (self.lam ** 2 - 1.0) / denom,
                                  -2.0 * self.lam / denom])
        self.xi_lower = XI_LOWER.copy()

    def X(self, s, v, domain_slack: float = 0.0) -> np.ndarray:
        """domain_slack loosens the v-domain check; finite-difference
        stencils straddling the curved boundary need a little room."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        v_arr = np.broadcast_to(np.asarray(v, dtype=float), s_arr.shape)
        z0 = np.asarray(self.data.zeta.eval(s_arr, 0))
        tol = 1e-9 * max(self.length, self.data.b) + domain_slack
        if np.any(v_arr > z0 + tol) or np.any(v_arr < z0 - self.data.b - tol):
            raise OutOfDomain("v outside [zeta - b, zeta]")
        base = self.crease.point(s_arr)
        ruling = np.where((v_arr >= 0.0)[..., None], self.xi_upper, self.xi_lower)
        return base + v_arr[..., None] * ruling

    def __call__(self, s, v):
        return self.X(s, v)

    def sampler(self, slack: float = 0.0):
        """X with a fixed domain slack, for stencil-based checks."""
        return lambda s, v: self.X(s, v, domain_slack=slack)

    def vertical_end(self, s) -> np.ndarray:
        z0 = np.asarray(self.data.zeta.eval(np.atleast_1d(np.asarray(s, float)), 0))
        return self.X(s, z0 - self.data.b)

    def horizontal_end(self, s) -> np.ndarray:
        z0 = np.asarray(self.data.zeta.eval(np.atleast_1d(np.asarray(s, float)), 0))
        return self.X(s, z0)

    def depth_coefficient(self) -> float:
        lam = self.lam
        return -lam * (1.0 - lam ** 2) / (1.0 + lam ** 2)


def deformed_quarter(data: FundamentalData, schedule: DeformationSchedule,
                     t: float) -> DeformedQuarter:
    return DeformedQuarter(data, schedule.lam(t), schedule.mu(t))


def horizontal_end_depth(data: FundamentalData, lam: float,
                         n_samples: int = 4001) -> float:
    """Most negative z on the horizontal end: the closure obstruction.

    Zero exactly at lam in {0, 1}; strictly negative for lam in (0, 1) since
    zeta > 0 somewhere.
    """
    if not np.isfinite(lam) or lam < 0.0 or lam > 1.0 + 1e-12:
        raise DomainError(f"fold parameter must lie in [0, 1], got {lam}")
    coeff = -lam * (1.0 - lam ** 2) / (1.0 + lam ** 2)
    s = np.linspace(0.0, data.length, n_samples)
    z0 = np.asarray(data.zeta.eval(s, 0))
    return float(np.min(coeff * z0))


def assemble_deformed(data: FundamentalData, schedule: DeformationSchedule,
                      t: float, n_s: int, n_v: int) -> TriMesh:
    """Mesh of all four reflected quarters at parameter t.

    The horizontal-end correspondence is welded only when it actually lies in
    the plane z = 0; in between the mesh is reported open, never an error.
    """
    quarter = deformed_quarter(data, schedule, t)
    return assemble_reflected(quarter.X, data, n_s, n_v,
                              require_horizontal_weld=False)


def pattern_scaling_family(data: FundamentalData, t: float) -> FundamentalData:
    """Fundamental data whose pattern graph is (1 - t) times the original.

    Scaling the graph preserves the developed width exactly, so all family
    members share one double rectangle; t > 0 also removes the endpoint
    degeneracy (the scaled slope stays below the critical value).
    """
    if not np.isfinite(t) or t < 0.0 or t >= 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t}")
    psi = pattern_graph(data)
    if t == 0.0:
        scaled = psi
    else:
        scaled = psi.scaled(1.0 - t)
    _, zeta_t = graph_to_arclength_profile(scaled, "plane-crease")
    return FundamentalData(data.b, zeta_t)


def sweep_trace(data: FundamentalData, schedule: DeformationSchedule,
                t_values, n_s: int, n_v: int) -> list:
    """One summary row per t: fold state, closure depth, mesh topology."""
    rows = []
    for t in np.asarray(t_values, dtype=float):
        lam = schedule.lam(float(t))
        mesh = assemble_deformed(data, schedule, float(t), n_s, n_v)
        closed = mesh.is_closed()
        row = {
            "t": float(t),
            "lam": float(lam),
            "mu": float(schedule.mu(float(t))),
            "depth": horizontal_end_depth(data, lam),
            "closed": bool(closed),
            "boundary_edges": mesh.boundary_edge_count(),
            "euler": mesh.euler_characteristic(),
        }
        if closed and mesh.orientation_consistent():
            p = mesh.vertices[mesh.faces]
            row["volume"] = float(np.einsum('ij,ij->', p[:, 0],
                                            np.cross(p[:, 1], p[:, 2])) / 6.0)
            row["volume_valid"] = True
        else:
            row["volume"] = 0.0
            row["volume_valid"] = False
        rows.append(row)
    return rows
