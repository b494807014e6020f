from __future__ import annotations

import numpy as np
import pytest

from pillowfold.deformation import (DeformationSchedule, DeformedQuarter,
                                    admissibility_margin, assemble_deformed,
                                    deformed_quarter, horizontal_end_depth,
                                    pattern_scaling_family, sweep_trace,
                                    validate_schedule)
from pillowfold.development import developing_map
from pillowfold.errors import (DomainError, IoError, NotClosed,
                               ScheduleViolation)
from pillowfold.pillowbox import quarter_parametrization
from pillowfold.profiles import FundamentalData
from pillowfold.verify import enclosed_volume, topology_report

import oracles as oc


def test_schedule_linear_and_cosine():
    lin = DeformationSchedule.linear()
    assert lin.lam(0.0) == 1.0 and lin.lam(1.0) == 0.0
    assert lin.mu(0.5) == 0.0
    ts = np.linspace(0.0, 1.0, 5)
    assert np.max(np.abs(lin.lam(ts) - (1.0 - ts))) == 0.0
    cos = DeformationSchedule.cosine()
    assert abs(cos.lam(0.0) - 1.0) < 1e-15
    assert abs(cos.lam(1.0)) < 1e-15
    with pytest.raises(DomainError):
        lin.lam(1.5)


def test_schedule_table_and_descriptors():
    tab = DeformationSchedule.from_table([0.0, 0.5, 1.0], [1.0, 0.4, 0.0])
    assert abs(tab.lam(0.25) - 0.7) < 1e-15
    back = DeformationSchedule.from_descriptor(tab.descriptor())
    assert abs(back.lam(0.25) - 0.7) < 1e-15
    assert DeformationSchedule.from_descriptor(
        {"kind": "linear"}).lam(0.3) == 0.7
    with pytest.raises(IoError):
        DeformationSchedule.from_descriptor({"kind": "spiral"})
    with pytest.raises(IoError):
        DeformationSchedule(lambda t: 1.0 - t).descriptor()
    with pytest.raises(DomainError):
        DeformationSchedule.from_table([0.0, 0.0, 1.0], [1.0, 0.5, 0.0])


def test_validate_schedule_demo():
    data = FundamentalData.demo()
    report = validate_schedule(data, DeformationSchedule.linear())
    assert report.valid
    assert {e["name"] for e in report.entries} == {
        "starts-folded", "ends-flat", "fold-margin"}


def test_validate_schedule_rejections():
    data = FundamentalData.demo()
    # never unfolds
    stuck = DeformationSchedule.from_table([0.0, 1.0], [1.0, 1.0])
    rep = validate_schedule(data, stuck)
    assert not rep.valid
    assert not next(e for e in rep.entries if e["name"] == "ends-flat")["passed"]
    # overfolds: sigma^2 goes negative at t = 0
    wild = DeformationSchedule.from_table([0.0, 1.0], [3.0, 0.0])
    rep = validate_schedule(data, wild)
    assert not rep.valid
    worst = min(e["margin"] for e in rep.entries if e["name"] == "fold-margin")
    assert worst < 0.0


def test_admissibility_margin_values():
    data = FundamentalData.demo()
    # max zeta'^2 approaches 1/2 at the ends: margin ~ (1 - lam^2)/2
    assert admissibility_margin(data, 1.0) > 0.0
    assert admissibility_margin(data, 1.0) < 0.01
    assert abs(admissibility_margin(data, 0.0) - 0.5) < 5e-3
    assert admissibility_margin(data, 3.0) < 0.0


def test_deformed_quarter_guards():
    data = FundamentalData.demo()
    with pytest.raises(ScheduleViolation):
        DeformedQuarter(data, 3.0)
    with pytest.raises(DomainError):
        DeformedQuarter(data, float("nan"))


def test_deformed_quarter_structure():
    data = FundamentalData.demo()
    q = DeformedQuarter(data, 0.5)
    assert abs(q.depth_coefficient() + 0.3) < 1e-15
    s = np.linspace(0.0, 2.0, 41)
    z0 = oc.demo_zeta(s, 0)
    # crease keeps its height profile and stays in the plane z = lam y
    c = q.crease.point(s)
    assert np.max(np.abs(c[:, 1] - z0)) < 1e-12
    assert np.max(np.abs(c[:, 2] - 0.5 * c[:, 1])) < 1e-12
    # vertical end pinned to y = b, horizontal end reaching the depth formula
    assert np.max(np.abs(q.vertical_end(s)[:, 1] - data.b)) < 1e-12
    horiz = q.horizontal_end(s)
    assert abs(float(np.min(horiz[:, 2])) - oc.DEPTH_HALF) < 1e-9
    # rulings are unit vectors
    assert abs(np.linalg.norm(q.xi_upper) - 1.0) < 1e-15
    assert abs(np.linalg.norm(q.xi_lower) - 1.0) < 1e-15


def test_deformation_endpoints_reproduce_box_and_development():
    data = FundamentalData.demo()
    schedule = DeformationSchedule.linear()
    s = np.linspace(0.05, 1.95, 21)
    v = 0.3 * oc.demo_zeta(s, 0) - 0.2
    start = deformed_quarter(data, schedule, 0.0)
    assert np.max(np.abs(start.X(s, v)
                         - quarter_parametrization(data).X(s, v))) < 1e-10
    end = deformed_quarter(data, schedule, 1.0)
    assert np.max(np.abs(end.X(s, v)
                         - developing_map(data).Y(s, v))) < 1e-10


def test_horizontal_end_depth_formula():
    data = FundamentalData.demo()
    assert horizontal_end_depth(data, 0.0) == 0.0
    assert abs(horizontal_end_depth(data, 1.0)) < 1e-12
    assert abs(horizontal_end_depth(data, 0.5) - oc.DEPTH_HALF) < 1e-9
    # deepest obstruction near lam = 0.5, shallow near the ends
    assert horizontal_end_depth(data, 0.5) < horizontal_end_depth(data, 0.05)
    assert horizontal_end_depth(data, 0.5) < horizontal_end_depth(data, 0.95)
    with pytest.raises(DomainError):
        horizontal_end_depth(data, 1.5)


def test_obstruction_witness_depth_band():
    # strictly below -1e-3 through the middle of the deformation
    data = FundamentalData.demo()
    schedule = DeformationSchedule.linear()
    for t in np.linspace(0.1, 0.9, 9):
        assert horizontal_end_depth(data, schedule.lam(float(t))) < -1e-3


def test_assembled_deformation_topology():
    data = FundamentalData.demo()
    schedule = DeformationSchedule.linear()
    closed = assemble_deformed(data, schedule, 0.0, 16, 8)
    assert closed.is_closed()
    mid = assemble_deformed(data, schedule, 0.5, 16, 8)
    assert not mid.is_closed()
    assert mid.weld_report["horizontal_end"] == "open"
    assert mid.boundary_edge_count() > 0
    with pytest.raises(NotClosed):
        enclosed_volume(mid)
    flat = assemble_deformed(data, schedule, 1.0, 16, 8)
    assert flat.is_closed()
    assert abs(enclosed_volume(flat)) < 1e-14


def test_pattern_scaling_family_members():
    data = FundamentalData.demo()
    base_width = data.half_width()
    member = pattern_scaling_family(data, 0.5)
    assert abs(member.max_height() - 0.5 * oc.ZETA_MAX) < 1e-9
    assert abs(member.half_width() - base_width) < 1e-9
    start = pattern_scaling_family(data, 0.0)
    s = np.linspace(0.0, 2.0, 17)
    assert np.max(np.abs(np.asarray(start.zeta.eval(s, 0))
                         - oc.demo_zeta(s, 0))) < 1e-9
    with pytest.raises(DomainError):
        pattern_scaling_family(data, 1.0)


def test_pattern_scaling_volumes_decrease_continuously():
    data = FundamentalData.demo()
    from pillowfold.pillowbox import assemble_box
    ts = np.linspace(0.0, 0.95, 11)
    vols = []
    for t in ts:
        member = pattern_scaling_family(data, float(t))
        vols.append(enclosed_volume(assemble_box(member, 16, 8)))
    vols = np.asarray(vols)
    assert np.all(np.diff(vols) < 0.0)
    # successive differences stay within 3x the neighbouring local slope:
    # no jumps, the trace is a discretely continuous curve heading to 0
    gaps = np.abs(np.diff(vols))
    for k in range(1, len(gaps)):
        assert gaps[k] < 3.0 * gaps[k - 1] + 1e-12
        assert gaps[k - 1] < 3.0 * gaps[k] + 1e-12
    assert vols[-1] < 0.15 * vols[0]


def test_sweep_trace_rows():
    data = FundamentalData.demo()
    schedule = DeformationSchedule.linear()
    ts = np.linspace(0.0, 1.0, 5)
    rows = sweep_trace(data, schedule, ts, 12, 6)
    assert len(rows) == 5
    assert [r["t"] for r in rows] == sorted(r["t"] for r in rows)
    for row in rows:
        assert set(row) >= {"t", "lam", "mu", "depth", "closed",
                            "boundary_edges", "euler", "volume", "volume_valid"}
        interior = 0.0 < row["t"] < 1.0
        assert row["closed"] == (not interior)
        assert row["volume_valid"] == (not interior)
        want_depth = horizontal_end_depth(data, row["lam"])
        assert abs(row["depth"] - want_depth) < 1e-12
    assert abs(rows[0]["volume"]
               - enclosed_volume(assemble_deformed(data, schedule, 0.0, 12, 6))) < 1e-12
    assert abs(rows[-1]["volume"]) < 1e-14
