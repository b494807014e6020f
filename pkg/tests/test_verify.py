from __future__ import annotations

import json

import numpy as np
import pytest

from pillowfold.deformation import DeformedQuarter
from pillowfold.errors import (CollinearSamples, DegenerateMetric,
                               GridTooCoarse, InconsistentOrientation,
                               NotClosed)
from pillowfold.mesh import TriMesh
from pillowfold.pillowbox import assemble_box
from pillowfold.profiles import FundamentalData
from pillowfold.verify import (check_crease_planarity, check_flatness,
                               check_isometry, count_self_intersections,
                               enclosed_volume, topology_report)

import oracles as oc

H_S = 2e-5
H_V = 2e-6


def pillow_grid(n_s=12, n_half=5):
    s = np.linspace(0.1, 1.9, n_s)
    frac = np.linspace(0.1, 0.9, n_half)
    v = oc.demo_zeta(s, 0)[:, None] * frac
    return s, v


def metric_reference(smat, vmat):
    z1 = oc.demo_zeta(smat, 1)
    return np.ones_like(z1), -z1, np.ones_like(z1)


def test_isometry_check_passes_on_pillow():
    q = DeformedQuarter(FundamentalData.demo(), 1.0)
    s, v = pillow_grid()
    rep = check_isometry(q.sampler(2 * (H_S + H_V)), metric_reference,
                         s, v, H_S, H_V)
    assert rep.passed
    assert rep.worst < 1e-7


def test_isometry_check_fails_on_scaled_surface():
    q = DeformedQuarter(FundamentalData.demo(), 1.0)
    base = q.sampler(2 * (H_S + H_V))

    def stretched(s, v):
        return 1.1 * base(s, v)

    s, v = pillow_grid()
    rep = check_isometry(stretched, metric_reference, s, v, H_S, H_V)
    assert not rep.passed
    # E picks up the factor 1.1^2: residual about 0.21
    assert abs(rep.worst - 0.21) < 1e-2


def test_isometry_check_report_shape():
    q = DeformedQuarter(FundamentalData.demo(), 0.5)
    s, v = pillow_grid()
    rep = check_isometry(q.sampler(2 * (H_S + H_V)), metric_reference,
                         s, v, H_S, H_V, label="isometry t=0.5")
    d = rep.to_dict()
    assert set(d) == {"check", "grid", "worst", "at", "threshold", "pass"}
    json.dumps(d)
    assert d["grid"] == "12x5"
    with pytest.raises(GridTooCoarse):
        check_isometry(q.sampler(), metric_reference, s[:2], v[:2], H_S, H_V)


def test_flatness_passes_on_pillow_and_cylinder():
    q = DeformedQuarter(FundamentalData.demo(), 1.0)
    s, v = pillow_grid()
    h = 2e-4
    rep = check_flatness(q.sampler(4 * h), s, v, h, h)
    assert rep.passed and rep.worst < 1e-6

    def cylinder(sm, vm):
        return np.stack([np.cos(sm), np.sin(sm), vm], axis=-1)

    rep = check_flatness(cylinder, np.linspace(0.0, 2.0, 9),
                         np.linspace(-0.5, 0.5, 7), h, h)
    assert rep.passed


def test_flatness_fails_on_sphere():
    def sphere(sm, vm):
        return np.stack([np.cos(sm) * np.cos(vm), np.sin(sm) * np.cos(vm),
                         np.sin(vm)], axis=-1)

    h = 2e-4
    rep = check_flatness(sphere, np.linspace(0.2, 1.2, 9),
                         np.linspace(0.1, 0.6, 7), h, h)
    assert not rep.passed
    assert abs(rep.worst - 1.0) < 1e-2


def test_flatness_degenerate_metric():
    def collapsed(sm, vm):
        return np.stack([sm, np.zeros_like(sm), np.zeros_like(sm)], axis=-1)

    with pytest.raises(DegenerateMetric):
        check_flatness(collapsed, np.linspace(0.2, 1.2, 5),
                       np.linspace(0.1, 0.6, 5), 1e-4, 1e-4)


def test_crease_planarity_estimates_fold_parameter():
    for lam in (0.25, 0.5, 1.0):
        q = DeformedQuarter(FundamentalData.demo(), lam)
        pts = q.crease.point(np.linspace(0.1, 1.9, 33))
        rep = check_crease_planarity(pts)
        assert abs(rep.lambda_estimate - lam) < 1e-9
        assert rep.max_deviation < 1e-12
        json.dumps(rep.to_dict())


def test_crease_planarity_flat_state():
    q = DeformedQuarter(FundamentalData.demo(), 0.0)
    rep = check_crease_planarity(q.crease.point(np.linspace(0.1, 1.9, 33)))
    assert abs(rep.lambda_estimate) < 1e-12


def test_crease_planarity_rejects_axis_samples():
    pts = np.stack([np.linspace(0.0, 1.0, 9), np.zeros(9), np.zeros(9)], axis=-1)
    with pytest.raises(CollinearSamples):
        check_crease_planarity(pts)
    with pytest.raises(CollinearSamples):
        check_crease_planarity(pts[:2])


def test_enclosed_volume_cube():
    v, f = oc.unit_cube_mesh()
    cube = TriMesh(v, f)
    assert enclosed_volume(cube) == 1.0
    # translation invariance of the divergence-theorem integral
    far = cube.translated([17.0, -3.0, 101.0])
    assert abs(enclosed_volume(far) - 1.0) < 1e-12


def test_enclosed_volume_guards():
    v, f = oc.unit_cube_mesh()
    with pytest.raises(NotClosed):
        enclosed_volume(TriMesh(v, f[:-1]))
    flipped = f.copy()
    flipped[0] = flipped[0, ::-1]
    with pytest.raises(InconsistentOrientation):
        enclosed_volume(TriMesh(v, flipped))


def test_count_self_intersections_crossing_pair():
    verts = np.array([
        [0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0],
        [0.5, 0.5, -1.0], [1.5, 0.5, 1.0], [0.5, 1.5, 1.0],
    ])
    faces = np.array([[0, 1, 2], [3, 4, 5]])
    assert count_self_intersections(TriMesh(verts, faces)) == 1
    # sharing a vertex excludes the pair
    faces_shared = np.array([[0, 1, 2], [0, 4, 5]])
    assert count_self_intersections(TriMesh(verts, faces_shared)) == 0


def test_topology_report_cube_and_box():
    v, f = oc.unit_cube_mesh()
    topo = topology_report(TriMesh(v, f))
    assert (topo.vertices, topo.edges, topo.faces) == (8, 18, 12)
    assert topo.euler == 2 and topo.closed
    assert topo.intersections == 0
    assert topo.volume_valid and topo.volume == 1.0
    json.dumps(topo.to_dict())

    box = assemble_box(FundamentalData.demo(), 16, 8)
    topo = topology_report(box)
    assert topo.closed and topo.euler == 2 and topo.volume > 0.0
