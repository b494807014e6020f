"""The golden artifacts under docs/golden/ stay reproducible byte for byte."""

from __future__ import annotations

import pathlib

import pytest

from pillowfold.cli import main

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "docs" / "golden"

CASES = [
    ("box.obj", ["build", "--grid", "8x4"]),
    ("pattern.svg", ["develop", "--grid", "8x4"]),
    ("trace.json", ["deform", "--sweep", "3", "--grid", "8x4"]),
    ("verify.json", ["verify", "--all"]),
]


@pytest.mark.parametrize("name,argv", CASES, ids=[c[0] for c in CASES])
def test_golden_regenerates(name, argv, tmp_path, capsys):
    rc = main(argv + ["--out", str(tmp_path)])
    capsys.readouterr()
    assert rc == 0
    fresh = (tmp_path / name).read_bytes()
    assert fresh == (GOLDEN / name).read_bytes()
