"""Byte-exact regression against stored reports (UPDATE_GOLDEN=1 rewrites them)."""

from __future__ import annotations

import io
import os
from pathlib import Path

import pytest

from parabolic_nf.cli import RunConfig, run

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "certify_N32_eps1.json": RunConfig("certify-divergence", degree=32, epsilon="1"),
    "certify_N32_eps1.csv": RunConfig("certify-divergence", degree=32, epsilon="1", output_format="csv"),
    "normalize_N7_eps1_2.json": RunConfig("normalize", degree=7, epsilon="1/2"),
    "involutions_N6_eps1_2.json": RunConfig("involutions", degree=6, epsilon="1/2"),
    "linearize_N8_eps1.json": RunConfig("linearize", degree=8, epsilon="1"),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    buf = io.StringIO()
    assert run(CASES[name], buf) == 0
    text = buf.getvalue()
    path = GOLDEN / name
    if os.environ.get("UPDATE_GOLDEN"):
        path.write_text(text)
    assert path.read_text() == text


@pytest.mark.parametrize("name", ["normalize_N7_eps1_2.json", "certify_N32_eps1.json"])
def test_repeat_runs_identical(name):
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        run(CASES[name], buf)
        outs.append(buf.getvalue())
    assert outs[0] == outs[1]
