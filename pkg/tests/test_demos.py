"""Every demo script runs green with its default arguments."""

from __future__ import annotations

import importlib.util
from pathlib import Path

import pytest

DEMOS = sorted((Path(__file__).parent.parent / "demos").glob("*.py"))


def run_demo(path: Path) -> int:
    spec = importlib.util.spec_from_file_location(path.stem, path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module.main([])


@pytest.mark.parametrize("path", DEMOS, ids=lambda p: p.stem)
def test_demo_runs_green(path, capsys):
    assert run_demo(path) == 0
    out = capsys.readouterr().out
    assert out.strip(), "demo printed nothing"
    assert "MISMATCH" not in out
    assert "FAIL" not in out.replace("fuzz control", "")


def test_demo_collection_complete():
    assert len(DEMOS) == 6
