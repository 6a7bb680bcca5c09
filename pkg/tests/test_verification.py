"""Tests for `implicit_shape_matching.verification` module."""
import math

import pytest

from implicit_shape_matching.data import PkgDataAccess
from implicit_shape_matching.scene import random_scene
from implicit_shape_matching.verification import REPORT_HEADER
from implicit_shape_matching.verification import TOLERANCES
from implicit_shape_matching.verification import CheckResult
from implicit_shape_matching.verification import check_scene
from implicit_shape_matching.verification import write_report

# Globals
ROTATION_NAMES = {
    "omega_first",
    "omega_second",
    "omega_exchange",
    "damping_position_hessian",
    "g_closed_form",
}


@pytest.mark.parametrize("n,dim,seed", [(4, 2, 0), (6, 2, 1), (5, 3, 2), (6, 3, 42)])
def test_random_scenes_pass(n, dim, seed):
    results = check_scene(random_scene(n, dim, seed))
    assert sorted(r.name for r in results) == sorted(TOLERANCES)
    assert not [r.line() for r in results if r.failed]
    skipped = {r.name for r in results if r.status == "skipped"}
    assert skipped == (set() if dim == 2 else {"g_closed_form"})


def test_linear_blend_skips_rotation_checks():
    results = check_scene(PkgDataAccess.load_scene("gamma_one_2d"))
    skipped = [r for r in results if r.status == "skipped"]
    assert {r.name for r in skipped} == ROTATION_NAMES
    assert all(math.isnan(r.max_error) for r in skipped)
    assert not any(r.failed for r in results)


def test_check_result_line():
    result = CheckResult("gradient", 1.5e-9, 1e-6, "pass")
    assert result.line() == "gradient,1.5e-09,1e-06,pass"
    assert not result.failed
    assert CheckResult("hessian", float("inf"), 1e-5, "fail").failed


def test_write_report(tmp_path):
    results = [
        CheckResult("gradient", 1.5e-9, 1e-6, "pass"),
        CheckResult("g_closed_form", float("nan"), 1e-13, "skipped"),
    ]
    file_path = tmp_path / "report.csv"
    write_report(results, file_path)
    assert file_path.read_text().splitlines() == [
        REPORT_HEADER,
        "gradient,1.5e-09,1e-06,pass",
        "g_closed_form,nan,1e-13,skipped",
    ]
