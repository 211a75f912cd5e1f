import json

import numpy as np
import pytest

from loewner_morph.experiments import (
    ExperimentReport,
    boundary_band,
    compare_compositions,
    run_correctness,
    run_experiment_suite,
)
from loewner_morph.imageio import read_image


@pytest.fixture(scope="module")
def suite(tmp_path_factory):
    out = tmp_path_factory.mktemp("repro")
    return out, run_experiment_suite(out)


def test_boundary_band():
    assert np.flatnonzero(boundary_band(30, 9)).tolist() == list(range(11, 19))
    assert np.flatnonzero(boundary_band(10, 3)).tolist() == [4, 5]


def test_correctness_flags():
    report = ExperimentReport()
    run_correctness(report)
    assert report.passed, report.flags
    assert set(report.flags) == {"les_dilation_white", "les_erosion_black",
                                 "channelwise_is_cyan", "bluegreen_interior_unchanged"}


def test_suite_passes(suite):
    _, report = suite
    assert report.passed, report.flags
    assert report.metrics["les_transitivity_error"] == 0.0
    assert report.metrics["trace_5x5_vs_3x3x2_frobenius"] > 0


def test_suite_outputs(suite):
    out, report = suite
    lines = (out / "report.txt").read_text().splitlines()
    assert lines == report.as_lines() and lines == sorted(lines)
    data = json.loads((out / "report.json").read_text())
    assert set(data) == {"metrics", "flags", "notes", "reference"}
    for name in ("bluegreen_les_dilate", "gallery_close", "transitivity_trace_9x9"):
        assert read_image(out / f"{name}.ppm").dtype == np.uint8


def test_suite_deterministic(suite, tmp_path):
    out, _ = suite
    run_experiment_suite(tmp_path)
    for path in sorted(out.iterdir()):
        assert path.read_bytes() == (tmp_path / path.name).read_bytes(), path.name


def test_compare_compositions_les_identical(rng):
    img = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
    a, b, mat_err, frob = compare_compositions(img, "les", 5)
    assert np.array_equal(a, b) and frob == 0.0 and mat_err < 1e-12


def test_custom_image_array(rng):
    img = rng.integers(0, 256, (12, 12, 3), dtype=np.uint8)
    report = run_experiment_suite(image=img)
    assert report.notes["natural_image"] == "array"
    assert report.flags["les_transitivity_zero"]
