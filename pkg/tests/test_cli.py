import io
import subprocess
import sys

import numpy as np
import pytest

from loewner_morph.cli import main
from loewner_morph.imageio import read_image, write_image


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def halves(tmp_path):
    path = tmp_path / "bg.ppm"
    assert run("synth", "--size", 30, "--out", path)[0] == 0
    return path


def test_synth_then_dilate_white_band(tmp_path, halves):
    out = tmp_path / "d.ppm"
    assert run("dilate", halves, out, "--se", "square:9", "--method", "les")[0] == 0
    img = read_image(out)
    assert np.all(img[:, 11:19] == 255)
    assert np.array_equal(img[:, :11], read_image(halves)[:, :11])


def test_erode_black_band(tmp_path, halves):
    out = tmp_path / "e.png"
    assert run("erode", halves, out, "--se", "square:3")[0] == 0
    assert np.all(read_image(out)[:, 14:16] == 0)


def test_channelwise_cyan(tmp_path, halves):
    out = tmp_path / "c.ppm"
    assert run("dilate", halves, out, "--method", "channelwise")[0] == 0
    assert np.all(read_image(out)[:, 14:16] == (0, 255, 255))


def test_iterations_equal_bigger_window(tmp_path, rng):
    src = tmp_path / "n.ppm"
    write_image(rng.integers(0, 256, (16, 16, 3), dtype=np.uint8), src)
    assert run("dilate", src, tmp_path / "a.ppm", "--se", "square:3", "--iterations", 2)[0] == 0
    assert run("dilate", src, tmp_path / "b.ppm", "--se", "square:5")[0] == 0
    code, out, _ = run("diff", tmp_path / "a.ppm", tmp_path / "b.ppm")
    assert code == 0
    assert out.splitlines()[-1] == "identical"
    assert "frobenius_error_sum=0.0" in out


def test_trace_not_transitive(tmp_path, rng):
    src = tmp_path / "n.ppm"
    write_image(rng.integers(0, 256, (16, 16, 3), dtype=np.uint8), src)
    run("dilate", src, tmp_path / "a.ppm", "--method", "trace", "--iterations", 2)
    run("dilate", src, tmp_path / "b.ppm", "--method", "trace", "--se", "square:5")
    code, out, _ = run("diff", tmp_path / "a.ppm", tmp_path / "b.ppm", "--out-prefix", tmp_path / "d")
    assert code == 0 and out.splitlines()[-1] == "different"
    assert read_image(tmp_path / "d_g.ppm").shape == (16, 16, 3)


def test_les_approx_scale(tmp_path, halves):
    a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
    assert run("dilate", halves, a, "--method", "les-approx", "--m", 69)[0] == 0
    assert run("dilate", halves, b, "--method", "les-approx:69")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_open_close(tmp_path, halves):
    for op in ("open", "close"):
        out = tmp_path / f"{op}.ppm"
        assert run(op, halves, out)[0] == 0
        assert np.array_equal(read_image(out), read_image(halves))


def test_mask_file(tmp_path, halves):
    mask = tmp_path / "se.txt"
    mask.write_text("A1\n")
    out = tmp_path / "m.ppm"
    assert run("dilate", halves, out, "--se", f"mask:{mask}")[0] == 0
    img = read_image(out)
    # output(x) = sup{f(x), f(x - (0, 1))}: only column 15 sees both colours
    assert np.all(img[:, 15] == 255) and np.all(img[:, 14] == (0, 0, 255))


def test_metrics(tmp_path, halves):
    code, out, _ = run("metrics", halves)
    values = dict(line.split("=") for line in out.splitlines())
    assert code == 0
    assert values["width"] == "30"
    assert float(values["max_eigenvalue"]) == pytest.approx(np.sqrt(2) / 2)
    assert float(values["dilation_extensive_fraction"]) == 1.0


def test_convert(tmp_path):
    src = tmp_path / "w.ppm"
    write_image(np.full((1, 2, 3), 255, np.uint8), src)
    code, out, _ = run("convert", src)
    rows = [line.split() for line in out.splitlines()[1:]]
    assert code == 0 and len(rows) == 2
    assert float(rows[1][2]) == pytest.approx(np.sqrt(2) / 2)
    run("convert", src, tmp_path / "w.txt")
    assert (tmp_path / "w.txt").read_text() == out


def test_repro(tmp_path):
    code, out, _ = run("repro", "--out-dir", tmp_path / "r")
    assert code == 0
    assert "flag.les_transitivity_zero=pass" in out.splitlines()
    assert (tmp_path / "r" / "report.txt").read_text() == out


def test_missing_file_exit_2(tmp_path):
    missing = tmp_path / "missing.ppm"
    code, _, err = run("dilate", missing, tmp_path / "o.ppm")
    assert code == 2 and str(missing) in err


def test_bad_image_exit_2(tmp_path):
    bad = tmp_path / "bad.ppm"
    bad.write_bytes(b"P6\n2 2\n255\n")
    assert run("erode", bad, tmp_path / "o.ppm")[0] == 2


@pytest.mark.parametrize("argv", [
    [], ["blur"], ["dilate"], ["synth", "--out", "x.ppm", "--left", "purple"],
    ["dilate", "a.ppm", "b.ppm", "--iterations", "x"],
])
def test_usage_exit_1(argv):
    code, _, err = run(*argv)
    assert code == 1 and "usage:" in err


@pytest.mark.parametrize("extra", [["--se", "square:4"], ["--method", "max"], ["--iterations", "0"]])
def test_bad_values_exit_1(tmp_path, halves, extra):
    code, _, err = run("dilate", halves, tmp_path / "o.ppm", *extra)
    assert code == 1 and "usage:" in err


def test_synth_odd_width_exit_1(tmp_path):
    assert run("synth", "--width", 5, "--height", 2, "--out", tmp_path / "s.ppm")[0] == 1


def test_synth_custom_colours(tmp_path):
    out = tmp_path / "s.ppm"
    assert run("synth", "--width", 4, "--height", 1, "--left", "red", "--right", "1,2,3", "--out", out)[0] == 0
    assert read_image(out).reshape(-1, 3).tolist() == [[255, 0, 0]] * 2 + [[1, 2, 3]] * 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.ppm"
    proc = subprocess.run([sys.executable, "-m", "loewner_morph", "synth", "--size", "4", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert read_image(out).shape == (4, 4, 3)
