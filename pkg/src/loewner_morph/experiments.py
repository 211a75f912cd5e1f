"""Scripted experiments: Loewner correctness, operator gallery, transitivity.

:func:`run_experiment_suite` writes every produced image plus ``report.txt``
(sorted ``key=value`` lines) and ``report.json`` into an output directory.
Reports contain no timings so that repeated runs are byte-identical.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from . import morphology
from .imageio import (
    BLUE,
    GREEN,
    from_matrix_image,
    load_bundled_image,
    read_image,
    synth_halves,
    to_matrix_image,
    write_image,
)
from .metrics import channel_abs_diff, frobenius_error_sum, max_entry_error, mean_top_eigen_gap
from .morphology import StructuringElement
from .sym2 import eig_array

log = logging.getLogger(__name__)

#: Accepted band for the ratio of the 4-fold to the 2-fold trace error.
TRACE_RATIO_BAND = (1.5, 2.5)

#: Reference values for a 64x64 pepper image.  The bundled image is a
#: different one, so these are reported for comparison and never asserted.
REFERENCE_VALUES = {
    "mean_top_eigen_gap": 0.0268,
    "dilation_max_eigenvalue": 0.5574,
    "dilation_min_eigenvalue": -0.7071,
    "trace_error_2x": 336.9095,
    "trace_error_4x": 686.5281,
}

# maximum tonal deviation tolerated by the white/black band checks
_BAND_TOL = 1


@dataclass
class ExperimentReport:
    metrics: Dict[str, float] = field(default_factory=dict)
    flags: Dict[str, bool] = field(default_factory=dict)
    notes: Dict[str, str] = field(default_factory=dict)
    images: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def as_lines(self) -> list:
        entries = {f"metric.{k}": repr(float(v)) for k, v in self.metrics.items()}
        entries.update({f"flag.{k}": "pass" if v else "fail" for k, v in self.flags.items()})
        entries.update({f"note.{k}": v for k, v in self.notes.items()})
        entries.update({f"reference.{k}": repr(v) for k, v in REFERENCE_VALUES.items()})
        return [f"{k}={entries[k]}" for k in sorted(entries)]

    def as_dict(self) -> dict:
        return {
            "metrics": {k: float(v) for k, v in sorted(self.metrics.items())},
            "flags": dict(sorted(self.flags.items())),
            "notes": dict(sorted(self.notes.items())),
            "reference": dict(sorted(REFERENCE_VALUES.items())),
        }

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def write(self, out_dir: Union[str, Path]) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, img in sorted(self.images.items()):
            write_image(img, out_dir / f"{name}.ppm")
        (out_dir / "report.txt").write_text("\n".join(self.as_lines()) + "\n", encoding="utf-8")
        (out_dir / "report.json").write_text(
            json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def boundary_band(width: int, size: int) -> np.ndarray:
    """Columns whose ``size``-wide window straddles the middle of the image."""
    half, reach = width // 2, size // 2
    cols = np.arange(width)
    return (cols - reach <= half - 1) & (cols + reach >= half)


def _close_to(img, colour, tol) -> bool:
    return bool(np.all(np.abs(img.astype(int) - np.asarray(colour)) <= tol))


def run_correctness(report: ExperimentReport, size: int = 30, se_size: int = 9) -> None:
    """Blue/green split image: LES dilation -> white, erosion -> black, channel-wise -> cyan."""
    img = synth_halves(size, size, BLUE, GREEN)
    se = StructuringElement.square(se_size)
    field_ = to_matrix_image(img)
    dil = from_matrix_image(morphology.dilate(field_, se, "les"))
    ero = from_matrix_image(morphology.erode(field_, se, "les"))
    chan = morphology.channelwise_dilate(img, se)
    band = boundary_band(size, se_size)

    report.images.update(bluegreen=img, bluegreen_les_dilate=dil,
                         bluegreen_les_erode=ero, bluegreen_channelwise_dilate=chan)
    report.flags["les_dilation_white"] = _close_to(dil[:, band], (255, 255, 255), _BAND_TOL)
    report.flags["les_erosion_black"] = _close_to(ero[:, band], (0, 0, 0), _BAND_TOL)
    report.flags["channelwise_is_cyan"] = _close_to(chan[:, band], (0, 255, 255), 0)
    report.flags["bluegreen_interior_unchanged"] = (
        np.array_equal(dil[:, ~band], img[:, ~band]) and np.array_equal(ero[:, ~band], img[:, ~band]))
    report.metrics["bluegreen_band_width"] = float(band.sum())


def run_gallery(report: ExperimentReport, img: np.ndarray, se_size: int = 3) -> None:
    """Dilation, erosion, opening, closing and finite-scale dilations of a natural image."""
    se = StructuringElement.square(se_size)
    field_ = to_matrix_image(img)
    exact = morphology.dilate(field_, se, "les")
    results = {
        "dilate": exact,
        "erode": morphology.erode(field_, se, "les"),
        "open": morphology.opening(field_, se, "les"),
        "close": morphology.closing(field_, se, "les"),
        "approx_dilate_m69": morphology.dilate(field_, se, "les-approx:69"),
        "approx_dilate_m10000": morphology.dilate(field_, se, "les-approx:10000"),
    }
    report.images["natural"] = img
    for name, res in results.items():
        report.images[f"gallery_{name}"] = from_matrix_image(res)

    lam, mu, _ = eig_array(exact)
    report.metrics["gallery_mean_top_eigen_gap"] = mean_top_eigen_gap(field_, se)
    report.metrics["gallery_dilation_max_eigenvalue"] = float(lam.max())
    report.metrics["gallery_dilation_min_eigenvalue"] = float(mu.min())
    for m in (69, 10000):
        approx = results[f"approx_dilate_m{m}"]
        report.metrics[f"gallery_approx_m{m}_max_entry_error"] = max_entry_error(approx, exact)
        report.metrics[f"gallery_approx_m{m}_frobenius_vs_exact"] = frobenius_error_sum(
            report.images[f"gallery_approx_dilate_m{m}"], report.images["gallery_dilate"])


def _repeat(field_, se, method, times):
    for _ in range(times):
        field_ = morphology.dilate(field_, se, method)
    return field_


def compare_compositions(img: np.ndarray, method: str, big: int, small: int = 3, times: int = 2):
    """One dilation with ``big`` against ``times`` dilations with ``small``.

    Returns ``(once, repeated, matrix_error, frobenius_error)`` where the
    first two are exported RGB images.
    """
    field_ = to_matrix_image(img)
    once = morphology.dilate(field_, StructuringElement.square(big), method)
    rep = _repeat(field_, StructuringElement.square(small), method, times)
    a, b = from_matrix_image(once), from_matrix_image(rep)
    return a, b, max_entry_error(once, rep), frobenius_error_sum(a, b)


def run_transitivity(report: ExperimentReport, img: np.ndarray) -> None:
    """Compare 5x5 with 3x3 twice and 9x9 with 3x3 four times, for LES and trace."""
    for method in ("les", "trace"):
        errors = {}
        for big, times in ((5, 2), (9, 4)):
            a, b, mat_err, frob = compare_compositions(img, method, big, 3, times)
            key = f"{method}_{big}x{big}_vs_3x3x{times}"
            report.metrics[f"{key}_frobenius"] = frob
            report.metrics[f"{key}_matrix_max_error"] = mat_err
            report.images[f"transitivity_{method}_{big}x{big}"] = a
            report.images[f"transitivity_{method}_3x3x{times}"] = b
            for ch, diff in zip("rgb", channel_abs_diff(a, b)):
                report.images[f"transitivity_{method}_{big}x{big}_absdiff_{ch}"] = np.repeat(
                    diff[..., None], 3, axis=-1)
                report.metrics[f"{key}_absdiff_max_{ch}"] = float(diff.max())
            errors[times] = frob
        if method == "les":
            report.metrics["les_transitivity_error"] = errors[2] + errors[4]
            report.flags["les_transitivity_zero"] = errors[2] == 0.0 and errors[4] == 0.0
        else:
            ratio = errors[4] / errors[2] if errors[2] > 0 else float("inf")
            report.metrics["trace_error_ratio"] = ratio
            report.flags["trace_nontransitive"] = errors[2] > 0
            report.flags["trace_error_ratio_in_band"] = TRACE_RATIO_BAND[0] <= ratio <= TRACE_RATIO_BAND[1]
            report.notes["trace_error_ratio_band"] = (
                f"[{TRACE_RATIO_BAND[0]}, {TRACE_RATIO_BAND[1]}] is a chosen tolerance for 'almost twice'")


def run_experiment_suite(output_dir: Optional[Union[str, Path]] = None,
                         image: Optional[Union[str, Path, np.ndarray]] = None) -> ExperimentReport:
    """Run all experiments and optionally write images and reports.

    Parameters
    ----------
    output_dir : path, optional
        Directory receiving the images, ``report.txt`` and ``report.json``.
    image : path or uint8 array, optional
        Natural image for the gallery and transitivity parts; defaults to the
        bundled 64x64 test image.
    """
    if image is None:
        natural = load_bundled_image()
        source = "bundled natural64.ppm (scikit-image coffee, CC0)"
    elif isinstance(image, np.ndarray):
        natural, source = image, "array"
    else:
        natural, source = read_image(image), Path(image).name
    report = ExperimentReport()
    report.notes["natural_image"] = source
    log.info("correctness experiment")
    run_correctness(report)
    log.info("operator gallery")
    run_gallery(report, natural)
    log.info("transitivity experiments")
    run_transitivity(report, natural)
    if output_dir is not None:
        report.write(output_dir)
    return report
