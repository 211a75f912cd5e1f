"""Command-line interface: ``loewner-morph <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numeric/domain error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .colour import rgb_to_sym2_array
from .estimators import ColourMorphology
from .exceptions import DomainError
from .experiments import run_experiment_suite
from .imageio import read_image, synth_halves, to_matrix_image, write_image
from .metrics import channel_abs_diff, frobenius_error_sum, mean_top_eigen_gap
from .morphology import dilate
from .suprema import DEFAULT_SCALE
from .sym2 import eig_array, loewner_leq_array
from .validation import check_method, check_structuring_element

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3

COLOURS = {
    "black": (0, 0, 0), "white": (255, 255, 255), "red": (255, 0, 0), "green": (0, 255, 0),
    "blue": (0, 0, 255), "cyan": (0, 255, 255), "magenta": (255, 0, 255), "yellow": (255, 255, 0),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _colour(text):
    if text in COLOURS:
        return COLOURS[text]
    try:
        parts = tuple(int(v) for v in text.split(","))
    except ValueError:
        parts = ()
    if len(parts) != 3 or not all(0 <= v <= 255 for v in parts):
        raise argparse.ArgumentTypeError(f"colour must be a name or r,g,b bytes, got {text!r}")
    return parts


def _method_arg(text, m):
    if text == "les-approx":
        text = f"les-approx:{m}"
    return check_method(text, allow_channelwise=True)


def cmd_morph(args):
    se = check_structuring_element(args.se)
    method = _method_arg(args.method, args.m)
    img = read_image(args.input)
    est = ColourMorphology(args.command, se, method, args.iterations).fit(img)
    write_image(est.transform(img), args.output)
    return EXIT_OK


def cmd_diff(args, out):
    a, b = read_image(args.a), read_image(args.b)
    diffs = channel_abs_diff(a, b)
    for ch, d in zip("rgb", diffs):
        print(f"{ch}: max={int(d.max())} nonzero={int(np.count_nonzero(d))}", file=out)
        if args.out_prefix:
            write_image(np.repeat(d[..., None], 3, axis=-1), f"{args.out_prefix}_{ch}.ppm")
    print(f"frobenius_error_sum={frobenius_error_sum(a, b)!r}", file=out)
    print("identical" if not any(d.any() for d in diffs) else "different", file=out)
    return EXIT_OK


def cmd_metrics(args, out):
    img = read_image(args.input)
    se = check_structuring_element(args.se)
    field = to_matrix_image(img)
    lam, mu, _ = eig_array(field)
    dil = dilate(field, se, "les")
    extensive = loewner_leq_array(field, dil, args.tol) if se.mask[se.anchor] else None
    print(f"width={img.shape[1]}", file=out)
    print(f"height={img.shape[0]}", file=out)
    print(f"max_eigenvalue={float(lam.max())!r}", file=out)
    print(f"min_eigenvalue={float(mu.min())!r}", file=out)
    print(f"mean_top_eigen_gap={mean_top_eigen_gap(field, se)!r}", file=out)
    if extensive is not None:
        print(f"dilation_extensive_fraction={float(np.mean(extensive))!r}", file=out)
    return EXIT_OK


def cmd_synth(args):
    width = args.width if args.width is not None else args.size
    height = args.height if args.height is not None else args.size
    write_image(synth_halves(width, height, args.left, args.right), args.out)
    return EXIT_OK


def cmd_repro(args, out):
    report = run_experiment_suite(args.out_dir, args.image)
    for line in report.as_lines():
        print(line, file=out)
    return EXIT_OK


def cmd_convert(args, out):
    img = read_image(args.input)
    field = rgb_to_sym2_array(img / 255.0)
    lines = [f"{r} {c} {a11!r} {a12!r} {a22!r}"
             for (r, c), (a11, a12, a22) in zip(np.ndindex(*field.shape[:2]),
                                                field.reshape(-1, 3).tolist())]
    text = "# row col a11 a12 a22\n" + "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loewner-morph", description="Matrix-valued colour morphology.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("dilate", "erode", "open", "close"):
        p = sub.add_parser(name, help=f"{name} an RGB image")
        p.add_argument("input")
        p.add_argument("output")
        p.add_argument("--se", default="square:3", help="square:<odd k> or mask:<path> (default square:3)")
        p.add_argument("--method", default="les",
                       help="les | les-approx[:m] | trace | channelwise (default les)")
        p.add_argument("--m", type=float, default=DEFAULT_SCALE,
                       help="scale for les-approx without an explicit value (default 1e4)")
        p.add_argument("--iterations", type=int, default=1, help="apply the operator k times")

    p = sub.add_parser("diff", help="channel-wise absolute difference of two images")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out-prefix", help="write <prefix>_r.ppm, _g.ppm, _b.ppm")

    p = sub.add_parser("metrics", help="eigenvalue statistics of an image")
    p.add_argument("input")
    p.add_argument("--se", default="square:3")
    p.add_argument("--tol", type=float, default=1e-9, help="Loewner comparison tolerance (default 1e-9)")

    p = sub.add_parser("synth", help="write a two-colour split test image")
    p.add_argument("--size", type=int, default=30)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--left", type=_colour, default=COLOURS["blue"])
    p.add_argument("--right", type=_colour, default=COLOURS["green"])
    p.add_argument("--out", required=True)

    p = sub.add_parser("repro", help="run the full experiment suite")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--image", help="natural image (default: bundled 64x64 image)")

    p = sub.add_parser("convert", help="dump per-pixel matrix entries as text")
    p.add_argument("input")
    p.add_argument("output", nargs="?")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("dilate", "erode", "open", "close"):
            return cmd_morph(args)
        if args.command == "synth":
            return cmd_synth(args)
        return {"diff": cmd_diff, "metrics": cmd_metrics, "repro": cmd_repro,
                "convert": cmd_convert}[args.command](args, out)
    except (DomainError, ArithmeticError, FloatingPointError) as exc:
        print(f"loewner-morph: numeric error: {exc}", file=err)
        return EXIT_NUMERIC
    except OSError as exc:
        name = getattr(exc, "filename", None)
        detail = f"{exc.strerror}: {name}" if name and exc.strerror else str(exc)
        print(f"loewner-morph: I/O error: {detail}", file=err)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"{parser.format_usage()}loewner-morph: error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
