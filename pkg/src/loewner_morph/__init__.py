"""Colour morphology on symmetric 2x2 matrix fields ordered by the Loewner order."""
from .colour import (
    BiconePoint,
    HclColour,
    RgbColour,
    bicone_to_hcl,
    bicone_to_sym2,
    clamp_to_bicone,
    hcl_to_bicone,
    hcl_to_rgb,
    rgb_to_hcl,
    sym2_to_bicone,
)
from .estimators import ColourMatrixEmbedding, ColourMorphology, LoewnerMorphology
from .exceptions import DomainError, ImageFormatError, LoewnerMorphError
from .experiments import ExperimentReport, run_experiment_suite
from .imageio import from_matrix_image, read_image, synth_halves, to_matrix_image, write_image
from .metrics import channel_abs_diff, frobenius_error_sum, mean_top_eigen_gap
from .morphology import (
    StructuringElement,
    channelwise_dilate,
    closing,
    dilate,
    erode,
    grey_dilate,
    grey_erode,
    opening,
)
from .suprema import (
    SupMethod,
    les_approx,
    les_exact,
    les_inf,
    lex_phi,
    lex_precedes,
    trace_inf,
    trace_sup,
    verify_p_power_membership,
    verify_upper_bound,
)
from .sym2 import SpectralDecomp, Sym2, compose, eigendecompose, exp_scaled, log_spd, loewner_leq

__version__ = "0.1.0"
