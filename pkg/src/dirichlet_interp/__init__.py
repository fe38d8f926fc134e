"""Dirichlet-space kernels, Gram matrices and one-box conditions for finite sequences in the disc."""

from .conditions import (
    SequenceMeasure,
    ball_count_profile,
    lemma2_diameter,
    mu_box,
    ob_constant_dyadic,
    ob_constant_exact,
    rob_best,
    rob_constant,
)
from .constructions import (
    BlockParams,
    assemble_example1,
    assemble_example2,
    block_points,
    check_assumptions,
    example1_params,
    example2_params,
)
from .errors import InfeasibleConstructionError, ValidationError
from .geometry import (
    Arc,
    DiscPoint,
    arc_of_point,
    box_contains,
    dilate_arc,
    hyperbolic_dist,
    point_from_polar_depth,
    stolz_contains,
)
from .kernel import (
    GramMatrix,
    cb_norm,
    column_decomposition,
    column_norms,
    gram_matrix,
    kernel_diag,
    kernel_eval,
    weak_separation_geometric,
    weak_separation_kernel,
)
from .report import ConditionReport, SweepRow, report, sweep_example1, sweep_example2
from .sequence_file import parse_sequence, serialize_sequence

__version__ = "0.1.0"
