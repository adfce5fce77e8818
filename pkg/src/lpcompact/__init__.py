"""Certified compactness diagnostics for Lebesgue-Bochner spaces on finite
measure spaces.

The heavy loops (pairwise distance tables, farthest-first traversal,
nearest-center assignment) live in a compiled extension; ``BACKEND`` says
whether it was importable or the pure NumPy fallback is in use.
"""
from .ambient import (
    AmbientSpace, CompactCover, IntersectionHandle, NormBracket, cover_distance, enlarge_cover,
    greedy_net, greedy_net_indices, intersect_covers, partial_sum_projection,
    projection_operator_norm,
)
from .bfspace import (
    DiscreteBFS, ExpPhi, IndicatorInfimum, OrderInterval, PowerPhi, TablePhi, WitnessRecord,
    YoungFunction, almost_order_bounded_gap, bfs_from_dict, e_bochner_norm, e_norm,
    indicator_norm_infimum, luxemburg_modular, nontight_divergence_witness, ui_modulus_E,
    young_from_dict,
)
from .bochner import (
    FamilyDecomposition, FunctionFamily, Prefix, Traversal, VectorFunction, as_prefix,
    bochner_norm, constant_cover, cover_masks, covering_number, decompose, family_greedy_net,
    pairwise_distances, restrict_to_cover, traversal,
)
from .converse import first_stage, tightness_from_nets, ui_from_net
from .criteria import (
    ScalarReport, TightnessCertificate, UICertificate, certify_tightness, certify_ui,
    default_functionals, geometric_grid, outside_measures, scalar_compactness_report,
    scalar_covering_numbers, scalar_family, tail_norms, tightness_deficiency, ui_curve,
    ui_curve_csv, ui_modulus,
)
from .errors import (
    BudgetExhausted, CertificateRefused, ChainViolation, ExtractionExhausted, GridExhausted,
    NoWitnessFound, PreconditionViolation, RefusalError,
)
from .extraction import (
    ProjectionDefect, Quantization, SubsequenceCertificate, cluster_extract, diagonal_extract,
    lemma_extract, projection_defect, quantize_first_min, theorem1_extract,
)
from .kernels import BACKEND
from .measure import MeasureSpace, LpNorm, ScalarSample, as_norm, lp_norm, subset_measure, weighted_lp
from .scenarios import make_family, remark_family, remark_scalar_image_check, run_scenario

__version__ = "0.1.0"
