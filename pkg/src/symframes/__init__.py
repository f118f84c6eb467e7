"""symframes: symmetric interpolatory refinable masks and dual wavelet frames.

Construction, verification and application of multivariate interpolatory
masks with full symmetry-group invariance, and of the wavelet frame banks
they generate, for arbitrary finite unimodular symmetry groups and integer
dilation matrices. All structural computations run in exact arithmetic
(rationals and cyclotomic fields); floating point appears only in signal
transforms, renders and cross-checks.
"""

__version__ = "0.1.0"

from .exact import (
    Cyclotomic,
    ExactScalar,
    cyclotomic_polynomial,
    euler_phi,
    zeta,
    conj,
    promote,
    demote,
    parse_scalar,
    format_scalar,
    to_complex,
)
from .lattice import (
    DigitSystem,
    Orbit,
    OrbitStructure,
    SymmetryGroup,
    check_dilation_compatibility,
    default_digits,
    group_axis,
    group_full,
    group_hexagonal,
    group_identity,
    orbit_decomposition,
    validate_group,
)
from .laurent import (
    LaurentPoly,
    PolyphaseRow,
    format_table,
    polyphase_merge,
    polyphase_split,
)
from .masks import (
    Mask,
    build_dual_mask,
    build_dual_mask_low_order,
    build_interpolatory_mask,
)
from .frames import (
    FilterBank,
    abelian_decomposition,
    build_symmetrizer,
    check_special_assumption,
    custom_extension,
    mutual_extension,
    symmetrized_extension,
)
from .verify import (
    VerificationError,
    VerificationReport,
    check_generalized_symmetry,
    check_h_symmetric,
    check_mep,
    check_polyphase_symmetry,
    dual_pair_report,
    is_interpolatory,
    linear_phase_moment_order,
    refinable_mask_report,
    sum_rule_order,
    sum_rule_order_bruteforce,
    vanishing_moment_order,
)
from .transform import (
    GridCodec,
    PeriodicSignal,
    SubbandPyramid,
    analyze,
    grid_codec,
    read_signal,
    read_signal_csv,
    refinable_support_box,
    render_refinable,
    synthesize,
    write_signal,
    write_signal_csv,
)

__all__ = [
    "Cyclotomic",
    "ExactScalar",
    "cyclotomic_polynomial",
    "euler_phi",
    "zeta",
    "conj",
    "promote",
    "demote",
    "parse_scalar",
    "format_scalar",
    "to_complex",
    "DigitSystem",
    "Orbit",
    "OrbitStructure",
    "SymmetryGroup",
    "check_dilation_compatibility",
    "default_digits",
    "group_axis",
    "group_full",
    "group_hexagonal",
    "group_identity",
    "orbit_decomposition",
    "validate_group",
    "LaurentPoly",
    "PolyphaseRow",
    "format_table",
    "polyphase_merge",
    "polyphase_split",
    "Mask",
    "build_dual_mask",
    "build_dual_mask_low_order",
    "build_interpolatory_mask",
    "FilterBank",
    "abelian_decomposition",
    "build_symmetrizer",
    "check_special_assumption",
    "custom_extension",
    "mutual_extension",
    "symmetrized_extension",
    "VerificationError",
    "VerificationReport",
    "check_generalized_symmetry",
    "check_h_symmetric",
    "check_mep",
    "check_polyphase_symmetry",
    "dual_pair_report",
    "is_interpolatory",
    "linear_phase_moment_order",
    "refinable_mask_report",
    "sum_rule_order",
    "sum_rule_order_bruteforce",
    "vanishing_moment_order",
    "GridCodec",
    "PeriodicSignal",
    "SubbandPyramid",
    "analyze",
    "grid_codec",
    "read_signal",
    "read_signal_csv",
    "refinable_support_box",
    "render_refinable",
    "synthesize",
    "write_signal",
    "write_signal_csv",
    "__version__",
]
