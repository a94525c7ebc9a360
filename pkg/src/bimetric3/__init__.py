"""Classification and canonical presentation of pairs of symmetric
bilinear forms on a real 3-dimensional space, the first of signature
(+,-,-).

Exact rational arithmetic drives the ten-way classification; explicit
binary64 basis transformations realize the canonical presentation of both
forms and are checked by residual.
"""

from .canonical import (
    CanonicalForm,
    CanonicalResult,
    JordanChain,
    VerificationReport,
    canon_t1_t2,
    canon_t3,
    canon_t4_t5_t6,
    canon_t7,
    canon_t8_t9,
    canon_t10,
    canonical_matrices,
    canonicalize,
    validate_params,
    verify_canonical,
)
from .classify import ClassConditions, ClassId, class_conditions, classify
from .errors import (
    AmbiguousClassification,
    BimetricError,
    InternalInvariantViolation,
    InvalidInputError,
    InvalidParamsError,
    InvalidSignatureError,
    ModeMismatchError,
    PreconditionViolated,
    ResidualTooLarge,
    SingularMatrixError,
)
from .exact import (
    EXACT,
    FLOAT,
    Matrix3,
    SignatureTriple,
    SymMatrix3,
    apply_form,
    congruence,
    congruence_diagonalize,
    det3,
    inverse3,
    kernel_basis,
    rank3,
    signature,
)
from .invariants import (
    CharPoly,
    InvariantReport,
    MetricPair,
    Operator3,
    associated_operator,
    char_poly,
    discriminant_d2,
    discriminant_d3,
    double_root,
    invariant_report,
    sigma0,
    sigma1,
    sigma2,
    simple_root,
    triple_root,
)
from .numeric import (
    CubicRoots,
    FloatClassification,
    FloatToleranceConfig,
    classify_float,
    critical_points,
    cubic_roots,
)
from .testkit import (
    Sample,
    SampleSpec,
    brute_force_class,
    random_congruence,
    sample_class,
    sample_params,
)

__version__ = "1.0.0"
