"""Group-invariant recognition and symmetry detection for planar polygons."""

from .errors import (
    CollinearTriple,
    DegenerateAnchor,
    DomainError,
    DuplicateConsecutiveVertices,
    EmptySolution,
    JointSigError,
    NoExactTransform,
    TooFewVertices,
)
from .geom import GroupId, HkElement, Polygon, dist, hk_apply, signed_area3, validate_polygon
from .groups import (
    GroupElement,
    apply,
    compose,
    identity,
    inverse,
    random_element,
    recover,
    residual,
    validate_element,
)
from .matching import (
    MatchResult,
    PartialMatch,
    SymmetryReport,
    cyclic_match,
    equivalence_candidates,
    equivalence_test,
    partial_match,
    reconstruct_next,
    reflection_axes_e2,
    reflection_self_matches,
    rotational_folds,
    symmetry_report,
)
from .signatures import (
    OpenSignature,
    Signature,
    SignaturePoint,
    noise_tolerance_se2,
    open_signature,
    signature,
)

__version__ = "0.1.0"
