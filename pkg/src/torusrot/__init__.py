"""Rotation sets of torus homeomorphisms and their projective pushforwards."""
from .dynamics import (
    ActionWord,
    OrbitCache,
    SkewShear,
    TorusLift,
    Translation,
    TwoWave,
    displacement_samples,
    word_compose,
    word_evaluate,
)
from .geometry import ConvexRegion, apply_hat_region, hausdorff, hull, inflate, line_region_distance
from .projective import IntMatrix3, apply_hat, chart, matrix_apply, pullback_infinity_line
from .pushforward import (
    build_pushforward,
    check_hypothesis,
    discontinuity_certificate,
    discontinuity_empirical_check,
    verify_theorem,
    word_correspondence,
)
from .rotation import (
    Box,
    ZActionProblem,
    classical_rotation_set,
    image_intersects,
    remark1_equivalence_check,
    zaction_rotation_set,
)

__version__ = "0.1.0"
