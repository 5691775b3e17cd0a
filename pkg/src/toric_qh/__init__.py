"""Index theory, torus-orbit search and Novikov/quantum homology arithmetic
for toric pseudo-rotations."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateIterate,
    HorizonExceeded,
    IncompatiblePeriodGroup,
    MalformedBetti,
    PipelineError,
)
from .index_core import (  # noqa: E402
    IndexDecomposition,
    Partition,
    RotationNumbers,
    cz_index,
    decompose,
    is_extremal,
    iteration_identity_check,
    mean_index,
)
from .novikov import LaurentElement, NovikovSeries, PeriodGroup, degree  # noqa: E402
from .orbit_search import (  # noqa: E402
    LemmaWitness,
    TorusPoint,
    Window,
    certify_lemma_arithmetic,
    find_lemma_iterate,
    orbit_hits,
)
from .qh_engine import (  # noqa: E402
    GradedClass,
    RingSpec,
    cp_n_spec,
    orbit_class_degree,
    power,
    product,
    replay_theorem,
    verify_point_identity,
)

__all__ = [
    "DegenerateIterate",
    "GradedClass",
    "HorizonExceeded",
    "IncompatiblePeriodGroup",
    "IndexDecomposition",
    "LaurentElement",
    "LemmaWitness",
    "MalformedBetti",
    "NovikovSeries",
    "Partition",
    "PeriodGroup",
    "PipelineError",
    "RingSpec",
    "RotationNumbers",
    "TorusPoint",
    "Window",
    "certify_lemma_arithmetic",
    "cp_n_spec",
    "cz_index",
    "decompose",
    "degree",
    "find_lemma_iterate",
    "is_extremal",
    "iteration_identity_check",
    "mean_index",
    "orbit_class_degree",
    "orbit_hits",
    "power",
    "product",
    "replay_theorem",
    "verify_point_identity",
]
