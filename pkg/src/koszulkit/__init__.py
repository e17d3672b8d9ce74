"""koszulkit: exact computations with finite-dimensional dg algebras.

Realizes graded/dg algebras from quiver presentations and computes
Koszul duals, minimal A-infinity models, twisted complexes, generation
and compliciality checks, semibrick verification, and Loewy-length
analysis, all over Q or a prime field with exact arithmetic.
"""

from .exactlin import GF, QQ, Field, Matrix, kernel_basis, rank, solve
from .presentations import (
    BasisElement,
    DgAlgebraPresentation,
    FinDimDgAlgebra,
    GradedQuiver,
    cohomology_algebra,
    parse_presentation,
    pretty_print,
    realize_algebra,
)
from .ainfty import (
    AInfinityAlgebra,
    RetractData,
    build_retract,
    check_stasheff,
    from_dg_algebra,
    minimal_model,
)

__version__ = "0.1.0"
