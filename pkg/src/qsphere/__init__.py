"""Exact Haar state computations on quantum odd spheres."""

from .haar import (
    APoly,
    NumericHaar,
    PreconditionError,
    ToleranceError,
    a_eigenvalue,
    expectation,
    haar,
    haar_A,
    haar_apoly,
    haar_classical,
    haar_curve,
    haar_numeric,
    lambda_point,
    measure_mass,
    measure_weight,
    simplex_reduce,
    theta,
)
from .parser import IndexRangeError, MixedAlgebraError, ParseError, parse, to_text
from .qmatrix import (
    CheckResult,
    MatrixAlgebra,
    UPoly,
    check_central,
    check_laplace,
    cofactor,
    flip,
    inversions,
    matrix_algebra,
    quantum_det,
    quantum_minor,
    u_normal_form,
)
from .rep import TruncParams, build_rep, diagonal_consistency, relation_residual, represent
from .scalarq import PoleError, QRat, QScalar, limit_q1, qint, qpow, rat_eval
from .sphere import CanonicalMonomial, Letter, NCPoly, SphereAlgebra, build_A, mul, normal_form, sphere, star

__version__ = "0.1.0"
