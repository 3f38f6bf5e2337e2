"""Curvature operators of collapsing Riemannian metrics."""

from .errors import (CclabError, ConvergenceError, FixtureError, FixtureFormatError, InvalidTensorError,
                     LieAlgebraError, NotSymmetricError, ShapeError, default_tol)
from .families import (FamilySpec, FunctionData, SweepResult, classify, evaluate, example3_product,
                       example5_principal, presale, sweep, theorem1_family, theorem2_step, theorem3_step)
from .fibration import (DoubleFibrationData, divergent_tensor, double_fibration_components, extra_families,
                        quadratic_form_bound)
from .lambda2 import (CurvatureOperator, CurvatureTensor, Lambda2Basis, Spectrum, block_diagonal, scale_metric,
                      sectional_curvature, sectional_range, spectrum_of, tensor_to_operator, validate_tensor)
from .lie import (LieAlgebraData, ReductiveSplit, biinvariant_curvature, make_algebra, quotient_submersion_data,
                  symmetric_space_curvature)
from .submersion import (SubmersionPointData, WarpData, assemble_full, assemble_h0, assemble_tg, base_from_total,
                         projected_connection_derivative)

__version__ = "0.1.0"
