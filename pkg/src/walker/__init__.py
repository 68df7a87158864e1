"""Walker metrics, null parallel distributions, structure algebras and
Maurer-Cartan forms, computed symbolically with exact arithmetic where possible."""
from .curvature import (ConnectionCoefficients, Geometry, InvariantsReport, RicciTensor, RiemannTensor,
                        christoffel, invariants, ricci, ricci_from_connection, ricci_kernel_check,
                        riemann, scalar)
from .distribution import (Distribution, TransverseConnection, VectorField, bracket, in_span,
                           is_involutive, is_parallel, is_parallel_frame, is_totally_isotropic,
                           orthogonal_complement, transverse_connection)
from .errors import (ConstancyError, DomainError, InconsistencyError, NotInvolutiveError,
                     NotParallelError, ParseError, RankError, RepresentationError,
                     SingularMetricError, SpecError, StepUnderflowError, UnboundVariableError,
                     UnknownIdentifierError, WalkerError)
from .foliation import (Curve, DeformationFamily, DeformationScan, DevelopResult, GroupRepresentation,
                        MaurerCartanForm, build_mc_form, deformation_scan, develop, mc_check,
                        path_independence_check)
from .koszul import (InvariantConnection, InvariantMetric, InvariantWalkerReport, invariant_is_parallel,
                     is_isotropic, koszul_connection, walker_check_invariant)
from .liealg import (ClassificationLabel, LieAlgebra, classify, completely_solvable_check,
                     derived_series, jacobi_check, lower_central_series, structure_algebra)
from .metric import (Chart, InverseMetric, MetricTensor, WalkerSpec, build_walker3, build_walker4,
                     build_walker_general, invert, is_strict)
from .verdict import Confidence, Verdict

__all__ = [name for name in dir() if not name.startswith("_")]
