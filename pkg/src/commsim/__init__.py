"""Classical simulation of bipartite quantum measurements with shared randomness."""
from .bipartite import BipartiteOperator, OperatorDecomposition, ip_operator, operator_schmidt
from .errors import CapExceeded, EstimationFailure, SimulationError, ValidationError
from .estimator import EstimationPlan, estimate_probability, plan
from .matcore import SchmidtState, schmidt_decompose
from .norms import diamond_bounds, diamond_lower, diamond_upper_from, diamond_upper_optimize
from .oracle import Scenario, exact_probability
from .reduction import PsiPair, build_psi

__version__ = "0.1.0"

__all__ = [
    "BipartiteOperator", "OperatorDecomposition", "ip_operator", "operator_schmidt",
    "CapExceeded", "EstimationFailure", "SimulationError", "ValidationError",
    "EstimationPlan", "estimate_probability", "plan", "SchmidtState", "schmidt_decompose",
    "diamond_bounds", "diamond_lower", "diamond_upper_from", "diamond_upper_optimize",
    "Scenario", "exact_probability", "PsiPair", "build_psi",
]
