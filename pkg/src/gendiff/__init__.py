"""General one-dimensional diffusions: scale/speed characteristics, dc checks,
boundary classification, no-arbitrage verdicts and Monte Carlo."""

from .boundary import BoundaryClassification, classify_boundary, interior_point_accessibility
from .characteristics import CATALOG, DiffusionModel, SpeedMeasure, StateInterval, builtin
from .errors import GendiffError, ParseError, ValidationError
from .modelspec import load_model_spec, parse_model_spec
from .regularity import DcReport, InverseScale, companion_model, dc_check
from .simulate import GridChain, PathEnsemble, build_chain, martingale_test, simulate_paths
from .verdict import Verdict, aclmm_decide, na_verdict, theorem_consistency

__version__ = "0.1.0"

__all__ = [
    "CATALOG", "BoundaryClassification", "DcReport", "DiffusionModel", "GendiffError", "GridChain",
    "InverseScale", "ParseError", "PathEnsemble", "SpeedMeasure", "StateInterval", "ValidationError",
    "Verdict", "aclmm_decide", "build_chain", "builtin", "classify_boundary", "companion_model",
    "dc_check", "interior_point_accessibility", "load_model_spec", "martingale_test", "na_verdict",
    "parse_model_spec", "simulate_paths", "theorem_consistency",
]
