"""Numerical verification of weighted bilinear Hardy inequalities on radial spaces."""

from .classify import PowerDatum, Verdict, classify, classify_cartan_hadamard, \
    classify_homogeneous, classify_hyperbolic
from .conditions import ConditionReport, bracket_constant, eval_report, evaluate, sup_over_t
from .exponents import CaseId, ExponentSystem, dispatch_case
from .geometry import GeometryKind, RadialGeometry
from .quad import QuadConfig, QuadResult, UndeterminedError, integrate
from .reduction import CustomLine, PowerTrunc, RadialFunction, lhs_line, lhs_space, lift, \
    project, ratio, rhs_line, rhs_space
from .weights import Constant, Custom, LineDatum, LineWeights, Power, SinhPower, WeightTriple, \
    build_line_weights
from .witness import WitnessSearchConfig, classic_hardy_calibration, dilation_exponent, \
    search_best_ratio

__version__ = "0.1.0"

__all__ = [
    "PowerDatum", "Verdict", "classify", "classify_cartan_hadamard", "classify_homogeneous",
    "classify_hyperbolic", "ConditionReport", "bracket_constant", "eval_report", "evaluate",
    "sup_over_t", "CaseId", "ExponentSystem", "dispatch_case", "GeometryKind", "RadialGeometry",
    "QuadConfig", "QuadResult", "UndeterminedError", "integrate", "CustomLine", "PowerTrunc",
    "RadialFunction", "lhs_line", "lhs_space", "lift", "project", "ratio", "rhs_line", "rhs_space",
    "Constant", "Custom", "LineDatum", "LineWeights", "Power", "SinhPower", "WeightTriple",
    "build_line_weights", "WitnessSearchConfig", "classic_hardy_calibration",
    "dilation_exponent", "search_best_ratio",
]
