"""Elliptic-curve discrete logarithms via zero minors of kernel matrices."""

from .ec import INFINITY, Curve, Point, count_points
from .ff import BinaryField, FieldElement, FieldSpec, PrimeField, parse_field
from .instances import CurveInstance, gen_instance, load_instance, parse_instance, save_instance
from .matfq import MatrixFq, left_kernel, minor, normalize_kernel
from .pipeline import LasVegasConfig, Solution, Exhausted, iterate_once, recover_m, solve

__version__ = "0.1.0"

__all__ = [
    "INFINITY", "Curve", "Point", "count_points",
    "BinaryField", "FieldElement", "FieldSpec", "PrimeField", "parse_field",
    "CurveInstance", "gen_instance", "load_instance", "parse_instance", "save_instance",
    "MatrixFq", "left_kernel", "minor", "normalize_kernel",
    "LasVegasConfig", "Solution", "Exhausted", "iterate_once", "recover_m", "solve",
]
