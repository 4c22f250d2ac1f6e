"""Finite computations with additively idempotent semirings, flat extensions
of groups, congruence lattices and quasivarieties of finite groups."""
from .core import (FinAlgebra, Signature, SEMIRING, GROUP, AlgebraError, make_algebra,
                   from_json, check_ai_semiring, in_class, find_isomorphism, is_isomorphic)
from .report import Report, PASS, FAIL, UNKNOWN, INAPPLICABLE, ASSUMED

__all__ = ["FinAlgebra", "Signature", "SEMIRING", "GROUP", "AlgebraError", "make_algebra",
           "from_json", "check_ai_semiring", "in_class", "find_isomorphism", "is_isomorphic",
           "Report", "PASS", "FAIL", "UNKNOWN", "INAPPLICABLE", "ASSUMED"]

__version__ = "0.1.0"
