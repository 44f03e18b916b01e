"""Numerical lab for covariant representations of C^n on C^h."""
from .config import SizeCapError, get_settings
from .linalg import Subspace, pinv, svd
from .model import CovariantRep, RepShapeError, lift, make_rep, power
from .report import Check, CheckReport, Verdict

__version__ = "0.1.0"

__all__ = ["Check", "CheckReport", "CovariantRep", "RepShapeError", "SizeCapError", "Subspace",
           "Verdict", "get_settings", "lift", "make_rep", "pinv", "power", "svd", "__version__"]
