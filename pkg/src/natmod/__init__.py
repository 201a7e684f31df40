"""Natural models of dependent type theory over finite categories.

Finite categories and presheaves, representable natural transformations,
polynomial functors, the Σ/Π/Id type formers, the model built from a closed
class of display maps, and an elaborator for a small dependent type theory.
"""

from .fincat import FinCategory, pullback, terminal, validate_category
from .natmodel import NaturalModel, find_representability, identity_model, verify_cwf_laws
from .presheaf import NatTrans, Presheaf, validate_nat_trans, validate_presheaf
from .report import CheckFailed, ValidationReport, Violation

__version__ = "0.1.0"

__all__ = [
    "CheckFailed", "FinCategory", "NatTrans", "NaturalModel", "Presheaf", "ValidationReport", "Violation",
    "find_representability", "identity_model", "pullback", "terminal", "validate_category",
    "validate_nat_trans", "validate_presheaf", "verify_cwf_laws",
]
