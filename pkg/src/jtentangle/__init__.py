"""Ground-state entanglement in the E x beta and E x epsilon Jahn-Teller models."""
from . import ansatz, classical, eb, ee, entanglement, linalg
from .eb import EbParams
from .ee import EeParams
from .entanglement import concurrence, entanglement_gap, tangle_to_entropy, von_neumann_entropy

__version__ = "0.1.0"

__all__ = [
    "ansatz",
    "classical",
    "eb",
    "ee",
    "entanglement",
    "linalg",
    "EbParams",
    "EeParams",
    "concurrence",
    "entanglement_gap",
    "tangle_to_entropy",
    "von_neumann_entropy",
]
