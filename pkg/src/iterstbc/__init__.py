"""Exact arithmetic for iterated algebras over cyclotomic towers and the space-time codes built on them."""

__version__ = "0.1.0"

from .cyclotomic import Automorphism, CycloElement, CycloField  # noqa: E402
from .tower import TowerSpec, tower_6x3, tower_8x4, tower_preset  # noqa: E402
from .cyclic_algebra import CyclicAlgebra, DElement  # noqa: E402
from .iterated import AElement, IteratedAlgebra, IterVariant  # noqa: E402

__all__ = [
    "__version__",
    "AElement",
    "Automorphism",
    "CycloElement",
    "CycloField",
    "CyclicAlgebra",
    "DElement",
    "IterVariant",
    "IteratedAlgebra",
    "TowerSpec",
    "tower_6x3",
    "tower_8x4",
    "tower_preset",
]
