"""
C1 Basis Data Models
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

import numpy as np


class BasisKind(str, Enum):
    """Entity a C1 basis function is attached to."""
    PATCH = "patch"
    EDGE = "edge"
    VERTEX = "vertex"


@dataclass
class C1BasisFunction:
    """
    One basis function of the C1 space.

    ``tables`` maps each patch of the support to the coefficient table of the
    function on that patch, in the patch's own parameterisation.
    """

    kind: BasisKind
    entity: int
    local: Tuple[int, int]
    tables: Dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.tables))

    def table(self, patch: int, shape: Tuple[int, int]) -> np.ndarray:
        """Coefficient table on ``patch`` (zeros outside the support)."""
        return self.tables.get(patch, np.zeros(shape))

    def __str__(self) -> str:
        return f"{self.kind.value}[{self.entity}]{self.local}"
