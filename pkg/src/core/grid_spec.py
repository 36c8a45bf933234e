#!/usr/bin/env python3
"""
Grid family and grid description types shared by counting and the oracle
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from core.alphabet import ColumnKind
from core.errors import InvalidSpecError


class GridFamily(Enum):
    """
    The six grid families of width m

    RG, TkC and MS have path columns; TnC, TG and KB have cycle columns.
    """

    RG = "rg"
    TKC = "tkc"
    MS = "ms"
    TNC = "tnc"
    TG = "tg"
    KB = "kb"

    @classmethod
    def parse(cls, value: Union[str, "GridFamily"]) -> "GridFamily":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(family.value for family in cls)
            raise InvalidSpecError(f"Unknown grid family: {value!r} (expected one of {names})")

    @property
    def column_kind(self) -> ColumnKind:
        if self in (GridFamily.RG, GridFamily.TKC, GridFamily.MS):
            return ColumnKind.LINEAR
        return ColumnKind.CIRCULAR

    @property
    def twisted(self) -> bool:
        """True for the families that take a twist p"""
        return self in (GridFamily.TG, GridFamily.KB)

    @property
    def wraps(self) -> bool:
        """True when the last column is glued back to the first"""
        return self in (GridFamily.TKC, GridFamily.MS, GridFamily.TG, GridFamily.KB)

    @property
    def label(self) -> str:
        return {"rg": "RG", "tkc": "TkC", "ms": "MS", "tnc": "TnC", "tg": "TG", "kb": "KB"}[self.value]


@dataclass(frozen=True)
class GridSpec:
    """
    One concrete grid graph: family, width m, length n and twist p (TG/KB only)
    """

    family: GridFamily
    m: int
    n: int
    p: Optional[int] = None

    def __post_init__(self):
        family = GridFamily.parse(self.family)
        object.__setattr__(self, "family", family)
        for name in ("m", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidSpecError(f"{name} must be a positive integer, got {value!r}")
        if family.twisted:
            if self.p is None:
                raise InvalidSpecError(f"{family.label} needs a twist p")
            if isinstance(self.p, bool) or not isinstance(self.p, int) or self.p < 0:
                raise InvalidSpecError(f"Twist p must be a nonnegative integer, got {self.p!r}")
            object.__setattr__(self, "p", self.p % self.m)
        elif self.p is not None:
            raise InvalidSpecError(f"{family.label} takes no twist, got p={self.p!r}")

    @classmethod
    def of(cls, family: Union[str, GridFamily], m: int, n: int, p: Optional[int] = None) -> "GridSpec":
        return cls(GridFamily.parse(family), m, n, p)

    @property
    def kind(self) -> ColumnKind:
        return self.family.column_kind

    @property
    def vertex_count(self) -> int:
        return self.m * self.n

    def simple_graph_problem(self) -> Optional[str]:
        """
        Why this grid would have loops or parallel edges, or None if it is simple

        Circular columns need m >= 3; TkC, TG and KB need n >= 3; MS needs
        n >= 2, and at n = 2 an odd width glues the middle row onto its own
        horizontal edge.
        """
        family = self.family
        if family.column_kind is ColumnKind.CIRCULAR and self.m < 3:
            return f"{family.label} needs m >= 3 (cycle columns of length {self.m} are not simple)"
        if family in (GridFamily.TKC, GridFamily.TG, GridFamily.KB) and self.n < 3:
            return f"{family.label} needs n >= 3 (the closing edges duplicate or loop at n = {self.n})"
        if family is GridFamily.MS:
            if self.n < 2:
                return "MS needs n >= 2"
            if self.n == 2 and self.m % 2 == 1:
                return f"MS with n = 2 and odd m = {self.m} duplicates the middle row's edge"
        return None

    def to_dict(self) -> dict:
        return {"family": self.family.value, "m": self.m, "n": self.n, "p": self.p}

    def __str__(self) -> str:
        twist = f"^({self.p})" if self.family.twisted else ""
        return f"{self.family.label}{twist}_{self.m}({self.n})"
