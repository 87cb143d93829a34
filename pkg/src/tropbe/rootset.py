"""Approximate root sets and their provenance."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .xprec import XComplex


class Provenance(enum.Enum):
    COMPUTED = "computed"
    SUPPLIED = "supplied"
    REFINED = "refined"


@dataclass(frozen=True, eq=False)
class RootSet:
    """d nonzero approximate roots.

    ``roots`` is the working-precision view.  Refined roots additionally keep
    their double-double values in ``extended``; measures use that when present.
    """

    roots: np.ndarray
    provenance: Provenance = Provenance.SUPPLIED
    extended: XComplex | None = field(default=None, repr=False)

    def __post_init__(self):
        r = np.array(self.roots, dtype=complex).ravel()
        if np.any(r == 0):
            raise DomainError("approximate roots must be nonzero")
        r.setflags(write=False)
        object.__setattr__(self, "roots", r)

    @classmethod
    def from_extended(cls, x: XComplex, provenance=Provenance.REFINED) -> "RootSet":
        return cls(x.to_complex(), provenance, x)

    def __len__(self):
        return self.roots.size

    def as_extended(self) -> XComplex:
        return self.extended if self.extended is not None else XComplex.of(self.roots)


def as_rootset(x, provenance=Provenance.SUPPLIED) -> RootSet:
    if isinstance(x, RootSet):
        return x
    if isinstance(x, XComplex):
        return RootSet.from_extended(x, provenance)
    return RootSet(x, provenance)
