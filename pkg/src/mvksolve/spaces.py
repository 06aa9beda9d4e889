"""Block layout of per-point hypothesis and label spaces.

Every point x_i carries a hypothesis space of dimension d_i and a label
space of dimension e_i.  Coefficient vectors, Gram matrices and
regularizer operators all use the same flattened layout: block i
occupies indices [offsets[i], offsets[i] + d_i).
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError


@dataclass(frozen=True)
class SpaceDims:
    """Per-point dimensions and the derived flat block layout."""

    d: tuple
    e: tuple = None
    offsets: tuple = field(init=False)
    N: int = field(init=False)

    def __post_init__(self):
        d = tuple(int(v) for v in self.d)
        if not d or any(v < 1 for v in d):
            raise ConfigError("all hypothesis-space dimensions must be >= 1")
        e = self.e
        e = d if e is None else tuple(int(v) for v in e)
        if len(e) != len(d):
            raise ConfigError("dims.d and dims.e must have equal length")
        if any(v < 1 for v in e):
            raise ConfigError("all label-space dimensions must be >= 1")
        offs = (0,) + tuple(np.cumsum(d))
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "offsets", tuple(int(o) for o in offs))
        object.__setattr__(self, "N", int(offs[-1]))

    def __len__(self):
        return len(self.d)

    def block(self, i):
        """Slice of the flat layout occupied by point i."""
        return slice(self.offsets[i], self.offsets[i + 1])
