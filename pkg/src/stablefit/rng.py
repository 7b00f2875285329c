"""Deterministic, forkable random streams.

Every stochastic operation in this package takes an :class:`RngStream`
instead of a bare seed.  A stream is identified by ``(seed, stream)`` plus
an optional path of child indices; distinct identities yield statistically
independent generators (via :class:`numpy.random.SeedSequence`), identical
identities reproduce the identical draw sequence.  Parallel work items
derive their own child streams from their indices, so results never depend
on scheduling or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngStream"]


@dataclass(frozen=True)
class RngStream:
    """Identity of a reproducible random stream.

    Parameters
    ----------
    seed : int
        Nonnegative base seed shared by a whole run.
    stream : int
        Stream id separating independent top-level uses of one seed.
    """

    seed: int
    stream: int = 0
    _path: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0:
            raise ValueError("seed and stream must be nonnegative")
        if any(k < 0 for k in self._path):
            raise ValueError("child indices must be nonnegative")

    def child(self, *indices: int) -> "RngStream":
        """Derive a sub-stream keyed by one or more nonnegative indices."""
        return RngStream(self.seed, self.stream, self._path + tuple(int(k) for k in indices))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        entropy = (self.seed, self.stream) + self._path
        return np.random.default_rng(np.random.SeedSequence(entropy))
