"""Reproducible GGN random variates by two-stage inverse transform.

A gamma variate ``Z ~ Gamma(a, 1)`` is drawn by inverting its cdf at a
uniform, then mapped to ``X`` by :func:`ggnlib.ggn.gn_from_gamma`.  Each
``(base_seed, stream_index)`` pair owns an independent Philox stream, so
replications can be generated in any order or in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .ggn import GgnParams, gn_from_gamma
from .sample import Sample
from .specfun import gamma_quantile

__all__ = ["GENERATOR_NAME", "StreamSpec", "uniforms", "gamma_variate", "ggn_sample"]

GENERATOR_NAME = "Philox"
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class StreamSpec:
    """Names one random stream; holds no generator state itself."""

    base_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= int(self.base_seed) <= _MASK64):
            raise DomainError("base_seed must be a 64-bit unsigned integer")
        if int(self.stream_index) < 0:
            raise DomainError("stream_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(int(self.base_seed), spawn_key=(int(self.stream_index),))
        return np.random.Generator(np.random.Philox(seq))

    def as_dict(self):
        return {
            "generator": GENERATOR_NAME,
            "base_seed": int(self.base_seed),
            "stream_index": int(self.stream_index),
        }


def uniforms(gen: np.random.Generator, size):
    """Uniforms on the open interval ``(0, 1)`` with 53-bit resolution."""
    k = gen.integers(0, 1 << 53, size=size, dtype=np.int64)
    return (k + 0.5) * 2.0**-53


def gamma_variate(shape, stream: StreamSpec, size=None):
    """Unit-scale gamma draws by cdf inversion.

    With ``size=None`` one float is returned; otherwise an array.  The same
    ``stream`` always yields the same values.
    """
    if not (shape > 0):
        raise DomainError("gamma_variate requires shape > 0")
    u = uniforms(stream.generator(), 1 if size is None else size)
    z = np.asarray(gamma_quantile(shape, u), dtype=float)
    return float(z[0]) if size is None else z


def ggn_sample(p: GgnParams, count: int, stream: StreamSpec) -> Sample:
    """``count`` independent GGN draws from one stream."""
    if int(count) != count or count < 1:
        raise DomainError("count must be a positive integer")
    z = gamma_variate(p.a, stream, size=int(count))
    x = np.asarray(gn_from_gamma(p, z), dtype=float)
    meta = {"params": dict(zip(("mu", "sigma", "s", "a"), p.as_tuple())), **stream.as_dict()}
    return Sample(x, source="ggn_sample", metadata=meta)
