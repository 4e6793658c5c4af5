"""Deterministic noise streams for reproducible stochastic integration.

Every random number in the package flows through a NoiseStream, which wraps
a Philox counter-based bit generator keyed by the 128-bit pair
(base_seed, stream_index). Distinct stream indices are disjoint substreams
by the cipher construction, so realizations never share randomness, and a
stream replays bit-identically from the same key on any platform and under
any threading or process layout.

Gaussian variates come from numpy's ziggurat sampler
(Generator.standard_normal), which is fixed for the numpy versions pinned
in pyproject.toml. Draw chunking does not change the sequence: requesting
n samples and then m samples yields the same numbers as requesting n+m.

Stream index layout used by the ensemble machinery: realization k owns
indices 4k (multiplicative source xi), 4k+1 (independent additive remainder
eta), 4k+2 (drive-phase draw), with 4k+3 reserved.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "NoiseStream",
    "gaussian_increments",
    "correlated_pair",
    "uniform_angles",
    "streams_for",
    "STREAMS_PER_REALIZATION",
    "XI_LANE",
    "ETA_LANE",
    "PHASE_LANE",
]

_UINT64_SPAN = 2 ** 64

STREAMS_PER_REALIZATION = 4
XI_LANE = 0
ETA_LANE = 1
PHASE_LANE = 2


class NoiseStream:
    """Single-consumer Gaussian/uniform source with an explicit position.

    position counts variates handed out so far; it exists so replay
    bookkeeping can assert that two code paths consumed identical amounts
    of randomness.
    """

    __slots__ = ("base_seed", "stream_index", "position", "_gen")

    def __init__(self, base_seed: int, stream_index: int):
        if not isinstance(base_seed, int) or not 0 <= base_seed < _UINT64_SPAN:
            raise ValueError(f"base_seed must be a 64-bit unsigned integer, got {base_seed!r}")
        if not isinstance(stream_index, int) or not 0 <= stream_index < _UINT64_SPAN:
            raise ValueError(f"stream_index must be a 64-bit unsigned integer, got {stream_index!r}")
        self.base_seed = base_seed
        self.stream_index = stream_index
        self.position = 0
        key = np.array([base_seed, stream_index], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self) -> str:
        return (
            f"NoiseStream(base_seed={self.base_seed}, "
            f"stream_index={self.stream_index}, position={self.position})"
        )

    def _normals(self, count: int) -> np.ndarray:
        out = self._gen.standard_normal(count)
        self.position += count
        return out

    def _uniforms(self, count: int) -> np.ndarray:
        out = self._gen.random(count)
        self.position += count
        return out


def _check_count(count: int) -> None:
    if not isinstance(count, int) or count < 0:
        raise ValueError(f"count must be a nonnegative integer, got {count!r}")


def gaussian_increments(stream: NoiseStream, count: int, dt: float) -> np.ndarray:
    """count independent Normal(0, dt) increments, advancing the stream."""
    _check_count(count)
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    return stream._normals(count) * math.sqrt(dt)


def correlated_pair(
    stream_xi: NoiseStream,
    stream_eta: NoiseStream,
    c: float,
    count: int,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Increment pair (xi, xi_a) with correlation coefficient c.

    Both marginals are Normal(0, dt); the second is built as
    c*xi + sqrt(1-c**2)*eta from the two independent streams. At c=+1 or
    c=-1 the pair is deterministically proportional.
    """
    if not -1.0 <= c <= 1.0:
        raise ValueError(f"correlation c must lie in [-1, 1], got {c}")
    inc_xi = gaussian_increments(stream_xi, count, dt)
    inc_eta = gaussian_increments(stream_eta, count, dt)
    inc_a = c * inc_xi + math.sqrt(max(0.0, 1.0 - c * c)) * inc_eta
    return inc_xi, inc_a


def uniform_angles(stream: NoiseStream, count: int) -> np.ndarray:
    """count uniform draws from [0, 2*pi), for per-realization drive phases."""
    _check_count(count)
    return stream._uniforms(count) * (2.0 * math.pi)


def streams_for(base_seed: int, realization: int) -> tuple[NoiseStream, NoiseStream, NoiseStream]:
    """The (xi, eta, phase) stream triple owned by one realization."""
    if not isinstance(realization, int) or realization < 0:
        raise ValueError(f"realization index must be a nonnegative integer, got {realization!r}")
    base = STREAMS_PER_REALIZATION * realization
    return (
        NoiseStream(base_seed, base + XI_LANE),
        NoiseStream(base_seed, base + ETA_LANE),
        NoiseStream(base_seed, base + PHASE_LANE),
    )
