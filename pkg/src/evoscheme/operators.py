"""Encodings and variation operators.

Binary genotypes are ``uint8`` arrays of 0/1 alleles, ``n * bits_per_variable``
long, most significant bit first within each variable. Real genotypes are the
phenotype vectors themselves.

Every stochastic operator takes its :class:`~evoscheme.core.RngStream`
explicitly and never mutates its inputs. Mutation and crossover also accept
a leading batch axis so the engine can vary a whole generation at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ConfigError, DimensionError, RngStream, SearchSpace


@dataclass(frozen=True)
class BinaryCodec:
    """Maps bit strings onto the box with a uniform grid of ``2**b`` levels per axis."""

    space: SearchSpace
    bits_per_variable: int = 16

    def __post_init__(self):
        if self.bits_per_variable < 1:
            raise ConfigError("bits_per_variable must be >= 1", "ga.bits_per_variable")
        if self.bits_per_variable > 52:
            # beyond the float mantissa the grid stops being exact
            raise ConfigError("bits_per_variable must be <= 52", "ga.bits_per_variable")

    @property
    def length(self) -> int:
        return self.space.n * self.bits_per_variable

    @property
    def levels(self) -> int:
        return 2**self.bits_per_variable - 1

    def _weights(self) -> np.ndarray:
        return 2.0 ** np.arange(self.bits_per_variable - 1, -1, -1)

    def integers(self, g) -> np.ndarray:
        g = np.asarray(g)
        if g.shape[-1] != self.length:
            raise DimensionError(f"expected {self.length} bits, got {g.shape[-1]}")
        slices = g.reshape(g.shape[:-1] + (self.space.n, self.bits_per_variable)).astype(float)
        return slices @ self._weights()

    def decode(self, g) -> np.ndarray:
        k = self.integers(g)
        x = self.space.lower + (k / self.levels) * self.space.width
        # guard against rounding just past the upper bound
        return np.minimum(x, self.space.upper)

    def encode(self, x) -> np.ndarray:
        """Nearest grid point of ``x`` as a bit string."""
        x = self.space.check(x)
        frac = (np.clip(x, self.space.lower, self.space.upper) - self.space.lower) / self.space.width
        k = np.rint(frac * self.levels).astype(np.uint64)
        shifts = np.arange(self.bits_per_variable - 1, -1, -1, dtype=np.uint64)
        bits = (k[..., None] >> shifts) & np.uint64(1)
        return bits.reshape(x.shape[:-1] + (self.length,)).astype(np.uint8)

    def random(self, rng: RngStream, size: Optional[int] = None) -> np.ndarray:
        shape = self.length if size is None else (size, self.length)
        return rng.integers(0, 2, shape).astype(np.uint8)


def decode_binary(g, codec: BinaryCodec) -> np.ndarray:
    return codec.decode(g)


@dataclass(frozen=True)
class VariationConfig:
    """Crossover and mutation parameters.

    ``pm`` is a per-bit probability under binary encoding and a per-coordinate
    probability under real encoding. ``sigma_rel`` is the Gaussian mutation
    scale as a fraction of each coordinate's range, decayed by ``gamma`` every
    generation.
    """

    pc: float = 0.9
    pm: float = 0.1
    sigma_rel: float = 0.1
    gamma: float = 0.99

    def __post_init__(self):
        for name in ("pc", "pm"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"must lie in [0, 1], got {v}", f"ga.{name}")
        if not self.sigma_rel > 0:
            raise ConfigError(f"must be > 0, got {self.sigma_rel}", "ga.sigma_rel")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"must lie in (0, 1], got {self.gamma}", "ga.gamma")


class RecombinationWeights(tuple):
    """Per-parent mixing weights summing to one.

    Weights outside ``[0, 1]`` are only allowed with ``convex=False``.
    """

    def __new__(cls, weights: Sequence[float], convex: bool = True):
        w = tuple(float(a) for a in weights)
        if len(w) < 1:
            raise ValueError("at least one weight is required")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(w)!r}")
        if convex and any(a < 0.0 or a > 1.0 for a in w):
            raise ValueError("convex weights must lie in [0, 1]")
        return super().__new__(cls, w)


def bitflip_mutate(g, pm: float, rng: RngStream) -> np.ndarray:
    """Flip each bit independently with probability ``pm``."""
    g = np.asarray(g, dtype=np.uint8)
    flips = rng.random(g.shape) < pm
    return g ^ flips.astype(np.uint8)


def one_point_crossover(a, b, rng: RngStream, cut=None) -> tuple[np.ndarray, np.ndarray]:
    """Swap the tails of ``a`` and ``b`` after a cut in ``1..m-1``.

    ``a`` and ``b`` may be single strings or ``(pairs, m)`` batches, in which
    case one cut is drawn per pair. ``cut`` fixes the cut point(s).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"parents differ in shape: {a.shape} vs {b.shape}")
    m = a.shape[-1]
    if m < 2:
        raise DimensionError("one-point crossover needs strings of length >= 2")
    if cut is None:
        cut = rng.integers(1, m, a.shape[:-1] or None)
    cut = np.asarray(cut)
    tail = np.arange(m) >= cut[..., None]
    return np.where(tail, b, a), np.where(tail, a, b)


def intermediate_recombine(parents, weights: RecombinationWeights) -> np.ndarray:
    """Weighted sum of parent vectors: ``child_i = sum_j w_j * parent_j[i]``."""
    parents = np.asarray(parents, dtype=float)
    if parents.ndim != 2:
        raise DimensionError("parents must be a sequence of equal-length vectors")
    if len(parents) < 2:
        raise ValueError("intermediate recombination needs at least two parents")
    if len(weights) != len(parents):
        raise ValueError(f"{len(weights)} weights for {len(parents)} parents")
    if not isinstance(weights, RecombinationWeights):
        weights = RecombinationWeights(weights)
    child = np.asarray(weights) @ parents
    # a convex combination lies in the hull; clipping only undoes rounding
    if all(w >= 0.0 for w in weights):
        child = np.clip(child, parents.min(axis=0), parents.max(axis=0))
    return child


def gaussian_mutate(x, sigma_rel: float, pm: float, space: SearchSpace, rng: RngStream) -> np.ndarray:
    """Add ``sigma_rel * range_i * N(0, 1)`` to each coordinate chosen with probability ``pm``.

    The result is clamped to the box. Two draws are consumed per coordinate
    regardless of ``pm`` so that stream positions do not depend on the rate.
    """
    x = space.check(x)
    chosen = rng.random(x.shape) < pm
    noise = rng.standard_normal(x.shape)
    y = x + np.where(chosen, sigma_rel * space.width * noise, 0.0)
    return np.clip(y, space.lower, space.upper)


def sigma_at_generation(sigma_rel0: float, gamma: float, t: int) -> float:
    if t < 0:
        raise ValueError("generation index must be non-negative")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    return sigma_rel0 * gamma**t
