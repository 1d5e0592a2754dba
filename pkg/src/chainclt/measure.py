"""Finite discrete probability spaces.

All expectations are exact weighted sums (compensated summation), and sampling
is inverse-CDF on a Philox counter stream, so a draw is a pure function of
``(seed, block, position)``.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from . import parallel
from .errors import LengthMismatch, NegativeWeight, NotNormalized

NORMALIZATION_TOL = 1e-12
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class DiscreteSpace:
    """Atoms ``0..atom_count-1`` with probability weights ``probs``.

    Build instances through :func:`make_space`, which validates the weights.
    """

    probs: np.ndarray
    space_id: str = field(init=False)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        digest = hashlib.sha256(probs.tobytes()).hexdigest()[:16]
        object.__setattr__(self, "space_id", digest)

    @property
    def atom_count(self) -> int:
        return int(self.probs.shape[0])

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of atoms with positive probability."""
        return self.probs > 0

    def to_dict(self) -> dict:
        return {"probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteSpace":
        return make_space(data["probs"])

    def __eq__(self, other):
        if not isinstance(other, DiscreteSpace):
            return NotImplemented
        return self.space_id == other.space_id and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.space_id)

    def __repr__(self):
        return f"DiscreteSpace(atom_count={self.atom_count}, id={self.space_id})"


@dataclass(frozen=True, eq=False)
class Sample:
    indices: np.ndarray
    seed: int
    space_id: str

    @property
    def n(self) -> int:
        return int(self.indices.shape[0])


def make_space(probs) -> DiscreteSpace:
    probs = np.asarray(probs, dtype=float).ravel()
    if probs.size == 0:
        raise LengthMismatch("a space needs at least one atom")
    if not np.all(np.isfinite(probs)):
        raise NotNormalized("probabilities must be finite")
    if np.any(probs < 0):
        raise NegativeWeight(f"negative weight at atoms {np.flatnonzero(probs < 0).tolist()}")
    total = math.fsum(probs)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"weights sum to {total!r}, not 1")
    return DiscreteSpace(probs)


def _check_length(space: DiscreteSpace, values: np.ndarray) -> None:
    if values.shape[-1] != space.atom_count:
        raise LengthMismatch(
            f"expected {space.atom_count} values per function, got {values.shape[-1]}"
        )


def expectation(space: DiscreteSpace, values) -> float:
    """Exact ``sum_w P(w) v(w)``."""
    values = np.asarray(values, dtype=float)
    _check_length(space, values)
    return math.fsum(space.probs * values)


def expectations(space: DiscreteSpace, table) -> np.ndarray:
    """Row-wise :func:`expectation` for a ``(functions, atoms)`` table."""
    table = np.atleast_2d(np.asarray(table, dtype=float))
    _check_length(space, table)
    weighted = table * space.probs
    return np.array([math.fsum(row) for row in weighted])


def lp_norm(space: DiscreteSpace, values, p=2) -> float:
    """L_p(P) norm for p in {1, 2, inf}; the sup is essential (supported atoms only)."""
    values = np.abs(np.asarray(values, dtype=float))
    _check_length(space, values)
    if p in (np.inf, "inf", "Linf"):
        supported = values[..., space.support]
        return float(supported.max()) if supported.size else 0.0
    if p == 1:
        return math.fsum(space.probs * values)
    if p == 2:
        return math.sqrt(math.fsum(space.probs * values * values))
    raise ValueError(f"unsupported p={p!r}; use 1, 2 or inf")


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0 or seed > SEED_MASK:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, block: int = 0) -> np.random.Generator:
    """Counter-based generator for replicate block ``block`` under ``seed``."""
    counter = np.array([0, 0, 0, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=_check_seed(seed), counter=counter))


def _inverse_cdf(space: DiscreteSpace, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(space.probs)
    idx = np.searchsorted(cdf, u, side="right")
    # cumsum may end a few ulps below 1
    last = int(np.flatnonzero(space.support)[-1])
    return np.minimum(idx, last).astype(np.int64)


def draw_sample(space: DiscreteSpace, n: int, seed: int) -> Sample:
    """``n`` iid atom indices; equals row 0 of ``draw_indices(space, n, R, seed)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    u = stream(seed, 0).random(n)
    return Sample(_inverse_cdf(space, u), _check_seed(seed), space.space_id)


def block_rows(n: int) -> int:
    """Replicates per random block; depends on ``n`` only, never on threading."""
    return max(1, min(parallel.REPLICATE_BLOCK, (1 << 20) // max(n, 1)))


def map_sample_blocks(space: DiscreteSpace, n: int, replicates: int, seed: int, fn) -> list:
    """Apply ``fn`` to each ``(rows, n)`` block of sample indices, in block order.

    Block ``b`` is drawn from ``stream(seed, b)``, so the concatenated samples are
    the same whatever the worker count.
    """
    _check_seed(seed)
    sizes = parallel.block_sizes(replicates, block_rows(n))

    def one(block, rows):
        u = stream(seed, block).random((rows, n))
        return fn(_inverse_cdf(space, u))

    return parallel.ordered_map(one, range(len(sizes)), sizes)


def draw_indices(space: DiscreteSpace, n: int, replicates: int, seed: int) -> np.ndarray:
    """``(replicates, n)`` matrix of independent samples."""
    parts = map_sample_blocks(space, n, replicates, seed, lambda idx: idx)
    if not parts:
        return np.empty((0, n), dtype=np.int64)
    return np.concatenate(parts, axis=0)


def derive_seed(seed: int, *tags: int) -> int:
    """Child seed for a grid point or sub-experiment."""
    ss = np.random.SeedSequence([_check_seed(seed), *[int(t) for t in tags]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
