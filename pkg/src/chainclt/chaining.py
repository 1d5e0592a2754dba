"""Admissible sequences and chain decompositions.

An admissible sequence here is a nested family ``F_0 ⊆ F_1 ⊆ ... ⊆ F_smax = F``
of index sets with ``|F_0| = 1`` (the zero function) and ``|F_s| <= 2**(2**s)``.
Nesting is stronger than the usual definition requires; it keeps the
nearest-point maps simple and is what the greedy construction produces anyway.

Every downstream bound consumes the functional of the sequence actually built
(:func:`gamma_functional`), never the unknown infimum over all sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ClassMismatch, MetricMismatch
from .function_class import FunctionClass

METRICS = ("L2", "Linf")


def budget(s: int) -> int:
    """Size cap of level ``s``: 1 at level 0, ``2**(2**s)`` after."""
    return 1 if s == 0 else 2 ** (2**s)


def canonical_smax(size: int) -> int:
    """Smallest level whose budget covers a class of ``size`` functions."""
    if size <= 1:
        return 0
    s = 1
    while budget(s) < size:
        s += 1
    return s


@dataclass(frozen=True, eq=False)
class AdmissibleSequence:
    fclass: FunctionClass
    levels: tuple
    metric: str = "L2"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        levels = []
        for level in self.levels:
            arr = np.unique(np.asarray(level, dtype=np.int64))
            arr.setflags(write=False)
            levels.append(arr)
        object.__setattr__(self, "levels", tuple(levels))

    @property
    def s_max(self) -> int:
        return len(self.levels) - 1

    @cached_property
    def distances(self) -> np.ndarray:
        return self.fclass.distances(self.metric)

    @cached_property
    def pi(self) -> np.ndarray:
        """``pi[s, f]``: nearest member of ``F_s`` to ``f``, lowest index on ties."""
        d = self.distances
        out = np.empty((len(self.levels), self.fclass.size), dtype=np.int64)
        for s, level in enumerate(self.levels):
            # levels are sorted, so argmin's first-hit rule is the lowest-index tie-break
            out[s] = level[np.argmin(d[:, level], axis=1)]
        return out

    @cached_property
    def level_distances(self) -> np.ndarray:
        """``d(f, F_s)`` as an ``(s_max + 1, m)`` array."""
        d = self.distances
        cols = np.arange(self.fclass.size)
        return np.stack([d[cols, self.pi[s]] for s in range(len(self.levels))])

    @cached_property
    def decomposition(self) -> "ChainDecomposition":
        return decompose(self)

    def violations(self) -> list[str]:
        """Broken invariants, as human-readable strings (empty when valid)."""
        problems = []
        fc = self.fclass
        if self.levels[0].tolist() != [fc.anchor_index]:
            problems.append("F_0 is not the anchor singleton")
        for s, level in enumerate(self.levels):
            if level.size > budget(s):
                problems.append(f"|F_{s}| = {level.size} exceeds budget {budget(s)}")
            if s and not np.all(np.isin(self.levels[s - 1], level)):
                problems.append(f"F_{s - 1} not contained in F_{s}")
        if self.s_max != canonical_smax(fc.size):
            problems.append(f"s_max = {self.s_max}, expected {canonical_smax(fc.size)}")
        if self.levels[-1].size != fc.size:
            problems.append("last level is not the full class")
        d = self.distances
        for s, level in enumerate(self.levels):
            best = d[:, level].min(axis=1)
            if not np.array_equal(d[np.arange(fc.size), self.pi[s]], best):
                problems.append(f"pi_{s} is not a nearest-point map")
        return problems

    def to_dict(self) -> dict:
        return {"levels": [lvl.tolist() for lvl in self.levels], "metric": self.metric}

    @classmethod
    def from_dict(cls, fclass: FunctionClass, data: dict) -> "AdmissibleSequence":
        return cls(fclass, tuple(data["levels"]), data.get("metric", "L2"))


@dataclass(frozen=True, eq=False)
class ChainDecomposition:
    """Increments ``Delta_s(f) = pi_s(f) - pi_{s-1}(f)`` for ``s = 1..s_max``.

    ``increments[s - 1]`` is the ``(m, atoms)`` table for level ``s``.
    """

    seq: AdmissibleSequence
    increments: np.ndarray
    l2_sq: np.ndarray
    linf_norms: np.ndarray

    @property
    def s_max(self) -> int:
        return self.seq.s_max

    @property
    def l2_norms(self) -> np.ndarray:
        return np.sqrt(self.l2_sq)

    def delta(self, s: int, f: int) -> np.ndarray:
        return self.increments[s - 1, f]

    def telescope(self) -> np.ndarray:
        """``sum_s Delta_s(f)`` for every f, summed in level order."""
        total = np.zeros_like(self.seq.fclass.values)
        for s in range(self.s_max):
            total = total + self.increments[s]
        return total

    def weighted_sums(self) -> np.ndarray:
        """Per-function ``sum_s 2**(s/2) ||Delta_s(f)||_2``."""
        scale = 2.0 ** (np.arange(1, self.s_max + 1) / 2.0)
        return (scale[:, None] * self.l2_norms).sum(axis=0)

    def chain_sums(self) -> tuple[float, float]:
        """``sup_f sum_s 2**(s/2)||Delta_s||_2`` and ``sup_f sum_s 2**s ||Delta_s||_inf``."""
        if self.s_max == 0:
            return 0.0, 0.0
        s = np.arange(1, self.s_max + 1)
        a = (2.0 ** (s / 2.0))[:, None] * self.l2_norms
        b = (2.0**s)[:, None] * self.linf_norms
        return float(a.sum(axis=0).max()), float(b.sum(axis=0).max())


def _with_levels(fc: FunctionClass, levels, metric: str) -> AdmissibleSequence:
    return AdmissibleSequence(fc, tuple(levels), metric)


def build_admissible(fc: FunctionClass, metric: str = "L2", refine: bool = False,
                     max_passes: int = 5) -> AdmissibleSequence:
    """Greedy farthest-point (k-center) admissible sequence.

    Each level starts from the previous one and keeps adding the function
    farthest from the current centers until the budget ``min(2**(2**s), |F|)``
    is met.  With ``refine`` a swap local search follows: a point new at level
    ``s`` is exchanged with a point new at level ``s + 1`` whenever that
    strictly lowers the functional.
    """
    d = fc.distances(metric)
    m = fc.size
    s_max = canonical_smax(m)
    chosen = [fc.anchor_index]
    in_set = np.zeros(m, dtype=bool)
    in_set[fc.anchor_index] = True
    nearest = d[fc.anchor_index].copy()
    levels = [list(chosen)]
    for s in range(1, s_max + 1):
        target = min(budget(s), m)
        while len(chosen) < target:
            score = np.where(in_set, -np.inf, nearest)
            nxt = int(np.argmax(score))
            chosen.append(nxt)
            in_set[nxt] = True
            nearest = np.minimum(nearest, d[nxt])
        levels.append(list(chosen))
    seq = _with_levels(fc, levels, metric)
    if refine:
        seq = _refine(seq, max_passes)
    return seq


def _refine(seq: AdmissibleSequence, max_passes: int) -> AdmissibleSequence:
    p = 2 if seq.metric == "L2" else 1
    best = gamma_functional(seq, p)
    levels = [set(lvl.tolist()) for lvl in seq.levels]
    for _ in range(max_passes):
        improved = False
        for s in range(1, seq.s_max):
            for x in sorted(levels[s] - levels[s - 1]):
                for y in sorted(levels[s + 1] - levels[s]):
                    trial = [set(lvl) for lvl in levels]
                    trial[s] = (trial[s] - {x}) | {y}
                    cand = _with_levels(seq.fclass, [sorted(t) for t in trial], seq.metric)
                    value = gamma_functional(cand, p)
                    if value < best:
                        best, levels, improved = value, trial, True
                        break
                if improved:
                    break
            if improved:
                break
        if not improved:
            break
    return _with_levels(seq.fclass, [sorted(t) for t in levels], seq.metric)


def random_admissible(fc: FunctionClass, rng: np.random.Generator,
                      metric: str = "L2") -> AdmissibleSequence:
    """Nested admissible sequence with uniformly random additions (a baseline)."""
    s_max = canonical_smax(fc.size)
    rest = [i for i in range(fc.size) if i != fc.anchor_index]
    order = [fc.anchor_index] + list(rng.permutation(rest))
    levels = [[fc.anchor_index]]
    for s in range(1, s_max + 1):
        levels.append(order[: min(budget(s), fc.size)])
    return _with_levels(fc, levels, metric)


def gamma_functional(seq: AdmissibleSequence, p: int = 2) -> float:
    """``sup_f sum_{s=0}^{s_max} 2**(s/p) d(f, F_s)`` for this sequence."""
    expected = {2: "L2", 1: "Linf"}.get(p)
    if expected is None:
        raise ValueError("p must be 1 or 2")
    if seq.metric != expected:
        raise MetricMismatch(f"gamma_{p} needs a {expected} sequence, got {seq.metric}")
    scale = 2.0 ** (np.arange(seq.s_max + 1) / p)
    return float((scale[:, None] * seq.level_distances).sum(axis=0).max())


def tail_functional(seq: AdmissibleSequence, s0: int) -> float:
    """``sup_f sum_{s >= s0} 2**(s/2) d(f, F_s)``; zero once ``s0 > s_max``."""
    if s0 < 0:
        raise ValueError("s0 must be nonnegative")
    if s0 > seq.s_max:
        return 0.0
    s = np.arange(s0, seq.s_max + 1)
    terms = (2.0 ** (s / 2.0))[:, None] * seq.level_distances[s0:]
    return float(terms.sum(axis=0).max())


def merge_admissible(seq1: AdmissibleSequence, seq2: AdmissibleSequence) -> AdmissibleSequence:
    """Index-shifted union: ``F''_0 = F_0``, ``F''_s = F_{s-1} ∪ F'_{s-1}``, last level = F."""
    if seq1.fclass is not seq2.fclass:
        a, b = seq1.fclass, seq2.fclass
        same = (a.space == b.space and a.values.shape == b.values.shape
                and np.array_equal(a.values, b.values))
        if not same:
            raise ClassMismatch("sequences index different classes")
    if seq1.metric != seq2.metric:
        raise MetricMismatch("sequences use different metrics")
    fc = seq1.fclass
    s_max = canonical_smax(fc.size)

    def level(seq, s):
        return seq.levels[min(s, seq.s_max)]

    levels = [seq1.levels[0]]
    for s in range(1, s_max + 1):
        if s == s_max:
            levels.append(np.arange(fc.size))
        else:
            levels.append(np.union1d(level(seq1, s - 1), level(seq2, s - 1)))
    return _with_levels(fc, levels, seq1.metric)


def merge_bound(seq1: AdmissibleSequence, seq2: AdmissibleSequence) -> float:
    """Upper bound on the merged gamma_2 functional: level-0 term + sqrt(2)(g1 + g2)."""
    level0 = float(seq1.level_distances[0].max())
    return level0 + math.sqrt(2) * (gamma_functional(seq1) + gamma_functional(seq2))


def decompose(seq: AdmissibleSequence) -> ChainDecomposition:
    values = seq.fclass.values
    probs = seq.fclass.space.probs
    support = seq.fclass.space.support
    pi = seq.pi
    inc = np.stack([values[pi[s]] - values[pi[s - 1]] for s in range(1, seq.s_max + 1)]) \
        if seq.s_max else np.zeros((0,) + values.shape)
    l2_sq = (inc * inc * probs).sum(axis=-1)
    if inc.size and support.any():
        linf = np.abs(inc[..., support]).max(axis=-1)
    else:
        linf = np.zeros(inc.shape[:2])
    return ChainDecomposition(seq, inc, l2_sq, linf)
