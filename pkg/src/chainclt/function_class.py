"""Finite function classes over a :class:`~chainclt.measure.DiscreteSpace`.

A class is a ``(functions, atoms)`` value table that always contains the zero
function (the chain anchor).  Generators cover interval indicators and the
heavy-tailed two-function class used to probe truncation levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import EmptyClass, LengthMismatch, MassOverflow
from .measure import DiscreteSpace, expectations, make_space


@dataclass(frozen=True, eq=False)
class FunctionClass:
    space: DiscreteSpace
    values: np.ndarray
    anchor_index: int

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    def __len__(self):
        return self.size

    @cached_property
    def means(self) -> np.ndarray:
        return expectations(self.space, self.values)

    @cached_property
    def l2_distances(self) -> np.ndarray:
        return pairwise_l2(self)

    @cached_property
    def linf_distances(self) -> np.ndarray:
        return pairwise_linf(self)

    def distances(self, metric: str) -> np.ndarray:
        if metric == "L2":
            return self.l2_distances
        if metric == "Linf":
            return self.linf_distances
        raise ValueError(f"unknown metric {metric!r}")

    def to_dict(self) -> dict:
        return {
            "probs": self.space.probs.tolist(),
            "values": self.values.tolist(),
            "anchor": self.anchor_index,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FunctionClass":
        fc = make_class(make_space(data["probs"]), data["values"])
        if "anchor" in data and not np.all(fc.values[int(data["anchor"])] == 0):
            raise ValueError("declared anchor row is not the zero function")
        return fc

    def __repr__(self):
        return f"FunctionClass(size={self.size}, atoms={self.space.atom_count})"


def make_class(space: DiscreteSpace, value_table) -> FunctionClass:
    """Deduplicate rows (first occurrence wins) and append 0 if it is missing."""
    table = np.asarray(value_table, dtype=float)
    if table.size == 0:
        raise EmptyClass("value table has no functions")
    table = np.atleast_2d(table)
    if table.shape[1] != space.atom_count:
        raise LengthMismatch(
            f"rows have length {table.shape[1]}, space has {space.atom_count} atoms"
        )
    _, first = np.unique(table, axis=0, return_index=True)
    table = table[np.sort(first)]
    zero_rows = np.flatnonzero(np.all(table == 0, axis=1))
    if zero_rows.size:
        anchor = int(zero_rows[0])
    else:
        table = np.vstack([table, np.zeros(space.atom_count)])
        anchor = table.shape[0] - 1
    return FunctionClass(space, table, anchor)


def pairwise_l2(fc: FunctionClass) -> np.ndarray:
    """Symmetric table of ``||f_i - f_j||_{L2(P)}`` with an exact zero diagonal."""
    m = fc.size
    values, probs = fc.values, fc.space.probs
    d = np.zeros((m, m))
    for i in range(m - 1):
        diff = values[i + 1 :] - values[i]
        d[i, i + 1 :] = np.sqrt((diff * diff * probs).sum(axis=1))
    return d + d.T


def pairwise_linf(fc: FunctionClass) -> np.ndarray:
    m = fc.size
    values = fc.values[:, fc.space.support]
    d = np.zeros((m, m))
    if values.shape[1] == 0:
        return d
    for i in range(m - 1):
        d[i, i + 1 :] = np.abs(values[i + 1 :] - values[i]).max(axis=1)
    return d + d.T


def interval_indicators(d: int) -> FunctionClass:
    """Indicators of ``[i, j)`` for ``0 <= i < j <= d`` under the uniform law, plus 0.

    The zero function is row 0; the remaining rows are in lexicographic ``(i, j)``
    order.
    """
    if d < 2:
        raise ValueError("need at least 2 atoms")
    rows = [np.zeros(d)]
    for i in range(d):
        for j in range(i + 1, d + 1):
            row = np.zeros(d)
            row[i:j] = 1.0
            rows.append(row)
    return make_class(make_space(np.full(d, 1.0 / d)), np.array(rows))


@dataclass(frozen=True)
class HeavyTailSpec:
    """Atomic construction of a square-integrable f whose tail defeats slow truncation.

    Atom ``k`` (1..K) carries value ``b_k = k**b_exponent`` and mass
    ``mass_scale * b_1**2 * |a_k| / (k * b_k**2)``; atom 0 carries the leftover
    mass and value 0.

    ``a_decay`` is ``"power"`` (``a_k = k**-a_exponent``), ``"log2"``
    (``a_k = 1/log(k+1)**2``) or an explicit sequence of length ``K``.
    """

    b_exponent: float = 0.25
    a_decay: str | tuple = "power"
    a_exponent: float = 0.05
    K: int = 2**16
    mass_scale: float = 0.02

    def __post_init__(self):
        if not 0 < self.b_exponent < 0.5:
            raise ValueError("b_exponent must lie in (0, 1/2)")
        if not 0 < self.mass_scale <= 1:
            raise ValueError("mass_scale must lie in (0, 1]")
        if self.K < 1:
            raise ValueError("K must be positive")
        if not isinstance(self.a_decay, str):
            object.__setattr__(self, "a_decay", tuple(float(a) for a in self.a_decay))
            if len(self.a_decay) != self.K:
                raise LengthMismatch("explicit a_decay needs exactly K entries")
        elif self.a_decay not in ("power", "log2"):
            raise ValueError(f"unknown a_decay {self.a_decay!r}")

    @property
    def ks(self) -> np.ndarray:
        return np.arange(1, self.K + 1, dtype=float)

    def b(self, k) -> np.ndarray:
        return np.asarray(k, dtype=float) ** self.b_exponent

    def a(self) -> np.ndarray:
        k = self.ks
        if self.a_decay == "power":
            return k ** (-self.a_exponent)
        if self.a_decay == "log2":
            return 1.0 / np.log(k + 1.0) ** 2
        return np.abs(np.array(self.a_decay))

    def atom_masses(self) -> np.ndarray:
        k = self.ks
        b = self.b(k)
        b1 = float(self.b(1))
        return self.mass_scale * b1**2 * np.abs(self.a()) / (k * b**2)

    def tail_functional(self, m: int) -> float:
        """``sqrt(m) * mass_scale * b_1**2 * sum_{m<l<=K} |a_l| / (l b_l)``."""
        k = self.ks
        terms = np.abs(self.a()) / (k * self.b(k))
        return math.sqrt(m) * self.mass_scale * float(self.b(1)) ** 2 * math.fsum(terms[m:])


def heavy_tail_pair(spec: HeavyTailSpec | None = None) -> tuple[DiscreteSpace, FunctionClass]:
    spec = spec or HeavyTailSpec()
    masses = spec.atom_masses()
    heavy = math.fsum(masses)
    if heavy > 1.0:
        raise MassOverflow(f"atom masses sum to {heavy:.6g} > 1; lower mass_scale")
    probs = np.concatenate([[1.0 - heavy], masses])
    space = make_space(probs)
    f = np.concatenate([[0.0], spec.b(spec.ks)])
    return space, make_class(space, np.vstack([np.zeros_like(f), f]))


def random_class(rng: np.random.Generator, functions: int, atoms: int,
                 scale: float = 1.0, integer: bool = False) -> FunctionClass:
    """Random class for property tests: Dirichlet weights, Gaussian (or integer) values."""
    space = make_space(_dirichlet(rng, atoms))
    if integer:
        table = rng.integers(-3, 4, size=(functions, atoms)).astype(float)
    else:
        table = scale * rng.standard_normal((functions, atoms))
    return make_class(space, table)


def _dirichlet(rng: np.random.Generator, atoms: int) -> np.ndarray:
    w = rng.gamma(1.0, size=atoms) + 1e-3
    w = w / w.sum()
    # push the rounding residue onto the largest atom so the sum passes the 1e-12 check
    w[np.argmax(w)] += 1.0 - math.fsum(w)
    return w


def bundled_classes() -> dict[str, FunctionClass]:
    """Named classes used by the sanity-band checks and the CLI."""
    two = make_class(make_space([0.25, 0.75]), [[0.0, 0.0], [3.0, -1.0]])
    return {
        "two_point": two,
        "interval_indicators_4": interval_indicators(4),
        "interval_indicators_8": interval_indicators(8),
        "interval_indicators_16": interval_indicators(16),
        "heavy_tail_pair": heavy_tail_pair()[1],
    }
