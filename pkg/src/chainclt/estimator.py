"""Truncated-chain estimators and their explicit-constant deviation bounds.

For a function ``f`` with chain increments ``Delta_s(f)``, the modified function
keeps each increment only where ``|Delta_s(f)| <= lambda(f, n, s)`` with

    lambda = c0 * sqrt(n) * ||Delta_s(f)||_2 / 2**(s/2)          (sqrt-n rule)
    lambda = b_n * ||Delta_s(f)||_2 / 2**(s/2)                   (universal rule)

The survival test is evaluated in squared form,
``Delta**2 * 2**s <= thr**2 * ||Delta||_2**2``, so boundary cases with rational
data are decided exactly.  Truncation is applied on the support of P only;
null atoms keep their untruncated value (they are never sampled).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .chaining import AdmissibleSequence, ChainDecomposition, budget
from .errors import BadU, ConfigError, LengthMismatch, LevelOutOfRange, SpaceMismatch
from .measure import Sample, expectations

# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class SqrtN:
    def to_json(self):
        return "sqrt_n"


@dataclass(frozen=True)
class TailFrom:
    s0: int

    def __post_init__(self):
        if self.s0 < 0:
            raise ConfigError("tail_from needs s0 >= 0")

    def to_json(self):
        return {"tail_from": self.s0}


@dataclass(frozen=True)
class Universal:
    """Truncation sequence ``b_n = scale * n**b_exponent``."""

    b_exponent: float
    scale: float = 1.0

    def __post_init__(self):
        if self.b_exponent < 0 or self.scale <= 0:
            raise ConfigError("universal rule needs b_exponent >= 0 and scale > 0")

    def b(self, n: int) -> float:
        return self.scale * float(n) ** self.b_exponent

    def b_sq(self, n: int) -> float:
        return self.scale**2 * float(n) ** (2 * self.b_exponent)

    def to_json(self):
        data = {"b_exponent": self.b_exponent}
        if self.scale != 1.0:
            data["scale"] = self.scale
        return {"universal": data}


Rule = SqrtN | TailFrom | Universal


@dataclass(frozen=True)
class EstimatorConfig:
    n: int
    c0: float = 1.0
    rule: Rule = SqrtN()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if not self.c0 > 0:
            raise ConfigError("c0 must be positive")

    @property
    def s0(self) -> int:
        return self.rule.s0 if isinstance(self.rule, TailFrom) else 0

    def threshold_sq(self) -> float:
        """Squared multiplier of ``||Delta_s||_2 / 2**(s/2)`` in the truncation level."""
        if isinstance(self.rule, Universal):
            return self.rule.b_sq(self.n)
        return self.c0**2 * float(self.n)

    def with_n(self, n: int) -> "EstimatorConfig":
        return replace(self, n=int(n))

    def to_dict(self) -> dict:
        return {"c0": self.c0, "rule": self.rule.to_json(), "n": self.n}

    @classmethod
    def from_dict(cls, data: dict) -> "EstimatorConfig":
        return cls(n=int(data["n"]), c0=float(data.get("c0", 1.0)),
                   rule=parse_rule(data.get("rule", "sqrt_n")))


def parse_rule(raw) -> Rule:
    if raw in (None, "sqrt_n"):
        return SqrtN()
    if isinstance(raw, dict) and len(raw) == 1:
        (key, val), = raw.items()
        if key == "tail_from":
            return TailFrom(int(val))
        if key == "universal":
            if isinstance(val, dict):
                return Universal(float(val["b_exponent"]), float(val.get("scale", 1.0)))
            return Universal(float(val))
    raise ConfigError(f"unrecognized truncation rule {raw!r}")


# ---------------------------------------------------------------------------
# truncation


def truncation_level(decomp: ChainDecomposition, f: int, s: int, config: EstimatorConfig) -> float:
    if not 1 <= s <= decomp.s_max:
        raise LevelOutOfRange(f"level {s} outside 1..{decomp.s_max}")
    return math.sqrt(config.threshold_sq() * decomp.l2_sq[s - 1, f] / 2.0**s)


def kept_masks(decomp: ChainDecomposition, config: EstimatorConfig) -> np.ndarray:
    """Boolean ``(s_max, m, atoms)``: increment survives truncation at that atom."""
    if decomp.s_max == 0:
        return np.zeros((0,) + decomp.seq.fclass.values.shape, dtype=bool)
    scale = 2.0 ** np.arange(1, decomp.s_max + 1)
    lhs = decomp.increments**2 * scale[:, None, None]
    rhs = config.threshold_sq() * decomp.l2_sq[..., None]
    return (lhs <= rhs) | ~decomp.seq.fclass.space.support


@dataclass(frozen=True, eq=False)
class ModifiedFunction:
    values: np.ndarray
    kept_mask: np.ndarray


def _removed_parts(decomp: ChainDecomposition, config: EstimatorConfig) -> np.ndarray:
    kept = kept_masks(decomp, config)
    return np.where(kept, 0.0, decomp.increments)


def phi_table(seq: AdmissibleSequence, config: EstimatorConfig) -> np.ndarray:
    """Modified functions for the whole class as an ``(m, atoms)`` table.

    Computed as ``f - pi_{s0}(f) - sum_{s > s0} Delta''_s(f)``: identical to the
    sum of surviving increments, and exactly ``f`` when nothing is cut.
    """
    decomp = seq.decomposition
    values = seq.fclass.values
    s0 = min(config.s0, seq.s_max)
    out = values - values[seq.pi[s0]] if s0 else values.copy()
    if seq.s_max > s0:
        removed = _removed_parts(decomp, config)
        for s in range(s0, seq.s_max):
            out = out - removed[s]
    return out


def phi(seq: AdmissibleSequence, f: int, config: EstimatorConfig) -> ModifiedFunction:
    kept = kept_masks(seq.decomposition, config)[:, f].copy()
    kept[: min(config.s0, seq.s_max)] = False
    return ModifiedFunction(phi_table(seq, config)[f], kept)


def identity_threshold(seq: AdmissibleSequence, f: int, c0: float = 1.0) -> int:
    """Smallest n from which the sqrt-n rule truncates nothing for ``f``.

    Starts from ``ceil(max_s 2**s max|Delta_s|**2 / (c0**2 ||Delta_s||**2))`` and
    steps up until the (squared-form) survival test agrees.
    """
    decomp = seq.decomposition
    support = seq.fclass.space.support
    ratio = 1.0
    for s in range(1, decomp.s_max + 1):
        sq = decomp.l2_sq[s - 1, f]
        if sq > 0:
            peak = float(np.max(decomp.increments[s - 1, f, support] ** 2))
            ratio = max(ratio, 2.0**s * peak / (c0**2 * sq))
    n = max(1, math.ceil(ratio))
    while not kept_masks(decomp, EstimatorConfig(n, c0))[:, f].all():
        n += 1
    return n


def class_identity_threshold(seq: AdmissibleSequence, c0: float = 1.0) -> int:
    return max(identity_threshold(seq, f, c0) for f in range(seq.fclass.size))


def modified_process(sample: Sample, seq: AdmissibleSequence, f: int,
                     config: EstimatorConfig) -> float:
    """``sqrt(n) * (P_n Phi_n(f) - E f)`` with the exact mean of ``f``."""
    space = seq.fclass.space
    if sample.space_id != space.space_id:
        raise SpaceMismatch("sample was drawn from a different space")
    if sample.n != config.n:
        raise LengthMismatch(f"sample has {sample.n} draws but config.n = {config.n}")
    values = phi_table(seq, config)[f]
    mean = math.fsum(values[sample.indices]) / sample.n
    return math.sqrt(sample.n) * (mean - seq.fclass.means[f])


@dataclass(frozen=True, eq=False)
class BiasResult:
    scaled_sup: float
    per_function: np.ndarray
    tail_terms: np.ndarray

    def __float__(self):
        return self.scaled_sup


def exact_bias(seq: AdmissibleSequence, config: EstimatorConfig) -> BiasResult:
    """``sqrt(n) sup_f |E Phi_n(f) - E f|`` and per-level ``E|Delta_s| 1{cut}``.

    ``per_function`` holds the unscaled ``|E Phi_n(f) - E f|``;
    ``tail_terms[s-1, f]`` is ``E |Delta_s(f)| 1{|Delta_s(f)| > lambda}``.
    """
    space = seq.fclass.space
    gap = expectations(space, seq.fclass.values - phi_table(seq, config))
    per_f = np.abs(gap)
    if seq.s_max:
        removed = np.abs(_removed_parts(seq.decomposition, config))
        tails = np.stack([expectations(space, removed[s]) for s in range(seq.s_max)])
    else:
        tails = np.zeros((0, seq.fclass.size))
    return BiasResult(math.sqrt(config.n) * float(per_f.max()), per_f, tails)


# ---------------------------------------------------------------------------
# bounds


def bernstein_tail(t: float, n: int, sigma2: float, M: float) -> float:
    """``2 exp(-n t**2 / (2 sigma2 + (2/3) M t))``; M bounds ``|g - E g|``."""
    if t <= 0:
        return 2.0
    return 2.0 * math.exp(-n * t * t / (2.0 * sigma2 + (2.0 / 3.0) * M * t))


@dataclass(frozen=True)
class DeviationConstants:
    """Explicit constants for the level-wise and global deviation bounds.

    With truncation constant ``c0`` and deviation multiplier ``c3`` the Bernstein
    exponent of a single level-``s`` increment equals
    ``c3**2 u**2 2**s / (2 + 4 c0 c3 u / 3)``, which is at least
    ``rate * 2**s * min(u**2, u)`` with ``rate = c3**2 / (2 + 4 c0 c3 / 3)``.
    Paying ``2**(s+1) log 2`` for the union over increments and using
    ``min(u**2, u) >= 1/4`` for ``u > 1/2`` leaves ``c2 = rate - 8 log 2``.
    """

    c0: float = 1.0
    c3: float = 10.0

    @property
    def rate(self) -> float:
        return self.c3**2 / (2.0 + 4.0 * self.c0 * self.c3 / 3.0)

    @property
    def c2(self) -> float:
        return self.rate - 8.0 * math.log(2.0)

    @property
    def global_constant(self) -> float:
        """Multiplier of ``(u + 1) gamma_2 / sqrt(n)`` in the global bound."""
        return (1.0 + math.sqrt(2.0)) * max(self.c3, 1.0 / self.c0)

    @classmethod
    def from_target(cls, c0: float = 1.0, c2: float = 1.0) -> "DeviationConstants":
        """Smallest ``c3`` whose derived ``c2`` reaches the target."""
        r = c2 + 8.0 * math.log(2.0)
        # c3**2 - (4 c0 r / 3) c3 - 2 r = 0
        b = 4.0 * c0 * r / 3.0
        return cls(c0=c0, c3=(b + math.sqrt(b * b + 8.0 * r)) / 2.0)

    def to_dict(self) -> dict:
        return {"c0": self.c0, "c3": self.c3, "c2": self.c2, "rate": self.rate,
                "global_constant": self.global_constant}


def default_constants(c0: float = 1.0) -> DeviationConstants:
    return DeviationConstants.from_target(c0=c0, c2=1.0)


def _check_u(u: float) -> None:
    if not u > 0.5:
        raise BadU(f"u must exceed 1/2, got {u}")


@dataclass(frozen=True, eq=False)
class LevelBound:
    thresholds: np.ndarray
    failure_probability: float
    exponent: float
    union_size: int
    constants: DeviationConstants


def level_failure_probability(u: float, s: int, constants: DeviationConstants) -> float:
    """``2**(2**(s+1)) * bernstein_tail`` at the level-s threshold (may exceed 1)."""
    _check_u(u)
    c0, c3 = constants.c0, constants.c3
    # any n and ||Delta|| = 1: the exponent does not depend on either
    n = 1
    t = c3 * u * 2.0 ** (s / 2.0) / math.sqrt(n)
    lam = c0 * math.sqrt(n) / 2.0 ** (s / 2.0)
    exponent = n * t * t / (2.0 + (2.0 / 3.0) * 2.0 * lam * t)
    # log of 2**(2**(s+1)) * bernstein_tail, kept in log space to avoid underflow
    log_fail = (2.0 ** (s + 1) + 1.0) * math.log(2.0) - exponent
    return math.exp(min(log_fail, 700.0))


def level_deviation_bound(decomp: ChainDecomposition, u: float, s: int, n: int,
                          constants: DeviationConstants | None = None) -> LevelBound:
    """Per-function thresholds ``c3 u 2**(s/2) ||Delta_s(f)||_2 / sqrt(n)`` and the
    probability that any level-``s`` increment exceeds its threshold."""
    _check_u(u)
    if not 1 <= s <= decomp.s_max:
        raise LevelOutOfRange(f"level {s} outside 1..{decomp.s_max}")
    constants = constants or default_constants()
    thresholds = constants.c3 * u * 2.0 ** (s / 2.0) * decomp.l2_norms[s - 1] / math.sqrt(n)
    c0, c3 = constants.c0, constants.c3
    exponent = c3**2 * u**2 * 2.0**s / (2.0 + 4.0 * c0 * c3 * u / 3.0)
    return LevelBound(thresholds, level_failure_probability(u, s, constants), exponent,
                      budget(s + 1), constants)


def global_deviation_bound(u: float, gamma2_estimate: float, n: int,
                           constants: DeviationConstants | None = None) -> float:
    """``C (u + 1) gamma_2 / sqrt(n)`` bounding ``sup_f |P_n Phi_n(f) - E f|``."""
    _check_u(u)
    constants = constants or default_constants()
    return constants.global_constant * (u + 1.0) * gamma2_estimate / math.sqrt(n)


def global_failure_probability(u: float, s_max: int, s0: int = 0,
                               constants: DeviationConstants | None = None) -> float:
    """Union of the level failures for ``s0 < s <= s_max`` (capped at 1)."""
    constants = constants or default_constants()
    total = math.fsum(level_failure_probability(u, s, constants)
                      for s in range(s0 + 1, s_max + 1))
    return min(1.0, total)


def tail_deviation_bound(decomp: ChainDecomposition, u: float, n: int, s0: int,
                         constants: DeviationConstants | None = None) -> float:
    """``c3 u / sqrt(n) * sup_f sum_{s > s0} 2**(s/2) ||Delta_s(f)||_2``."""
    _check_u(u)
    constants = constants or default_constants()
    if s0 >= decomp.s_max:
        return 0.0
    s = np.arange(s0 + 1, decomp.s_max + 1)
    sums = ((2.0 ** (s / 2.0))[:, None] * decomp.l2_norms[s0:]).sum(axis=0)
    return constants.c3 * u * float(sums.max()) / math.sqrt(n)


@lru_cache(maxsize=None)
def cor15_constants() -> tuple[float, float]:
    """``(c_A, c_B)`` with ``E sup_f |P_n f - P f| <= c_A A / sqrt(n) + c_B B / n``.

    ``A`` and ``B`` are the L2 and L-infinity chain sums of one decomposition.
    Derived by inverting Bernstein at level ``x_s = 2**s (2 log 2 + v)`` for
    every increment, union-bounding each level, and integrating the tail in v.
    """
    a = 2.0 * math.log(2.0)
    levels = 2.0 ** np.arange(1, 64)

    def excess(v):
        return float(np.sum(2.0 * np.exp(-levels * v)))

    v_star = optimize.brentq(lambda v: excess(v) - 1.0, 1e-6, 10.0)

    def prob(v):
        return min(1.0, excess(v))

    int_a = integrate.quad(lambda v: 1.0 / math.sqrt(2.0 * (a + v)), 0.0, v_star)[0] \
        + integrate.quad(lambda v: prob(v) / math.sqrt(2.0 * (a + v)), v_star, np.inf)[0]
    int_b = v_star + integrate.quad(prob, v_star, np.inf)[0]
    return math.sqrt(2.0 * a) + int_a, (4.0 / 3.0) * (a + int_b)


def cor15_constant() -> float:
    return max(cor15_constants())


def expectation_bound_cor15(gamma2_est: float, gamma1_est: float, n: int,
                            c: float | None = None) -> float:
    """``c (gamma2 / sqrt(n) + gamma1 / n)``; the default c is :func:`cor15_constant`."""
    if gamma2_est < 0 or gamma1_est < 0:
        raise ValueError("estimates must be nonnegative")
    c = cor15_constant() if c is None else c
    return c * (gamma2_est / math.sqrt(n) + gamma1_est / n)
