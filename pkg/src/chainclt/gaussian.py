"""The limiting Gaussian process over a finite class.

Two covariance structures are exposed: ``bridge`` (``P(fg) - Pf Pg``, the limit
of the centered empirical process) and ``isonormal`` (``P(fg)``, the L2(P)
geometry in which the chaining bounds live).  Both are exact on a discrete
space.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import parallel
from .errors import NotPSD
from .function_class import FunctionClass
from .measure import stream

PSD_TOL = 1e-10
MODES = ("bridge", "isonormal")


@dataclass(frozen=True, eq=False)
class GaussianModel:
    subset: np.ndarray
    covariance: np.ndarray
    mode: str

    @property
    def dim(self) -> int:
        return int(self.subset.shape[0])

    @cached_property
    def sqrt_factor(self) -> np.ndarray:
        """Symmetric square root of the covariance (negative roundoff clipped)."""
        cov = self.covariance
        w, v = np.linalg.eigh(cov)
        root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
        # degenerate coordinates (e.g. constants under the bridge) stay exactly 0
        dead = np.all(cov == 0, axis=1)
        root[dead, :] = 0.0
        root[:, dead] = 0.0
        return root

    @cached_property
    def rho2(self) -> np.ndarray:
        """Intrinsic distance ``(E (G_i - G_j)**2)**(1/2)``."""
        c = self.covariance
        diag = np.diag(c)
        sq = diag[:, None] + diag[None, :] - 2.0 * c
        np.fill_diagonal(sq, 0.0)
        return np.sqrt(np.clip(sq, 0.0, None))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["function"] + [int(i) for i in self.subset])
            for i, row in zip(self.subset, self.covariance):
                writer.writerow([int(i)] + [repr(float(x)) for x in row])


def build_model(fc: FunctionClass, subset: Sequence[int] | None = None,
                mode: str = "bridge") -> GaussianModel:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    idx = np.arange(fc.size) if subset is None else np.asarray(subset, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("subset must be nonempty")
    values = fc.values[idx]
    if mode == "bridge":
        values = values - fc.means[idx, None]
    probs = fc.space.probs
    cov = psd_repair((values[:, None, :] * values[None, :, :] * probs).sum(axis=-1))
    cov.setflags(write=False)
    return GaussianModel(idx, cov, mode)


def psd_repair(cov: np.ndarray) -> np.ndarray:
    """Symmetrize and clip roundoff-level negative eigenvalues; reject real ones."""
    cov = 0.5 * (cov + cov.T)
    w, v = np.linalg.eigh(cov)
    if w.min() < -PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {w.min():.3g}")
    if w.min() < 0:
        cov = (v * np.clip(w, 0.0, None)) @ v.T
        cov = 0.5 * (cov + cov.T)
    return cov


def _blockwise(model: GaussianModel, replicates: int, seed: int, reduce) -> np.ndarray:
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    root = model.sqrt_factor
    sizes = parallel.block_sizes(replicates)

    def one(block, rows):
        z = stream(seed, block).standard_normal((rows, model.dim))
        return reduce(z @ root)

    return np.concatenate(parallel.ordered_map(one, range(len(sizes)), sizes), axis=0)


def sample_gaussian(model: GaussianModel, replicates: int, seed: int) -> np.ndarray:
    """``(replicates, dim)`` draws of the process restricted to ``model.subset``."""
    return _blockwise(model, replicates, seed, lambda g: g)


@dataclass(frozen=True)
class SupEstimate:
    mean: float
    stderr: float
    replicates: int

    def __float__(self):
        return self.mean


def _summarize(values: np.ndarray) -> SupEstimate:
    r = values.shape[0]
    sd = float(values.std(ddof=1)) if r > 1 else 0.0
    return SupEstimate(float(values.mean()), sd / math.sqrt(r), r)


def sup_expectation(model: GaussianModel, replicates: int, seed: int) -> SupEstimate:
    """Monte Carlo ``E max_f |G_f|`` with its standard error."""
    return _summarize(_blockwise(model, replicates, seed, lambda g: np.abs(g).max(axis=1)))


def continuity_moduli(model: GaussianModel, deltas: Sequence[float], replicates: int,
                      seed: int) -> list[SupEstimate]:
    """``E sup_{rho2(f, f') <= delta} |G_f - G_f'|`` for several deltas on shared draws."""
    deltas = [float(d) for d in deltas]
    if any(d <= 0 for d in deltas):
        raise ValueError("delta must be positive")
    iu, ju = np.triu_indices(model.dim, k=1)
    rho = model.rho2[iu, ju]
    masks = [rho <= d for d in deltas]

    def reduce(g):
        gaps = np.abs(g[:, iu] - g[:, ju])
        out = np.zeros((g.shape[0], len(deltas)))
        for k, mask in enumerate(masks):
            if mask.any():
                out[:, k] = gaps[:, mask].max(axis=1)
        return out

    stats = _blockwise(model, replicates, seed, reduce)
    return [_summarize(stats[:, k]) for k in range(len(deltas))]


def continuity_modulus(model: GaussianModel, delta: float, replicates: int,
                       seed: int) -> SupEstimate:
    return continuity_moduli(model, [delta], replicates, seed)[0]


def export_covariance(model: GaussianModel, path) -> Path:
    path = Path(path)
    model.to_csv(path)
    return path
