"""Truncated-chain empirical processes on finite probability spaces."""

__version__ = "0.1.0"

from .chaining import (  # noqa: E402
    AdmissibleSequence,
    ChainDecomposition,
    build_admissible,
    decompose,
    gamma_functional,
    merge_admissible,
    tail_functional,
)
from .estimator import (  # noqa: E402
    EstimatorConfig,
    SqrtN,
    TailFrom,
    Universal,
    exact_bias,
    phi,
    phi_table,
)
from .function_class import (  # noqa: E402
    FunctionClass,
    HeavyTailSpec,
    heavy_tail_pair,
    interval_indicators,
    make_class,
)
from .measure import DiscreteSpace, draw_sample, expectation, lp_norm, make_space  # noqa: E402

__all__ = [
    "AdmissibleSequence", "ChainDecomposition", "DiscreteSpace", "EstimatorConfig",
    "FunctionClass", "HeavyTailSpec", "SqrtN", "TailFrom", "Universal",
    "build_admissible", "decompose", "draw_sample", "exact_bias", "expectation",
    "gamma_functional", "heavy_tail_pair", "interval_indicators", "lp_norm",
    "make_class", "make_space", "merge_admissible", "phi", "phi_table", "tail_functional",
]
