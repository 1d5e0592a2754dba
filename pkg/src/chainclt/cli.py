"""Command-line front end.

    chainclt <experiment> --config PATH [--seed N] [--out DIR] [--figures]
    chainclt validate --config PATH

Configs are JSON.  Each run writes ``<experiment>.csv`` (columns documented in
``schema/csv_columns.json``) and ``summary.json`` into the output directory.
Exit status: 0 on completion, 1 when the experiment's verdict is FAIL, 2 on a
configuration or feasibility error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, parallel
from .chaining import build_admissible, gamma_functional
from .errors import ChainCLTError, ConfigError
from .estimator import (
    DeviationConstants,
    EstimatorConfig,
    class_identity_threshold,
    default_constants,
    exact_bias,
    global_deviation_bound,
    identity_threshold,
    modified_process,
    phi_table,
)
from .function_class import (
    FunctionClass,
    HeavyTailSpec,
    bundled_classes,
    heavy_tail_pair,
    interval_indicators,
    random_class,
)
from .measure import draw_sample, lp_norm
from .reports import TableReport, write_summary
from . import verify

EXPERIMENTS = ("chain-info", "estimate", "bias-sweep", "clt-test", "oscillation",
               "necessity", "lemma21")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
# identity thresholds are listed by validate only for classes this small
_N0_LIMIT = 64


@dataclass
class RunConfig:
    experiment: str
    seed: int
    out: Path
    raw: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# config loading


def load_json(path) -> dict:
    """Parse a JSON config, turning syntax errors into a :class:`ConfigError`
    that quotes the offending line."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        line = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        pointer = " " * (exc.colno - 1) + "^"
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n  {line}\n  {pointer}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def resolve(experiment: str, data: dict, seed: int | None, out: str | None) -> RunConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
    declared = data.get("experiment")
    if declared is not None and declared != experiment:
        raise ConfigError(f"config is for {declared!r}, not {experiment!r}")
    seed = data.get("seed") if seed is None else seed
    if seed is None:
        raise ConfigError("a seed is required (config 'seed' or --seed)")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be a nonnegative 64-bit integer, got {seed!r}")
    out = Path(out if out is not None else data.get("out", "chainclt_out"))
    # the output directory stays out of the embedded config so CSV bytes do not depend on it
    raw = dict(data, experiment=experiment, seed=seed)
    raw.pop("out", None)
    return RunConfig(experiment, seed, out, raw)


def build_class(spec: dict | None, base_dir: Path = Path(".")) -> FunctionClass:
    if spec is None:
        raise ConfigError("config needs a 'class' entry")
    if "file" in spec:
        path = Path(spec["file"])
        if not path.is_absolute():
            path = base_dir / path
        return FunctionClass.from_dict(load_json(path))
    name = spec.get("generator")
    params = spec.get("params", {})
    try:
        if name == "interval_indicators":
            return interval_indicators(int(params.get("d", 8)))
        if name == "heavy_tail_pair":
            return heavy_tail_pair(heavy_tail_spec(params))[1]
        if name == "random":
            rng = np.random.default_rng(int(params.get("seed", 0)))
            return random_class(rng, int(params.get("functions", 8)),
                                int(params.get("atoms", 8)), float(params.get("scale", 1.0)),
                                bool(params.get("integer", False)))
        bundled = bundled_classes()
        if name in bundled:
            return bundled[name]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad class parameters: {exc}") from exc
    raise ConfigError(f"unknown class generator {name!r}")


def heavy_tail_spec(params: dict | None) -> HeavyTailSpec:
    params = dict(params or {})
    if isinstance(params.get("a_decay"), list):
        params["a_decay"] = tuple(params["a_decay"])
    try:
        return HeavyTailSpec(**params)
    except TypeError as exc:
        raise ConfigError(f"bad heavy_tail parameters: {exc}") from exc


def estimator_config(data: dict, n: int | None = None) -> EstimatorConfig:
    est = dict(data.get("estimator", {}))
    if n is not None:
        est["n"] = n
    est.setdefault("n", 1)
    try:
        return EstimatorConfig.from_dict(est)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad estimator config: {exc}") from exc


def _need(data: dict, key: str, experiment: str):
    if key not in data:
        raise ConfigError(f"{experiment} needs '{key}'")
    return data[key]


def _grid(data: dict, key: str, experiment: str) -> list:
    grid = _need(data, key, experiment)
    if not isinstance(grid, list) or not grid:
        raise ConfigError(f"'{key}' must be a nonempty list")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(f"'{key}' must be strictly increasing")
    return grid


# ---------------------------------------------------------------------------
# experiments: each returns (report, summary extras, figure spec)


def _chain_info(cfg: RunConfig, fc: FunctionClass):
    chain = cfg.raw.get("chain", {})
    seq = build_admissible(fc, chain.get("metric", "L2"), bool(chain.get("refine", False)))
    linf = build_admissible(fc, "Linf")
    d = seq.level_distances
    rows = [[s, int(lvl.size), int(min(2 ** (2**s), fc.size) if s else 1),
             float(d[s].max())] for s, lvl in enumerate(seq.levels)]
    a_sum, b_sum = seq.decomposition.chain_sums()
    extras = {"s_max": seq.s_max, "gamma2_estimate": gamma_functional(seq, 2),
              "gamma1_estimate": gamma_functional(linf, 1),
              "level_sizes": [int(lvl.size) for lvl in seq.levels],
              "chain_sum_A": a_sum, "chain_sum_B": b_sum,
              "class_size": fc.size, "atom_count": fc.space.atom_count}
    report = TableReport(["level", "size", "cap", "max_distance"], rows,
                         dict(extras, experiment="chain-info"))
    return report, extras, ("level", ["max_distance"])


def _estimate(cfg: RunConfig, fc: FunctionClass):
    n = int(_need(cfg.raw, "n", "estimate"))
    config = estimator_config(cfg.raw, n)
    seq = build_admissible(fc)
    oracle_req = cfg.raw.get("oracle")
    if oracle_req is not None:
        cost = verify.enumeration_cost(fc.space, n)
        if cost > verify.ENUMERATION_LIMIT:
            raise ConfigError(f"enumeration needs {cost} tuples (> {verify.ENUMERATION_LIMIT})")
    sample = draw_sample(fc.space, n, cfg.seed)
    table = phi_table(seq, config)
    bias = exact_bias(seq, config)
    rows = []
    for f in range(fc.size):
        rows.append([f, fc.means[f], float(np.dot(fc.space.probs, table[f])),
                     modified_process(sample, seq, f, config),
                     lp_norm(fc.space, table[f] - fc.values[f], 2)])
    g2 = gamma_functional(seq, 2)
    constants = default_constants(config.c0)
    extras = {"n": n, "estimator": config.to_dict(), "gamma2_estimate": g2,
              "scaled_bias": bias.scaled_sup,
              "global_bound_u1": global_deviation_bound(1.0, g2, n, constants),
              "constants": constants.to_dict()}
    if oracle_req is not None:
        f = int(oracle_req.get("function", 1))
        dist = verify.enumeration_oracle(fc.space, seq, f, config)
        extras["oracle"] = {"function": f, "support": dist.support.tolist(),
                            "probs": dist.probs.tolist(), "mean": dist.mean}
    report = TableReport(["function", "mean", "phi_mean", "modified_process", "l2_gap"],
                         rows, dict(extras, experiment="estimate"))
    return report, extras, ("function", ["modified_process"])


def _bias_sweep(cfg: RunConfig, fc: FunctionClass):
    n_grid = _grid(cfg.raw, "n_grid", "bias-sweep")
    config = estimator_config(cfg.raw, n_grid[0])
    seq = build_admissible(fc)
    report = verify.bias_sweep(seq, n_grid, config)
    maxterm = cfg.raw.get("maxterm")
    if maxterm is not None:
        extra = verify.l2_and_maxterm_sweep(seq, int(maxterm.get("function", 1)), n_grid,
                                            int(maxterm.get("replicates", 1000)), cfg.seed,
                                            config)
        report.metrics.update(extra.metrics)
    return report, {"series": report.metrics["scaled_bias"]}, None


def _clt(cfg: RunConfig, fc: FunctionClass):
    n = int(_need(cfg.raw, "n", "clt-test"))
    subset = _need(cfg.raw, "subset", "clt-test")
    replicates = int(cfg.raw.get("replicates", 2000))
    if replicates < 100:
        raise ConfigError("clt-test needs at least 100 replicates")
    seq = build_admissible(fc)
    report = verify.clt_test(seq, subset, n, replicates, cfg.seed, estimator_config(cfg.raw, n))
    return report, {}, None


def _oscillation(cfg: RunConfig, fc: FunctionClass):
    deltas = _grid(cfg.raw, "delta_grid", "oscillation")
    n_grid = _grid(cfg.raw, "n_grid", "oscillation")
    eta = float(_need(cfg.raw, "eta", "oscillation"))
    replicates = int(cfg.raw.get("replicates", 1000))
    seq = build_admissible(fc)
    report = verify.oscillation_sweep(seq, deltas, n_grid, eta, replicates, cfg.seed,
                                      estimator_config(cfg.raw, n_grid[0]))
    ordered = verify.oscillation_ordered(report)
    report.metadata["verdict"] = "PASS" if ordered else "FAIL"
    return report, {"ordered_in_delta": ordered}, None


def _necessity(cfg: RunConfig, fc: FunctionClass | None):
    spec = heavy_tail_spec(cfg.raw.get("heavy_tail"))
    b_exps = _need(cfg.raw, "b_exponents", "necessity")
    n_grid = _grid(cfg.raw, "n_grid", "necessity")
    report = verify.necessity_sweep(spec, b_exps, n_grid)
    return report, {"classification": report.metadata["classification"]}, None


def _lemma21(cfg: RunConfig, fc: FunctionClass):
    n = int(_need(cfg.raw, "n", "lemma21"))
    u_grid = _grid(cfg.raw, "u_grid", "lemma21")
    levels = cfg.raw.get("levels", [cfg.raw.get("level", 1)])
    replicates = int(cfg.raw.get("replicates", 10000))
    seq = build_admissible(fc)
    config = estimator_config(cfg.raw, n)
    constants = default_constants(config.c0)
    if "constants" in cfg.raw:
        # explicit override of the deviation multiplier, e.g. to probe the bound
        constants = DeviationConstants(config.c0, float(cfg.raw["constants"]["c3"]))
    metrics, verdict = {}, "PASS"
    for s in levels:
        sub = verify.lemma21_coverage(seq, int(s), u_grid, n, replicates,
                                      verify.derive_seed(cfg.seed, int(s)), config, constants)
        metrics[f"violation_rate_s{s}"] = sub.metrics["violation_rate"]
        metrics[f"bound_s{s}"] = sub.metrics["bound"]
        if sub.verdict != "PASS":
            verdict = "FAIL"
    meta = {"experiment": "lemma21", "levels": levels, "n": n, "replicates": replicates,
            "constants": constants.to_dict(), "verdict": verdict}
    return verify.SweepReport("u", u_grid, metrics, meta), {}, None


RUNNERS = {
    "chain-info": _chain_info,
    "estimate": _estimate,
    "bias-sweep": _bias_sweep,
    "clt-test": _clt,
    "oscillation": _oscillation,
    "necessity": _necessity,
    "lemma21": _lemma21,
}


def run(cfg: RunConfig, base_dir: Path = Path("."), figures: bool = False) -> int:
    """Execute one experiment and write its CSV and JSON summary; returns the exit code."""
    start = time.perf_counter()
    fc = None if cfg.experiment == "necessity" else build_class(cfg.raw.get("class"), base_dir)
    problems = [p for p in diagnostics(cfg.raw, cfg.experiment, fc) if p.startswith("error")]
    if problems:
        raise ConfigError("; ".join(p.split(": ", 1)[1] for p in problems))
    cfg.out.mkdir(parents=True, exist_ok=True)
    if not os.access(cfg.out, os.W_OK):
        raise ConfigError(f"output directory {cfg.out} is not writable")
    report, extras, fig = RUNNERS[cfg.experiment](cfg, fc)
    report.metadata["config"] = cfg.raw
    report.metadata["version"] = __version__
    stem = cfg.experiment.replace("-", "_")
    csv_path = cfg.out / f"{stem}.csv"
    report.to_csv(csv_path)
    verdict = report.verdict
    summary = {"experiment": cfg.experiment, "version": __version__, "config": cfg.raw,
               "verdict": verdict, "csv": csv_path.name, "out": str(cfg.out),
               "wall_time_s": time.perf_counter() - start,
               "threads": parallel.get_threads()}
    summary.update(extras)
    summary["report"] = report.summary()
    if figures:
        from . import plotting
        x, ys = fig if fig else (None, None)
        png = plotting.render(report, cfg.out / f"{stem}.png", x, ys)
        if png is not None:
            summary["figure"] = png.name
    write_summary(cfg.out / "summary.json", summary)
    print(f"{cfg.experiment}: wrote {csv_path}" + (f" verdict={verdict}" if verdict else ""))
    return EXIT_FAIL if verdict == "FAIL" else EXIT_OK


# ---------------------------------------------------------------------------
# validation


def diagnostics(data: dict, experiment: str | None, fc: FunctionClass | None) -> list[str]:
    """Precondition problems as ``error: ...`` / ``warning: ...`` strings."""
    out = []
    u_grid = data.get("u_grid")
    if experiment == "lemma21" and u_grid is not None:
        bad = [u for u in u_grid if not u > 0.5]
        if bad:
            out.append(f"error: u_grid values {bad} violate the precondition u > 1/2")
    if experiment == "necessity":
        bad = [b for b in data.get("b_exponents", []) if not 0 < b <= 0.5]
        if bad:
            out.append(f"error: b_exponents {bad} outside (0, 1/2]")
    if experiment == "clt-test" and fc is not None:
        bad = [f for f in data.get("subset", []) if not 0 <= int(f) < fc.size]
        if bad:
            out.append(f"error: subset indices {bad} outside the class")
        elif any(int(f) == fc.anchor_index for f in data.get("subset", [])):
            out.append("error: subset contains the zero function (degenerate target)")
    if experiment == "estimate" and data.get("oracle") is not None and fc is not None:
        n = int(data.get("n", 1))
        cost = verify.enumeration_cost(fc.space, n)
        if cost > verify.ENUMERATION_LIMIT:
            out.append(f"error: enumeration infeasible, {fc.space.atom_count}**{n} = {cost} "
                       f"tuples exceed {verify.ENUMERATION_LIMIT}")
    return out


def validate(path) -> int:
    try:
        data = load_json(path)
        experiment = data.get("experiment")
        if experiment is not None and experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}")
        if data.get("seed") is None:
            print("warning: no seed in config; --seed will be required at run time")
        fc = None
        if experiment != "necessity":
            fc = build_class(data.get("class"), Path(path).parent)
        if "estimator" in data:
            estimator_config(data)
    except (ChainCLTError, OSError) as exc:
        print(f"error: {exc}")
        return EXIT_CONFIG
    problems = diagnostics(data, experiment, fc)
    for p in problems:
        print(p)
    if any(p.startswith("error") for p in problems):
        return EXIT_CONFIG
    print("OK")
    if fc is not None:
        seq = build_admissible(fc)
        print(f"s_max = {seq.s_max}")
        print(f"class size = {fc.size}, atoms = {fc.space.atom_count}")
        if fc.size <= _N0_LIMIT:
            c0 = float(data.get("estimator", {}).get("c0", 1.0))
            n0 = [identity_threshold(seq, f, c0) for f in range(fc.size)]
            print(f"n0 per function = {n0}")
            print(f"n0 for the class = {class_identity_threshold(seq, c0)}")
    else:
        spec = heavy_tail_spec(data.get("heavy_tail"))
        _, hc = heavy_tail_pair(spec)
        print(f"s_max = {build_admissible(hc).s_max}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainclt",
        description="Truncated-chain empirical process experiments.")
    parser.add_argument("--version", action="version", version=f"chainclt {__version__}")
    parser.add_argument("experiment", choices=EXPERIMENTS + ("validate",))
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--figures", action="store_true",
                        help="also render PNG figures next to the CSV")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.experiment == "validate":
        return validate(args.config)
    try:
        data = load_json(args.config)
        cfg = resolve(args.experiment, data, args.seed, args.out)
        return run(cfg, Path(args.config).parent, args.figures)
    except (ChainCLTError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
