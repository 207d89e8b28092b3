"""Command-line front end.

Every subcommand reads a JSON config (``"schema": 1``), writes its results
under ``--out`` and always leaves a ``manifest.json`` there. Exit status is
0 for success or "not reject", 1 for "reject" and 2 for any error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .config import (
    ConfigError,
    build_model,
    build_order,
    load_config,
    read_observations,
    require,
    write_csv,
)
from .diagnostics import diagnostic_csv, ising_diagnose
from .exact import exact_rank_pmf, sup_norm_to_uniform
from .power import DEFAULT_N_GRID, ExperimentConfig, power_curve, sweep_csv, weight_sweep
from .ranking import RankHistogram, rank_observations
from .streams import RandomSource
from .uniformity import run_test

EXIT_OK, EXIT_REJECT, EXIT_ERROR = 0, 1, 2
U64_MAX = 2**64 - 1


@dataclass
class RunManifest:
    command: str
    config_path: str
    seed: int
    version: str = __version__
    started: str = ""
    finished: str = ""
    outputs: list[str] = field(default_factory=list)
    exit_code: int | None = None
    error: str | None = None

    def write(self, out_dir: Path) -> None:
        (out_dir / "manifest.json").write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


class Run:
    """Per-invocation context handed to the command functions."""

    def __init__(self, args, cfg: dict, manifest: RunManifest):
        self.args = args
        self.cfg = cfg
        self.manifest = manifest
        self.out = Path(args.out)
        self.rng = RandomSource(manifest.seed)
        self.base = Path(args.config).resolve().parent

    def path(self, name: str) -> Path:
        self.manifest.outputs.append(name)
        return self.out / name

    def write_text(self, name: str, text: str) -> None:
        self.path(name).write_text(text)


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _orders(cfg: dict, p, q):
    specs = cfg["orders"] if "orders" in cfg else [require(cfg, "order")]
    return [build_order(s, p, q) for s in specs]


def _models(cfg: dict, q_key: str = "q"):
    p = build_model(require(cfg, "p"))
    q = build_model(require(cfg, q_key))
    return p, q


# --- commands -------------------------------------------------------------


def cmd_test(run: Run) -> int:
    cfg = run.cfg
    p = build_model(require(cfg, "candidate"))
    obs_spec = require(cfg, "observations")
    order = build_order(require(cfg, "order"), p, build_model(obs_spec["model"]) if "model" in obs_spec else None)
    m = int(require(cfg, "m"))
    alpha = float(cfg.get("alpha", 0.05))
    method = cfg.get("test", "chisq")

    if "file" in obs_spec:
        ys = read_observations(run.base / obs_spec["file"], require(obs_spec, "format", "observations"))
        source = str(obs_spec["file"])
    elif "model" in obs_spec:
        q = build_model(obs_spec["model"])
        ys = q.sample_batch(run.rng.child(0), int(require(obs_spec, "n", "observations")))
        source = q.name
    else:
        raise ConfigError("observations: need either 'file' or 'model'")

    ranks = rank_observations(ys, p, m, order, run.rng.child(1), threads=run.args.threads)
    hist = RankHistogram.from_ranks(ranks, m)
    report = run_test(hist, alpha, method)

    payload = report.to_dict() | {
        "n": hist.n,
        "m": m,
        "order": order.name,
        "candidate": p.name,
        "observations": source,
        "seed": run.manifest.seed,
    }
    run.write_text("report.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    write_csv(run.path("ranks.csv"), ("r", "count"), enumerate(hist.counts))
    print(report.summary())
    print(report.to_json())
    return EXIT_REJECT if report.rejected else EXIT_OK


def _support(p, q, tol: float):
    if p.is_enumerable and q.is_enumerable:
        return None
    parts = []
    for model in (p, q):
        if not hasattr(model, "truncated_support"):
            raise ConfigError(f"{model.name} is neither enumerable nor truncatable")
        parts.append(model.truncated_support(tol))
    return sorted(set(parts[0]) | set(parts[1]))


def cmd_exact_dist(run: Run) -> int:
    cfg = run.cfg
    p, q = _models(cfg)
    order = build_order(require(cfg, "order"), p, q)
    m = int(require(cfg, "m"))
    support = _support(p, q, float(cfg.get("truncate_tol", 1e-12)))
    pmf = exact_rank_pmf(p, q, order, m, support=support)
    ref = 1.0 / (m + 1)
    rows = [(r, repr(float(v)), repr(ref), repr(abs(float(v) - ref))) for r, v in enumerate(pmf.probs)]
    write_csv(run.path("exact_dist.csv"), ("r", "prob", "uniform_ref", "abs_dev"), rows)
    summary = {
        "m": m,
        "order": order.name,
        "p": p.name,
        "q": q.name,
        "sup_norm": sup_norm_to_uniform(pmf),
        "tail_mass": pmf.tail_mass,
    }
    run.write_text("exact_dist.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"sup-norm distance to uniform: {summary['sup_norm']:.6g} (tail mass {pmf.tail_mass:.3g})")
    return EXIT_OK


def _experiment(run: Run, p, q, order, **extra) -> ExperimentConfig:
    cfg = run.cfg
    return ExperimentConfig(
        p=p,
        q=q,
        order=order,
        m=int(extra.pop("m")),
        n=int(extra.pop("n")),
        alpha=float(cfg.get("alpha", 0.05)),
        trials=int(cfg.get("trials", 1024)),
        seed=run.manifest.seed,
        test=cfg.get("test", "chisq"),
        threads=run.args.threads,
        **extra,
    )


def cmd_power(run: Run) -> int:
    cfg = run.cfg
    p, q = _models(cfg)
    orders = _orders(cfg, p, q)
    ms = [int(v) for v in _as_list(require(cfg, "m"))]
    ns = [int(v) for v in _as_list(cfg.get("n", list(DEFAULT_N_GRID)))]
    exp = _experiment(run, p, q, orders[0], m=ms[0], n=ns[0])
    rows = power_curve(exp, ns, ms, orders)
    run.write_text("power.csv", sweep_csv(rows))
    for r in rows:
        print(f"n={r.x} m={r.m} {r.ordering}: power={r.value:.4f}")
    return EXIT_OK


def cmd_sweep(run: Run) -> int:
    cfg = run.cfg
    p, alt = _models(cfg, "alternative")
    orders = _orders(cfg, p, alt)
    metric = cfg.get("metric", "supnorm")
    weights = [float(w) for w in require(cfg, "weights")]
    exp = _experiment(run, p, p, orders[0], m=require(cfg, "m"), n=cfg.get("n", 1), alternative=alt, weights=tuple(weights))
    rows = weight_sweep(exp, weights, metric, orders)
    run.write_text("sweep.csv", sweep_csv(rows))
    for r in rows:
        print(f"w={r.x:g} {r.ordering}: {metric}={r.value:.6g}")
    return EXIT_OK


def cmd_ising_diagnose(run: Run) -> int:
    cfg = run.cfg
    rows = ising_diagnose(
        k=int(require(cfg, "k")),
        T=float(require(cfg, "T")),
        method=cfg.get("method", "gibbs"),
        checkpoints=[int(s) for s in require(cfg, "checkpoints")],
        n=int(require(cfg, "n")),
        m=int(require(cfg, "m")),
        rng=run.rng,
        coupling=int(cfg.get("coupling", 1)),
        reference_factor=int(cfg.get("reference_factor", 100)),
        reference_chains=int(cfg.get("reference_chains", 4)),
    )
    run.write_text("ising_diagnose.csv", diagnostic_csv(rows))
    for r in rows:
        print(f"steps={r.steps}: chisq={r.chisq_statistic:.4g} p={r.p_value:.4g}")
    return EXIT_OK


COMMANDS = {
    "test": cmd_test,
    "exact-dist": cmd_exact_dist,
    "power": cmd_power,
    "sweep": cmd_sweep,
    "ising-diagnose": cmd_ising_diagnose,
}


# --- entry point ----------------------------------------------------------


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON config with \"schema\": 1")
    common.add_argument("--seed", type=_u64, default=None, help="overrides the config seed (default 0)")
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--threads", type=_positive, default=1, help="worker threads")

    parser = argparse.ArgumentParser(prog="srsgof", description="Exact goodness-of-fit tests with stochastic ranks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "test": "test observations against a candidate model",
        "exact-dist": "exact rank distribution for a (p, q, order, m) setting",
        "power": "Monte Carlo power over n, m and orders",
        "sweep": "sup-norm or power over mixture weights",
        "ising-diagnose": "rank-based convergence check of the Ising samplers",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR

    out = Path(args.out)
    manifest = RunManifest(args.command, str(args.config), args.seed if args.seed is not None else 0, started=_now())
    code = EXIT_ERROR
    try:
        out.mkdir(parents=True, exist_ok=True)
        cfg = load_config(args.config)
        if args.seed is None:
            manifest.seed = _u64(str(cfg.get("seed", 0)))
        code = COMMANDS[args.command](Run(args, cfg, manifest))
    except (ConfigError, ValueError, KeyError, TypeError, NotImplementedError, argparse.ArgumentTypeError) as exc:
        manifest.error = f"{type(exc).__name__}: {exc}"
        print(f"srsgof {args.command}: error: {exc}", file=sys.stderr)
    except Exception as exc:  # noqa: BLE001 - any failure must map to exit 2
        manifest.error = f"{type(exc).__name__}: {exc}"
        traceback.print_exc(file=sys.stderr)
    manifest.exit_code = code
    manifest.finished = _now()
    try:
        manifest.write(out)
    except OSError as exc:
        print(f"srsgof: cannot write manifest: {exc}", file=sys.stderr)
        code = EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
