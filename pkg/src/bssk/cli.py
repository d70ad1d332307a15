"""Command-line front end with reproducible run artifacts.

Campaign-style runs write their artifacts into --out-dir: a samples CSV
(trial, seed, statistic, mu1), a summary JSON, and a manifest JSON holding
the full configuration, tool version and wall time. The manifest is written
even when the run fails, with the error recorded. Replaying a manifest's
configuration reproduces the outputs byte for byte.

Exit codes: 0 success, 1 numerical or consistency failure, 2 usage error.
All floats are serialized with 17 significant digits.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .disorder import KINDS, make_distribution, sample_disorder
from .errors import BsskError, ConfigError
from .experiments import (
    ExperimentConfig,
    edge_rows,
    fluctuation_rows,
    run_rigidity_experiment,
    summarize,
)
from .partition import (
    QuadratureSpec,
    assemble_free_energy,
    contour_q_numeric,
    sphere_mc_partition,
)
from .saddle import low_gamma_gap, saddle_input_from_spectrum, solve_gamma
from .spectra import gram_eigenvalues, spectrum_to_csv
from .theory import HIGH, regime_constants

CSV_COLUMNS = ["trial", "seed", "statistic", "mu1"]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def dumps(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits, stable key order."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = dataclasses.asdict(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{dumps(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            return json.dumps(str(x))
        return _fmt(x)
    return json.dumps(str(obj) if not isinstance(obj, str) else obj)


def write_json(path: Path, obj) -> None:
    path.write_text(dumps(obj) + "\n")


class Manifest:
    """Run record written alongside every campaign's outputs."""

    def __init__(self, command: str, config: dict, master_seed):
        self.command = command
        self.config = config
        self.master_seed = master_seed
        self.started_at = datetime.now(timezone.utc).isoformat()
        self.t0 = time.monotonic()
        self.outputs: list[str] = []
        self.error: str | None = None

    def write(self, out_dir: Path) -> Path:
        record = {
            "command": self.command,
            "config": self.config,
            "master_seed": self.master_seed,
            "tool_version": __version__,
            "started_at": self.started_at,
            "finished_at": datetime.now(timezone.utc).isoformat(),
            "wall_seconds": time.monotonic() - self.t0,
            "csv_columns": CSV_COLUMNS,
            "outputs": self.outputs,
            "error": self.error,
        }
        path = out_dir / "manifest.json"
        write_json(path, record)
        return path


CONFIG_FIELDS = ("n1", "n2", "beta", "trials", "seed", "dist", "epsilon", "samples")

DEFAULTS = {"dist": "gaussian", "epsilon": 0.3, "samples": 1_000_000, "beta": 1.0, "seed": 0}


def load_config(path: str) -> dict:
    """Parse a flat JSON object of config fields; unknown keys are rejected."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a flat JSON object")
    for key in raw:
        if key not in CONFIG_FIELDS:
            raise ConfigError(f"unknown config field {key!r}")
    return raw


def resolve_config(args, mode: str) -> ExperimentConfig:
    """Merge built-in defaults, config file and flags (flags win)."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    for field in CONFIG_FIELDS:
        flag_value = getattr(args, field, None)
        if flag_value is not None:
            cfg[field] = flag_value
    for field in ("n1", "n2", "beta", "trials", "seed"):
        if cfg.get(field) is None:
            raise ConfigError(f"missing required field {field!r}")
    if int(cfg["trials"]) < 1:
        raise ConfigError(f"field 'trials' must be >= 1, got {cfg['trials']}")
    if int(cfg["n1"]) < 1 or int(cfg["n2"]) < 1:
        raise ConfigError(f"fields 'n1'/'n2' must be positive, got {cfg['n1']}, {cfg['n2']}")
    if float(cfg["beta"]) <= 0.0:
        raise ConfigError(f"field 'beta' must be positive, got {cfg['beta']}")
    return ExperimentConfig(
        n1=int(cfg["n1"]),
        n2=int(cfg["n2"]),
        beta=float(cfg["beta"]),
        spec=make_distribution(str(cfg["dist"])),
        trials=int(cfg["trials"]),
        master_seed=int(cfg["seed"]),
        mode=mode,
    )


def _write_samples_csv(path: Path, seed: int, rows) -> None:
    with path.open("w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for trial, stat, mu1 in rows:
            fh.write(f"{trial},{seed},{_fmt(stat)},{_fmt(mu1)}\n")


def _summary_record(summary) -> dict:
    return {
        "mean": summary.mean,
        "variance": summary.variance,
        "skewness": summary.skewness,
        "excess_kurtosis": summary.excess_kurtosis,
        "ks_distance": summary.ks_distance,
        "failures": summary.failures,
        "count": len(summary.samples),
    }


def _cmd_theory(args) -> int:
    rc = regime_constants(args.beta, args.r1, 1.0 - args.r1, args.w4)
    print(dumps(rc))
    return 0


def _cmd_spectrum(args, out_dir: Path, manifest: Manifest) -> int:
    J = sample_disorder(make_distribution(args.dist or "gaussian"), args.n1, args.n2, args.seed)
    spectrum = gram_eigenvalues(J)
    path = out_dir / "spectrum.csv"
    with path.open("w") as fh:
        spectrum_to_csv(spectrum, fh)
    manifest.outputs.append(str(path))
    print(f"wrote {path}")
    return 0


def _cmd_saddle(args) -> int:
    J = sample_disorder(make_distribution(args.dist or "gaussian"), args.n1, args.n2, args.seed)
    spectrum = gram_eigenvalues(J)
    inp = saddle_input_from_spectrum(spectrum, args.beta)
    point = solve_gamma(inp)
    N = args.n1 + args.n2
    rc = regime_constants(args.beta, args.n1 / N, args.n2 / N)
    print(
        dumps(
            {
                "gamma": point.gamma,
                "gamma1": point.gamma1,
                "gamma2": point.gamma2,
                "residual": point.residual,
                "regime": rc.regime,
                "beta_c": rc.beta_c,
                "gamma_minus_mu1": low_gamma_gap(inp, point),
                "z_c": rc.z_c,
            }
        )
    )
    return 0


def _cmd_verify_q(args, out_dir: Path, manifest: Manifest) -> int:
    J = sample_disorder(make_distribution(args.dist or "gaussian"), args.n1, args.n2, args.seed)
    spectrum = gram_eigenvalues(J)
    inp = saddle_input_from_spectrum(spectrum, args.beta)
    q = contour_q_numeric(inp, QuadratureSpec())
    log_z = assemble_free_energy(float(np.log(q)), J.rows, J.cols, args.beta) * (args.n1 + args.n2)
    mc = sphere_mc_partition(J, args.beta, args.samples, args.seed)
    z_contour = float(np.exp(log_z))
    record = {
        "mc": mc.value,
        "mc_se": mc.std_error,
        "contour": z_contour,
        "z_ratio": z_contour / mc.value,
    }
    path = out_dir / "verify_q.json"
    write_json(path, record)
    manifest.outputs.append(str(path))
    print(dumps(record))
    deviation = abs(z_contour - mc.value) / max(mc.std_error, 1e-300)
    return 0 if deviation <= 4.0 else 1


def _cmd_rigidity(args, out_dir: Path, manifest: Manifest) -> int:
    config = resolve_config(args, "rigidity")
    manifest.config = dataclasses.asdict(config)
    manifest.master_seed = config.master_seed
    epsilon = float(getattr(args, "epsilon", None) or DEFAULTS["epsilon"])
    outcome = run_rigidity_experiment(config, epsilon=epsilon)
    path = out_dir / "rigidity.csv"
    with path.open("w") as fh:
        fh.write("trial,seed,max_ratio,violations\n")
        for t, rep in enumerate(outcome.reports):
            fh.write(f"{t},{config.master_seed},{_fmt(rep.max_ratio)},{rep.violations}\n")
    manifest.outputs.append(str(path))
    record = {
        "epsilon": epsilon,
        "total_violations": outcome.total_violations,
        **_summary_record(outcome.summary),
    }
    spath = out_dir / "summary.json"
    write_json(spath, record)
    manifest.outputs.append(str(spath))
    print(dumps(record))
    return 0


def _cmd_campaign(args, command: str, out_dir: Path, manifest: Manifest) -> int:
    if command == "edge":
        config = resolve_config(args, "edge")
        rows = edge_rows(config)
        summary = summarize(np.array([stat for _, stat, _ in rows]))
        record = _summary_record(summary)
    else:
        probe = resolve_config(args, "high_fluct")
        N = probe.n1 + probe.n2
        rc = regime_constants(probe.beta, probe.n1 / N, probe.n2 / N, probe.spec.w4)
        mode = "high_fluct" if rc.regime == HIGH else "low_fluct"
        config = dataclasses.replace(probe, mode=mode)
        rows, failures = fluctuation_rows(config)
        stats = np.array([stat for _, stat, _ in rows])
        if mode == "high_fluct":
            summary = summarize(stats, rc.mu, rc.sigma2, failures=failures)
        else:
            summary = summarize(stats, failures=failures)
        record = _summary_record(summary)
        record["regime"] = rc.regime
        record["theory_mu"] = rc.mu
        record["theory_sigma2"] = rc.sigma2
        if getattr(args, "w4_check", False) and config.spec.kind != "rademacher":
            twin = dataclasses.replace(config, spec=make_distribution("rademacher"))
            twin_rows, twin_failures = fluctuation_rows(twin)
            twin_summary = summarize(
                np.array([s for _, s, _ in twin_rows]), failures=twin_failures
            )
            record["w4_check"] = {
                "rademacher_mean": twin_summary.mean,
                "rademacher_variance": twin_summary.variance,
                "mean_shift": twin_summary.mean - summary.mean,
            }
    manifest.config = dataclasses.asdict(config)
    manifest.master_seed = config.master_seed
    path = out_dir / "samples.csv"
    _write_samples_csv(path, config.master_seed, rows)
    manifest.outputs.append(str(path))
    spath = out_dir / "summary.json"
    write_json(spath, record)
    manifest.outputs.append(str(spath))
    print(dumps(record))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bssk",
        description="Numerical laboratory for the bipartite spherical SK model",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, beta=True, dims=True, seed=True, dist=True, out=True):
        if beta:
            p.add_argument("--beta", type=float, default=None, help="inverse temperature")
        if dims:
            p.add_argument("--n1", type=int, default=None, help="rows of the coupling matrix")
            p.add_argument("--n2", type=int, default=None, help="columns of the coupling matrix")
        if seed:
            p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        if dist:
            p.add_argument(
                "--dist", choices=KINDS, default=None, help="entry law (default gaussian)"
            )
        if out:
            p.add_argument("--out-dir", default=".", help="directory for run artifacts")

    p = sub.add_parser("theory", help="print the closed-form regime constants as JSON")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--r1", type=float, default=0.5, help="first ratio; r2 = 1 - r1")
    p.add_argument("--w4", type=float, default=3.0, help="fourth moment of the entry law")

    p = sub.add_parser("spectrum", help="sample a coupling matrix and dump its spectrum")
    common(p, beta=False)
    p.set_defaults(n1=200, n2=100, seed=0)

    p = sub.add_parser("saddle", help="solve the critical-point equation, print diagnostics")
    common(p, out=False)
    p.set_defaults(n1=200, n2=100, beta=1.0, seed=0)

    p = sub.add_parser("verify-q", help="tiny-instance oracle chain: contour vs sphere MC")
    common(p)
    p.set_defaults(n1=3, n2=2, beta=0.5, seed=42)
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples")

    for name in ("fluctuate", "edge", "rigidity"):
        p = sub.add_parser(name, help=f"run the {name} campaign")
        common(p)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--config", default=None, help="flat JSON config file")
        if name == "fluctuate":
            p.add_argument(
                "--w4-check",
                action="store_true",
                help="also run a rademacher twin and report the fourth-moment shift",
            )
        if name == "rigidity":
            p.add_argument("--epsilon", type=float, default=None)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "theory":
        try:
            return _cmd_theory(args)
        except BsskError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    if args.command == "saddle":
        try:
            return _cmd_saddle(args)
        except BsskError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    snapshot = {k: v for k, v in vars(args).items() if k != "command"}
    manifest = Manifest(args.command, snapshot, getattr(args, "seed", None))
    try:
        if args.command == "spectrum":
            code = _cmd_spectrum(args, out_dir, manifest)
        elif args.command == "verify-q":
            code = _cmd_verify_q(args, out_dir, manifest)
        elif args.command == "rigidity":
            code = _cmd_rigidity(args, out_dir, manifest)
        else:
            code = _cmd_campaign(args, args.command, out_dir, manifest)
    except ConfigError as exc:
        manifest.error = str(exc)
        manifest.write(out_dir)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BsskError as exc:
        manifest.error = str(exc)
        manifest.write(out_dir)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest.write(out_dir)
    return code


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))
