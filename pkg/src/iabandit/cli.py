"""Command-line entry point: config parsing, experiment dispatch, CSV/JSON
output.

Every experiment writes one CSV (schema documented below and in the
README) plus a ``manifest.json`` echoing the full resolved configuration,
the seed and the package version, so any output file can be regenerated
byte-identically from the manifest alone. dB values are converted to
linear power here; the engine works in linear units throughout.

CSV schemas (UTF-8, header row, '.' decimal separator):

* regret_vs_n.csv:      slot,policy,mean_regret,stderr,runs
* regret_vs_p.csv:      states,policy,mean_regret,stderr,runs
* sumrate_vs_power.csv: power_db,policy,mean_sum_rate,stderr,runs
* chordal_cdf.csv:      distance,policy,cdf,stderr,runs
* distributed_vs_combinational.csv: power_db,policy,mean_sum_rate,stderr,runs
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, engine
from .channel import ScenarioConfig, generate_pool
from .engine import Policy, make_reward_context, run_cell, true_means_from_context
from .errors import ConfigError, ParseError, ValidationError
from .ia import evaluate_pool

EXPERIMENTS = (
    "regret_vs_n",
    "regret_vs_P",
    "sumrate_vs_power",
    "chordal_cdf",
    "distributed_vs_combinational",
)

POLICY_NAMES = ("oracle", "klucb", "ucb1", "random", "conventional")

_EXPERIMENT_DEFAULTS = {
    # (slots, policies, reward)
    "regret_vs_n": (10_000, ["oracle", "klucb", "ucb1", "random"], "sumrate"),
    "regret_vs_P": (20_000, ["klucb", "ucb1", "random"], "sumrate"),
    "sumrate_vs_power": (30_000, list(POLICY_NAMES), "sumrate"),
    "chordal_cdf": (5_000, ["oracle", "klucb", "ucb1", "conventional"], "chordal"),
    "distributed_vs_combinational": (5_000, ["oracle", "klucb", "random"], "sumrate"),
}

_KNOWN_KEYS = {
    "experiment", "states", "samples", "seed", "channel_model", "policies",
    "slots", "runs", "snr_db", "snr_grid_db", "states_grid", "mode",
    "reward", "state_powers", "out", "workers", "cdf_grid_points",
}


@dataclass
class ExperimentSpec:
    """Fully resolved experiment description."""

    experiment: str
    states: int = 4
    samples: int = 1000
    seed: int = 42
    channel_model: str = "independent"
    policies: list[str] = field(default_factory=list)
    slots: int = 0
    runs: int = 100
    snr_db: float = 20.0
    snr_grid_db: list[float] = field(default_factory=lambda: [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
    states_grid: list[int] = field(default_factory=lambda: [2, 4])
    mode: str = "combinational"
    reward: str = ""
    state_powers: list[list[float]] | None = None
    out: str = "results"
    workers: int = 1
    cdf_grid_points: int = 121

    def validate(self) -> "ExperimentSpec":
        problems = []
        if self.experiment not in EXPERIMENTS:
            problems.append(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.states < 1:
            problems.append(f"states (P) must be >= 1, got {self.states}")
        if self.samples < 1:
            problems.append(f"samples must be >= 1, got {self.samples}")
        if self.slots < 1:
            problems.append(f"slots must be >= 1, got {self.slots}")
        if self.runs < 1:
            problems.append(f"runs must be >= 1, got {self.runs}")
        if self.channel_model not in ("independent", "scaled"):
            problems.append(f"channel_model must be independent|scaled, got {self.channel_model!r}")
        for p in self.policies:
            if p not in POLICY_NAMES:
                problems.append(f"unknown policy {p!r}; valid: {POLICY_NAMES}")
        if not self.policies:
            problems.append("at least one policy is required")
        if self.reward not in ("sumrate", "chordal"):
            problems.append(f"reward must be sumrate|chordal, got {self.reward!r}")
        if self.mode not in ("combinational", "distributed"):
            problems.append(f"mode must be combinational|distributed, got {self.mode!r}")
        if self.mode == "distributed" and self.reward != "chordal":
            problems.append("distributed mode learns from chordal rewards; set reward='chordal'")
        if self.mode == "distributed" and "conventional" in self.policies:
            problems.append("distributed mode supports oracle|ucb1|klucb|random only")
        grid = self.snr_grid_db
        if len(grid) == 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            problems.append(f"snr_grid_db must be non-empty and strictly increasing, got {grid}")
        if self.experiment == "regret_vs_P":
            if len(self.states_grid) == 0 or any(s < 1 for s in self.states_grid):
                problems.append(f"states_grid must be non-empty positive ints, got {self.states_grid}")
        if self.workers < 1:
            problems.append(f"workers must be >= 1, got {self.workers}")
        if self.cdf_grid_points < 2:
            problems.append(f"cdf_grid_points must be >= 2, got {self.cdf_grid_points}")
        if problems:
            raise ValidationError("; ".join(problems))
        return self

    def scenario(self, states: int | None = None) -> ScenarioConfig:
        powers = None
        if self.state_powers is not None and (states is None or states == self.states):
            powers = np.asarray(self.state_powers, dtype=float)
        return ScenarioConfig(
            n_states=states if states is not None else self.states,
            state_powers=powers,
            n_samples=self.samples,
            seed=self.seed,
            channel_model=self.channel_model,
        )


def _apply_experiment_defaults(values: dict) -> dict:
    exp = values.get("experiment")
    if exp in _EXPERIMENT_DEFAULTS:
        slots, policies, reward = _EXPERIMENT_DEFAULTS[exp]
        values.setdefault("slots", slots)
        values.setdefault("policies", list(policies))
        values.setdefault("reward", reward)
    return values


def parse_config(path: str | Path) -> ExperimentSpec:
    """Load and validate a TOML experiment file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read config file {path}: {exc}") from None
    try:
        values = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return build_spec(values)


def build_spec(values: dict) -> ExperimentSpec:
    """Resolve a key/value mapping into a validated ExperimentSpec."""
    unknown = set(values) - _KNOWN_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    if "experiment" not in values:
        raise ValidationError("config must set 'experiment'")
    values = _apply_experiment_defaults(dict(values))
    try:
        spec = ExperimentSpec(**values)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None
    return spec.validate()


def serialize_spec(spec: ExperimentSpec) -> dict:
    """Plain-dict form of a spec; build_spec(serialize_spec(s)) == s."""
    d = asdict(spec)
    if d["state_powers"] is None:
        del d["state_powers"]
    return d


def _policy(name: str, divergence: str = "exp") -> Policy:
    if name == "conventional":
        return Policy("fixed", fixed_state=0)
    return Policy(name, divergence=divergence)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


# --------------------------------------------------------------------------
# experiment implementations


def _experiment_regret_vs_n(spec: ExperimentSpec):
    pool = generate_pool(spec.scenario())
    tables = evaluate_pool(pool)
    p_tx = 10.0 ** (spec.snr_db / 10.0)
    ctx = make_reward_context(tables, spec.reward, p_tx, spec.states)
    means = true_means_from_context(ctx)
    rows = []
    resamples = 0
    for name in spec.policies:
        cell = run_cell(
            ctx, _policy(name), spec.slots, spec.runs, spec.seed,
            means=means, mode=spec.mode, keep_curves=True, workers=spec.workers,
        )
        resamples += cell.n_resampled
        for t in range(spec.slots):
            rows.append((t + 1, cell.policy_label, float(cell.regret_curve[t]),
                         float(cell.regret_curve_stderr[t]), spec.runs))
    rows.sort(key=lambda r: (r[0], r[1]))
    return "regret_vs_n.csv", ["slot", "policy", "mean_regret", "stderr", "runs"], rows, {
        "n_degenerate_cells": tables.n_degenerate, "n_resampled": resamples,
        "best_arm": means.best_arm, "mu_star": means.mu_star, "r_max": ctx.r_max,
        "r_max_total": ctx.r_max_total,
    }


def _experiment_regret_vs_p(spec: ExperimentSpec):
    p_tx = 10.0 ** (spec.snr_db / 10.0)
    rows = []
    extra = {"n_degenerate_cells": 0, "n_resampled": 0}
    for vi, n_states in enumerate(spec.states_grid):
        pool = generate_pool(spec.scenario(states=n_states))
        tables = evaluate_pool(pool)
        extra["n_degenerate_cells"] += tables.n_degenerate
        ctx = make_reward_context(tables, spec.reward, p_tx, n_states)
        means = true_means_from_context(ctx)
        for name in spec.policies:
            cell = run_cell(
                ctx, _policy(name), spec.slots, spec.runs, spec.seed,
                axis_index=vi, means=means, mode=spec.mode, workers=spec.workers,
            )
            extra["n_resampled"] += cell.n_resampled
            rows.append((n_states, cell.policy_label, cell.mean_final_regret,
                         cell.stderr_final_regret, spec.runs))
    return "regret_vs_p.csv", ["states", "policy", "mean_regret", "stderr", "runs"], rows, extra


def _experiment_sumrate_vs_power(spec: ExperimentSpec):
    pool = generate_pool(spec.scenario())
    tables = evaluate_pool(pool)
    rows = []
    extra = {"n_degenerate_cells": tables.n_degenerate, "n_resampled": 0}
    for vi, power_db in enumerate(spec.snr_grid_db):
        ctx = make_reward_context(tables, spec.reward, 10.0 ** (power_db / 10.0), spec.states)
        means = true_means_from_context(ctx)
        for name in spec.policies:
            cell = run_cell(
                ctx, _policy(name), spec.slots, spec.runs, spec.seed,
                axis_index=vi, means=means, mode=spec.mode, workers=spec.workers,
            )
            extra["n_resampled"] += cell.n_resampled
            rows.append((float(power_db), cell.policy_label, cell.mean_sum_rate,
                         cell.stderr_sum_rate, spec.runs))
    return "sumrate_vs_power.csv", ["power_db", "policy", "mean_sum_rate", "stderr", "runs"], rows, extra


def _experiment_chordal_cdf(spec: ExperimentSpec):
    pool = generate_pool(spec.scenario())
    tables = evaluate_pool(pool)
    p_tx = 10.0 ** (spec.snr_db / 10.0)
    ctx = make_reward_context(tables, "chordal", p_tx, spec.states)
    means = true_means_from_context(ctx)
    grid = np.linspace(0.0, 3.0, spec.cdf_grid_points)
    rows = []
    extra = {"n_degenerate_cells": tables.n_degenerate, "n_resampled": 0}
    for name in spec.policies:
        cell = run_cell(
            ctx, _policy(name), spec.slots, spec.runs, spec.seed,
            means=means, mode=spec.mode, keep_chordal=True, workers=spec.workers,
        )
        extra["n_resampled"] += cell.n_resampled
        # per-run empirical CDF on the grid, then mean/stderr across runs
        per_run = (cell.chordal_values[:, :, None] <= grid[None, None, :]).mean(axis=1)
        mean_cdf = per_run.mean(axis=0)
        stderr = per_run.std(axis=0, ddof=1) / np.sqrt(spec.runs) if spec.runs > 1 else np.zeros_like(mean_cdf)
        for g, c, s in zip(grid, mean_cdf, stderr):
            rows.append((float(g), cell.policy_label, float(c), float(s), spec.runs))
    return "chordal_cdf.csv", ["distance", "policy", "cdf", "stderr", "runs"], rows, extra


def _experiment_dist_vs_comb(spec: ExperimentSpec):
    pool = generate_pool(spec.scenario())
    tables = evaluate_pool(pool)
    ctx_ch = make_reward_context(tables, "chordal", 1.0, spec.states)
    means_ch = true_means_from_context(ctx_ch)
    rows = []
    extra = {"n_degenerate_cells": tables.n_degenerate, "n_resampled": 0}
    for vi, power_db in enumerate(spec.snr_grid_db):
        p_tx = 10.0 ** (power_db / 10.0)
        ctx_sr = make_reward_context(tables, "sumrate", p_tx, spec.states)
        means_sr = true_means_from_context(ctx_sr)
        ctx_ch_p = make_reward_context(tables, "chordal", p_tx, spec.states)
        for name in spec.policies:
            cell = run_cell(
                ctx_sr, _policy(name), spec.slots, spec.runs, spec.seed,
                axis_index=vi, means=means_sr, workers=spec.workers,
            )
            extra["n_resampled"] += cell.n_resampled
            rows.append((float(power_db), cell.policy_label, cell.mean_sum_rate,
                         cell.stderr_sum_rate, spec.runs))
        # the distributed counterpart of KL-UCB, learning per-receiver chordal
        cell = run_cell(
            ctx_ch_p, Policy("klucb"), spec.slots, spec.runs, spec.seed,
            axis_index=vi, means=means_ch, mode="distributed", workers=spec.workers,
        )
        extra["n_resampled"] += cell.n_resampled
        rows.append((float(power_db), "klucb_distributed", cell.mean_sum_rate,
                     cell.stderr_sum_rate, spec.runs))
    return (
        "distributed_vs_combinational.csv",
        ["power_db", "policy", "mean_sum_rate", "stderr", "runs"],
        rows,
        extra,
    )


_RUNNERS = {
    "regret_vs_n": _experiment_regret_vs_n,
    "regret_vs_P": _experiment_regret_vs_p,
    "sumrate_vs_power": _experiment_sumrate_vs_power,
    "chordal_cdf": _experiment_chordal_cdf,
    "distributed_vs_combinational": _experiment_dist_vs_comb,
}


def run_experiment(spec: ExperimentSpec) -> dict:
    """Execute one experiment; writes its CSV and manifest, returns the
    manifest dict."""
    spec.validate()
    out_dir = Path(spec.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    csv_name, header, rows, extra = _RUNNERS[spec.experiment](spec)
    _write_csv(out_dir / csv_name, header, rows)
    manifest = {
        "experiment": spec.experiment,
        "config": serialize_spec(spec),
        "seed": spec.seed,
        "code_version": __version__,
        "outputs": {csv_name: header},
        "arms": spec.states**3,
        "wall_time_s": round(time.perf_counter() - t0, 3),
        **extra,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


# --------------------------------------------------------------------------
# argument handling


def _parse_snr(text: str) -> tuple[float | None, list[float] | None]:
    """'20' -> single SNR; 'a:b:step' -> inclusive grid."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("expected '<start>:<stop>:<step>'")
        a, b, step = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise argparse.ArgumentTypeError("need stop >= start and step > 0")
        n = int(round((b - a) / step))
        return None, [a + i * step for i in range(n + 1)]
    return float(text), None


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iabandit",
        description="Bandit-driven antenna-state selection for interference "
        "alignment: run one experiment and write CSV + manifest.",
    )
    parser.add_argument("--config", help="TOML experiment file (flags override it)")
    parser.add_argument("--experiment", choices=EXPERIMENTS, help="experiment kind")
    parser.add_argument("--policy", action="append", choices=POLICY_NAMES,
                        help="policy to run (repeatable)")
    parser.add_argument("--states", type=int, help="antenna states P per receiver (default 4)")
    parser.add_argument("--slots", type=int, help="time slots per run (default per experiment)")
    parser.add_argument("--runs", type=int, help="independent runs to average (default 100)")
    parser.add_argument("--seed", type=int, help="master seed (default 42)")
    parser.add_argument("--samples", type=int, help="channel samples per (link, state) (default 1000)")
    parser.add_argument("--snr-db", type=_parse_snr, metavar="DB|A:B:STEP",
                        help="single SNR in dB, or a grid 'start:stop:step' for sweeps")
    parser.add_argument("--mode", choices=("combinational", "distributed"),
                        help="one controller over P^K arms, or one per receiver")
    parser.add_argument("--reward", choices=("sumrate", "chordal"), help="reward metric")
    parser.add_argument("--channel-model", choices=("independent", "scaled"),
                        dest="channel_model", help="per-state channel generation model")
    parser.add_argument("--workers", type=int, help="run-batch chunks executed in parallel")
    parser.add_argument("--out", help="output directory (default 'results')")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)

    values: dict = {}
    try:
        if args.config:
            spec = parse_config(args.config)
            values = serialize_spec(spec)
        for key in ("experiment", "states", "slots", "runs", "seed", "samples",
                    "mode", "reward", "channel_model", "workers", "out"):
            v = getattr(args, key)
            if v is not None:
                values[key] = v
        if args.policy:
            values["policies"] = list(args.policy)
        if args.snr_db is not None:
            single, grid = args.snr_db
            if single is not None:
                values["snr_db"] = single
            if grid is not None:
                values["snr_grid_db"] = grid
        if "experiment" not in values:
            parser.error("an experiment is required (--experiment or --config)")
        # let experiment defaults fill anything the file/flags left unset
        base = {k: v for k, v in values.items() if k in _KNOWN_KEYS}
        spec = build_spec(base)
    except (ParseError, ValidationError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        manifest = run_experiment(spec)
    except Exception as exc:  # runtime failure: machine-readable record
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1
    print(json.dumps({"ok": True, "out": spec.out, "wall_time_s": manifest["wall_time_s"]}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
