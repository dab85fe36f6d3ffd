"""Experiment runner: configures data, features and chains; writes CSV + JSON.

Subcommands mirror the task names; each run writes its artifacts into the
directory given by --out:

  cdf.csv         epsilon,cdf
  errors.csv      sample_index,error
  theory.csv      n,rho,quadrature,asymptotic,ratio          (equicorr_theory)
  theory_cdf.csv  epsilon,limit_cdf,simulated                (equicorr_theory)
  worst_case.csv  n,worst_case_error,typical_median_error    (worst_case)
  run.json        config snapshot, timestamps, output hashes, diagnostics

Exit codes: 0 ok, 2 config error, 3 data error, 4 infeasible version space,
5 numerical abort. The dataset root defaults to $VERSPACE_DATA_DIR.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, equicorr, estimator
from .data import (
    LabeledDataset,
    apply_standardization,
    load_idx,
    make_binary_task,
    mixture_mean,
    sample_gaussian_mixture,
    standardize,
    subsample,
)
from .estimator import (
    GaussianMixtureSpec,
    chain_errors,
    default_grid,
    error_cdf,
    population_errors_gaussian,
    worst_case_classifier,
    write_cdf_csv,
    write_errors_csv,
)
from .exceptions import (
    ChainNumericalError,
    ConfigError,
    DataError,
    InfeasibleConstraintsError,
    NumericalUnderflowError,
)
from .features import FeatureMap, build_constraints
from .sampler import ChainConfig, ConstraintSet, backend_name, sample_version_space

TASKS = ("image_linear", "image_rrf", "gaussian_linear", "equicorr_theory", "worst_case")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INFEASIBLE = 4
EXIT_NUMERICAL = 5


# ---------------------------------------------------------------------------
# configuration

def _take(cfg: dict, key: str, kind, default=None, required: bool = False):
    if key not in cfg:
        if required:
            raise ConfigError(f"missing required config key: {key!r}")
        return default
    val = cfg.pop(key)
    if kind is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"config key {key!r} must be {kind} (got {type(val).__name__})")
    return val


def _take_list(cfg: dict, key: str, item_kind, required: bool = False, default=None):
    val = _take(cfg, key, list, default=default, required=required)
    if val is None:
        return default
    out = []
    for i, item in enumerate(val):
        if item_kind is float and isinstance(item, int) and not isinstance(item, bool):
            item = float(item)
        if not isinstance(item, item_kind):
            raise ConfigError(f"config key {key!r}[{i}] must be {item_kind}")
        out.append(item)
    if not out:
        raise ConfigError(f"config key {key!r} must be a nonempty list")
    return out


def _reject_unknown(cfg: dict, context: str):
    if cfg:
        raise ConfigError(f"unknown config key(s) in {context}: {sorted(cfg)}")


@dataclass
class ExperimentConfig:
    """Parsed, validated run configuration for one task."""

    task: str
    seed: int = 0
    chains: int = 4
    threads: int = 1
    grid_points: int = 512
    grid_max: float = 1.0
    chain: dict = field(default_factory=lambda: {"n_samples": 10000, "warmup": 1000, "thinning": 10})
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict, task: Optional[str] = None) -> "ExperimentConfig":
        cfg = dict(raw)
        cfg_task = _take(cfg, "task", str, default=task)
        if cfg_task is None:
            raise ConfigError("no task given (config key 'task' or CLI subcommand)")
        if cfg_task not in TASKS:
            raise ConfigError(f"unknown task {cfg_task!r}; expected one of {TASKS}")
        if task is not None and cfg_task != task:
            raise ConfigError(f"config task {cfg_task!r} conflicts with subcommand {task!r}")

        seed = _take(cfg, "seed", int, default=0)
        chains = _take(cfg, "chains", int, default=4)
        threads = _take(cfg, "threads", int, default=1)
        grid_points = _take(cfg, "grid_points", int, default=512)
        grid_max = _take(cfg, "grid_max", float, default=1.0)
        chain_raw = _take(cfg, "chain", dict, default={})
        chain = {
            "n_samples": _take(chain_raw, "n_samples", int, default=10000),
            "warmup": _take(chain_raw, "warmup", int, default=1000),
            "thinning": _take(chain_raw, "thinning", int, default=10),
        }
        _reject_unknown(chain_raw, "chain")
        if chains < 1:
            raise ConfigError("chains must be >= 1")
        if grid_points < 2:
            raise ConfigError("grid_points must be >= 2")
        if not 0.0 < grid_max <= 1.0:
            raise ConfigError("grid_max must lie in (0, 1]")

        params = {}
        if cfg_task == "gaussian_linear":
            params["d"] = _take(cfg, "d", int, required=True)
            params["snr"] = _take(cfg, "snr", float, required=True)
            params["n"] = _take(cfg, "n", int, required=True)
            params["m"] = _take(cfg, "m", int, default=0)
            if params["d"] < 1 or params["snr"] <= 0:
                raise ConfigError("need d >= 1 and snr > 0")
            if not 0 < params["n"] < params["d"]:
                raise ConfigError("interpolation requires 0 < n < d")
        elif cfg_task in ("image_linear", "image_rrf", "worst_case"):
            for key in ("images", "labels", "test_images", "test_labels"):
                params[key] = _take(cfg, key, str, required=True)
            params["class_pos"] = _take(cfg, "class_pos", int, required=True)
            params["class_neg"] = _take(cfg, "class_neg", int, required=True)
            params["m"] = _take(cfg, "m", int, default=5000)
            params["standardize"] = _take(cfg, "standardize", bool, default=True)
            if cfg_task == "worst_case":
                params["n_values"] = _take_list(cfg, "n_values", int, required=True)
                params["typical_samples"] = _take(cfg, "typical_samples", int, default=2000)
                params["gd_max_iter"] = _take(cfg, "gd_max_iter", int, default=100000)
            else:
                params["n"] = _take(cfg, "n", int, required=True)
                if cfg_task == "image_rrf":
                    params["n_features"] = _take(cfg, "n_features", int, required=True)
                    params["standardize_features"] = _take(
                        cfg, "standardize_features", bool, default=False
                    )
                    if params["n"] >= params["n_features"]:
                        raise ConfigError("interpolation requires n < n_features")
        elif cfg_task == "equicorr_theory":
            params["n_values"] = _take_list(cfg, "n_values", int, required=True)
            if any(n < 2 for n in params["n_values"]):
                raise ConfigError("n_values must all be >= 2 (the asymptotic needs log n > 0)")
            params["rho_values"] = _take_list(cfg, "rho_values", float, required=True)
            params["cdf_n"] = _take(cfg, "cdf_n", int, default=200)
            params["cdf_rho"] = _take(cfg, "cdf_rho", float, default=0.5)
            params["cdf_draws"] = _take(cfg, "cdf_draws", int, default=100000)
        _reject_unknown(cfg, "config")
        return cls(
            task=cfg_task,
            seed=seed,
            chains=chains,
            threads=threads,
            grid_points=grid_points,
            grid_max=grid_max,
            chain=chain,
            params=params,
        )

    def snapshot(self) -> dict:
        return {
            "task": self.task,
            "seed": self.seed,
            "chains": self.chains,
            "threads": self.threads,
            "grid_points": self.grid_points,
            "grid_max": self.grid_max,
            "chain": dict(self.chain),
            **self.params,
        }


@dataclass
class RunRecord:
    """What a finished run produced and under which knobs."""

    config: dict
    started: str
    finished: str
    outputs: list
    diagnostics: dict

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "started": self.started,
            "finished": self.finished,
            "outputs": self.outputs,
            "diagnostics": self.diagnostics,
            "environment": {
                "package_version": __version__,
                "sampler_backend": backend_name(),
                "seed_scheme": "SeedSequence(seed, spawn_key): (0,)=data, (1,)=features, "
                "(2,i)=chain i, (3,)=theory simulation, (4,i)=worst-case fit i",
            },
        }


# ---------------------------------------------------------------------------
# helpers

def _seed_for(base_seed: int, *spawn_key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=spawn_key))


def _grid(config: ExperimentConfig) -> np.ndarray:
    return default_grid(config.grid_points, config.grid_max)


def _split_samples(total: int, chains: int) -> list[int]:
    base, extra = divmod(total, chains)
    return [base + (1 if i < extra else 0) for i in range(chains)]


def _run_chains(
    constraints: ConstraintSet, config: ExperimentConfig
) -> tuple[np.ndarray, list[np.ndarray], dict]:
    """Run the configured number of independent seeded chains, concatenated in order."""
    sizes = [m for m in _split_samples(config.chain["n_samples"], config.chains) if m > 0]

    def one(i_size):
        i, size = i_size
        chain_cfg = ChainConfig(
            n_samples=size,
            warmup=config.chain["warmup"],
            thinning=config.chain["thinning"],
            seed=config.seed,
        )
        rng = _seed_for(config.seed, 2, i)
        return sample_version_space(constraints, chain_cfg, rng=rng)

    jobs = list(enumerate(sizes))
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(j) for j in jobs]
    samples = np.concatenate([r.samples for r in results], axis=0)
    per_chain = [r.samples for r in results]
    diag = {
        "chains": len(results),
        "n_steps_per_chain": [r.diagnostics["n_steps"] for r in results],
        "n_projections": int(sum(r.diagnostics["n_projections"] for r in results)),
    }
    return samples, per_chain, diag


def _chain_agreement(per_chain_errors: list[np.ndarray], grid: np.ndarray) -> float:
    """Largest pairwise sup-distance between per-chain error CDFs."""
    if len(per_chain_errors) < 2:
        return 0.0
    cdfs = [error_cdf(e, grid).cdf for e in per_chain_errors]
    worst = 0.0
    for i in range(len(cdfs)):
        for j in range(i + 1, len(cdfs)):
            worst = max(worst, float(np.abs(cdfs[i] - cdfs[j]).max()))
    return worst


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _resolve_data_path(raw: str) -> Path:
    p = Path(raw)
    if not p.is_absolute():
        root = os.environ.get("VERSPACE_DATA_DIR", ".")
        p = Path(root) / p
    if not p.exists():
        raise DataError(f"data file not found: {p}")
    return p


def _load_image_task(params: dict) -> tuple[LabeledDataset, LabeledDataset]:
    train_images = load_idx(_resolve_data_path(params["images"]))
    train_labels = load_idx(_resolve_data_path(params["labels"]))
    test_images = load_idx(_resolve_data_path(params["test_images"]))
    test_labels = load_idx(_resolve_data_path(params["test_labels"]))
    train = make_binary_task(train_images, train_labels, params["class_pos"], params["class_neg"])
    test = make_binary_task(test_images, test_labels, params["class_pos"], params["class_neg"])
    return train, test


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines += [
        ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row)
        for row in rows
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# task runners

def _run_sampling_task(config: ExperimentConfig, out: Path) -> dict:
    params = config.params
    grid = _grid(config)
    knobs: dict = {}

    if config.task == "gaussian_linear":
        rng_data = _seed_for(config.seed, 0)
        train = sample_gaussian_mixture(params["d"], params["snr"], params["n"], rng_data)
        fmap = FeatureMap.linear(params["d"])
        spec = GaussianMixtureSpec(mu=mixture_mean(params["d"], params["snr"]))
        if params["m"] > 0:
            test = sample_gaussian_mixture(params["d"], params["snr"], params["m"], rng_data)
        else:
            test = None
    else:
        train_full, test_full = _load_image_task(params)
        rng_data = _seed_for(config.seed, 0)
        train = subsample(train_full, params["n"], rng_data)
        test = subsample(test_full, params["m"], rng_data)
        if params["standardize"]:
            train = standardize(train)
            test = apply_standardization(test, train.standardization)
        knobs["standardize"] = params["standardize"]
        if config.task == "image_rrf":
            rng_features = _seed_for(config.seed, 1)
            fmap = FeatureMap.random_relu(train.dim, params["n_features"], rng_features)
            knobs["alpha"] = params["n"] / params["n_features"]
            knobs["standardize_features"] = params["standardize_features"]
            if params["standardize_features"]:
                # standardize in feature space, then continue with a linear map
                feat_train = standardize(
                    LabeledDataset(points=fmap.apply(train.points), labels=train.labels)
                )
                test = LabeledDataset(
                    points=apply_standardization(
                        LabeledDataset(points=fmap.apply(test.points), labels=test.labels),
                        feat_train.standardization,
                    ).points,
                    labels=test.labels,
                )
                train = feat_train
                fmap = FeatureMap.linear(train.dim)
        else:
            fmap = FeatureMap.linear(train.dim)
        if params["n"] >= fmap.output_dim:
            raise ConfigError("interpolation requires n < feature dimension")
        spec = None

    constraints = build_constraints(train, fmap)
    samples, per_chain, diag = _run_chains(constraints, config)

    if config.task == "gaussian_linear" and test is None:
        errors = population_errors_gaussian(samples, spec)
        per_chain_errors = [population_errors_gaussian(s, spec) for s in per_chain]
        n_test = 0
    else:
        errors = chain_errors(samples, test, fmap)
        per_chain_errors = [chain_errors(s, test, fmap) for s in per_chain]
        n_test = test.n

    cdf = error_cdf(errors, grid, n_test=n_test)
    write_cdf_csv(cdf, out / "cdf.csv")
    write_errors_csv(errors, out / "errors.csv")
    diag["chain_cdf_agreement"] = _chain_agreement(per_chain_errors, grid)
    diag["median_error"] = float(np.median(errors))
    diag["knobs"] = knobs
    return diag


def _run_equicorr_theory(config: ExperimentConfig, out: Path) -> dict:
    params = config.params
    rows = equicorr.theory_table(params["n_values"], params["rho_values"])
    _write_csv(
        out / "theory.csv",
        "n,rho,quadrature,asymptotic,ratio",
        [(r["n"], r["rho"], r["quadrature"], r["asymptotic"], r["ratio"]) for r in rows],
    )
    model = equicorr.EquicorrModel(n=params["cdf_n"], rho=params["cdf_rho"])
    grid = _grid(config)
    sim = equicorr.simulate_equicorr_rn(model, params["cdf_draws"], grid, _seed_for(config.seed, 3))
    lim = np.array([equicorr.limit_cdf(model, e) for e in grid])
    _write_csv(
        out / "theory_cdf.csv",
        "epsilon,limit_cdf,simulated",
        list(zip(grid.tolist(), lim.tolist(), sim.cdf.tolist())),
    )
    return {
        "cdf_model": {"n": model.n, "rho": model.rho},
        "cdf_sup_gap": float(np.abs(sim.cdf - lim).max()),
    }


def _run_worst_case(config: ExperimentConfig, out: Path) -> dict:
    params = config.params
    train_full, test_full = _load_image_task(params)
    grid = _grid(config)
    rows = []
    gd_info = []
    for idx, n in enumerate(params["n_values"]):
        rng_data = _seed_for(config.seed, 0, idx)
        train = subsample(train_full, n, rng_data)
        test = subsample(test_full, params["m"], rng_data)
        if params["standardize"]:
            train = standardize(train)
            test = apply_standardization(test, train.standardization)
        fmap = FeatureMap.linear(train.dim)

        rng_fit = _seed_for(config.seed, 4, idx)
        w, info = worst_case_classifier(train, rng_fit, max_iter=params["gd_max_iter"])
        worst_err = estimator.empirical_error(w, test, fmap)

        constraints = build_constraints(train, fmap)
        chain_cfg = ChainConfig(
            n_samples=params["typical_samples"],
            warmup=config.chain["warmup"],
            thinning=config.chain["thinning"],
            seed=config.seed,
        )
        chain = sample_version_space(constraints, chain_cfg, rng=_seed_for(config.seed, 2, idx))
        typical = chain_errors(chain.samples, test, fmap)
        rows.append((n, float(worst_err), float(np.median(typical))))
        gd_info.append(
            {
                "n": n,
                "train_accuracy": info.train_accuracy,
                "bad_accuracy": info.bad_accuracy,
                "iterations": info.iterations,
                "converged": info.converged,
                "warning": info.warning,
                "n_bad": info.n_bad,
            }
        )
    _write_csv(out / "worst_case.csv", "n,worst_case_error,typical_median_error", rows)
    return {
        "gd": gd_info,
        "knobs": {
            "standardize": params["standardize"],
            "bad_points": "uniform(0,1) nonnegative combinations of label-flipped "
            "training points, rescaled to the mean training norm, labeled +1",
            "gd_lr": "0.1 / operator norm of the augmented data matrix",
            "gd_max_iter": params["gd_max_iter"],
        },
    }


def run_experiment(config: ExperimentConfig, out_dir) -> RunRecord:
    """Execute one configured experiment, writing all artifacts into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    if config.task == "equicorr_theory":
        diagnostics = _run_equicorr_theory(config, out)
    elif config.task == "worst_case":
        diagnostics = _run_worst_case(config, out)
    else:
        diagnostics = _run_sampling_task(config, out)
    finished = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    outputs = [
        {"path": p.name, "sha256": _sha256(p)}
        for p in sorted(out.glob("*.csv"))
    ]
    record = RunRecord(
        config=config.snapshot(),
        started=started,
        finished=finished,
        outputs=outputs,
        diagnostics=diagnostics,
    )
    (out / "run.json").write_text(
        json.dumps(record.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return record


# ---------------------------------------------------------------------------
# entry point

def _parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="verspace",
        description="Estimate test-error distributions of interpolating classifiers.",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        p = sub.add_parser(task, help=f"run the {task} experiment")
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--out", type=str, required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=None, help="cap on parallel chains")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = _parse_args(sys.argv[1:] if argv is None else argv)
    try:
        raw = {}
        if args.config is not None:
            cfg_path = Path(args.config)
            if not cfg_path.exists():
                raise ConfigError(f"config file not found: {cfg_path}")
            try:
                raw = json.loads(cfg_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as e:
                raise ConfigError(f"config is not valid JSON: {e}") from e
            if not isinstance(raw, dict):
                raise ConfigError("config must be a JSON object")
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.threads is not None:
            raw["threads"] = args.threads
        config = ExperimentConfig.from_dict(raw, task=args.task)
        record = run_experiment(config, args.out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except InfeasibleConstraintsError as e:
        print(f"infeasible version space: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ChainNumericalError, NumericalUnderflowError) as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"wrote {len(record.outputs)} file(s) to {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
