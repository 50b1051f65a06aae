"""Monte Carlo study of the GGN maximum-likelihood estimator.

For each scenario and sample size ``N``, replication ``r`` draws a sample
from stream ``(base_seed, r)``, fits it, and the successful fits are
reduced to a mean estimate and a mean squared error per parameter.  The
same replication index reuses the same stream across sample sizes, so the
comparison between sizes uses common random numbers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import DomainError, GGNError
from .estimation import FitOptions, fit_ggn
from .ggn import GgnParams
from .sampling import GENERATOR_NAME, StreamSpec, ggn_sample

__all__ = [
    "StudyConfig",
    "ScenarioSummary",
    "StudyResult",
    "run_study",
    "run_plan",
    "load_plan",
    "plan_from_dict",
    "shipped_config",
    "PARAM_ORDER",
]

# Column order of the exported tables.
PARAM_ORDER = ("a", "mu", "sigma", "s")
_FIT_ORDER = ("mu", "sigma", "s", "a")
MIN_REPORTED_REPLICATIONS = 50


@dataclass(frozen=True)
class StudyConfig:
    true_params: GgnParams
    sample_sizes: tuple
    replications: int
    base_seed: int = 0
    scenario_label: str = ""
    fit_starts: int = 1

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sample_sizes)
        if not sizes or min(sizes) < 5:
            raise DomainError("sample_sizes must be a nonempty list of integers >= 5")
        if int(self.replications) < 1:
            raise DomainError("replications must be positive")
        object.__setattr__(self, "sample_sizes", sizes)
        if not self.scenario_label:
            p = self.true_params
            label = f"a={p.a:g},mu={p.mu:g},sigma={p.sigma:g},s={p.s:g}"
            object.__setattr__(self, "scenario_label", label)

    @property
    def mse_reportable(self):
        """MSEs are only meaningful from 50 replications upward."""
        return self.replications >= MIN_REPORTED_REPLICATIONS


@dataclass(frozen=True)
class ScenarioSummary:
    """Aggregates for one (scenario, N) cell; vectors in ``PARAM_ORDER``."""

    scenario: str
    true_params: GgnParams
    n: int
    mean: tuple
    mse: tuple
    failures: int
    replications_used: int
    replications: int

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "true_params": dict(zip(_FIT_ORDER, self.true_params.as_tuple())),
            "n": self.n,
            "mean": dict(zip(PARAM_ORDER, self.mean)),
            "mse": dict(zip(PARAM_ORDER, self.mse)),
            "failures": self.failures,
            "replications_used": self.replications_used,
            "replications": self.replications,
        }


@dataclass(frozen=True)
class StudyResult:
    rows: tuple
    metadata: dict = field(default_factory=dict)

    def row(self, scenario, n) -> ScenarioSummary:
        for r in self.rows:
            if r.scenario == scenario and r.n == n:
                return r
        raise KeyError((scenario, n))

    def to_dict(self):
        return {"metadata": self.metadata, "rows": [r.to_dict() for r in self.rows]}

    def to_csv(self) -> str:
        """One row per (scenario, N): true values, then mean and MSE pairs."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = ["scenario"] + [f"true_{k}" for k in PARAM_ORDER] + ["N"]
        for k in PARAM_ORDER:
            head += [f"mean_{k}", f"mse_{k}"]
        w.writerow(head + ["failures", "replications_used"])
        for r in self.rows:
            truth = dict(zip(_FIT_ORDER, r.true_params.as_tuple()))
            line = [r.scenario] + [repr(truth[k]) for k in PARAM_ORDER] + [r.n]
            for m, e in zip(r.mean, r.mse):
                line += [repr(m), repr(e)]
            w.writerow(line + [r.failures, r.replications_used])
        return buf.getvalue()

    def to_table(self) -> str:
        """Fixed-width ``mean (mse)`` layout."""
        lines = [f"{'scenario':<34}{'N':>5}  " + "".join(f"{k:>20}" for k in PARAM_ORDER) + f"{'fail':>6}"]
        for r in self.rows:
            cells = "".join(f"{m:>10.3f} ({e:>6.3f})" for m, e in zip(r.mean, r.mse))
            lines.append(f"{r.scenario:<34}{r.n:>5}  {cells}{r.failures:>6}")
        return "\n".join(lines)


def _replicate(args):
    params, n, seed, index, starts = args
    sample = ggn_sample(params, n, StreamSpec(seed, index))
    try:
        fit = fit_ggn(sample, FitOptions(starts=starts))
    except (GGNError, ArithmeticError):
        return None  # counted as a failure
    return fit.estimates if fit.converged else None


def _summarize(cfg, n, outcomes):
    truth = np.array(cfg.true_params.as_tuple())
    ok = [np.array(e, dtype=float) for e in outcomes if e is not None]
    order = [_FIT_ORDER.index(k) for k in PARAM_ORDER]
    if ok:
        est = np.vstack(ok)
        mean = [math.fsum(est[:, j]) / len(ok) for j in order]
        mse = [math.fsum((est[:, j] - truth[j]) ** 2) / len(ok) for j in order]
    else:
        mean = mse = [float("nan")] * 4
    return ScenarioSummary(
        cfg.scenario_label, cfg.true_params, n, tuple(mean), tuple(mse),
        len(outcomes) - len(ok), len(ok), len(outcomes),
    )


def run_study(cfg: StudyConfig, *, workers: int = 1) -> StudyResult:
    """Run one scenario over all of its sample sizes."""
    return run_plan([cfg], workers=workers)


def run_plan(configs, *, workers: int = 1) -> StudyResult:
    """Run several scenarios; rows come out in configuration order."""
    rows = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for cfg in configs:
            for n in cfg.sample_sizes:
                jobs = [(cfg.true_params, n, cfg.base_seed, r, cfg.fit_starts)
                        for r in range(cfg.replications)]
                outcomes = list(pool.map(_replicate, jobs, chunksize=8)) if pool else list(map(_replicate, jobs))
                rows.append(_summarize(cfg, n, outcomes))
    finally:
        if pool:
            pool.shutdown()
    meta = {
        "generator": GENERATOR_NAME,
        "stream_index": "replication number",
        "mse": "mean of squared deviation from truth over converged fits",
        "scenarios": [
            {"label": c.scenario_label, "base_seed": c.base_seed, "replications": c.replications,
             "sample_sizes": list(c.sample_sizes), "fit_starts": c.fit_starts,
             "mse_reportable": c.mse_reportable}
            for c in configs
        ],
    }
    return StudyResult(tuple(rows), meta)


def plan_from_dict(d) -> list:
    """Build study configurations from a plan dictionary.

    Expected keys: ``scenarios`` (list of ``{"label", "mu", "sigma", "s",
    "a"}``), ``sample_sizes``, ``replications``, optional ``base_seed`` and
    ``fit_starts``.
    """
    try:
        scenarios = d["scenarios"]
        sizes = d["sample_sizes"]
        reps = int(d["replications"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"invalid study plan: {exc}") from exc
    seed = int(d.get("base_seed", 0))
    starts = int(d.get("fit_starts", 1))
    out = []
    for sc in scenarios:
        try:
            p = GgnParams(float(sc.get("mu", 0.0)), float(sc.get("sigma", 1.0)), float(sc["s"]), float(sc["a"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"invalid scenario {sc!r}: {exc}") from exc
        out.append(StudyConfig(p, tuple(sizes), reps, seed, sc.get("label", ""), starts))
    return out


def load_plan(path) -> list:
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: not valid JSON ({exc})") from exc
    return plan_from_dict(d)


def shipped_config(name="shape_grid_m200.json") -> dict:
    """One of the plans bundled with the package."""
    text = resources.files("ggnlib").joinpath("data", name).read_text(encoding="utf-8")
    return json.loads(text)
