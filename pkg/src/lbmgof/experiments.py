"""Monte-Carlo studies on synthetic 4x3 latent block models.

Three studies are available:

* ``realizable`` -- fit the true (4, 3) structure and compare the
  distribution of T with TW1 (Q-Q data, tail exceedance, KS distance);
* ``unrealizable`` -- fit too few clusters and track the growth of T with n;
* ``accuracy`` -- run the sequential selection on the mean-shrinkage family
  and count how often (4, 3) is selected.

Each trial draws its data from its own seed, derived from the base seed
and the cell it belongs to, so any subset of trials can be rerun alone and
reports are byte-for-byte reproducible.
"""

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import __version__
from .coclustering import align_labels, ward_cocluster
from .errors import EmptySample, LBMError
from .generator import (
    INTERPOLATION_CENTER,
    Family,
    GeneratorSpec,
    generate,
    interpolate_means,
    preset_params,
    trial_seed,
)
from .gof import TestConfig, sequential_select, test_statistic
from .tracy_widom import default_table, tw1_cdf, tw1_upper_quantile

log = logging.getLogger(__name__)

TRUE_K, TRUE_H = 4, 3
EXCEEDANCE_ALPHAS = (0.01, 0.05, 0.1)
KS_CRITICAL = {"0.01": 1.63, "0.05": 1.36}
DEFAULT_HYPOTHESES = ((1, 1), (3, 3))


class Study(str, Enum):
    REALIZABLE = "realizable"
    UNREALIZABLE = "unrealizable"
    ACCURACY = "accuracy"


_STUDY_KEY = {Study.REALIZABLE: 0, Study.UNREALIZABLE: 1, Study.ACCURACY: 2}


@dataclass(frozen=True)
class ExperimentPlan:
    study: Study
    family: Family = Family.GAUSSIAN
    size_grid: tuple = ()
    trials: int = 100
    alpha: float = 0.01
    t_grid: tuple = ()
    base_seed: int = 0
    hypotheses: tuple = DEFAULT_HYPOTHESES
    L_max: int = 12
    trial_start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "study", Study(self.study))
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "size_grid", tuple((int(n), int(p)) for n, p in self.size_grid))
        object.__setattr__(self, "t_grid", tuple(int(t) for t in self.t_grid))
        object.__setattr__(self, "hypotheses", tuple((int(k), int(h)) for k, h in self.hypotheses))
        if self.trials < 1 or self.trial_start < 0:
            raise ValueError("trials must be at least 1")
        if not self.size_grid:
            raise ValueError("size_grid must not be empty")
        if self.study is Study.ACCURACY and not self.t_grid:
            raise ValueError("the accuracy study needs a nonempty t_grid")

    def cells(self):
        """(n, p, t) cells in report order; t is None outside the accuracy study."""
        ts = self.t_grid if self.study is Study.ACCURACY else (None,)
        return [(n, p, t) for t in ts for n, p in self.size_grid]

    def trial_ids(self):
        return range(self.trial_start, self.trial_start + self.trials)

    def seed_for(self, n, p, t, trial):
        return trial_seed(self.base_seed, _STUDY_KEY[self.study], n, p, 0 if t is None else t + 1, trial)

    def to_dict(self):
        out = asdict(self)
        out["study"] = self.study.value
        out["family"] = self.family.value
        out["size_grid"] = [list(s) for s in self.size_grid]
        out["t_grid"] = list(self.t_grid)
        out["hypotheses"] = [list(h) for h in self.hypotheses]
        return out


def default_plan(study, family=Family.GAUSSIAN, scale="desk", trials=None, base_seed=0, **overrides):
    """Size grids for the three studies; the ``paper`` scale runs the full grids."""
    study = Study(study)
    paper = scale == "paper"
    if scale not in ("desk", "paper"):
        raise ValueError(f"unknown scale {scale!r}")
    if study is Study.REALIZABLE:
        steps = range(1, 11) if paper else range(1, 6)
        plan = dict(size_grid=[(300 * i, 225 * i) for i in steps], trials=1000 if paper else 300)
    elif study is Study.UNREALIZABLE:
        steps = range(1, 11) if paper else range(1, 7)
        plan = dict(size_grid=[(200 * i, 150 * i) for i in steps], trials=100)
    else:
        steps = range(1, 11) if paper else (1, 3, 5, 10)
        plan = dict(
            size_grid=[(40 * i, 30 * i) for i in steps],
            trials=1000 if paper else 100,
            t_grid=list(range(10)) if paper else [0, 3, 6, 9],
        )
    if trials is not None:
        plan["trials"] = trials
    plan.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentPlan(study=study, family=family, base_seed=base_seed, **plan)


# -- per-trial work (module level so worker processes can import it) ---------


def _draw(family, params, n, p, seed):
    return generate(GeneratorSpec(family, params, n, p, seed))


def _realizable_trial(job):
    family, n, p, trial, seed = job
    record = {"n": n, "p": p, "t": None, "trial": trial, "seed": seed}
    try:
        matrix, truth = _draw(family, preset_params(family), n, p, seed)
        structure = ward_cocluster(matrix, TRUE_K, TRUE_H)
        T, lam, _ = test_statistic(matrix, structure)
        record.update(T=T, lambda1_hat=lam, recovered=align_labels(structure, truth).exact, error=None)
    except LBMError as exc:
        record.update(T=None, lambda1_hat=None, recovered=None, error=f"{type(exc).__name__}: {exc}")
    return record


def _unrealizable_trial(job):
    family, n, p, trial, seed, hypotheses = job
    record = {"n": n, "p": p, "t": None, "trial": trial, "seed": seed, "T": {}, "error": None}
    matrix, _ = _draw(family, preset_params(family), n, p, seed)
    errors = []
    for K0, H0 in hypotheses:
        key = f"{K0}x{H0}"
        try:
            T, _, _ = test_statistic(matrix, ward_cocluster(matrix, K0, H0))
            record["T"][key] = T
        except LBMError as exc:
            record["T"][key] = None
            errors.append(f"{key}: {type(exc).__name__}: {exc}")
    record["error"] = "; ".join(errors) or None
    return record


def _accuracy_trial(job):
    family, t, n, p, trial, seed, alpha, L_max = job
    record = {"n": n, "p": p, "t": t, "trial": trial, "seed": seed}
    params = interpolate_means(preset_params(family), t, INTERPOLATION_CENTER[Family(family)])
    try:
        matrix, _ = _draw(family, params, n, p, seed)
        trace = sequential_select(matrix, TestConfig(alpha=alpha, L_max=min(L_max, min(n, p) + 1)))
        selected = None if trace.selected is None else list(trace.selected)
        record.update(
            selected=selected,
            correct=trace.selected == (TRUE_K, TRUE_H),
            tests=len(trace.steps),
            error=None,
        )
    except LBMError as exc:
        record.update(selected=None, correct=False, tests=None, error=f"{type(exc).__name__}: {exc}")
    return record


def _map(fn, jobs, threads):
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(jobs) < 2:
        return [fn(job) for job in jobs]
    chunk = max(1, len(jobs) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs, chunksize=chunk))


# -- statistics ---------------------------------------------------------------


def ks_statistic(samples, cdf=tw1_cdf):
    """Two-sided Kolmogorov-Smirnov distance between samples and ``cdf``.

    Returns ``(D, D * sqrt(r))`` for r samples.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    r = x.size
    if r == 0:
        raise EmptySample("KS statistic needs at least one sample")
    if not np.isfinite(x).all():
        raise ValueError("samples must be finite")
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, r + 1)
    D = float(max(np.max(i / r - F), np.max(F - (i - 1) / r)))
    return D, D * np.sqrt(r)


def qq_pairs(samples):
    """Sorted samples paired with TW1 quantiles at plotting positions (i - 0.5)/r."""
    x = np.sort(np.asarray(samples, dtype=float))
    r = x.size
    table = default_table()
    theory = np.array([table.ppf((i - 0.5) / r) for i in range(1, r + 1)])
    return theory, x


def loglog_slope(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    if x.size < 2 or (y <= 0).any():
        return None
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _realizable_summary(plan, records):
    quantiles = {a: tw1_upper_quantile(a) for a in EXCEEDANCE_ALPHAS}
    sizes = []
    for n, p in plan.size_grid:
        cell = [r for r in records if (r["n"], r["p"]) == (n, p)]
        T = np.array([r["T"] for r in cell if r["T"] is not None])
        entry = {
            "n": n,
            "p": p,
            "trials": len(cell),
            "valid": int(T.size),
            "errors": len(cell) - int(T.size),
            "recovered_fraction": float(np.mean([bool(r["recovered"]) for r in cell])),
        }
        if T.size:
            D, D_sqrt_r = ks_statistic(T)
            theory, sample = qq_pairs(T)
            entry.update(
                mean_T=float(T.mean()),
                exceedance={str(a): float(np.mean(T >= q)) for a, q in quantiles.items()},
                ks={
                    "D": D,
                    "D_sqrt_r": D_sqrt_r,
                    "critical": KS_CRITICAL,
                    "rejected_at_0.01": D_sqrt_r > KS_CRITICAL["0.01"],
                },
                qq={"theoretical_quantile": theory.tolist(), "sample_quantile": sample.tolist()},
            )
        sizes.append(entry)
    return {"quantiles": {str(a): q for a, q in quantiles.items()}, "sizes": sizes}


def _unrealizable_summary(plan, records):
    out = {}
    for K0, H0 in plan.hypotheses:
        key = f"{K0}x{H0}"
        rows = []
        for n, p in plan.size_grid:
            T = np.array(
                [r["T"][key] for r in records if (r["n"], r["p"]) == (n, p) and r["T"][key] is not None]
            )
            mean_T = float(T.mean()) if T.size else None
            rows.append(
                {
                    "n": n,
                    "p": p,
                    "valid": int(T.size),
                    "mean_T": mean_T,
                    "mean_T_over_n53": None if mean_T is None else mean_T / n ** (5.0 / 3.0),
                }
            )
        ok = [row for row in rows if row["mean_T"] is not None]
        out[key] = {
            "sizes": rows,
            "loglog_slope": loglog_slope([r["n"] for r in ok], [r["mean_T"] for r in ok]),
        }
    return {"hypotheses": out}


def _accuracy_summary(plan, records):
    cells = []
    for n, p, t in plan.cells():
        cell = [r for r in records if (r["n"], r["p"], r["t"]) == (n, p, t)]
        tests = [r["tests"] for r in cell if r["tests"] is not None]
        cells.append(
            {
                "t": t,
                "n": n,
                "p": p,
                "trials": len(cell),
                "accuracy": float(np.mean([bool(r["correct"]) for r in cell])),
                "mean_tests": float(np.mean(tests)) if tests else None,
                "errors": sum(r["error"] is not None for r in cell),
            }
        )
    return {"cells": cells}


@dataclass
class StudyReport:
    meta: dict
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_dict(self):
        return {"meta": self.meta, "summary": self.summary, "records": self.records}


def _meta(plan, threads, extra=None):
    meta = {
        "tool": "lbmgof",
        "version": __version__,
        "study": plan.study.value,
        "seed": plan.base_seed,
        "plan": plan.to_dict(),
        "true_clusters": [TRUE_K, TRUE_H],
    }
    meta.update(extra or {})
    return meta


def _run(plan, expected, jobs, fn, threads):
    if plan.study is not expected:
        raise ValueError(f"plan is for the {plan.study.value} study, not {expected.value}")
    log.info("%s: %d trials over %d cells", plan.study.value, len(jobs), len(plan.cells()))
    return _map(fn, jobs, threads)


def run_realizable(plan, threads=1):
    jobs = [
        (plan.family.value, n, p, trial, plan.seed_for(n, p, None, trial))
        for n, p, _ in plan.cells()
        for trial in plan.trial_ids()
    ]
    records = _run(plan, Study.REALIZABLE, jobs, _realizable_trial, threads)
    return StudyReport(_meta(plan, threads), records, _realizable_summary(plan, records))


def run_unrealizable(plan, threads=1):
    jobs = [
        (plan.family.value, n, p, trial, plan.seed_for(n, p, None, trial), plan.hypotheses)
        for n, p, _ in plan.cells()
        for trial in plan.trial_ids()
    ]
    records = _run(plan, Study.UNREALIZABLE, jobs, _unrealizable_trial, threads)
    note = "fitted hypotheses are below the true (4, 3); the choice of hypotheses is a harness default"
    return StudyReport(_meta(plan, threads, {"note": note}), records, _unrealizable_summary(plan, records))


def run_accuracy(plan, threads=1):
    jobs = [
        (plan.family.value, t, n, p, trial, plan.seed_for(n, p, t, trial), plan.alpha, plan.L_max)
        for n, p, t in plan.cells()
        for trial in plan.trial_ids()
    ]
    records = _run(plan, Study.ACCURACY, jobs, _accuracy_trial, threads)
    return StudyReport(_meta(plan, threads), records, _accuracy_summary(plan, records))


RUNNERS = {
    Study.REALIZABLE: run_realizable,
    Study.UNREALIZABLE: run_unrealizable,
    Study.ACCURACY: run_accuracy,
}


def run_study(plan, threads=1):
    return RUNNERS[plan.study](plan, threads)


def write_csvs(report, directory):
    """Write the plot-ready CSV files for ``report`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    study = Study(report.meta["study"])
    written = []

    def _write(name, header, rows):
        path = directory / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        written.append(path)

    if study is Study.REALIZABLE:
        exceed = []
        for entry in report.summary["sizes"]:
            if "qq" not in entry:
                continue
            qq = entry["qq"]
            _write(
                f"qq_{entry['n']}.csv",
                ["theoretical_quantile", "sample_quantile"],
                zip(qq["theoretical_quantile"], qq["sample_quantile"]),
            )
            for alpha, ratio in entry["exceedance"].items():
                exceed.append((entry["n"], entry["p"], alpha, ratio, entry["ks"]["D_sqrt_r"]))
        _write("exceedance.csv", ["n", "p", "alpha", "exceedance_ratio", "ks_D_sqrt_r"], exceed)
    elif study is Study.UNREALIZABLE:
        rows = [
            (key, row["n"], row["mean_T"], row["mean_T_over_n53"])
            for key, hyp in report.summary["hypotheses"].items()
            for row in hyp["sizes"]
        ]
        _write("scaling.csv", ["hypothesis", "n", "mean_T", "mean_T_over_n53"], rows)
    else:
        rows = [(c["t"], c["n"], c["accuracy"]) for c in report.summary["cells"]]
        _write("accuracy.csv", ["t", "n", "accuracy"], rows)
    return written


def _fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return "" if value is None else str(value)
