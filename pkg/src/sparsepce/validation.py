"""Q2/R2 metrics, outer leave-one-out CV and the replication study.

Variance references are always explicit: Q2_OCV and Q2_ICV normalize by the
variance of the training responses, Q2_test by that of the test responses.
All variances use the 1/N convention, matching the 1/N error averages.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import DesignCache
from .benchmarks import Problem, get_problem
from .errors import NumericalError, UndefinedMetricError
from .input_model import InputSpace
from .training import ExperimentalDesign, SparsePceModel, TrainConfig, predict, train

log = logging.getLogger(__name__)


def q_squared(epsilon: float, reference_responses) -> float:
    """1 - epsilon / var(reference); negative when worse than the mean predictor."""
    var = float(np.var(np.asarray(reference_responses, dtype=float)))
    if not var > 0:
        raise UndefinedMetricError("Q2 is undefined for responses with zero variance")
    return 1.0 - float(epsilon) / var


def r_squared_train(model: SparsePceModel, ed: ExperimentalDesign) -> float:
    resid = ed.y - predict(model, ed.x)
    eps = float(np.mean(resid**2))
    var = float(np.var(ed.y))
    if var > 0:
        return 1.0 - eps / var
    if eps == 0.0:
        return 1.0
    raise UndefinedMetricError("R2 is undefined for responses with zero variance")


@dataclass(frozen=True)
class Fold:
    held_out_index: int
    prediction: float
    truth: float


@dataclass(frozen=True)
class OcvReport:
    per_fold: tuple[Fold, ...]
    epsilon_ocv: float
    q2_ocv: float
    variance_reference: float
    failed_folds: tuple[int, ...] = ()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["held_out_index", "prediction", "truth"])
        for f in self.per_fold:
            w.writerow([f.held_out_index, repr(f.prediction), repr(f.truth)])
        return buf.getvalue()


def outer_loocv(ed: ExperimentalDesign, space: InputSpace, cfg: TrainConfig | None = None) -> OcvReport:
    """Leave each sample out, rerun the whole training pipeline, predict it.

    Design matrices are computed once on the full design and row-subset per
    fold; entries are computed row by row so this is bit-identical to
    rebuilding them on each subset.
    """
    cfg = cfg or TrainConfig()
    n = ed.size
    if n < 4:
        raise ValueError(f"outer LOOCV needs N >= 4, got {n}")
    cache = DesignCache(space.standardize(ed.x), space.families, cfg.p_max)
    folds, failed = [], []
    for i in range(n):
        rows = np.delete(np.arange(n), i)
        try:
            model = train(ed.subset(rows), space, cfg, cache=cache, rows=rows)
        except NumericalError as exc:
            log.warning("outer fold %d failed: %s", i, exc)
            failed.append(i)
            continue
        pred = float(predict(model, ed.x[i : i + 1])[0])
        folds.append(Fold(i, pred, float(ed.y[i])))
    var = float(np.var(ed.y))
    if failed:
        return OcvReport(tuple(folds), float("nan"), float("nan"), var, tuple(failed))
    eps = float(np.mean([(f.prediction - f.truth) ** 2 for f in folds]))
    q2 = 1.0 - eps / var if var > 0 else float("nan")
    return OcvReport(tuple(folds), eps, q2, var)


# ---------------------------------------------------------------------------
# replication study
# ---------------------------------------------------------------------------
def replication_seeds(master_seed: int, n: int, rep: int) -> tuple[int, int]:
    """(training-design seed, test-design seed) for one replication.

    Derived with numpy's SeedSequence from (master_seed, N, rep), so any row
    can be recomputed in isolation and in any order.
    """
    state = np.random.SeedSequence([int(master_seed), int(n), int(rep)]).generate_state(2, dtype=np.uint64)
    return int(state[0]), int(state[1])


@dataclass(frozen=True)
class Replication:
    n: int
    rep: int
    q2_icv: float
    q2_ocv: float
    q2_test: float
    failed: bool = False


def run_replication(problem: Problem, n: int, rep: int, cfg: TrainConfig, n_test: int, master_seed: int, with_ocv: bool = True) -> Replication:
    train_seed, test_seed = replication_seeds(master_seed, n, rep)
    x, y = problem.sample(n, train_seed)
    ed = ExperimentalDesign(x, y)
    try:
        model = train(ed, problem.space, cfg)
        q2_icv = float(model.diagnostics["q2_icv"])
        xt, yt = problem.sample(n_test, test_seed)
        q2_test = q_squared(float(np.mean((predict(model, xt) - yt) ** 2)), yt)
        q2_ocv = outer_loocv(ed, problem.space, cfg).q2_ocv if with_ocv else float("nan")
    except NumericalError as exc:
        log.warning("replication N=%d rep=%d failed: %s", n, rep, exc)
        return Replication(n, rep, float("nan"), float("nan"), float("nan"), failed=True)
    if with_ocv and not np.isfinite(q2_ocv):
        return Replication(n, rep, q2_icv, q2_ocv, q2_test, failed=True)
    return Replication(n, rep, q2_icv, q2_ocv, q2_test)


def _run_unit(args):
    return run_replication(*args)


@dataclass(frozen=True)
class ReplicationRow:
    n: int
    q2_icv_mean: float
    q2_icv_std: float
    q2_ocv_mean: float
    q2_ocv_std: float
    q2_test_mean: float
    q2_test_std: float
    n_rep: int
    failures: int


CSV_COLUMNS = ("N", "q2_icv_mean", "q2_icv_std", "q2_ocv_mean", "q2_ocv_std", "q2_test_mean", "q2_test_std", "n_rep", "failures")


@dataclass(frozen=True)
class ReplicationTable:
    rows: tuple[ReplicationRow, ...]
    replications: tuple[Replication, ...] = field(default=(), repr=False)

    def row(self, n: int) -> ReplicationRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.n] + [repr(float(v)) for v in (r.q2_icv_mean, r.q2_icv_std, r.q2_ocv_mean, r.q2_ocv_std, r.q2_test_mean, r.q2_test_std)] + [r.n_rep, r.failures])
        return buf.getvalue()


def aggregate(reps) -> tuple[ReplicationRow, ...]:
    rows = []
    for n in sorted({r.n for r in reps}):
        group = sorted((r for r in reps if r.n == n), key=lambda r: r.rep)
        ok = [r for r in group if not r.failed]

        def stats(attr):
            vals = np.array([getattr(r, attr) for r in ok], dtype=float)
            if vals.size == 0 or np.all(np.isnan(vals)):
                return float("nan"), float("nan")
            return float(np.mean(vals)), float(np.std(vals))

        rows.append(ReplicationRow(n, *stats("q2_icv"), *stats("q2_ocv"), *stats("q2_test"), len(ok), len(group) - len(ok)))
    return tuple(rows)


def replication_study(
    problem: str | Problem,
    sizes,
    n_rep: int,
    cfg: TrainConfig | None = None,
    n_test: int = 10_000,
    master_seed: int = 0,
    threads: int = 1,
    with_ocv: bool = True,
    mode: str | None = None,
) -> ReplicationTable:
    """Mean and spread of Q2_ICV, Q2_OCV and Q2_test over fresh LHS designs per N.

    ``n_rep`` in each row counts the successful replications; failed ones are
    excluded and counted under ``failures``.
    """
    cfg = cfg or TrainConfig()
    sizes = sorted(int(s) for s in sizes)
    if not sizes or n_rep < 1:
        raise ValueError("need a non-empty list of sizes and n_rep >= 1")
    prob = problem if isinstance(problem, Problem) else get_problem(problem, mode)
    units = [(prob, n, rep, cfg, n_test, master_seed, with_ocv) for n in sizes for rep in range(n_rep)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reps = list(pool.map(_run_unit, units, chunksize=max(1, len(units) // (4 * threads))))
    else:
        reps = [_run_unit(u) for u in units]
    return ReplicationTable(aggregate(reps), tuple(reps))
