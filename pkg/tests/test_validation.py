import numpy as np
import pytest

from sparsepce.basis import BasisSpec
from sparsepce.benchmarks import get_problem, ishigami, ishigami_space
from sparsepce.errors import UndefinedMetricError
from sparsepce.input_model import InputSpace, MarginalDistribution, lhs_sample
from sparsepce.training import ExperimentalDesign, SparsePceModel, TrainConfig, predict, train
from sparsepce.validation import (
    CSV_COLUMNS,
    Replication,
    ReplicationTable,
    aggregate,
    outer_loocv,
    q_squared,
    r_squared_train,
    replication_seeds,
    replication_study,
    run_replication,
)


def test_q_squared_examples():
    y = np.array([1.0, 2.0, 4.0, 7.0])
    v = np.var(y)
    assert q_squared(0.0, y) == 1.0
    assert q_squared(v, y) == 0.0
    assert q_squared(1.1262 * v, y) == pytest.approx(-0.1262, abs=1e-14)
    with pytest.raises(UndefinedMetricError):
        q_squared(0.1, np.ones(5))


def test_r_squared_examples():
    space = InputSpace((MarginalDistribution("Uniform", (-1, 1)),))
    x = np.linspace(-1, 1, 9)[:, None]
    y = x[:, 0] ** 2
    ed = ExperimentalDesign(x, y)
    intercept = SparsePceModel(BasisSpec(space.families, [[0]]), [y.mean()], space)
    assert r_squared_train(intercept, ed) == pytest.approx(0.0, abs=1e-15)
    constant = ExperimentalDesign(x, np.full(9, 2.0))
    assert r_squared_train(SparsePceModel(BasisSpec(space.families, [[0]]), [2.0], space), constant) == 1.0
    with pytest.raises(UndefinedMetricError):
        r_squared_train(SparsePceModel(BasisSpec(space.families, [[0]]), [1.0], space), constant)


def test_interpolating_omp_model_has_unit_r2():
    space = ishigami_space()
    x = lhs_sample(25, space, 3).natural
    ed = ExperimentalDesign(x, ishigami(x))
    model = train(ed, space, TrainConfig(selector="OMP", error_metric="LOO"))
    if len(model.coefficients) == ed.size - 1:
        assert r_squared_train(model, ed) >= 1 - 1e-6
    assert r_squared_train(model, ed) == model.diagnostics["r2_train"]


def test_ocv_exact_surrogate():
    space = InputSpace(tuple(MarginalDistribution("Uniform", (-1, 1)) for _ in range(2)))
    x = lhs_sample(30, space, 1).natural
    ed = ExperimentalDesign(x, 1 + x[:, 0] - 2 * x[:, 0] * x[:, 1])
    rep = outer_loocv(ed, space, TrainConfig(p_max=4))
    assert rep.q2_ocv >= 1 - 1e-6
    assert len(rep.per_fold) == 30 and rep.failed_folds == ()
    assert sorted(f.held_out_index for f in rep.per_fold) == list(range(30))
    eps = np.mean([(f.prediction - f.truth) ** 2 for f in rep.per_fold])
    assert rep.epsilon_ocv == eps
    assert rep.q2_ocv == 1 - eps / rep.variance_reference
    assert rep.variance_reference == np.var(ed.y)


def test_ocv_folds_match_independent_retraining():
    space = ishigami_space()
    x = lhs_sample(24, space, 8).natural
    ed = ExperimentalDesign(x, ishigami(x))
    cfg = TrainConfig(p_max=6)
    rep = outer_loocv(ed, space, cfg)
    for fold in rep.per_fold:
        keep = np.delete(np.arange(24), fold.held_out_index)
        model = train(ed.subset(keep), space, cfg)
        assert predict(model, x[fold.held_out_index : fold.held_out_index + 1])[0] == fold.prediction


def test_ocv_close_to_test_error_at_n70():
    space = ishigami_space()
    x = lhs_sample(70, space, 21).natural
    ed = ExperimentalDesign(x, ishigami(x))
    rep = outer_loocv(ed, space, TrainConfig())
    model = train(ed, space)
    xt = lhs_sample(10_000, space, 22).natural
    yt = ishigami(xt)
    q2_test = q_squared(np.mean((predict(model, xt) - yt) ** 2), yt)
    assert abs(rep.q2_ocv - q2_test) <= 0.05


def test_ocv_needs_four_samples():
    space = ishigami_space()
    x = lhs_sample(3, space, 1).natural
    with pytest.raises(ValueError):
        outer_loocv(ExperimentalDesign(x, ishigami(x)), space)


def test_replication_seeds_are_deterministic_and_distinct():
    assert replication_seeds(0, 10, 3) == replication_seeds(0, 10, 3)
    seeds = {replication_seeds(0, n, r) for n in (10, 20) for r in range(5)}
    assert len(seeds) == 10
    a, b = replication_seeds(7, 10, 0)
    assert a != b


def test_replication_rows_are_order_independent():
    prob = get_problem("ishigami")
    cfg = TrainConfig(p_max=5)
    reps = [run_replication(prob, n, r, cfg, 500, 3, with_ocv=False) for n in (12, 15) for r in range(3)]
    shuffled = [reps[i] for i in (4, 0, 5, 2, 1, 3)]
    assert ReplicationTable(aggregate(reps)).to_csv() == ReplicationTable(aggregate(shuffled)).to_csv()
    again = run_replication(prob, 15, 1, cfg, 500, 3, with_ocv=False)
    assert (again.q2_icv, again.q2_test) == (reps[4].q2_icv, reps[4].q2_test)


def test_replication_study_table():
    cfg = TrainConfig(p_max=4)
    table = replication_study("ishigami", [20, 12], 2, cfg, n_test=300, master_seed=5)
    assert [r.n for r in table.rows] == [12, 20]
    assert all(r.n_rep + r.failures == 2 for r in table.rows)
    lines = table.to_csv().splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 3
    again = replication_study("ishigami", [12, 20], 2, cfg, n_test=300, master_seed=5)
    assert again.to_csv() == table.to_csv()
    row = table.row(12)
    vals = [rep.q2_test for rep in table.replications if rep.n == 12 and not rep.failed]
    assert row.q2_test_mean == pytest.approx(np.mean(vals)) and row.q2_test_std == pytest.approx(np.std(vals))
    with pytest.raises(KeyError):
        table.row(99)
    with pytest.raises(ValueError):
        replication_study("ishigami", [], 2, cfg)


def test_failed_replications_are_counted():
    reps = [Replication(10, 0, 0.5, 0.4, 0.3), Replication(10, 1, float("nan"), float("nan"), float("nan"), failed=True)]
    (row,) = aggregate(reps)
    assert (row.n_rep, row.failures) == (1, 1)
    assert row.q2_test_mean == 0.3 and row.q2_test_std == 0.0


@pytest.mark.slow
def test_threaded_study_matches_serial():
    cfg = TrainConfig(p_max=4)
    a = replication_study("ishigami", [12], 4, cfg, n_test=200, master_seed=1, threads=1, with_ocv=False)
    b = replication_study("ishigami", [12], 4, cfg, n_test=200, master_seed=1, threads=2, with_ocv=False)
    assert a.to_csv() == b.to_csv()
