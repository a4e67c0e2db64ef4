import math

import numpy as np
import pytest

import epm


def small_blocks():
    return epm.synthetic("rows=12;cols=12;seed=5;block=0:6:0:6;block=5:12:4:12")


def test_matrix_round_trip(tmp_path):
    dense = np.zeros((3, 4))
    dense[0, 1] = dense[2, 3] = 1
    x = epm.BinaryMatrix.from_dense(dense)
    assert (x.rows, x.cols, x.nnz) == (3, 4, 2)
    assert x[0, 1] and not x[1, 1]
    assert np.array_equal(x.to_dense(), dense.astype(np.uint8))
    path = str(tmp_path / "edges.txt")
    epm.save_edge_list(path, x)
    assert epm.load_edge_list(path) == x


def test_default_synthetic_has_expected_ones():
    x = epm.synthetic()
    assert (x.rows, x.cols, x.nnz) == (90, 90, 4150)


def test_single_customer_marginal():
    assert epm.log_marginal_likelihood(1, 1, [[(0, 0, 1)]]) == pytest.approx(math.log(0.25), abs=1e-12)


def test_metrics():
    assert epm.pr_auc([0.9, 0.8, 0.1], [1, 1, 0]) == pytest.approx(1.0)
    test = [(0, 0, 1), (0, 1, 0)]
    ll = epm.tdll(np.array([[0.5, 0.5]]), test)
    assert ll == pytest.approx(math.log(0.5))


def test_cv_folds_partition_cells():
    x = small_blocks()
    folds = epm.cv_folds(x, 3, seed=2)
    assert sum(len(test) for _, test in folds) == 144


@pytest.mark.parametrize("model", ["epm", "cepm", "depm", "idepm"])
def test_chain_runs(model):
    x = small_blocks()
    train, test = epm.cv_folds(x, 3, seed=1)[0]
    r = epm.run_chain(train, test, T=4, seed=3, model=model, iterations=12, retained=4)
    assert r["trace"].shape == (12, 5)
    assert math.isfinite(r["tdll"])
    assert 0.0 <= r["tdauc_pr"] <= 1.0
    assert r["k_mean"] > 0


def test_chain_is_deterministic():
    x = small_blocks()
    a = epm.run_chain(x, T=4, seed=7, model="depm", iterations=8, retained=2)
    b = epm.run_chain(x, T=4, seed=7, model="depm", iterations=8, retained=2)
    assert a["k_mean"] == b["k_mean"]
    assert math.isnan(a["tdll"])


def test_experiment_returns_fold_results(tmp_path):
    results = epm.run_experiment(
        synthetic="rows=12;cols=12;seed=5;block=0:6:0:6",
        model="depm",
        T=[2, 4],
        iterations=6,
        retained=2,
        folds=3,
        max_folds=1,
        output_dir=str(tmp_path),
    )
    assert [r["T"] for r in results] == [2, 4]
    assert (tmp_path / "summary.csv").exists()


def test_bad_config_raises():
    with pytest.raises(ValueError):
        epm.canonical_config("colour=blue")


def test_oracle_suites_short():
    for check in epm.moment_suite(20000, seed=4):
        assert check["pass"], check
    assert len(epm.expectation_suite(2000, seed=4, settings=1)) == 2
