import json

import numpy as np
import pytest

from freehol import harness
from freehol.calculus import row_norm
from freehol.series import block_norms


def test_generators_deterministic():
    a = harness.gen_series(3, 2, 4)
    b = harness.gen_series(3, 2, 4)
    assert a.equals(b) and not a.equals(harness.gen_series(4, 2, 4))
    T = harness.gen_row_contraction(5, 2, 3, 0.8)
    assert row_norm(T) == pytest.approx(0.8)
    assert np.array_equal(T.mats, harness.gen_row_contraction(5, 2, 3, 0.8).mats)
    assert not harness.gen_row_contraction(5, 2, 3, 0).mats.any()


def test_geometric_profile():
    F = harness.gen_series(1, 2, 6, "geometric", t=0.3)
    assert np.allclose(block_norms(F), 0.3 ** np.arange(7))
    assert F.tail.c == 1 and F.tail.t == 0.3
    with pytest.raises(ValueError):
        harness.gen_series(1, 2, 2, "spiky")


def test_suite_streams_independent():
    a = harness.rng_for(7, "poisson", 0).random()
    assert a == harness.rng_for(7, "poisson", 0).random()
    assert a != harness.rng_for(7, "poisson", 1).random()
    assert a != harness.rng_for(7, "schwartz", 0).random()


def test_empty_and_named_runs():
    assert harness.run_suite(harness.SuiteConfig(seed=1)) == []
    assert harness.all_passed([])
    rows = harness.run_suite(harness.SuiteConfig(seed=7, suites=["von_neumann"], trials=50))
    assert len(rows) == 50 and harness.all_passed(rows)


@pytest.mark.parametrize("name", sorted(harness.SUITES))
def test_every_suite_passes_small(name):
    trials = {"reconstruction": 1, "hardy": 3}.get(name, 3)
    rows = harness.run_suite(harness.SuiteConfig(seed=11, suites=[name], trials=trials))
    assert rows and harness.all_passed(rows), [r for r in rows if not r.passed]


def test_csv_is_byte_identical():
    cfg = harness.SuiteConfig(seed=3, suites=["derivations", "poisson"], trials=4)
    a = harness.rows_to_csv(harness.run_suite(cfg), timestamp=False)
    b = harness.rows_to_csv(harness.run_suite(cfg), timestamp=False)
    assert a == b
    assert a.splitlines()[0] == ",".join(harness.CSV_HEADER)
    stamped = harness.rows_to_csv(harness.run_suite(cfg))
    assert stamped.startswith("# generated") and stamped.split("\n", 1)[1] == a


def test_config_validation(tmp_path):
    with pytest.raises(KeyError):
        harness.SuiteConfig(suites=["nope"])
    with pytest.raises(harness.SizeCapError):
        harness.SuiteConfig(N=13)
    assert harness.SuiteConfig(N=13, unsafe_sizes=True).N == 13
    with pytest.raises(ValueError):
        harness.SuiteConfig(tolerances={"calculus": 0})
    with pytest.raises(ValueError):
        harness.SuiteConfig(seed=-1)
    with pytest.raises(KeyError):
        harness.SuiteConfig.from_dict({"colour": 1})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"seed": 9, "trials": 2, "suites": ["unitary"]}))
    cfg = harness.SuiteConfig.from_json(path)
    assert cfg.seed == 9 and cfg.count(30) == 2


def test_tolerance_override_can_fail_rows():
    cfg = harness.SuiteConfig(seed=1, suites=["hardy"], trials=1, tolerances={"hp_width": 1e-12})
    assert not harness.all_passed(harness.run_suite(cfg))
