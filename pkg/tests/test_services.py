# /tests/test_services.py

import pytest

from strongconverse.decorators import SUITES
from strongconverse.errors import InvalidParameter, NotEntanglementBreaking
from strongconverse.models import RunConfig
from strongconverse.services import SUITE_ORDER, execute, run_suite


def test_every_suite_is_registered():
    assert set(SUITE_ORDER) <= set(SUITES)
    for name in SUITE_ORDER:
        assert SUITES[name].default_cases >= 1


def test_unknown_suite():
    with pytest.raises(InvalidParameter):
        run_suite("bogus", 0, 2)


@pytest.mark.parametrize("name,cases", [
    ("divergence-axioms", 5),
    ("nagaoka", 20),
    ("separability", 2),
    ("chain", 2),
])
def test_small_suites_pass(name, cases):
    (result,) = run_suite(name, 11, 4, cases)
    assert result["suite"] == name
    assert result["cases"] == cases
    assert result["failures"] == []


def test_cases_are_capped_by_default():
    (result,) = run_suite("closed-forms", 0, 4, 10_000)
    assert result["cases"] <= SUITES["closed-forms"].default_cases


def test_execute_exponent_table():
    result, failures = execute(RunConfig(command="exponent", channel="replacement:2", rate=1.0, budget=2))
    assert failures == []
    assert result["monotone"]
    assert result["table"][0].keys() == {"alpha", "chi_alpha", "term"}
    assert len(result["gap_estimates"]) == len(result["table"])


def test_execute_simulate_on_eb_channel():
    config = RunConfig(command="simulate", channel="depolarizing:0.25", rounds=2, messages=2, budget=4, seed=5)
    result, failures = execute(config)
    assert failures == []
    assert result["bound_ok"] and result["chain_ok"]
    assert result["p_succ"] <= result["bound"] + 1e-9
    assert {row["quantity"] for row in result["table"] if row["round"] == 0} == {"p_succ", "bound", "rate", "exponent"}


def test_execute_simulate_rejects_non_eb_channel():
    with pytest.raises(NotEntanglementBreaking):
        execute(RunConfig(command="simulate", channel="identity"))


@pytest.mark.slow
@pytest.mark.parametrize("name", ["closed-forms", "alpha-routes", "alpha-limits", "king", "strong-converse", "additivity"])
def test_slow_suites_pass(name):
    (result,) = run_suite(name, 0, 8, 3)
    assert result["failures"] == []
