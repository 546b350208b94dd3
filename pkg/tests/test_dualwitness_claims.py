"""Tests for the per-shift inequalities checked by verify_claims."""

import pytest

from smoothdual.dualwitness import claim_two_bound, eval_p_u, support_set, verify_claims, witness_params
from smoothdual.exactnum import QuadNum
from smoothdual.report import PASS


@pytest.fixture(scope="module")
def claims_9_1():
    return verify_claims(witness_params(9, 1))


def test_claims_pass(claims_9_1):
    assert claims_9_1.status == PASS
    assert [p.name for p in claims_9_1.properties] == [
        "sign_law",
        "center_mass",
        "tails_small",
        "comparable_r",
        "comparable_p",
        "mass_fraction",
        "two_point_mass",
    ]


def test_center_mass_is_tight_for_degree_one(claims_9_1):
    """With d=1 the bound on |p_u(-u)| is attained exactly."""
    for check in claims_9_1.get("center_mass").checks:
        assert check.margin == 0


def test_no_tail_checks_for_degree_one(claims_9_1):
    assert claims_9_1.get("tails_small").checks == []


def test_claim_two_bound_value():
    p = witness_params(9, 1)
    assert claim_two_bound(3, p) == (QuadNum.root(2) + 1) / 2


def test_sign_law_at_degree_three():
    p = witness_params(513, 3)
    for t in support_set(2, p):
        if t > 0:
            expected = -1 if t % 2 else 1
            assert eval_p_u(2, t, p).sign == expected


def test_parallel_claims_match(claims_9_1):
    assert verify_claims(witness_params(9, 1), jobs=3).to_json() == claims_9_1.to_json()


@pytest.mark.parametrize(("n", "d"), [(15, 1), (31, 1), (65, 2), (127, 2), (513, 3)])
def test_claims_pass_on_larger_instances(n, d):
    report = verify_claims(witness_params(n, d))
    assert report.status == PASS
    assert all(not prop.undecided() for prop in report.properties)


@pytest.mark.parametrize(("n", "d"), [(65, 2), (513, 3)])
def test_tail_checks_for_higher_degree(n, d):
    p = witness_params(n, d)
    tails = verify_claims(p).get("tails_small")
    assert len(tails.checks) == p.u_max * (d - 1)
    assert tails.checks[0].label == "u=1,j=1"
    assert all(check.status == PASS for check in tails.checks)
