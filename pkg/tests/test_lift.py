"""Tests for lifting grid witnesses to symmetric functions and the psi-pair checks."""

from fractions import Fraction

import pytest

from smoothdual.dualwitness import GridFn, ParameterMismatch, WitnessCert, build_witness, witness_params
from smoothdual.exactnum import Enclosure, QuadNum
from smoothdual.lift import (
    ORIENTATION_MAJ,
    ORIENTATION_NEG_MAJ,
    PsiPair,
    SymFn,
    build_psi_pair,
    lift_grid,
    lift_witness,
    orthogonality_symmetric,
    pointwise_correlation,
    pointwise_l1_norm,
    verify_lift,
    verify_psi_pair,
    weight_fraction_in_band,
)
from smoothdual.report import FAIL, PASS


@pytest.fixture(scope="module")
def cert_9_1():
    return build_witness(witness_params(9, 1))


@pytest.fixture(scope="module")
def pair_9_1(cert_9_1):
    return build_psi_pair(cert_9_1)


def _small_grid() -> GridFn:
    values = {-2: Fraction(-1, 8), -1: Fraction(3, 8), 1: Fraction(1, 4), 3: Fraction(-1, 4)}
    return GridFn(3, 1, {t: QuadNum.of(v, 1) for t, v in values.items()})


class TestLift:
    def test_unit_norm(self, cert_9_1):
        lifted = lift_witness(cert_9_1)
        assert lifted.m == 18
        assert lifted.l1_norm() == 1

    def test_center_class_is_zero(self, cert_9_1):
        assert lift_witness(cert_9_1)[9].is_zero()

    def test_pair_is_reflection(self, pair_9_1):
        for k in range(19):
            assert pair_9_1.psi0[k] == pair_9_1.psi1[18 - k]

    def test_pair_needs_normalized_witness(self):
        p = witness_params(9, 1)
        with pytest.raises(ParameterMismatch):
            build_psi_pair(WitnessCert(p, GridFn(9, 2)))

    def test_weight_class_evaluation(self):
        g = SymFn.from_rationals([1, 2, 3])
        assert g((1, 1)) == 1
        assert g((1, -1)) == 2
        assert g((-1, -1)) == 3
        with pytest.raises(ValueError):
            g((1,))

    def test_json(self, pair_9_1):
        assert SymFn.from_json(pair_9_1.psi1.to_json()) == pair_9_1.psi1


class TestPsiPair:
    def test_orientation(self, pair_9_1):
        report = verify_psi_pair(pair_9_1)
        assert report.status == PASS
        assert report.fields["orientation"] == ORIENTATION_NEG_MAJ
        assert report.fields["orientation_status"][ORIENTATION_MAJ] == FAIL

    def test_swapped_orientation(self, pair_9_1):
        report = verify_psi_pair(pair_9_1.swapped())
        assert report.status == PASS
        assert report.fields["orientation"] == ORIENTATION_MAJ

    def test_pure_high_degree_vacuous_for_d1(self, pair_9_1):
        assert pair_9_1.phd_target == -1
        assert verify_psi_pair(pair_9_1).get("pure_high_degree").checks == []

    def test_constant_pair_fails_orthogonality(self):
        quarter = SymFn.from_rationals([Fraction(1, 4)] * 3)
        pair = PsiPair(quarter, quarter, 2, Enclosure(0, 1), 0)
        report = verify_psi_pair(pair)
        assert report.get("pure_high_degree").status == FAIL
        assert report.status == FAIL

    def test_zero_pair_is_trivial(self):
        zero = SymFn.from_rationals([0, 0, 0])
        report = verify_psi_pair(PsiPair(zero, zero, 2, Enclosure(0, 1), -1))
        assert report.get("nontrivial").status == FAIL

    def test_arity_mismatch(self, pair_9_1):
        other = SymFn.from_rationals([0, 0, 0])
        with pytest.raises(ParameterMismatch):
            verify_psi_pair(PsiPair(other, pair_9_1.psi1, 2, Enclosure(0, 1), -1))


class TestOrthogonality:
    def test_parity_moments(self):
        parity = SymFn.from_rationals([1, -1, 1, -1])
        assert orthogonality_symmetric(parity, 3) == [0, 0, 0, 48]

    def test_constant_not_orthogonal(self):
        assert orthogonality_symmetric(SymFn.from_rationals([1, 1, 1]), 0) == [4]

    def test_negative_degree_is_empty(self):
        assert orthogonality_symmetric(SymFn.from_rationals([1, 1]), -1) == []

    def test_degree_above_arity(self):
        with pytest.raises(ValueError):
            orthogonality_symmetric(SymFn.from_rationals([1, 1]), 2)


class TestWeightBand:
    @pytest.mark.parametrize(("n", "width", "expected"), [(1, 0, Fraction(1, 2)), (2, 1, Fraction(7, 8)), (5, 5, 1)])
    def test_examples(self, n, width, expected):
        assert weight_fraction_in_band(n, width) == expected

    def test_rejects_width(self):
        with pytest.raises(ValueError):
            weight_fraction_in_band(2, 3)


class TestPointwise:
    """Weight-class formulas agree with full enumeration of the cube."""

    def test_norm(self):
        g = lift_grid(_small_grid())
        assert pointwise_l1_norm(g) == g.l1_norm() == 1

    def test_correlations(self):
        g = lift_grid(_small_grid())
        moments = orthogonality_symmetric(g, 2)
        assert pointwise_correlation(g, []) == moments[0]
        assert pointwise_correlation(g, [2]) * 6 == moments[1]
        # sum_{i,j} x_i x_j = 6 + 30 * (x_0 x_1) under symmetry
        assert pointwise_correlation(g, []) * 6 + pointwise_correlation(g, [0, 1]) * 30 == moments[2]

    def test_limit(self, cert_9_1):
        with pytest.raises(ValueError):
            pointwise_l1_norm(lift_witness(cert_9_1))


def test_verify_lift(cert_9_1):
    report = verify_lift(cert_9_1)
    assert report.status == PASS
    assert report.fields["m"] == 18
    assert report.fields["band_width"] == 4
    assert report.fields["band_fraction"] == "7939/8192"
    assert report.fields["smooth_fraction"] == "51357/65536"
    assert report.fields["exception_fraction"] == "14179/65536"


@pytest.mark.parametrize(("n", "d"), [(15, 1), (31, 1), (65, 2), (127, 2), (513, 3)])
def test_lift_and_pair_on_larger_instances(n, d):
    cert = build_witness(witness_params(n, d))
    lifted = verify_lift(cert)
    assert lifted.status == PASS
    assert lifted.fields["m"] == 2 * n
    pair = build_psi_pair(cert)
    report = verify_psi_pair(pair)
    assert report.status == PASS
    assert report.fields["orientation"] == ORIENTATION_NEG_MAJ
    assert len(report.get("pure_high_degree").checks) == 2 * (d - 1)
