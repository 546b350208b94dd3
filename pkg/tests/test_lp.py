"""Tests for the exact simplex solver and its certificate checks."""

from fractions import Fraction

import pytest

from smoothdual.lp import (
    EQ,
    FEASIBLE,
    GE,
    INFEASIBLE,
    LE,
    UNBOUNDED,
    LPProblem,
    lp_solve,
    verify_farkas,
    verify_point,
    verify_unbounded,
)


def _contradiction() -> LPProblem:
    prob = LPProblem()
    x = prob.add_variable("x")
    prob.add_constraint({x: 1}, GE, 1)
    prob.add_constraint({x: -1}, GE, 0)
    return prob


def _beale() -> LPProblem:
    """Beale's instance, which cycles under the textbook pivoting rule."""
    prob = LPProblem()
    x = [prob.add_variable(f"x{i}", nonneg=True) for i in range(1, 8)]
    prob.add_constraint({x[0]: 1, x[3]: Fraction(1, 4), x[4]: -8, x[5]: -1, x[6]: 9}, EQ, 0)
    prob.add_constraint({x[1]: 1, x[3]: Fraction(1, 2), x[4]: -12, x[5]: Fraction(-1, 2), x[6]: 3}, EQ, 0)
    prob.add_constraint({x[2]: 1, x[5]: 1}, EQ, 1)
    prob.set_objective({x[3]: Fraction(-3, 4), x[4]: 20, x[5]: Fraction(-1, 2), x[6]: 6})
    return prob


class TestSolve:
    def test_infeasible_ray(self):
        prob = _contradiction()
        cert = lp_solve(prob)
        assert cert.status == INFEASIBLE
        assert cert.ray[0] > 0
        assert cert.ray[0] == cert.ray[1]
        assert verify_farkas(prob, cert.ray)

    def test_simplex_point(self):
        prob = LPProblem()
        x = prob.add_variable("x", nonneg=True)
        y = prob.add_variable("y", nonneg=True)
        prob.add_constraint({x: 1, y: 1}, EQ, 1)
        cert = lp_solve(prob)
        assert cert.status == FEASIBLE
        assert sum(cert.point) == 1
        assert all(v >= 0 for v in cert.point)

    def test_beale_optimum(self):
        prob = _beale()
        cert = lp_solve(prob)
        assert cert.status == FEASIBLE
        assert cert.objective_value == Fraction(-5, 4)
        assert verify_point(prob, cert.point)

    def test_unbounded(self):
        prob = LPProblem()
        x = prob.add_variable("x", nonneg=True)
        y = prob.add_variable("y")
        prob.add_constraint({x: 1, y: 1}, LE, 3)
        prob.add_constraint({y: 1}, EQ, 1)
        prob.set_objective({x: -1})
        assert lp_solve(prob).status == FEASIBLE
        prob.constraints.pop(0)
        cert = lp_solve(prob)
        assert cert.status == UNBOUNDED
        assert verify_unbounded(prob, cert.point, cert.direction)

    def test_bounded_objective_value(self):
        prob = LPProblem()
        x = prob.add_variable("x", nonneg=True)
        y = prob.add_variable("y", nonneg=True)
        prob.add_constraint({x: 1, y: 2}, LE, 4)
        prob.add_constraint({x: 3, y: 1}, LE, 6)
        prob.set_objective({x: -1, y: -1})
        cert = lp_solve(prob)
        assert cert.objective_value == Fraction(-14, 5)
        assert cert.point == [Fraction(8, 5), Fraction(6, 5)]


class TestAlternativeSystem:
    """Tall feasibility systems are solved through the Farkas alternative."""

    def test_feasible(self):
        prob = LPProblem()
        x = prob.add_variable("x")
        for k in range(5):
            prob.add_constraint({x: 1}, GE, k)
        prob.add_constraint({x: 1}, LE, 10)
        cert = lp_solve(prob)
        assert cert.status == FEASIBLE
        assert 4 <= cert.point[0] <= 10

    def test_infeasible(self):
        prob = LPProblem()
        x = prob.add_variable("x")
        for k in range(5):
            prob.add_constraint({x: 1}, GE, k + 1)
        prob.add_constraint({x: 1}, LE, 3)
        cert = lp_solve(prob)
        assert cert.status == INFEASIBLE
        assert verify_farkas(prob, cert.ray)


class TestVerifiers:
    def test_farkas_rejects_wrong_length(self):
        assert not verify_farkas(_contradiction(), [Fraction(1)])

    def test_farkas_rejects_sign(self):
        assert not verify_farkas(_contradiction(), [Fraction(-1), Fraction(-1)])

    def test_farkas_rejects_zero_ray(self):
        assert not verify_farkas(_contradiction(), [Fraction(0), Fraction(0)])

    def test_farkas_rejects_leftover_coefficient(self):
        assert not verify_farkas(_contradiction(), [Fraction(2), Fraction(1)])

    def test_point_checks_sign_restrictions(self):
        prob = LPProblem()
        x = prob.add_variable("x", nonneg=True)
        prob.add_constraint({x: 1}, LE, 5)
        assert verify_point(prob, [Fraction(2)])
        assert not verify_point(prob, [Fraction(-1)])
        assert not verify_point(prob, [])

    def test_unbounded_needs_objective(self):
        prob = _contradiction()
        assert not verify_unbounded(prob, [Fraction(1)], [Fraction(1)])


class TestProblem:
    def test_bad_sense(self):
        prob = LPProblem()
        x = prob.add_variable("x")
        with pytest.raises(ValueError, match="sense"):
            prob.add_constraint({x: 1}, ">", 0)

    def test_bad_index(self):
        prob = LPProblem()
        prob.add_variable("x")
        with pytest.raises(ValueError, match="unknown variable"):
            prob.add_constraint({3: 1}, GE, 0)

    def test_zero_coefficients_dropped(self):
        prob = LPProblem()
        x = prob.add_variable("x")
        y = prob.add_variable("y")
        prob.add_constraint({x: 0, y: "1/2"}, GE, 0)
        assert prob.constraints[0].coeffs == {y: Fraction(1, 2)}
