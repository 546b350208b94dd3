"""Tests for report types, sound decisions and the check runner."""

from fractions import Fraction

import pytest

from smoothdual import report as report_module
from smoothdual.exactnum import Enclosure, QuadNum, exp_enclosure
from smoothdual.report import (
    EXEMPT,
    EXIT_FAILED,
    EXIT_OK,
    EXIT_UNDECIDED,
    FAIL,
    PASS,
    UNDECIDED,
    CheckResult,
    PropertyResult,
    Report,
    combine_status,
    decide,
    exact_check,
    exit_code_for,
    get_system_adaptive_jobs,
    identity_margin,
    markdown_summary,
    run_checks,
)


class TestStatus:
    @pytest.mark.parametrize(
        ("statuses", "expected"),
        [
            ([], PASS),
            ([PASS, EXEMPT], PASS),
            ([PASS, UNDECIDED], UNDECIDED),
            ([UNDECIDED, FAIL, PASS], FAIL),
        ],
    )
    def test_combine(self, statuses, expected):
        assert combine_status(statuses) == expected

    def test_exit_codes(self):
        assert exit_code_for(PASS) == EXIT_OK
        assert exit_code_for(FAIL) == EXIT_FAILED
        assert exit_code_for(UNDECIDED) == EXIT_UNDECIDED


class TestExactCheck:
    def test_zero_margin(self):
        assert exact_check("x", Fraction(0)).status == PASS
        assert exact_check("x", Fraction(0), strict=True).status == FAIL

    def test_quadratic_margin(self):
        assert exact_check("x", QuadNum(Fraction(3), Fraction(-2), 2)).status == PASS
        assert exact_check("x", QuadNum(Fraction(1), Fraction(-1), 2)).status == FAIL

    def test_identity_margin(self):
        assert identity_margin(Fraction(0)) == 0
        assert identity_margin(Fraction(1, 10)) < 0
        assert identity_margin(Fraction(-1, 10)) < 0


class TestDecide:
    """Sound comparison against a transcendental constant."""

    def test_pass(self):
        status, margin, trace = decide(QuadNum.of(1, 2), QuadNum.of(2, 2), lambda b: exp_enclosure(-1, b))
        assert status == PASS
        assert margin > 0
        assert trace == [128]

    def test_fail(self):
        status, margin, _ = decide(QuadNum.of(1, 2), QuadNum.of(3, 2), lambda b: exp_enclosure(-1, b))
        assert status == FAIL
        assert margin < 0

    def test_at_most(self):
        status, _, _ = decide(QuadNum.of(2, 2), Fraction(1), lambda b: exp_enclosure(1, b), at_least=False)
        assert status == PASS

    def test_undecided_at_cap(self):
        status, _, trace = decide(
            QuadNum.of(1, 2), Fraction(1), lambda b: Enclosure(Fraction(1, 2), Fraction(3, 2)), bits=8, max_bits=32
        )
        assert status == UNDECIDED
        assert trace == [8, 16, 32]

    def test_refines_until_decided(self):
        requested = []

        def narrowing(bits):
            requested.append(bits)
            slack = Fraction(1, bits)
            return Enclosure(Fraction(1, 2) - slack, Fraction(1, 2) + slack)

        status, _, trace = decide(QuadNum.of(Fraction(1, 2) + Fraction(1, 20), 2), Fraction(1), narrowing, bits=8)
        assert status == PASS
        assert trace == [8, 16, 32]
        assert requested == trace


class TestReport:
    def _report(self):
        prop = PropertyResult(
            "domination",
            [exact_check("t=1", Fraction(3)), exact_check("t=2", Fraction(1, 2)), CheckResult("t=0", EXEMPT)],
        )
        return Report("Sample", [prop], {"n": 9})

    def test_worst_is_smallest_margin(self):
        assert self._report().get("domination").worst().label == "t=2"

    def test_missing_property(self):
        with pytest.raises(KeyError):
            self._report().get("smoothness")

    def test_json(self):
        data = self._report().to_json()
        assert data["status"] == PASS
        assert data["fields"] == {"n": 9}
        assert data["properties"][0]["checks"][1]["margin"] == "1/2"

    def test_markdown_summary(self):
        text = markdown_summary(self._report())
        assert text.startswith("### Sample")
        assert "domination" in text
        assert "t=2" in text

    def test_markdown_summary_empty(self):
        assert markdown_summary(Report("Empty")) == "Empty: no properties checked\n"


class TestRunner:
    def test_preserves_order_in_parallel(self):
        tasks = [lambda i=i: i * i for i in range(50)]
        assert run_checks(tasks, jobs=4) == [i * i for i in range(50)]

    def test_inline(self):
        assert run_checks([lambda: "a", lambda: "b"], jobs=1) == ["a", "b"]

    def test_adaptive_jobs_without_psutil(self, monkeypatch):
        monkeypatch.setattr(report_module, "HAS_PSUTIL", False)
        assert get_system_adaptive_jobs(8) == (7, "auto-detected, no psutil available")
        assert get_system_adaptive_jobs(1)[0] == 1

    def test_adaptive_jobs_low_usage(self, mocker, monkeypatch):
        monkeypatch.setattr(report_module, "HAS_PSUTIL", True)
        mocker.patch.object(report_module.psutil, "cpu_percent", return_value=20.0)
        mocker.patch.object(report_module.psutil, "virtual_memory", return_value=mocker.Mock(percent=40.0))
        jobs, reason = get_system_adaptive_jobs(8)
        assert jobs == 7
        assert reason == "auto-detected, low CPU (20.0%), low memory (40.0%)"

    def test_adaptive_jobs_high_cpu(self, mocker, monkeypatch):
        monkeypatch.setattr(report_module, "HAS_PSUTIL", True)
        mocker.patch.object(report_module.psutil, "cpu_percent", return_value=90.0)
        mocker.patch.object(report_module.psutil, "virtual_memory", return_value=mocker.Mock(percent=50.0))
        jobs, reason = get_system_adaptive_jobs(8)
        assert jobs == 4
        assert reason.startswith("auto-detected, high CPU")

    def test_adaptive_jobs_probe_failure(self, mocker, monkeypatch):
        monkeypatch.setattr(report_module, "HAS_PSUTIL", True)
        mocker.patch.object(report_module.psutil, "cpu_percent", side_effect=OSError("denied"))
        assert get_system_adaptive_jobs(4) == (3, "auto-detected, system usage check failed")
