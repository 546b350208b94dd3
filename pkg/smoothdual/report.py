"""Property reports, sound inequality decisions and the parallel check runner.

Every verifier in the package produces a ``Report``: a list of named
properties, each a list of individual checks with an exact margin (positive or
zero means satisfied). A check is ``pass``, ``fail``, ``undecided`` (the
enclosures of the transcendental constants were still too wide at the
precision cap) or ``exempt``.

Example:
    ```python
    from smoothdual.report import decide, PASS
    from smoothdual.exactnum import QuadNum, exp_enclosure

    status, margin, trace = decide(QuadNum.of(1, 2), QuadNum.of(2, 2), lambda b: exp_enclosure(-1, b))
    assert status == PASS
    ```

Dependencies:
    - `tqdm`: For progress bars over long check lists.
    - `py_markdown_table`: For the human-readable summary table.
    - `psutil` (optional): For system-adaptive worker counts.
"""

import concurrent.futures
import logging
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TypeVar

from py_markdown_table.markdown_table import markdown_table
from tqdm import tqdm

from smoothdual.exactnum import Enclosure, QuadNum, format_rational, quad_sign

try:
    import psutil

    HAS_PSUTIL = True
except ImportError:
    HAS_PSUTIL = False

PASS = "pass"
FAIL = "fail"
UNDECIDED = "undecided"
EXEMPT = "exempt"

DEFAULT_PRECISION_BITS = 128
MAX_PRECISION_BITS = 4096

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2
EXIT_UNDECIDED = 3

T = TypeVar("T")
Margin = QuadNum | Fraction


def combine_status(statuses: Sequence[str]) -> str:
    """Fold check statuses: any failure wins, then any undecided, else pass."""
    if FAIL in statuses:
        return FAIL
    if UNDECIDED in statuses:
        return UNDECIDED
    return PASS


def exit_code_for(status: str) -> int:
    return {FAIL: EXIT_FAILED, UNDECIDED: EXIT_UNDECIDED}.get(status, EXIT_OK)


def margin_to_json(margin: Margin | None) -> object:
    if margin is None:
        return None
    if isinstance(margin, QuadNum):
        return margin.to_json()
    return format_rational(margin)


def margin_approx(margin: Margin | None) -> str:
    if margin is None:
        return "-"
    value = margin.approx() if isinstance(margin, QuadNum) else float(margin)
    return f"{value:.6g}"


@dataclass
class CheckResult:
    """Outcome of one inequality or identity check.

    Attributes:
        label (str): Where the check applies, e.g. ``t=3`` or ``u=2,j=1``.
        status (str): One of ``pass``, ``fail``, ``undecided``, ``exempt``.
        margin (QuadNum | Fraction | None): Exact slack; nonnegative when satisfied.
        trace (list[int]): Precisions tried, in order, for enclosure-dependent checks.
        note (str): Free-form remark.
    """

    label: str
    status: str
    margin: Margin | None = None
    trace: list[int] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict[str, object]:
        data: dict[str, object] = {"label": self.label, "status": self.status, "margin": margin_to_json(self.margin)}
        if self.trace:
            data["precision_trace"] = list(self.trace)
        if self.note:
            data["note"] = self.note
        return data


@dataclass
class PropertyResult:
    """All checks belonging to one named property."""

    name: str
    checks: list[CheckResult] = field(default_factory=list)
    note: str = ""

    @property
    def status(self) -> str:
        return combine_status([c.status for c in self.checks])

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == FAIL]

    def undecided(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == UNDECIDED]

    def worst(self) -> CheckResult | None:
        """The decided check with the smallest margin."""
        decided = [c for c in self.checks if c.status in (PASS, FAIL) and c.margin is not None]
        if not decided:
            return None
        worst = decided[0]
        for check in decided[1:]:
            if _margin_sign(check.margin - worst.margin) < 0:
                worst = check
        return worst

    def max_precision(self) -> int:
        return max((max(c.trace) for c in self.checks if c.trace), default=0)

    def to_json(self) -> dict[str, object]:
        worst = self.worst()
        data: dict[str, object] = {
            "name": self.name,
            "status": self.status,
            "checks": [c.to_json() for c in self.checks],
            "worst": worst.label if worst else None,
        }
        if self.note:
            data["note"] = self.note
        return data


@dataclass
class Report:
    """A titled list of property results plus descriptive fields."""

    title: str
    properties: list[PropertyResult] = field(default_factory=list)
    fields: dict[str, object] = field(default_factory=dict)

    @property
    def status(self) -> str:
        return combine_status([p.status for p in self.properties])

    def get(self, name: str) -> PropertyResult:
        for prop in self.properties:
            if prop.name == name:
                return prop
        raise KeyError(name)

    def precision_used(self) -> int:
        return max((p.max_precision() for p in self.properties), default=0)

    def to_json(self) -> dict[str, object]:
        return {
            "title": self.title,
            "status": self.status,
            "fields": self.fields,
            "properties": [p.to_json() for p in self.properties],
        }

    def summary_rows(self) -> list[dict[str, str]]:
        rows = []
        for prop in self.properties:
            worst = prop.worst()
            rows.append(
                {
                    "Property": prop.name,
                    "Status": prop.status,
                    "Checks": str(len(prop.checks)),
                    "Worst": worst.label if worst else "-",
                    "Margin": margin_approx(worst.margin) if worst else "-",
                }
            )
        return rows


def markdown_summary(report: Report) -> str:
    """Render the report's property summary as a markdown table."""
    rows = report.summary_rows()
    if not rows:
        return f"{report.title}: no properties checked\n"
    table = markdown_table(rows).set_params(quote=False, row_sep="markdown").get_markdown()
    return f"### {report.title}\n\n{table}\n"


def _margin_sign(value: Margin) -> int:
    if isinstance(value, QuadNum):
        return quad_sign(value)
    return (value > 0) - (value < 0)


def exact_check(label: str, margin: Margin, strict: bool = False, note: str = "") -> CheckResult:
    """Classify an exact margin: satisfied when ``margin >= 0`` (``> 0`` if strict)."""
    sign = _margin_sign(margin)
    ok = sign > 0 if strict else sign >= 0
    return CheckResult(label, PASS if ok else FAIL, margin, note=note)


def decide(
    lhs: QuadNum,
    rhs: Margin,
    constant: Callable[[int], Enclosure],
    at_least: bool = True,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> tuple[str, Margin, list[int]]:
    """Soundly decide ``lhs >= c*rhs`` (or ``lhs <= c*rhs``) for a transcendental ``c``.

    ``rhs`` must be nonnegative and ``constant(bits)`` must return nested
    enclosures of ``c``. A check passes only against the unfavourable endpoint
    and fails only against the favourable one; otherwise precision is doubled
    until ``max_bits``.

    Args:
        lhs (QuadNum): Left-hand side.
        rhs (QuadNum | Fraction): Nonnegative factor multiplying the constant.
        constant (Callable[[int], Enclosure]): Enclosure of the constant at a given precision.
        at_least (bool): ``True`` for ``>=``, ``False`` for ``<=``.
        bits (int): Starting precision.
        max_bits (int): Precision cap.

    Returns:
        tuple[str, QuadNum | Fraction, list[int]]: Status, exact margin and precision trace.
    """
    trace: list[int] = []
    b = bits
    while True:
        trace.append(b)
        c = constant(b)
        if at_least:
            strong = lhs - rhs * c.hi
            weak = lhs - rhs * c.lo
        else:
            strong = rhs * c.lo - lhs
            weak = rhs * c.hi - lhs
        if _margin_sign(strong) >= 0:
            return PASS, strong, trace
        if _margin_sign(weak) < 0:
            return FAIL, weak, trace
        if b >= max_bits:
            logging.warning(f"Undecided at precision cap {max_bits} bits (trace {trace})")
            return UNDECIDED, strong, trace
        logging.debug(f"Refining precision {b} -> {min(2 * b, max_bits)}")
        b = min(2 * b, max_bits)


def decided_check(label: str, outcome: tuple[str, Margin, list[int]], note: str = "") -> CheckResult:
    status, margin, trace = outcome
    return CheckResult(label, status, margin, trace, note)


def get_system_adaptive_jobs(cpu_count: int | None = None) -> tuple[int, str]:
    """Pick a worker count from the current system load.

    Args:
        cpu_count (int | None): Logical CPUs; detected when omitted.

    Returns:
        tuple[int, str]: Number of workers and the reason for the choice.
    """
    cpus = cpu_count or os.cpu_count() or 4
    max_jobs = max(cpus - 1, 1)
    if not HAS_PSUTIL:
        return max_jobs, "auto-detected, no psutil available"
    try:
        cpu_usage = psutil.cpu_percent(interval=0.1)
        mem_usage = psutil.virtual_memory().percent
    except Exception as e:
        logging.debug(f"Failed to check system usage: {e}")
        return max_jobs, "auto-detected, system usage check failed"
    if cpu_usage < 70 and mem_usage < 90:
        return max_jobs, f"auto-detected, low CPU ({cpu_usage:.1f}%), low memory ({mem_usage:.1f}%)"
    jobs = max(int(max_jobs * 0.6), 1)
    return jobs, f"auto-detected, high CPU ({cpu_usage:.1f}%) or memory ({mem_usage:.1f}%)"


def run_checks(
    tasks: Sequence[Callable[[], T]],
    desc: str = "Checking",
    jobs: int = 1,
    progress: bool = False,
) -> list[T]:
    """Run independent check thunks, returning results in task order.

    Args:
        tasks (Sequence[Callable[[], T]]): Zero-argument callables.
        desc (str): Progress bar label.
        jobs (int): Worker threads; 1 runs inline.
        progress (bool): Show a tqdm progress bar on stderr.

    Returns:
        list[T]: One result per task, in submission order.
    """
    results: list[T | None] = [None] * len(tasks)
    with tqdm(total=len(tasks), desc=desc, unit="check", disable=not progress) as pbar:
        if jobs <= 1:
            for i, task in enumerate(tasks):
                results[i] = task()
                pbar.update(1)
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as executor:
                futures = {executor.submit(task): i for i, task in enumerate(tasks)}
                for future in concurrent.futures.as_completed(futures):
                    results[futures[future]] = future.result()
                    pbar.update(1)
    return results  # type: ignore[return-value]


def identity_margin(residual: Margin) -> Margin:
    """Turn an identity residual into a margin: zero passes, anything else is negative."""
    if residual == 0:
        return residual
    return -abs(residual) - 1
