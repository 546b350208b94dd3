"""Lift the grid witness to the hypercube and check the psi-pair preconditions.

Everything is done on Hamming-weight classes: a symmetric function on
{-1, 1}^m is stored as one value per weight k = 0..m (weight counts the -1
entries), and inner products with polynomials reduce to moments in the
variable s = m - 2k by symmetrization. The cube itself is only enumerated by the
small-arity oracle ``pointwise_l1_norm``.

Design notes:

- The lifted witness is ``R'(x) = R(n - |x|) / C(2n, |x|)``; it inherits unit
  l1 norm, one-sided domination and pure high degree from ``R``.
- ``psi1`` is the lift of ``R`` and ``psi0`` the lift of ``t -> R(-t)``, so
  ``psi0[k] == psi1[2n - k]``.
- Which Boolean function the pair is paired with is ambiguous (the final
  argument negates Majority), so both orientations are checked and the one
  that holds is recorded.

Example:
    ```python
    from smoothdual.dualwitness import build_witness, witness_params
    from smoothdual.lift import build_psi_pair, verify_psi_pair

    pair = build_psi_pair(build_witness(witness_params(9, 1)))
    print(verify_psi_pair(pair).fields["orientation"])
    ```

Dependencies:
    - `smoothdual.exactnum`, `smoothdual.dualwitness`, `smoothdual.report`.
"""

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from smoothdual.dualwitness import (
    NEGATIVE_SIDE_FLOOR_NUMERATOR,
    NEGATIVE_SIDE_POWER,
    POSITIVE_SIDE_POWER,
    GridFn,
    ParameterMismatch,
    WitnessCert,
    delta_enclosure,
    smoothness_enclosure,
)
from smoothdual.exactnum import Enclosure, QuadNum, binomial, format_rational
from smoothdual.report import (
    DEFAULT_PRECISION_BITS,
    MAX_PRECISION_BITS,
    PASS,
    UNDECIDED,
    CheckResult,
    PropertyResult,
    Report,
    decide,
    decided_check,
    exact_check,
    identity_margin,
    run_checks,
)

MAX_POINTWISE_VARIABLES = 16

ORIENTATION_NEG_MAJ = "f(x)=1 iff |x| >= n+1"
ORIENTATION_MAJ = "f(x)=-1 iff |x| >= n (MAJ)"


@dataclass(frozen=True)
class SymFn:
    """Symmetric function on {-1, 1}^m stored by Hamming-weight class.

    Attributes:
        m (int): Number of variables.
        delta (int): Radicand of the value field.
        weights (tuple[QuadNum, ...]): Common value on each weight class 0..m.
    """

    m: int
    delta: int
    weights: tuple[QuadNum, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != self.m + 1:
            raise ValueError(f"SymFn on {self.m} variables needs {self.m + 1} weight values, got {len(self.weights)}")

    def __getitem__(self, k: int) -> QuadNum:
        return self.weights[k]

    def l1_norm(self) -> QuadNum:
        total = QuadNum.zero(self.delta)
        for k, value in enumerate(self.weights):
            if not value.is_zero():
                total = total + abs(value) * binomial(self.m, k)
        return total

    def __call__(self, x: Sequence[int]) -> QuadNum:
        """Pointwise value at a +-1 vector."""
        if len(x) != self.m:
            raise ValueError(f"Expected {self.m} coordinates, got {len(x)}")
        return self.weights[sum(1 for xi in x if xi == -1)]

    def swapped_sign(self) -> "SymFn":
        return SymFn(self.m, self.delta, tuple(-w for w in self.weights))

    def to_json(self) -> dict[str, object]:
        rows = []
        for k, value in enumerate(self.weights):
            rows.append({"k": k, "a": format_rational(value.a), "b": format_rational(value.b)})
        return {"m": self.m, "delta_int": self.delta, "weights": rows}

    @classmethod
    def from_json(cls, data: dict) -> "SymFn":
        m, delta = int(data["m"]), int(data["delta_int"])
        values = [QuadNum.zero(delta)] * (m + 1)
        for row in data["weights"]:
            values[int(row["k"])] = QuadNum.from_json({"a": row["a"], "b": row["b"], "delta": delta})
        return cls(m, delta, tuple(values))

    @classmethod
    def from_rationals(cls, values: Sequence[int | Fraction], delta: int = 1) -> "SymFn":
        return cls(len(values) - 1, delta, tuple(QuadNum.of(v, delta) for v in values))


@dataclass(frozen=True)
class PsiPair:
    """The pair (psi0, psi1) with the domination constant and pure-high-degree target.

    Attributes:
        psi0 (SymFn): Lift of the reflected witness.
        psi1 (SymFn): Lift of the witness.
        delta_int (int): Radicand; the constant is exp(-18/sqrt(delta_int)).
        delta_enclosure (Enclosure): Enclosure of that constant at construction precision.
        phd_target (int): Degree up to which both functions must be orthogonal (d - 2).
    """

    psi0: SymFn
    psi1: SymFn
    delta_int: int
    delta_enclosure: Enclosure
    phd_target: int

    def swapped(self) -> "PsiPair":
        return PsiPair(self.psi1, self.psi0, self.delta_int, self.delta_enclosure, self.phd_target)


def lift_grid(R: GridFn) -> SymFn:
    """Lift a grid function on {-n..n} to 2n variables: weight k gets R(n-k)/C(2n,k)."""
    m = 2 * R.n
    return SymFn(m, R.delta, tuple(R[R.n - k] / binomial(m, k) for k in range(m + 1)))


def lift_witness(cert: WitnessCert) -> SymFn:
    """The lifted witness ``R'`` of a grid certificate."""
    return lift_grid(cert.R)


def build_psi_pair(cert: WitnessCert) -> PsiPair:
    """Build (psi0, psi1) from a witness; both must already have unit l1 norm.

    Raises:
        ParameterMismatch: If the witness is not l1-normalized.
    """
    psi1 = lift_grid(cert.R)
    psi0 = lift_grid(cert.R.reflected())
    for name, psi in (("psi0", psi0), ("psi1", psi1)):
        if psi.l1_norm() != 1:
            raise ParameterMismatch(f"{name} has l1 norm {psi.l1_norm()}, expected 1")
    p = cert.params
    return PsiPair(psi0, psi1, p.delta_int, p.delta_lower, p.d - 2)


def orthogonality_symmetric(g: SymFn, kmax: int) -> list[QuadNum]:
    """Moments ``<g, (x_1 + ... + x_m)^j>`` for j = 0..kmax.

    All-zero output certifies orthogonality to every polynomial of degree
    at most ``kmax``. A negative ``kmax`` gives the empty list.
    """
    if kmax > g.m:
        raise ValueError(f"kmax={kmax} exceeds the number of variables {g.m}")
    moments = []
    for j in range(kmax + 1):
        total = QuadNum.zero(g.delta)
        for k, value in enumerate(g.weights):
            if not value.is_zero():
                total = total + value * (binomial(g.m, k) * (g.m - 2 * k) ** j)
        moments.append(total)
    return moments


def weight_fraction_in_band(n: int, width: int) -> Fraction:
    """Exact fraction of {-1, 1}^(2n) with Hamming weight within ``width`` of n."""
    if not 0 <= width <= n:
        raise ValueError(f"width={width} outside [0, {n}]")
    count = sum(binomial(2 * n, k) for k in range(n - width, n + width + 1))
    return Fraction(count, 1 << (2 * n))


def _domination_checks(
    dominant: SymFn,
    other: SymFn,
    classes: Sequence[int],
    delta_int: int,
    bits: int,
    max_bits: int,
) -> list[CheckResult]:
    const = lambda b: delta_enclosure(delta_int, b)  # noqa: E731
    return [decided_check(f"k={k}", decide(dominant[k], abs(other[k]), const, True, bits, max_bits)) for k in classes]


def _orientation(pair: PsiPair, maj: bool, bits: int, max_bits: int) -> PropertyResult:
    m = pair.psi1.m
    n = m // 2
    if maj:
        checks = _domination_checks(pair.psi0, pair.psi1, range(0, n), pair.delta_int, bits, max_bits)
        checks += _domination_checks(pair.psi1, pair.psi0, range(n, m + 1), pair.delta_int, bits, max_bits)
        return PropertyResult("orientation", checks, note=ORIENTATION_MAJ)
    checks = _domination_checks(pair.psi1, pair.psi0, range(0, n), pair.delta_int, bits, max_bits)
    checks += _domination_checks(pair.psi0, pair.psi1, range(n + 1, m + 1), pair.delta_int, bits, max_bits)
    checks.append(exact_check(f"k={n} psi0", -abs(pair.psi0[n])))
    checks.append(exact_check(f"k={n} psi1", -abs(pair.psi1[n])))
    return PropertyResult("orientation", checks, note=ORIENTATION_NEG_MAJ)


def _pure_high_degree(name: str, functions: Sequence[tuple[str, SymFn]], kmax: int) -> PropertyResult:
    prop = PropertyResult(name)
    if kmax < 0:
        prop.note = "vacuous: target degree below 0"
    for label, g in functions:
        for j, moment in enumerate(orthogonality_symmetric(g, kmax)):
            prop.checks.append(exact_check(f"{label} j={j}", identity_margin(moment)))
    return prop


def verify_psi_pair(
    pair: PsiPair,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> Report:
    """Check the domination, pure-high-degree and nontriviality preconditions.

    Both orientations are tried; the report's ``orientation`` property holds the
    one that passes (or the most informative failing one) and
    ``fields["orientation"]`` names it.

    Args:
        pair (PsiPair): Pair to check.
        bits (int): Starting precision.
        max_bits (int): Precision cap.

    Returns:
        Report: Properties ``orientation``, ``pure_high_degree``, ``nontrivial``.
    """
    if pair.psi0.m != pair.psi1.m or pair.psi1.m % 2:
        raise ParameterMismatch(f"psi0 on {pair.psi0.m} and psi1 on {pair.psi1.m} variables")
    neg_maj = _orientation(pair, False, bits, max_bits)
    maj = _orientation(pair, True, bits, max_bits)
    if neg_maj.status == PASS:
        chosen, name = neg_maj, ORIENTATION_NEG_MAJ
    elif maj.status == PASS:
        chosen, name = maj, ORIENTATION_MAJ
    elif UNDECIDED in (neg_maj.status, maj.status):
        chosen = neg_maj if neg_maj.status == UNDECIDED else maj
        name = "undecided"
    else:
        chosen, name = neg_maj, "none"
    phd = _pure_high_degree("pure_high_degree", [("psi0", pair.psi0), ("psi1", pair.psi1)], pair.phd_target)
    nontrivial = PropertyResult(
        "nontrivial",
        [exact_check("psi0", pair.psi0.l1_norm(), strict=True), exact_check("psi1", pair.psi1.l1_norm(), strict=True)],
    )
    report = Report(
        f"Psi pair m={pair.psi1.m}",
        [chosen, phd, nontrivial],
        {
            "orientation": name,
            "orientation_status": {ORIENTATION_NEG_MAJ: neg_maj.status, ORIENTATION_MAJ: maj.status},
            "phd_target": pair.phd_target,
            "delta_int": pair.delta_int,
        },
    )
    logging.info(f"{report.title}: {report.status} (orientation: {name})")
    return report


def verify_lift(
    cert: WitnessCert,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
    jobs: int = 1,
    progress: bool = False,
) -> Report:
    """Check the lifted witness in weight-class form.

    Args:
        cert (WitnessCert): Grid witness to lift.
        bits (int): Starting precision.
        max_bits (int): Precision cap.
        jobs (int): Worker threads for per-class checks.
        progress (bool): Show progress bars.

    Returns:
        Report: Properties ``l1_norm``, ``domination``, ``pure_high_degree``,
        ``smoothness`` plus the exact band fractions as fields.
    """
    p = cert.params
    lifted = lift_witness(cert)
    n, m = p.n, 2 * p.n
    norm = lifted.l1_norm()
    l1 = PropertyResult("l1_norm", [exact_check("sum C(2n,k)|R'(k)| - 1", identity_margin(norm - 1))])
    const = lambda b: delta_enclosure(p.delta_int, b)  # noqa: E731

    def domination(t: int) -> CheckResult:
        return decided_check(f"t={t}", decide(lifted[n - t], abs(lifted[n + t]), const, True, bits, max_bits))

    dom = PropertyResult(
        "domination",
        run_checks([lambda t=t: domination(t) for t in range(1, n + 1)], "Lift domination", jobs, progress),
        note="R'(n-t) >= delta_hi * |R'(n+t)|",
    )
    phd = _pure_high_degree("pure_high_degree", [("R'", lifted)], p.d - 2)
    floor_negative = Fraction(NEGATIVE_SIDE_FLOOR_NUMERATOR, n**NEGATIVE_SIDE_POWER)
    positive_scale = Fraction(1, 8 * n**POSITIVE_SIDE_POWER)

    def smooth(k: int) -> CheckResult:
        scaled = abs(lifted[k]) * binomial(m, k)
        if k > n:
            return exact_check(f"k={k}", scaled - floor_negative)
        return decided_check(f"k={k}", decide(scaled, positive_scale, smoothness_enclosure, True, bits, max_bits))

    band = [k for k in range(n - p.u_max, n + p.u_max + 1) if k != n]
    smoothness = PropertyResult(
        "smoothness",
        run_checks([lambda k=k: smooth(k) for k in band], "Lift smoothness", jobs, progress),
        note="|R'(k)| >= c(n)/C(2n,k) >= c(n)/2^(2n) for 0 < |k-n| <= u_max",
    )
    in_band = weight_fraction_in_band(n, p.u_max)
    center = Fraction(binomial(m, n), 1 << m)
    report = Report(
        f"Lift n={n} d={p.d}",
        [l1, dom, phd, smoothness],
        {
            "m": m,
            "band_width": p.u_max,
            "band_fraction": format_rational(in_band),
            "smooth_fraction": format_rational(in_band - center),
            "exception_fraction": format_rational(1 - in_band + center),
        },
    )
    logging.info(f"{report.title}: {report.status}")
    return report


def pointwise_l1_norm(g: SymFn) -> QuadNum:
    """l1 norm by enumerating the whole cube (at most 16 variables)."""
    _check_pointwise(g)
    total = QuadNum.zero(g.delta)
    for x in itertools.product((1, -1), repeat=g.m):
        total = total + abs(g(x))
    return total


def pointwise_correlation(g: SymFn, subset: Sequence[int]) -> QuadNum:
    """``<g, prod_{i in subset} x_i>`` by enumerating the cube (at most 16 variables)."""
    _check_pointwise(g)
    total = QuadNum.zero(g.delta)
    for x in itertools.product((1, -1), repeat=g.m):
        chi = 1
        for i in subset:
            chi *= x[i]
        total = total + g(x) * chi
    return total


def _check_pointwise(g: SymFn) -> None:
    if g.m > MAX_POINTWISE_VARIABLES:
        raise ValueError(f"Pointwise enumeration limited to {MAX_POINTWISE_VARIABLES} variables, got {g.m}")
