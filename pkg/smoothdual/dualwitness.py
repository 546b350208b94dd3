"""Smooth dual witness for Majority: construction and machine-checked properties.

The witness lives on the integer grid {-n, ..., n}. For every shift ``u`` up to
floor(n^(2/3)) a polynomial ``r_u`` of degree 2n+1-d is pinned to vanish off the
support set S_u = {+-u, +-u*D, ..., +-u*D^(d-1)} (D = floor(n^(1/(3d)))). The
scaled values ``p_u(t) = C(2n, n+t) * r_u(t)`` have a closed form that never
touches (2n)!, and the witness is

    P(t) = sum_u u^20 * p_u(t) / ||p_u||_1,     R(t) = (-1)^t * P(t) / ||P||_1.

All values are exact elements of Q[sqrt(D)].

Verification covers the four witness properties (unit l1 norm, one-sided
domination, exact orthogonality to low-degree polynomials, smoothness) and the
auxiliary inequalities on each ``p_u``: the mass at ``-u``, the small tails,
the two-sided comparability and the two-point mass fraction.

Example:
    ```python
    from smoothdual.dualwitness import witness_params, build_witness, verify_witness

    cert = build_witness(witness_params(9, 1))
    print(verify_witness(cert).status)   # pass
    ```

Dependencies:
    - `smoothdual.exactnum`: Exact field arithmetic and certified enclosures.
    - `smoothdual.report`: Report types and the sound decision procedure.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from smoothdual.exactnum import (
    Enclosure,
    QuadNum,
    binomial,
    exp_enclosure,
    exp_of_enclosure,
    int_root,
    quad_sign,
    sqrt_enclosure,
)
from smoothdual.report import (
    DEFAULT_PRECISION_BITS,
    EXEMPT,
    MAX_PRECISION_BITS,
    CheckResult,
    PropertyResult,
    Report,
    decide,
    decided_check,
    exact_check,
    identity_margin,
    run_checks,
)

WEIGHT_EXPONENT = 20
NEGATIVE_SIDE_FLOOR_NUMERATOR = 20
POSITIVE_SIDE_POWER = 15
NEGATIVE_SIDE_POWER = 20
# Orthogonality is cross-checked through the binomial identity up to this n.
CROSS_CHECK_MAX_N = 65


class EvenN(Exception):
    def __init__(self, n: int):
        super().__init__(f"n must be odd, got {n}")


class DegreeOutOfRange(Exception):
    def __init__(self, n: int, d: int):
        super().__init__(f"d={d} out of range for n={n}: need 1 <= d and 2^(3d) <= n")


class OutOfRange(Exception):
    def __init__(self, what: str, value: int, lo: int, hi: int):
        super().__init__(f"{what}={value} outside [{lo}, {hi}]")


class ParameterMismatch(Exception):
    def __init__(self, message: str):
        super().__init__(f"Parameter mismatch: {message}")


@lru_cache(maxsize=256)
def delta_enclosure(delta_int: int, bits: int) -> Enclosure:
    """Enclosure of exp(-18/sqrt(delta_int))."""
    return exp_of_enclosure(_neg_18_over_sqrt(delta_int, bits), bits)


@lru_cache(maxsize=256)
def two_point_enclosure(delta_int: int, bits: int) -> Enclosure:
    """Enclosure of exp(-18/sqrt(delta_int) - 4)."""
    return exp_of_enclosure(_neg_18_over_sqrt(delta_int, bits) - 4, bits)


def smoothness_enclosure(bits: int) -> Enclosure:
    """Enclosure of exp(-18/sqrt(2) - 4), the positive-side smoothness constant."""
    return two_point_enclosure(2, bits)


def _neg_18_over_sqrt(delta_int: int, bits: int) -> Enclosure:
    root = sqrt_enclosure(delta_int, bits + 8)
    return Enclosure(Fraction(-18) / root.lo, Fraction(-18) / root.hi)


@dataclass(frozen=True)
class WitnessParams:
    """Validated parameters of the construction.

    Attributes:
        n (int): Odd half-arity; the grid is {-n, ..., n}.
        d (int): Pure-high-degree target.
        delta_int (int): floor(n^(1/(3d))).
        u_max (int): floor(n^(2/3)).
        delta_lower (Enclosure): Enclosure of exp(-18/sqrt(delta_int)).
    """

    n: int
    d: int
    delta_int: int
    u_max: int
    delta_lower: Enclosure

    def to_json(self) -> dict[str, object]:
        return {
            "n": self.n,
            "d": self.d,
            "delta_int": self.delta_int,
            "u_max": self.u_max,
            "weight_exponent": WEIGHT_EXPONENT,
            "delta": self.delta_lower.to_json(),
        }


def witness_params(n: int, d: int, bits: int = DEFAULT_PRECISION_BITS) -> WitnessParams:
    """Validate ``(n, d)`` and derive the construction parameters.

    Args:
        n (int): Odd grid half-width.
        d (int): Degree parameter with 1 <= d <= log2(n)/3.
        bits (int): Precision of the delta enclosure.

    Returns:
        WitnessParams: The derived parameters.

    Raises:
        EvenN: If ``n`` is even (or not positive).
        DegreeOutOfRange: If ``d`` violates 1 <= d <= log2(n)/3.
    """
    if n < 1 or n % 2 == 0:
        raise EvenN(n)
    if d < 1 or (1 << (3 * d)) > n:
        raise DegreeOutOfRange(n, d)
    delta_int = int_root(n, 3 * d)
    u_max = int_root(n * n, 3)
    assert delta_int >= 2, f"delta_int={delta_int} < 2 for n={n}, d={d}"
    assert u_max * delta_int ** (d - 1) <= n, "largest support point leaves the grid"
    logging.debug(f"witness_params: n={n}, d={d}, delta_int={delta_int}, u_max={u_max}")
    return WitnessParams(n, d, delta_int, u_max, delta_enclosure(delta_int, bits))


def support_set(u: int, p: WitnessParams) -> tuple[int, ...]:
    """The 2d signed support points of ``p_u``, sorted ascending."""
    if not 1 <= u <= p.u_max:
        raise OutOfRange("u", u, 1, p.u_max)
    return _support(u, p.d, p.delta_int)


@lru_cache(maxsize=4096)
def _support(u: int, d: int, delta_int: int) -> tuple[int, ...]:
    positive = [u * delta_int**i for i in range(d)]
    return tuple(sorted([-s for s in positive] + positive))


@lru_cache(maxsize=4096)
def _p_u_values(u: int, n: int, d: int, delta_int: int) -> dict[int, QuadNum]:
    support = _support(u, d, delta_int)
    roots = [QuadNum(0, u * delta_int**i, delta_int) for i in range(d)]
    values: dict[int, QuadNum] = {}
    for t in support:
        numerator = QuadNum.of(1 if (n - t) % 2 == 0 else -1, delta_int)
        for root in roots:
            numerator = numerator * (t - root)
        denominator = math.prod(t - s for s in support if s != t)
        values[t] = numerator / denominator
    return values


def _check_grid_point(t: int, p: WitnessParams) -> None:
    if not -p.n <= t <= p.n:
        raise OutOfRange("t", t, -p.n, p.n)


def eval_p_u(u: int, t: int, p: WitnessParams) -> QuadNum:
    """Closed-form value of ``p_u(t) = C(2n, n+t) * r_u(t)``; zero off the support set.

    Args:
        u (int): Shift in [1, u_max].
        t (int): Grid point in [-n, n].
        p (WitnessParams): Construction parameters.

    Returns:
        QuadNum: Exact value in Q[sqrt(delta_int)].
    """
    _check_grid_point(t, p)
    if not 1 <= u <= p.u_max:
        raise ParameterMismatch(f"u={u} not in [1, {p.u_max}] for n={p.n}, d={p.d}")
    return _p_u_values(u, p.n, p.d, p.delta_int).get(t, QuadNum.zero(p.delta_int))


def eval_r_u(u: int, t: int, p: WitnessParams) -> QuadNum:
    """``r_u(t)``, recovered from ``p_u(t)`` by dividing out the binomial."""
    return eval_p_u(u, t, p) / binomial(2 * p.n, p.n + t)


def p_u_norm(u: int, p: WitnessParams) -> QuadNum:
    """``||p_u||_1``: the sum of ``|p_u(t)|`` over the support set."""
    return _p_u_norm(u, p.n, p.d, p.delta_int)


@lru_cache(maxsize=4096)
def _p_u_norm(u: int, n: int, d: int, delta_int: int) -> QuadNum:
    total = QuadNum.zero(delta_int)
    for value in _p_u_values(u, n, d, delta_int).values():
        total = total + abs(value)
    return total


@dataclass
class GridFn:
    """A function on {-n, ..., n} with values in Q[sqrt(delta)]; unlisted points are zero.

    Attributes:
        n (int): Grid half-width.
        delta (int): Radicand of the value field.
        values (dict[int, QuadNum]): Nonzero values by grid point.
    """

    n: int
    delta: int
    values: dict[int, QuadNum] = field(default_factory=dict)

    def __getitem__(self, t: int) -> QuadNum:
        if not -self.n <= t <= self.n:
            raise OutOfRange("t", t, -self.n, self.n)
        return self.values.get(t, QuadNum.zero(self.delta))

    def __setitem__(self, t: int, value: QuadNum) -> None:
        if not -self.n <= t <= self.n:
            raise OutOfRange("t", t, -self.n, self.n)
        if value.is_zero():
            self.values.pop(t, None)
        else:
            self.values[t] = value

    def points(self) -> range:
        return range(-self.n, self.n + 1)

    def support(self) -> list[int]:
        return sorted(t for t, v in self.values.items() if not v.is_zero())

    def l1_norm(self) -> QuadNum:
        total = QuadNum.zero(self.delta)
        for t in self.support():
            total = total + abs(self.values[t])
        return total

    def moment(self, k: int) -> QuadNum:
        """``<self, t^k>`` over the grid."""
        total = QuadNum.zero(self.delta)
        for t in self.support():
            total = total + self.values[t] * (t**k)
        return total

    def reflected(self) -> "GridFn":
        """The grid function ``t -> self(-t)``."""
        return GridFn(self.n, self.delta, {-t: v for t, v in self.values.items()})

    def to_json(self) -> list[dict[str, object]]:
        rows = []
        for t in self.points():
            value = self[t].to_json()
            rows.append({"t": t, "a": value["a"], "b": value["b"]})
        return rows

    @classmethod
    def from_json(cls, n: int, delta: int, rows: list[dict]) -> "GridFn":
        grid = cls(n, delta)
        for row in rows:
            grid[int(row["t"])] = QuadNum.from_json({"a": row["a"], "b": row["b"], "delta": delta})
        return grid


@dataclass
class WitnessCert:
    """The univariate witness with its parameters and (once verified) its report."""

    params: WitnessParams
    R: GridFn
    property_report: Report | None = None


def _combination(p: WitnessParams) -> tuple[dict[int, QuadNum], GridFn, QuadNum]:
    """Per-shift weights ``u^20/||p_u||_1``, the combination P and ``||P||_1``."""
    weights: dict[int, QuadNum] = {}
    P = GridFn(p.n, p.delta_int)
    for u in range(1, p.u_max + 1):
        weight = QuadNum.of(u**WEIGHT_EXPONENT, p.delta_int) / p_u_norm(u, p)
        weights[u] = weight
        for t, value in _p_u_values(u, p.n, p.d, p.delta_int).items():
            P[t] = P[t] + weight * value
    return weights, P, P.l1_norm()


def build_witness(p: WitnessParams) -> WitnessCert:
    """Build ``R(t) = (-1)^t P(t) / ||P||_1`` exactly.

    Args:
        p (WitnessParams): Validated parameters.

    Returns:
        WitnessCert: The witness, not yet verified.
    """
    _, P, norm = _combination(p)
    R = GridFn(p.n, p.delta_int)
    for t in P.support():
        R[t] = P[t] / norm if t % 2 == 0 else -P[t] / norm
    logging.info(f"Built witness for n={p.n}, d={p.d}: support size {len(R.support())}")
    return WitnessCert(p, R)


def check_combinatorial_identity(n: int, coeffs: list[Fraction]) -> Fraction:
    """Evaluate ``sum_{t=-n}^{n} (-1)^t C(2n, n+t) q(t)`` exactly.

    The sum vanishes for every polynomial of degree below 2n.

    Args:
        n (int): Grid half-width.
        coeffs (list[Fraction]): Coefficients of q, lowest degree first.

    Returns:
        Fraction: The exact sum.
    """
    total = Fraction(0)
    for t in range(-n, n + 1):
        value = Fraction(0)
        for c in reversed(coeffs):
            value = value * t + c
        term = binomial(2 * n, n + t) * value
        total += -term if t % 2 else term
    return total


def r_u_coefficients(u: int, p: WitnessParams) -> list[QuadNum]:
    """Coefficients of the polynomial ``r_u``, lowest degree first.

    Forms the full degree-(2n+1-d) product, so it is meant for small n.
    """
    if not 1 <= u <= p.u_max:
        raise OutOfRange("u", u, 1, p.u_max)
    coeffs = [QuadNum.of(1, p.delta_int)]
    for i in range(p.d):
        coeffs = _times_linear(coeffs, QuadNum(0, u * p.delta_int**i, p.delta_int))
    support = set(_support(u, p.d, p.delta_int))
    for s in range(-p.n, p.n + 1):
        if s not in support:
            coeffs = _times_linear(coeffs, QuadNum.of(s, p.delta_int))
    scale = Fraction(1, math.factorial(2 * p.n))
    return [c * scale for c in coeffs]


def _times_linear(coeffs: list[QuadNum], root: QuadNum) -> list[QuadNum]:
    """Multiply a polynomial by ``(t - root)``."""
    zero = QuadNum.zero(root.delta)
    out = [zero] * (len(coeffs) + 1)
    for i, c in enumerate(coeffs):
        out[i + 1] = out[i + 1] + c
        out[i] = out[i] - root * c
    return out


def evaluate_polynomial(coeffs: list[QuadNum], t: int) -> QuadNum:
    value = QuadNum.zero(coeffs[0].delta)
    for c in reversed(coeffs):
        value = value * t + c
    return value


def orthogonality_cross_check(p: WitnessParams, k: int) -> QuadNum:
    """``<R, t^k>`` recomputed through the binomial identity on each ``r_u * t^k``.

    The rational and sqrt parts of every coefficient list are summed separately
    with ``check_combinatorial_identity``.
    """
    weights, _, norm = _combination(p)
    total = QuadNum.zero(p.delta_int)
    for u, weight in weights.items():
        coeffs = [QuadNum.zero(p.delta_int)] * k + r_u_coefficients(u, p)
        a_part = check_combinatorial_identity(p.n, [c.a for c in coeffs])
        b_part = check_combinatorial_identity(p.n, [c.b for c in coeffs])
        total = total + weight * QuadNum(a_part, b_part, p.delta_int)
    return total / norm


def _same_params(cert: WitnessCert) -> None:
    p, R = cert.params, cert.R
    if R.n != p.n or R.delta != p.delta_int:
        raise ParameterMismatch(f"grid (n={R.n}, delta={R.delta}) vs params (n={p.n}, delta={p.delta_int})")


def verify_witness(
    cert: WitnessCert,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
    jobs: int = 1,
    progress: bool = False,
) -> Report:
    """Check the four witness properties and attach the report to ``cert``.

    Args:
        cert (WitnessCert): Witness to check; its values are taken as given.
        bits (int): Starting precision for enclosure-dependent checks.
        max_bits (int): Precision cap; beyond it a check is reported undecided.
        jobs (int): Worker threads for per-point checks.
        progress (bool): Show progress bars.

    Returns:
        Report: Properties ``l1_norm``, ``domination``, ``orthogonality``, ``smoothness``.
    """
    _same_params(cert)
    p, R = cert.params, cert.R
    delta_const = lambda b: delta_enclosure(p.delta_int, b)  # noqa: E731

    l1 = PropertyResult("l1_norm", [exact_check("sum |R(t)| - 1", identity_margin(R.l1_norm() - 1))])

    def domination(t: int) -> CheckResult:
        outcome = decide(R[t], abs(R[-t]), delta_const, True, bits, max_bits)
        return decided_check(f"t={t}", outcome)

    dom_checks = run_checks([lambda t=t: domination(t) for t in range(1, p.n + 1)], "Domination", jobs, progress)
    dom = PropertyResult("domination", dom_checks, note="R(t) >= delta_hi * |R(-t)|, delta = exp(-18/sqrt(D))")

    orth = PropertyResult("orthogonality")
    if p.d < 2:
        orth.note = "vacuous: no polynomial of degree <= d-2"
    for k in range(p.d - 1):
        label = f"k={k}" + (" (d-2)" if k == p.d - 2 else "")
        moment = R.moment(k)
        orth.checks.append(exact_check(label, identity_margin(moment)))
        if p.n <= CROSS_CHECK_MAX_N:
            via_identity = orthogonality_cross_check(p, k)
            orth.checks.append(exact_check(f"cross-check {label}", identity_margin(via_identity - moment)))

    floor_negative = Fraction(NEGATIVE_SIDE_FLOOR_NUMERATOR, p.n**NEGATIVE_SIDE_POWER)
    positive_scale = Fraction(1, 8 * p.n**POSITIVE_SIDE_POWER)

    def smooth(t: int) -> CheckResult:
        if t == 0:
            note = "R(0) = 0" if R[0].is_zero() else "R(0) != 0"
            return CheckResult("t=0", EXEMPT, R[0], note=note)
        if t < 0:
            return exact_check(f"t={t}", abs(R[t]) - floor_negative)
        outcome = decide(abs(R[t]), positive_scale, smoothness_enclosure, True, bits, max_bits)
        return decided_check(f"t={t}", outcome)

    smooth_checks = run_checks(
        [lambda t=t: smooth(t) for t in range(-p.u_max, p.u_max + 1)], "Smoothness", jobs, progress
    )
    smoothness = PropertyResult(
        "smoothness",
        smooth_checks,
        note="|R(t)| >= 20/n^20 for t < 0, >= exp(-18/sqrt(2)-4)/(8 n^15) for t > 0; stated constant e^-15/(8 n^15)",
    )

    report = Report(
        f"Witness n={p.n} d={p.d}",
        [l1, dom, orth, smoothness],
        {
            **p.to_json(),
            "constants": {
                "negative_side": f"{NEGATIVE_SIDE_FLOOR_NUMERATOR}/n^{NEGATIVE_SIDE_POWER}",
                "positive_side_checked": f"exp(-18/sqrt(2)-4)/(8*n^{POSITIVE_SIDE_POWER})",
                "positive_side_stated": f"exp(-15)/(8*n^{POSITIVE_SIDE_POWER})",
            },
        },
    )
    _log_report(report)
    cert.property_report = report
    return report


def claim_two_bound(u: int, p: WitnessParams) -> QuadNum:
    """Lower bound on ``|p_u(-u)|``: ((sqrt(D)+1)/2) * u^-(d-1) * D^(-(d-1)^2/2)."""
    e = (p.d - 1) ** 2
    if e % 2 == 0:
        power = QuadNum.of(Fraction(1, p.delta_int ** (e // 2)), p.delta_int)
    else:
        power = QuadNum(0, Fraction(1, p.delta_int ** ((e + 1) // 2)), p.delta_int)
    return QuadNum(Fraction(1, 2), Fraction(1, 2), p.delta_int) * Fraction(1, u ** (p.d - 1)) * power


def verify_claims(
    p: WitnessParams,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
    jobs: int = 1,
    progress: bool = False,
) -> Report:
    """Check the per-shift inequalities behind the smoothness and domination properties.

    Args:
        p (WitnessParams): Construction parameters.
        bits (int): Starting precision.
        max_bits (int): Precision cap.
        jobs (int): Worker threads (one task per shift ``u``).
        progress (bool): Show a progress bar.

    Returns:
        Report: Properties ``sign_law``, ``center_mass``, ``tails_small``,
        ``comparable_r``, ``comparable_p``, ``mass_fraction``, ``two_point_mass``.
    """
    D = p.delta_int
    delta_const = lambda b: delta_enclosure(D, b)  # noqa: E731
    e4 = lambda b: exp_enclosure(4, b)  # noqa: E731
    e_minus4 = lambda b: exp_enclosure(-4, b)  # noqa: E731
    two_point = lambda b: two_point_enclosure(D, b)  # noqa: E731

    def per_shift(u: int) -> dict[str, list[CheckResult]]:
        out: dict[str, list[CheckResult]] = {name: [] for name in _CLAIM_NAMES}
        for t in support_set(u, p):
            if t > 0:
                sign = quad_sign(eval_p_u(u, t, p))
                expected = -1 if t % 2 else 1
                out["sign_law"].append(exact_check(f"u={u},t={t}", Fraction(1 if sign == expected else -1)))
        center = abs(eval_p_u(u, -u, p))
        bound = claim_two_bound(u, p)
        out["center_mass"].append(exact_check(f"u={u}", center - bound))
        for j in range(1, p.d):
            lhs = abs(eval_p_u(u, -u * D**j, p))
            rhs = bound * Fraction(D) ** (-((j * j - 3 * j - 2) // 2))
            out["tails_small"].append(decided_check(f"u={u},j={j}", decide(lhs, rhs, e4, False, bits, max_bits)))
        for j in range(p.d):
            s = u * D**j
            for name, fn in (("comparable_r", eval_r_u), ("comparable_p", eval_p_u)):
                neg, pos = abs(fn(u, -s, p)), abs(fn(u, s, p))
                out[name].append(exact_check(f"u={u},j={j} |f(-s)|>=|f(s)|", neg - pos))
                outcome = decide(pos, neg, delta_const, True, bits, max_bits)
                out[name].append(decided_check(f"u={u},j={j} |f(s)|>=delta|f(-s)|", outcome))
        norm_scaled = p_u_norm(u, p) * Fraction(1, 8 * D * D)
        out["mass_fraction"].append(decided_check(f"u={u}", decide(center, norm_scaled, e_minus4, True, bits, max_bits)))
        plus = abs(eval_p_u(u, u, p))
        out["two_point_mass"].append(exact_check(f"u={u} |p(-u)|>=|p(u)|", center - plus))
        outcome = decide(plus, norm_scaled, two_point, True, bits, max_bits)
        out["two_point_mass"].append(decided_check(f"u={u} |p(u)|>=c*||p_u||", outcome))
        return out

    per_u = run_checks([lambda u=u: per_shift(u) for u in range(1, p.u_max + 1)], "Claims", jobs, progress)
    properties = []
    for name in _CLAIM_NAMES:
        prop = PropertyResult(name, [c for result in per_u for c in result[name]], note=_CLAIM_NOTES[name])
        properties.append(prop)
    report = Report(f"Claims n={p.n} d={p.d}", properties, p.to_json())
    _log_report(report)
    return report


_CLAIM_NAMES = (
    "sign_law",
    "center_mass",
    "tails_small",
    "comparable_r",
    "comparable_p",
    "mass_fraction",
    "two_point_mass",
)

_CLAIM_NOTES = {
    "sign_law": "sgn p_u(t) = (-1)^t for t in S_u, t > 0",
    "center_mass": "|p_u(-u)| >= ((sqrt(D)+1)/2) u^-(d-1) D^(-(d-1)^2/2)",
    "tails_small": "|p_u(-u D^j)| <= e^4 D^(-(j^2-3j-2)/2) * center bound, j = 1..d-1",
    "comparable_r": "|r_u(-s)| >= |r_u(s)| >= exp(-18/sqrt(D)) |r_u(-s)|, s = u D^j",
    "comparable_p": "|p_u(-s)| >= |p_u(s)| >= exp(-18/sqrt(D)) |p_u(-s)|, s = u D^j",
    "mass_fraction": "|p_u(-u)| >= ||p_u||_1 / (8 D^2 e^4)",
    "two_point_mass": "|p_u(-u)| >= |p_u(u)| >= exp(-18/sqrt(D)-4) ||p_u||_1 / (8 D^2)",
}


def _log_report(report: Report) -> None:
    for prop in report.properties:
        if prop.failures():
            logging.error(f"{report.title}: {prop.name} FAILED at {', '.join(c.label for c in prop.failures()[:5])}")
        elif prop.undecided():
            logging.warning(f"{report.title}: {prop.name} undecided at {len(prop.undecided())} checks")
        else:
            logging.debug(f"{report.title}: {prop.name} {prop.status} ({len(prop.checks)} checks)")
    logging.info(f"{report.title}: {report.status}")


def witness_to_json(cert: WitnessCert) -> dict[str, object]:
    """Canonical JSON form: every grid point listed, rationals as ``"num/den"``."""
    p = cert.params
    data: dict[str, object] = {
        "n": p.n,
        "d": p.d,
        "delta_int": p.delta_int,
        "values": cert.R.to_json(),
    }
    if cert.property_report is not None:
        data["report"] = cert.property_report.to_json()
    return data


def witness_from_json(data: dict, bits: int = DEFAULT_PRECISION_BITS) -> WitnessCert:
    """Rebuild a certificate from its JSON form; values are taken verbatim.

    Raises:
        ParameterMismatch: If the stored ``delta_int`` disagrees with ``(n, d)``.
    """
    try:
        n, d, delta_int = int(data["n"]), int(data["d"]), int(data["delta_int"])
        rows = data["values"]
    except (KeyError, TypeError, ValueError) as e:
        raise ParameterMismatch(f"malformed witness document ({e})") from e
    params = witness_params(n, d, bits)
    if params.delta_int != delta_int:
        raise ParameterMismatch(f"stored delta_int={delta_int}, expected {params.delta_int}")
    return WitnessCert(params, GridFn.from_json(n, delta_int, rows))
