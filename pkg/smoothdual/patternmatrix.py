"""Pattern matrices, the sign-rank bound formula and the majority UPP protocol.

Conventions:

- Rows are indexed by ``x`` in {-1, 1}^N with ``x_j = -1`` iff bit j of the row
  index is set.
- Columns are ``(S, w)`` pairs in S-major order. ``S`` picks one offset per
  block of size N/n and is ordered lexicographically with the first block most
  significant. ``w`` uses the same bit convention as rows.
- ``x|_S`` is the vector of selected coordinates and ``(+)`` is the
  coordinatewise product of +-1 vectors.

The bound ``gamma / (2^-n (n/N)^(d/2) + gamma * Delta)`` is evaluated in log2
space with certified enclosures so that the parameter pipeline can run at
n = 2^(10^4) and beyond; small even-degree rational inputs also have an exact
rational evaluation.

Example:
    ```python
    from smoothdual.lp import builtin_fn
    from smoothdual.patternmatrix import PatternMatrixSpec, dense_export

    spec = PatternMatrixSpec(N=2, n=1, phi=builtin_fn("maj", 1))
    print(dense_export(spec))
    ```

Dependencies:
    - `smoothdual.exactnum`: Enclosures, log2 and exp.
    - `smoothdual.report`: Property reports for protocol validation.
"""

import csv
import functools
import io
import itertools
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from smoothdual.exactnum import (
    Enclosure,
    as_rational,
    exp_of_enclosure,
    format_rational,
    int_root,
    ln2_enclosure,
    log2_enclosure,
)
from smoothdual.report import DEFAULT_PRECISION_BITS, PropertyResult, Report, exact_check

MAX_DENSE_ENTRIES = 1 << 20
MAX_EXHAUSTIVE_INPUTS = 16
MIN_PIPELINE_LOG2N = 10
PIPELINE_GAMMA_POWER = 40
PIPELINE_DEGREE_DIVISOR = 100
SLACK_MARKER = "O(1)"


class NotDivisible(Exception):
    def __init__(self, N: int, n: int):
        super().__init__(f"Pattern matrix needs n | N, got N={N}, n={n}")


class DenseExportTooLarge(Exception):
    def __init__(self, rows: int, cols: int):
        super().__init__(f"Dense export of a {rows} x {cols} matrix exceeds {MAX_DENSE_ENTRIES} entries")


class ParameterRegime(Exception):
    def __init__(self, message: str):
        super().__init__(f"Outside the parameter regime: {message}")


@dataclass(frozen=True)
class PatternMatrixSpec:
    """The (N, n, phi) pattern matrix.

    Attributes:
        N (int): Row-side input length.
        n (int): Number of blocks and arity of ``phi``.
        phi (Callable): Base function on +-1 vectors of length n.
    """

    N: int
    n: int
    phi: Callable[[Sequence[int]], object]

    def __post_init__(self) -> None:
        if self.n < 1 or self.N < self.n or self.N % self.n:
            raise NotDivisible(self.N, self.n)

    @property
    def block(self) -> int:
        return self.N // self.n

    @property
    def rows(self) -> int:
        return 1 << self.N

    @property
    def cols(self) -> int:
        return self.block**self.n * (1 << self.n)


def _signs(index: int, length: int) -> tuple[int, ...]:
    return tuple(-1 if (index >> j) & 1 else 1 for j in range(length))


def decode_column(spec: PatternMatrixSpec, col: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Column index -> (S offsets per block, w)."""
    if not 0 <= col < spec.cols:
        raise IndexError(f"column {col} outside [0, {spec.cols})")
    s_index, w_index = divmod(col, 1 << spec.n)
    offsets = []
    for _ in range(spec.n):
        s_index, offset = divmod(s_index, spec.block)
        offsets.append(offset)
    return tuple(reversed(offsets)), _signs(w_index, spec.n)


def restrict(x: Sequence[int], offsets: Sequence[int], block: int) -> tuple[int, ...]:
    """``x|_S``: one coordinate from each block."""
    return tuple(x[i * block + s] for i, s in enumerate(offsets))


def pattern_input(x: Sequence[int], offsets: Sequence[int], w: Sequence[int], block: int) -> tuple[int, ...]:
    """The effective input ``x|_S (+) w``."""
    return tuple(a * b for a, b in zip(restrict(x, offsets, block), w))


def entry(spec: PatternMatrixSpec, row: int, col: int) -> object:
    """Entry oracle ``phi(x|_S (+) w)``."""
    if not 0 <= row < spec.rows:
        raise IndexError(f"row {row} outside [0, {spec.rows})")
    offsets, w = decode_column(spec, col)
    return spec.phi(pattern_input(_signs(row, spec.N), offsets, w, spec.block))


def dense_export(spec: PatternMatrixSpec) -> list[list[object]]:
    if spec.rows * spec.cols > MAX_DENSE_ENTRIES:
        raise DenseExportTooLarge(spec.rows, spec.cols)
    return [[entry(spec, r, c) for c in range(spec.cols)] for r in range(spec.rows)]


def pattern_matrix(spec: PatternMatrixSpec) -> Callable[[int, int], object]:
    """Entry oracle ``(row, col) -> phi(x|_S (+) w)`` for a 2^N x (N/n)^n 2^n matrix.

    Use ``dense_export`` for the full matrix when it fits.
    """
    logging.debug(f"pattern_matrix: N={spec.N}, n={spec.n}, {spec.rows} x {spec.cols}")
    return functools.partial(entry, spec)


def column_label(spec: PatternMatrixSpec, col: int) -> str:
    offsets, w = decode_column(spec, col)
    return f"S={'.'.join(str(s) for s in offsets)};w={''.join('-' if v < 0 else '+' for v in w)}"


def dense_export_csv(spec: PatternMatrixSpec) -> str:
    """CSV with an (S, w) header row and one row per x (labelled by its +-1 pattern)."""
    matrix = dense_export(spec)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["x"] + [column_label(spec, c) for c in range(spec.cols)])
    for r, row in enumerate(matrix):
        label = "".join("-" if v < 0 else "+" for v in _signs(r, spec.N))
        writer.writerow([label] + [str(v) for v in row])
    return buffer.getvalue()


@dataclass(frozen=True)
class BoundInputs:
    """Inputs to ``gamma / (2^-n (n/N)^(d/2) + gamma * Delta)``.

    ``gamma`` and ``delta_frac`` may instead be supplied as log2 enclosures for
    parameters too large to materialize; a missing exception fraction means 0.

    Attributes:
        d (int): Degree parameter.
        n (int): Base-function arity.
        N (int): Row-side input length.
        gamma (Enclosure | None): Smoothness floor.
        delta_frac (Fraction | None): Fraction of inputs exempt from the floor.
        log2_gamma (Enclosure | None): log2 of gamma.
        log2_delta_frac (Enclosure | None): log2 of the exception fraction.
    """

    d: int
    n: int
    N: int
    gamma: Enclosure | None = None
    delta_frac: Fraction | None = None
    log2_gamma: Enclosure | None = None
    log2_delta_frac: Enclosure | None = None

    def __post_init__(self) -> None:
        if self.d < 0 or self.n < 1 or self.N < self.n:
            raise ValueError(f"Invalid bound parameters d={self.d}, n={self.n}, N={self.N}")
        if (self.gamma is None) == (self.log2_gamma is None):
            raise ValueError("Give exactly one of gamma and log2_gamma")
        if self.gamma is not None and self.gamma.lo <= 0:
            raise ValueError(f"gamma must be positive, got lower end {self.gamma.lo}")
        if self.delta_frac is not None:
            if self.log2_delta_frac is not None:
                raise ValueError("Give at most one of delta_frac and log2_delta_frac")
            if not 0 <= self.delta_frac <= 1:
                raise ValueError(f"delta_frac must lie in [0, 1], got {self.delta_frac}")

    def to_json(self) -> dict[str, object]:
        data: dict[str, object] = {"d": self.d, "n": _int_to_json(self.n), "N": _int_to_json(self.N)}
        if self.gamma is not None:
            data["gamma"] = self.gamma.to_json()
        if self.delta_frac is not None:
            data["delta_frac"] = format_rational(self.delta_frac)
        return data


def _int_to_json(value: int) -> object:
    if value.bit_length() > 64 and value & (value - 1) == 0:
        return f"2^{value.bit_length() - 1}"
    return value


def _log2_of(value: Enclosure, bits: int) -> Enclosure:
    return Enclosure(log2_enclosure(value.lo, bits).lo, log2_enclosure(value.hi, bits).hi)


def _log2_one_plus_pow2(x: Fraction, bits: int) -> Enclosure:
    """Enclosure of log2(1 + 2^x) for x <= 0."""
    if x < -(bits + 8):
        # log2(1 + y) < 1.5 y and y < 2^-(bits+8)
        return Enclosure(0, Fraction(1, 1 << (bits + 4)))
    if x.denominator == 1:
        y = Enclosure.point(Fraction(1, 1 << int(-x)))
    else:
        y = exp_of_enclosure(ln2_enclosure(bits + 8).scale(x), bits + 8)
    return Enclosure(log2_enclosure(1 + y.lo, bits).lo, log2_enclosure(1 + y.hi, bits).hi)


def log2_sum(a: Enclosure, b: Enclosure, bits: int = DEFAULT_PRECISION_BITS) -> Enclosure:
    """Enclosure of log2(2^a + 2^b); monotone in both arguments."""

    def at(p: Fraction, q: Fraction) -> Enclosure:
        return max(p, q) + _log2_one_plus_pow2(-abs(p - q), bits)

    return Enclosure(at(a.lo, b.lo).lo, at(a.hi, b.hi).hi)


def rs_bound_exact(b: BoundInputs) -> Fraction | None:
    """Exact rational value of the bound, when d is even and every input is an exact rational."""
    if b.d % 2 or b.gamma is None or not b.gamma.is_point() or b.log2_delta_frac is not None:
        return None
    if b.n > 4096:
        return None
    gamma = b.gamma.lo
    delta = b.delta_frac or Fraction(0)
    denominator = Fraction(1, 1 << b.n) * Fraction(b.n, b.N) ** (b.d // 2) + gamma * delta
    return gamma / denominator


def rs_bound(b: BoundInputs, bits: int = DEFAULT_PRECISION_BITS) -> Enclosure:
    """Certified enclosure of log2 of the sign-rank lower bound.

    Args:
        b (BoundInputs): Formula inputs.
        bits (int): Precision of the log and exp enclosures.

    Returns:
        Enclosure: log2 of ``gamma / (2^-n (n/N)^(d/2) + gamma * Delta)``.
    """
    exact = rs_bound_exact(b)
    if exact is not None:
        return log2_enclosure(exact, bits)
    log2_gamma = b.log2_gamma if b.log2_gamma is not None else _log2_of(b.gamma, bits)
    log2_main = log2_enclosure(Fraction(b.n, b.N), bits).scale(Fraction(b.d, 2)) - b.n
    log2_delta = b.log2_delta_frac
    if log2_delta is None and b.delta_frac:
        log2_delta = log2_enclosure(b.delta_frac, bits)
    if log2_delta is None:
        log2_denominator = log2_main
    else:
        log2_denominator = log2_sum(log2_main, log2_gamma + log2_delta, bits)
    return log2_gamma - log2_denominator


def _two_pow_third(k: int, bits: int) -> Enclosure:
    """Enclosure of 2^(k/3) = (2^k)^(1/3)."""
    q, r = divmod(k, 3)
    if r == 0:
        return Enclosure.point(1 << q)
    p = bits + 8
    c = int_root((1 << r) << (3 * p), 3)
    return Enclosure(Fraction(c << q, 1 << p), Fraction((c + 1) << q, 1 << p))


def pipeline_inputs(log2n: int, bits: int = DEFAULT_PRECISION_BITS) -> BoundInputs:
    """Instantiate the bound for the (4n^2, 4n, MAJ on 4n bits) pattern matrix at n = 2^log2n.

    gamma = 1/(n^40 * 2^(4n)) with unit constant, exception fraction
    2 exp(-n^(1/3)/3), d = floor(log2(n)/100).
    """
    if log2n < MIN_PIPELINE_LOG2N:
        raise ParameterRegime(f"log2(n) = {log2n} < {MIN_PIPELINE_LOG2N}")
    n_f = 1 << (log2n + 2)
    N = 1 << (2 * log2n + 2)
    log2_gamma = Enclosure.point(-PIPELINE_GAMMA_POWER * log2n - n_f)
    log2_e = ln2_enclosure(bits + 8).reciprocal()
    log2_delta = 1 - (log2_e * _two_pow_third(log2n, bits)).scale(Fraction(1, 3))
    return BoundInputs(
        d=log2n // PIPELINE_DEGREE_DIVISOR,
        n=n_f,
        N=N,
        log2_gamma=log2_gamma,
        log2_delta_frac=log2_delta,
    )


def pipeline_bound(n: int | None = None, log2n: int | None = None, bits: int = DEFAULT_PRECISION_BITS) -> Enclosure:
    """log2 of the sign-rank lower bound at n = 2^log2n (give n or log2n).

    Raises:
        ParameterRegime: If n is not a power of two or is below 2^10.
    """
    if log2n is None:
        if n is None or n < 1 or n & (n - 1):
            raise ParameterRegime(f"n must be a power of two, got {n}")
        log2n = n.bit_length() - 1
    result = rs_bound(pipeline_inputs(log2n, bits), bits)
    if result.hi < 0:
        logging.warning(f"pipeline bound at log2(n)={log2n} is vacuous: log2 bound {result}")
    logging.debug(f"pipeline_bound(log2n={log2n}) = {result}")
    return result


def pipeline_report(log2n: int, bits: int = DEFAULT_PRECISION_BITS) -> dict[str, object]:
    inputs = pipeline_inputs(log2n, bits)
    bound = rs_bound(inputs, bits)
    return {
        "log2n": log2n,
        "d": inputs.d,
        "n": f"4*2^{log2n}",
        "N": f"4*2^{2 * log2n}",
        "gamma": f"2^-{PIPELINE_GAMMA_POWER * log2n} * 2^-(4*2^{log2n})",
        "delta_frac": f"2*exp(-2^({log2n}/3)/3)",
        "gamma_constant": "1 (other constants c shift log2_bound by log2 c)",
        "log2_bound": bound.to_json(),
        "upp_cost": upp_translate(bound).to_json(),
    }


@dataclass(frozen=True)
class ProtocolOutcome:
    """Exact output distribution of the majority protocol.

    Attributes:
        accept_prob (Fraction): Probability of outputting -1.
        cost_bits (int): Bits exchanged.
    """

    accept_prob: Fraction
    cost_bits: int

    @property
    def reject_prob(self) -> Fraction:
        return 1 - self.accept_prob


def protocol_cost(width: int) -> int:
    """ceil(log2(width)) index bits plus Alice's one-bit reply."""
    return (width - 1).bit_length() + 1


def _check_beta(beta: Fraction) -> Fraction:
    beta = as_rational(beta)
    if not 0 <= beta <= Fraction(1, 2):
        raise ValueError(f"beta must lie in [0, 1/2], got {beta}")
    return beta


def upp_protocol_sim(z: Sequence[int], beta: int | Fraction) -> ProtocolOutcome:
    """Output distribution on the effective input ``z`` of length 2n.

    With probability 2*beta the protocol outputs -1, otherwise it outputs a
    uniformly random coordinate of ``z``.
    """
    beta = _check_beta(beta)
    if not z or len(z) % 2 or any(v not in (-1, 1) for v in z):
        raise ValueError("z must be a nonempty +-1 vector of even length")
    half = len(z) // 2
    negatives = sum(1 for v in z if v == -1)
    accept = 2 * beta + (1 - 2 * beta) * Fraction(negatives, len(z))
    return ProtocolOutcome(accept, protocol_cost(2 * half * half))


def upp_protocol_run(
    x: Sequence[int], offsets: Sequence[int], w: Sequence[int], beta: int | Fraction
) -> ProtocolOutcome:
    """Two-party run on a pattern-matrix input: Alice holds x, Bob holds (S, w).

    Bob picks a block i uniformly, sends the global index of its selected bit,
    Alice replies with that bit and Bob outputs it times ``w_i`` (or -1 with
    probability 2*beta).
    """
    beta = _check_beta(beta)
    blocks = len(w)
    if blocks == 0 or len(offsets) != blocks or len(x) % blocks:
        raise ValueError("x, S and w do not describe a pattern-matrix input")
    block = len(x) // blocks
    if any(not 0 <= s < block for s in offsets):
        raise ValueError(f"S offsets must lie in [0, {block})")
    accept = 2 * beta
    for i, s in enumerate(offsets):
        if x[i * block + s] * w[i] == -1:
            accept += (1 - 2 * beta) / blocks
    return ProtocolOutcome(accept, protocol_cost(len(x)))


def _majority(z: Sequence[int]) -> int:
    return -1 if 2 * sum(1 for v in z if v == -1) >= len(z) else 1


def upp_validate(n: int, beta: int | Fraction) -> Report:
    """Exhaustively check P[output = MAJ(z)] > 1/2 over z in {-1, 1}^(2n).

    One check per Hamming-weight class carries the smallest margin seen in that
    class; the report also records the worst class and the protocol cost.
    """
    beta = _check_beta(beta)
    if n < 1 or 2 * n > MAX_EXHAUSTIVE_INPUTS:
        raise ValueError(f"exhaustive validation needs 1 <= 2n <= {MAX_EXHAUSTIVE_INPUTS}, got n={n}")
    worst_by_class: dict[int, Fraction] = {}
    for z in itertools.product((1, -1), repeat=2 * n):
        outcome = upp_protocol_sim(z, beta)
        correct = outcome.accept_prob if _majority(z) == -1 else outcome.reject_prob
        margin = correct - Fraction(1, 2)
        weight = z.count(-1)
        if weight not in worst_by_class or margin < worst_by_class[weight]:
            worst_by_class[weight] = margin
    checks = [exact_check(f"#(-1)={w}", m, strict=True) for w, m in sorted(worst_by_class.items())]
    worst_class = min(worst_by_class, key=lambda w: (worst_by_class[w], w))
    prop = PropertyResult("upp_correctness", checks)
    for failure in prop.failures():
        logging.error(f"upp_validate(n={n}, beta={beta}): {failure.label} has margin {failure.margin}")
    fields = {
        "n": n,
        "beta": format_rational(beta),
        "cost_bits": protocol_cost(2 * n * n),
        "worst_class": worst_class,
        "worst_margin": format_rational(worst_by_class[worst_class]),
    }
    return Report(f"UPP protocol for MAJ on {2 * n} bits", [prop], fields)


@dataclass(frozen=True)
class TranslatedBound:
    """Communication-cost enclosure implied by a log2 sign-rank enclosure, up to additive slack."""

    enclosure: Enclosure
    slack: str = SLACK_MARKER

    def to_json(self) -> dict[str, object]:
        return {"enclosure": self.enclosure.to_json(), "slack": self.slack}

    def __str__(self) -> str:
        return f"{self.enclosure} +- {self.slack}"


def upp_translate(log2_signrank: Enclosure) -> TranslatedBound:
    return TranslatedBound(log2_signrank)
