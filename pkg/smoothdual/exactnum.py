"""Exact number kernel for the witness construction and its checks.

Every witness value is a rational combination of 1 and the square root of a
fixed positive integer, so values are held exactly as ``QuadNum`` elements of
the quadratic field Q[sqrt(delta)]. Transcendental constants (exponentials,
square roots, logarithms) only ever appear as certified ``Enclosure`` objects:
closed rational intervals with dyadic endpoints that contain the true value.

Enclosures returned by the public constructors are nested in the precision
argument: asking for more bits never produces an interval that sticks out of
a looser one. Refinement loops in the verifiers rely on that.

Example:
    ```python
    from smoothdual.exactnum import QuadNum, exp_enclosure

    x = QuadNum(1, 1, 2)          # 1 + sqrt(2)
    print(1 / x)                  # -1+1*sqrt(2)
    print(exp_enclosure(1, 24))   # [lo, hi] around e
    ```

Dependencies:
    - `fractions` / `math` (standard library): exact rationals, ``comb`` and ``isqrt``.
"""

import logging
import math
import operator
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import TypeAlias

Rational: TypeAlias = Fraction

# Extra guard bits used by the snapping step; see _snap.
_GUARD_BITS = 3


class DeltaMismatch(Exception):
    def __init__(self, left: int, right: int):
        super().__init__(f"Quadratic field mismatch: sqrt({left}) vs sqrt({right})")


def as_rational(value: int | Fraction | str) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a canonical Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"Cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse the canonical ``"num/den"`` form (a bare integer is also accepted).

    Args:
        text (str): Rational in text form, e.g. ``"-3/4"`` or ``"7"``.

    Returns:
        Fraction: The parsed value in lowest terms.

    Raises:
        ValueError: If the text is not an integer or integer quotient.
    """
    raw = text.strip()
    num, sep, den = raw.partition("/")
    try:
        value = Fraction(int(num), int(den)) if sep else Fraction(int(num))
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Invalid rational literal: {text!r}") from e
    return value


def format_rational(value: int | Fraction) -> str:
    """Render a rational in the canonical ``"num/den"`` form (denominator always present)."""
    q = as_rational(value)
    return f"{q.numerator}/{q.denominator}"


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


@total_ordering
@dataclass(frozen=True, eq=False)
class QuadNum:
    """Exact element ``a + b*sqrt(delta)`` of Q[sqrt(delta)].

    When ``delta`` is a perfect square the irrational part is folded into ``a``
    on construction, so ``b`` is always zero in that case.

    Attributes:
        a (Fraction): Rational part.
        b (Fraction): Coefficient of sqrt(delta).
        delta (int): Positive radicand shared by every operand of an operation.
    """

    a: Fraction
    b: Fraction
    delta: int

    def __post_init__(self) -> None:
        if not isinstance(self.delta, int) or self.delta < 1:
            raise ValueError(f"Radicand must be a positive integer, got {self.delta!r}")
        a = as_rational(self.a)
        b = as_rational(self.b)
        root = math.isqrt(self.delta)
        if root * root == self.delta and b:
            a, b = a + b * root, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def of(cls, value: int | Fraction, delta: int) -> "QuadNum":
        return cls(as_rational(value), Fraction(0), delta)

    @classmethod
    def zero(cls, delta: int) -> "QuadNum":
        return cls(Fraction(0), Fraction(0), delta)

    @classmethod
    def root(cls, delta: int) -> "QuadNum":
        """sqrt(delta) itself."""
        return cls(Fraction(0), Fraction(1), delta)

    def _coerce(self, other: object) -> "QuadNum | None":
        if isinstance(other, QuadNum):
            if other.delta != self.delta:
                raise DeltaMismatch(self.delta, other.delta)
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNum.of(other, self.delta)
        return None

    def __add__(self, other: object) -> "QuadNum":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QuadNum(self.a + y.a, self.b + y.b, self.delta)

    __radd__ = __add__

    def __neg__(self) -> "QuadNum":
        return QuadNum(-self.a, -self.b, self.delta)

    def __sub__(self, other: object) -> "QuadNum":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QuadNum(self.a - y.a, self.b - y.b, self.delta)

    def __rsub__(self, other: object) -> "QuadNum":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y - self

    def __mul__(self, other: object) -> "QuadNum":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QuadNum(
            self.a * y.a + self.b * y.b * self.delta,
            self.a * y.b + self.b * y.a,
            self.delta,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadNum":
        return QuadNum(self.a, -self.b, self.delta)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - b^2*delta`` (nonzero for nonzero elements)."""
        return self.a * self.a - self.b * self.b * self.delta

    def inverse(self) -> "QuadNum":
        if self.is_zero():
            raise ZeroDivisionError("QuadNum division by zero")
        nrm = self.norm()
        return QuadNum(self.a / nrm, -self.b / nrm, self.delta)

    def __truediv__(self, other: object) -> "QuadNum":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self * y.inverse()

    def __rtruediv__(self, other: object) -> "QuadNum":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y * self.inverse()

    def __pow__(self, exponent: int) -> "QuadNum":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QuadNum.of(1, self.delta)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    @property
    def sign(self) -> int:
        return quad_sign(self)

    def __abs__(self) -> "QuadNum":
        return -self if quad_sign(self) < 0 else self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuadNum):
            return self.a == other.a and self.b == other.b and self.delta == other.delta
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return False

    def __lt__(self, other: object) -> bool:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return quad_sign(self - y) < 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.delta))

    def __repr__(self) -> str:
        return f"QuadNum({format_rational(self.a)}, {format_rational(self.b)}, {self.delta})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        sign = "+" if self.b > 0 else "-"
        return f"{self.a} {sign} {abs(self.b)}*sqrt({self.delta})"

    def enclose(self, bits: int) -> "Enclosure":
        """Certified rational enclosure of the real value."""
        if self.b == 0:
            return Enclosure.point(self.a)
        # Scale the root precision by |b| so the final width stays within 2^-bits.
        extra = max(0, abs(self.b).numerator.bit_length() - abs(self.b).denominator.bit_length() + 1)
        return Enclosure.point(self.a) + sqrt_enclosure(self.delta, bits + extra).scale(self.b)

    def approx(self) -> float:
        """Floating-point view for display only."""
        return float(self.enclose(64).midpoint())

    def to_json(self) -> dict[str, object]:
        return {"a": format_rational(self.a), "b": format_rational(self.b), "delta": self.delta}

    @classmethod
    def from_json(cls, data: dict) -> "QuadNum":
        return cls(parse_rational(str(data["a"])), parse_rational(str(data["b"])), int(data["delta"]))


def quad_sign(x: QuadNum) -> int:
    """Exact sign of ``a + b*sqrt(delta)``.

    Mixed-sign cases are decided by comparing ``a^2`` against ``b^2*delta``.

    Args:
        x (QuadNum): Value to classify.

    Returns:
        int: -1, 0 or +1.
    """
    sa, sb = _sign(x.a), _sign(x.b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    lhs = x.a * x.a
    rhs = x.b * x.b * x.delta
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


_QUAD_OPS: dict[str, Callable[[QuadNum, QuadNum], QuadNum]] = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def quad_arith(x: QuadNum, y: QuadNum, op: str) -> QuadNum:
    """Apply a field operation to two elements of the same quadratic field.

    Args:
        x (QuadNum): Left operand.
        y (QuadNum): Right operand; must share ``x.delta``.
        op (str): One of ``add``, ``sub``, ``mul``, ``div``.

    Returns:
        QuadNum: The exact result in canonical form.

    Raises:
        DeltaMismatch: If the radicands differ.
        ZeroDivisionError: On ``div`` by zero.
        ValueError: On an unknown operation name.
    """
    if op not in _QUAD_OPS:
        raise ValueError(f"Unknown QuadNum operation: {op}")
    if x.delta != y.delta:
        raise DeltaMismatch(x.delta, y.delta)
    return _QUAD_OPS[op](x, y)


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval certified to contain a real value.

    Attributes:
        lo (Fraction): Lower endpoint.
        hi (Fraction): Upper endpoint, never below ``lo``.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if lo > hi:
            raise ValueError(f"Empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value: int | Fraction) -> "Enclosure":
        q = as_rational(value)
        return cls(q, q)

    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value: "int | Fraction | Enclosure") -> bool:
        if isinstance(value, Enclosure):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= value <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other: "Enclosure | int | Fraction") -> "Enclosure":
        if isinstance(other, (int, Fraction)):
            other = Enclosure.point(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other: "Enclosure | int | Fraction") -> "Enclosure":
        if isinstance(other, (int, Fraction)):
            other = Enclosure.point(other)
        return self + (-other)

    def __rsub__(self, other: int | Fraction) -> "Enclosure":
        return Enclosure.point(other) - self

    def __mul__(self, other: "Enclosure | int | Fraction") -> "Enclosure":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Enclosure(min(products), max(products))

    __rmul__ = __mul__

    def scale(self, factor: int | Fraction) -> "Enclosure":
        if factor >= 0:
            return Enclosure(self.lo * factor, self.hi * factor)
        return Enclosure(self.hi * factor, self.lo * factor)

    def reciprocal(self) -> "Enclosure":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError(f"Enclosure [{self.lo}, {self.hi}] contains zero")
        return Enclosure(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: "Enclosure | int | Fraction") -> "Enclosure":
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / as_rational(other))
        return self * other.reciprocal()

    def to_json(self) -> dict[str, str]:
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi)}

    def __str__(self) -> str:
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


def _floor_dyadic(q: Fraction, w: int) -> Fraction:
    return Fraction((q.numerator << w) // q.denominator, 1 << w)


def _ceil_dyadic(q: Fraction, w: int) -> Fraction:
    return Fraction(-((-q.numerator << w) // q.denominator), 1 << w)


def _snap(lo: Fraction, hi: Fraction, bits: int) -> Enclosure:
    """Widen a tight bracket onto the 2^-(bits+3) grid.

    Requires ``hi - lo < 2^-(bits+3)``. The result has width below 2^-bits and
    is contained in the snapped result of any tight bracket at fewer bits.
    """
    g = Fraction(1, 1 << (bits + _GUARD_BITS))
    if hi - lo >= g:
        raise ValueError("Bracket too wide to snap")
    lo_grid = math.floor(lo / g) * g - 2 * g
    hi_grid = math.ceil(hi / g) * g + 2 * g
    return Enclosure(lo_grid, hi_grid)


def _exp_positive_tight(y: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Bracket e^y for y > 0 with width below 2^-(bits+3)."""
    target = Fraction(1, 1 << (bits + _GUARD_BITS))
    # Argument reduction: z = y / 2^s with z <= 1/2.
    s = 0
    while y / (1 << s) > Fraction(1, 2):
        s += 1
    z = y / (1 << s)
    w = bits + _GUARD_BITS + 2 * s + 2 * math.ceil(y) + 16
    while True:
        total_lo = total_hi = Fraction(1)
        term = Fraction(1)
        k = 0
        while True:
            k += 1
            term = term * z / k
            total_lo += _floor_dyadic(term, w)
            total_hi += _ceil_dyadic(term, w)
            # Tail after term k is bounded by 2 * z^(k+1)/(k+1)! for z <= 1/2.
            tail = 2 * term * z / (k + 1)
            if tail < Fraction(1, 1 << w):
                break
        lo = _floor_dyadic(total_lo, w)
        hi = _ceil_dyadic(total_hi + tail, w)
        for _ in range(s):
            lo = _floor_dyadic(lo * lo, w)
            hi = _ceil_dyadic(hi * hi, w)
        if hi - lo < target:
            return lo, hi
        logging.debug(f"exp_enclosure: widening working precision {w} -> {2 * w} for y={y}")
        w *= 2


@lru_cache(maxsize=512)
def exp_enclosure(x: int | Fraction, bits: int) -> Enclosure:
    """Certified enclosure of e^x of width at most 2^-bits.

    Positive arguments use argument reduction, a Taylor series with an explicit
    tail bound and outward-rounded squaring. Negative arguments take the
    reciprocal of the positive case, so ``lo > 0`` always holds.

    Args:
        x (int | Fraction): Exponent.
        bits (int): Requested precision, at least 1.

    Returns:
        Enclosure: Dyadic interval containing e^x.
    """
    if bits < 1:
        raise ValueError(f"bits must be positive, got {bits}")
    q = as_rational(x)
    if q == 0:
        return Enclosure.point(1)
    if q > 0:
        lo, hi = _exp_positive_tight(q, bits)
        return _snap(lo, hi, bits)
    # 1/e^|x|: the reciprocal widens by at most 1/(lo*hi) < 2, hence one extra bit.
    lo, hi = _exp_positive_tight(-q, bits + 1)
    return _snap(lo, hi, bits + 1).reciprocal()


def exp_of_enclosure(x: Enclosure, bits: int) -> Enclosure:
    """Enclosure of e^x over an argument enclosure (exp is increasing)."""
    return Enclosure(exp_enclosure(x.lo, bits).lo, exp_enclosure(x.hi, bits).hi)


@lru_cache(maxsize=512)
def sqrt_enclosure(m: int, bits: int) -> Enclosure:
    """Certified enclosure of sqrt(m) of width at most 2^-bits.

    Perfect squares yield the exact point interval.

    Args:
        m (int): Positive integer radicand.
        bits (int): Requested precision.

    Returns:
        Enclosure: Interval with ``lo^2 <= m <= hi^2``.
    """
    if m < 1:
        raise ValueError(f"sqrt_enclosure needs m >= 1, got {m}")
    root = math.isqrt(m)
    if root * root == m:
        return Enclosure.point(root)
    p = max(bits, 0) + _GUARD_BITS + 1
    a = math.isqrt(m << (2 * p))
    return _snap(Fraction(a, 1 << p), Fraction(a + 1, 1 << p), max(bits, 0))


def _atanh_bounds(t_lo: Fraction, t_hi: Fraction, w: int) -> tuple[Fraction, Fraction]:
    """Bracket atanh over [t_lo, t_hi] within [0, 1/3] using w-bit dyadic rounding."""
    eps = Fraction(1, 1 << w)
    sq_lo, sq_hi = t_lo * t_lo, t_hi * t_hi
    p_lo, p_hi = t_lo, t_hi
    total_lo = total_hi = Fraction(0)
    k = 0
    while True:
        total_lo += _floor_dyadic(p_lo / (2 * k + 1), w)
        total_hi += _ceil_dyadic(p_hi / (2 * k + 1), w)
        p_lo = _floor_dyadic(p_lo * sq_lo, w)
        p_hi = _ceil_dyadic(p_hi * sq_hi, w)
        k += 1
        if p_hi < eps:
            break
    tail = p_hi / ((2 * k + 1) * (1 - sq_hi))
    return total_lo, _ceil_dyadic(total_hi + tail, w)


@lru_cache(maxsize=64)
def ln2_enclosure(bits: int) -> Enclosure:
    """Certified enclosure of ln 2, computed as 2*atanh(1/3)."""
    target = Fraction(1, 1 << (bits + _GUARD_BITS))
    w = bits + _GUARD_BITS + 8
    while True:
        lo, hi = _atanh_bounds(Fraction(1, 3), Fraction(1, 3), w)
        if 2 * (hi - lo) < target:
            return _snap(2 * lo, 2 * hi, bits)
        w *= 2


def log2_enclosure(q: int | Fraction, bits: int) -> Enclosure:
    """Certified enclosure of log2(q) for a positive rational q.

    Powers of two give the exact point. Otherwise ``q = 2^e * m`` with ``m`` in
    [1, 2) and ``ln m`` comes from the atanh series.

    Args:
        q (int | Fraction): Positive rational argument.
        bits (int): Requested precision.

    Returns:
        Enclosure: Interval of width at most 2^-bits.
    """
    value = as_rational(q)
    if value <= 0:
        raise ValueError(f"log2 of non-positive value {value}")
    e = value.numerator.bit_length() - value.denominator.bit_length()
    m = value / Fraction(2) ** e
    if m < 1:
        e -= 1
        m *= 2
    if m == 1:
        return Enclosure.point(e)
    target = Fraction(1, 1 << (bits + _GUARD_BITS))
    w = bits + _GUARD_BITS + 8
    while True:
        t = (m - 1) / (m + 1)
        a_lo, a_hi = _atanh_bounds(_floor_dyadic(t, w), _ceil_dyadic(t, w), w)
        l_lo, l_hi = _atanh_bounds(Fraction(1, 3), Fraction(1, 3), w)
        lo, hi = a_lo / l_hi, a_hi / l_lo
        if hi - lo < target:
            return _snap(lo, hi, bits) + e
        w *= 2


def int_root(n: int, k: int) -> int:
    """Largest integer r with r^k <= n, by integer binary search.

    Args:
        n (int): Radicand, at least 1.
        k (int): Root index, at least 1.

    Returns:
        int: floor(n^(1/k)).
    """
    if n < 1 or k < 1:
        raise ValueError(f"int_root needs n >= 1 and k >= 1, got n={n}, k={k}")
    lo, hi = 1, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo


def binomial(m: int, k: int) -> int:
    """Exact binomial coefficient; out-of-range ``k`` (or negative ``m``) gives 0."""
    if m < 0 or k < 0 or k > m:
        return 0
    return math.comb(m, k)
