"""Exact rational linear programming and the degree duality oracles.

The solver is a dense-tableau simplex over ``fractions.Fraction`` with Bland's
anti-cycling rule (smallest-index entering column, ties in the ratio test go to
the smallest basic index). Every answer is a certificate that is re-checked by
plain arithmetic before it is returned:

- feasible: a point satisfying every constraint (optimal when an objective is given);
- infeasible: a Farkas ray, one multiplier per constraint, with
  ``>=`` rows weighted >= 0, ``<=`` rows weighted <= 0, ``==`` rows free, whose
  combined coefficient is 0 on free variables and <= 0 on nonnegative ones
  while the combined right-hand side is > 0;
- unbounded (objective problems only): a feasible point and an improving ray.

On top of it sit the oracles for Boolean functions: threshold degree (least
degree of a sign-representing polynomial, with a dual witness extracted from
the Farkas ray one degree below) and the fixed-epsilon feasibility problem for
rational approximation, whose Farkas ray yields the pair (psi0, psi1).

Symmetric and block-symmetric functions are solved in the univariate
(s = sum x_i) and bivariate (s1, s2) bases over Hamming-weight classes.

Example:
    ```python
    from smoothdual.lp import builtin_fn, threshold_degree

    result = threshold_degree(builtin_fn("parity", 2))
    print(result.degree)   # 2
    ```

Dependencies:
    - `yaml`: For reading function-spec files (JSON is accepted as YAML).
"""

import itertools
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import yaml

from smoothdual.exactnum import as_rational, binomial, format_rational, parse_rational
from smoothdual.report import PASS, PropertyResult, Report, exact_check, identity_margin

GE = ">="
LE = "<="
EQ = "=="

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

EXPLICIT = "explicit"
SYMMETRIC = "symmetric"
BLOCK_SYMMETRIC = "block_symmetric"

MAX_EXPLICIT_ARITY = 20
MAX_BLOCK_SIZE = 200

THRESHOLD = "threshold"
RATIONAL_PAIR = "rational_pair"

Point = tuple[int, ...]


class ResourceBound(Exception):
    def __init__(self, message: str):
        super().__init__(f"Instance too large: {message}")


class MalformedCertificate(Exception):
    def __init__(self, message: str):
        super().__init__(f"Malformed certificate: {message}")


class CertificateCheckFailed(Exception):
    def __init__(self, status: str):
        super().__init__(f"Solver produced a {status} certificate that does not re-verify")


@dataclass(frozen=True)
class Constraint:
    """Sparse linear constraint ``sum coeffs[j]*x_j  sense  rhs``."""

    coeffs: dict[int, Fraction]
    sense: str
    rhs: Fraction
    label: str = ""

    def lhs(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * x[j] for j, c in self.coeffs.items()), Fraction(0))


@dataclass
class LPProblem:
    """Exact LP over named unknowns; the optional objective is minimized.

    Attributes:
        variables (list[str]): Unknown names, in the fixed column order.
        nonneg (list[bool]): Whether each unknown is constrained to be >= 0.
        constraints (list[Constraint]): Rows in insertion order.
        objective (dict[int, Fraction] | None): Linear functional to minimize.
    """

    variables: list[str] = field(default_factory=list)
    nonneg: list[bool] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[int, Fraction] | None = None

    def add_variable(self, name: str, nonneg: bool = False) -> int:
        self.variables.append(name)
        self.nonneg.append(nonneg)
        return len(self.variables) - 1

    def add_constraint(
        self, coeffs: dict[int, int | Fraction], sense: str, rhs: int | Fraction, label: str = ""
    ) -> int:
        if sense not in (GE, LE, EQ):
            raise ValueError(f"Unknown constraint sense: {sense}")
        clean = {j: as_rational(c) for j, c in coeffs.items() if c}
        for j in clean:
            if not 0 <= j < len(self.variables):
                raise ValueError(f"Constraint references unknown variable index {j}")
        self.constraints.append(Constraint(clean, sense, as_rational(rhs), label))
        return len(self.constraints) - 1

    def set_objective(self, coeffs: dict[int, int | Fraction]) -> None:
        self.objective = {j: as_rational(c) for j, c in coeffs.items() if c}


@dataclass
class LPCertificate:
    """Solver answer with its certificate.

    Attributes:
        status (str): ``feasible``, ``infeasible`` or ``unbounded``.
        point (list[Fraction] | None): Feasible (optimal) point.
        ray (list[Fraction] | None): Farkas multipliers, one per constraint.
        objective_value (Fraction | None): Optimum when an objective was given.
        direction (list[Fraction] | None): Improving ray for unbounded problems.
    """

    status: str
    point: list[Fraction] | None = None
    ray: list[Fraction] | None = None
    objective_value: Fraction | None = None
    direction: list[Fraction] | None = None


class _Tableau:
    """Dense simplex tableau; the last entry of each row is the right-hand side."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int], cost: list[Fraction]):
        self.rows = rows
        self.basis = basis
        self.set_cost(cost)

    @property
    def ncols(self) -> int:
        return len(self.obj) - 1

    def set_cost(self, cost: list[Fraction]) -> None:
        obj = list(cost) + [Fraction(0)]
        for i, col in enumerate(self.basis):
            weight = cost[col]
            if weight:
                obj = [a - weight * b for a, b in zip(obj, self.rows[i])]
        self.obj = obj

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        pv = prow[c]
        if pv != 1:
            prow = [v / pv for v in prow]
            self.rows[r] = prow
        nonzero = [k for k, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            factor = row[c]
            if i != r and factor:
                for k in nonzero:
                    row[k] -= factor * prow[k]
        factor = self.obj[c]
        if factor:
            for k in nonzero:
                self.obj[k] -= factor * prow[k]
        self.basis[r] = c

    def minimize(self) -> int | None:
        """Run Bland's rule to optimality; return an unbounded entering column, else None."""
        pivots = 0
        while True:
            entering = next((j for j in range(self.ncols) if self.obj[j] < 0), None)
            if entering is None:
                logging.debug(f"simplex: optimal after {pivots} pivots")
                return None
            best, best_ratio = -1, Fraction(0)
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    if best < 0 or ratio < best_ratio or (ratio == best_ratio and self.basis[i] < self.basis[best]):
                        best, best_ratio = i, ratio
            if best < 0:
                return entering
            self.pivot(best, entering)
            pivots += 1

    def basic_solution(self) -> list[Fraction]:
        values = [Fraction(0)] * self.ncols
        for i, col in enumerate(self.basis):
            values[col] = self.rows[i][-1]
        return values


@dataclass
class _PhaseOne:
    feasible: bool
    tableau: _Tableau | None = None
    farkas: list[Fraction] | None = None


def _phase_one(matrix: list[list[Fraction]], rhs: list[Fraction], ncols: int) -> _PhaseOne:
    """Find ``z >= 0`` with ``matrix @ z = rhs`` or ``y`` with ``matrix^T y >= 0`` and ``rhs . y < 0``."""
    m = len(matrix)
    flip = [-1 if b < 0 else 1 for b in rhs]
    rows = []
    for i, row in enumerate(matrix):
        artificial = [Fraction(0)] * m
        artificial[i] = Fraction(1)
        rows.append([flip[i] * a for a in row] + artificial + [flip[i] * rhs[i]])
    cost = [Fraction(0)] * ncols + [Fraction(1)] * m
    tableau = _Tableau(rows, [ncols + i for i in range(m)], cost)
    tableau.minimize()
    if -tableau.obj[-1] > 0:
        # Artificial reduced costs are 1 - y'_i for the optimal duals y' of the flipped system.
        farkas = [-flip[i] * (1 - tableau.obj[ncols + i]) for i in range(m)]
        return _PhaseOne(False, farkas=farkas)
    return _PhaseOne(True, tableau=tableau)


def _standard_columns(prob: LPProblem) -> list[tuple[str, int, int]]:
    """Standard-form columns: (kind, index, sign) for x+, x-, nonneg x and slacks."""
    columns = []
    for j, nonneg in enumerate(prob.nonneg):
        columns.append(("var", j, 1))
        if not nonneg:
            columns.append(("var", j, -1))
    for i, con in enumerate(prob.constraints):
        if con.sense != EQ:
            columns.append(("slack", i, -1 if con.sense == GE else 1))
    return columns


def _primal_matrix(prob: LPProblem, columns: list[tuple[str, int, int]]) -> list[list[Fraction]]:
    matrix = []
    for i, con in enumerate(prob.constraints):
        row = []
        for kind, idx, sign in columns:
            if kind == "var":
                row.append(sign * con.coeffs.get(idx, Fraction(0)))
            else:
                row.append(Fraction(sign) if idx == i else Fraction(0))
        matrix.append(row)
    return matrix


def _recover_point(prob: LPProblem, columns: list[tuple[str, int, int]], z: list[Fraction]) -> list[Fraction]:
    x = [Fraction(0)] * len(prob.variables)
    for (kind, idx, sign), value in zip(columns, z):
        if kind == "var":
            x[idx] += sign * value
    return x


def _solve_primal(prob: LPProblem) -> LPCertificate:
    columns = _standard_columns(prob)
    ncols = len(columns)
    matrix = _primal_matrix(prob, columns)
    rhs = [con.rhs for con in prob.constraints]
    phase = _phase_one(matrix, rhs, ncols)
    if not phase.feasible:
        return LPCertificate(INFEASIBLE, ray=[-y for y in phase.farkas])
    tableau = phase.tableau
    if prob.objective is None:
        return LPCertificate(FEASIBLE, point=_recover_point(prob, columns, tableau.basic_solution()[:ncols]))
    _drop_artificials(tableau, ncols)
    cost = []
    for kind, idx, sign in columns:
        cost.append(sign * prob.objective.get(idx, Fraction(0)) if kind == "var" else Fraction(0))
    tableau.set_cost(cost)
    entering = tableau.minimize()
    z = tableau.basic_solution()
    x = _recover_point(prob, columns, z)
    value = sum((c * x[j] for j, c in prob.objective.items()), Fraction(0))
    if entering is None:
        return LPCertificate(FEASIBLE, point=x, objective_value=value)
    dz = [Fraction(0)] * ncols
    dz[entering] = Fraction(1)
    for i, col in enumerate(tableau.basis):
        dz[col] = -tableau.rows[i][entering]
    return LPCertificate(UNBOUNDED, point=x, direction=_recover_point(prob, columns, dz))


def _drop_artificials(tableau: _Tableau, ncols: int) -> None:
    """Pivot zero-level artificials out of the basis, drop redundant rows and the artificial columns."""
    r = 0
    while r < len(tableau.rows):
        if tableau.basis[r] >= ncols:
            col = next((j for j in range(ncols) if tableau.rows[r][j] != 0), None)
            if col is None:
                del tableau.rows[r]
                del tableau.basis[r]
                continue
            tableau.pivot(r, col)
        r += 1
    tableau.rows = [row[:ncols] + [row[-1]] for row in tableau.rows]
    tableau.obj = tableau.obj[:ncols] + [tableau.obj[-1]]


def _solve_via_alternative(prob: LPProblem) -> LPCertificate:
    """Decide a feasibility problem by running Phase I on its Farkas alternative system.

    The alternative has one row per unknown plus a normalization row, which is
    the smaller tableau when constraints outnumber unknowns.
    """
    nvars = len(prob.variables)
    columns: list[tuple[str, int, int]] = []
    for i, con in enumerate(prob.constraints):
        if con.sense == GE:
            columns.append(("row", i, 1))
        elif con.sense == LE:
            columns.append(("row", i, -1))
        else:
            columns.extend([("row", i, 1), ("row", i, -1)])
    for j, nonneg in enumerate(prob.nonneg):
        if nonneg:
            columns.append(("slack", j, 1))
    matrix = [[Fraction(0)] * len(columns) for _ in range(nvars + 1)]
    for c, (kind, idx, sign) in enumerate(columns):
        if kind == "row":
            con = prob.constraints[idx]
            for j, a in con.coeffs.items():
                matrix[j][c] = sign * a
            matrix[nvars][c] = sign * con.rhs
        else:
            matrix[idx][c] = Fraction(1)
    rhs = [Fraction(0)] * nvars + [Fraction(1)]
    phase = _phase_one(matrix, rhs, len(columns))
    if phase.feasible:
        w = phase.tableau.basic_solution()[: len(columns)]
        ray = [Fraction(0)] * len(prob.constraints)
        for (kind, idx, sign), value in zip(columns, w):
            if kind == "row":
                ray[idx] += sign * value
        return LPCertificate(INFEASIBLE, ray=ray)
    y = phase.farkas
    tau = y[nvars]
    return LPCertificate(FEASIBLE, point=[y[j] / (-tau) for j in range(nvars)])


def verify_point(prob: LPProblem, x: Sequence[Fraction]) -> bool:
    """Check sign restrictions and every constraint at ``x``."""
    if len(x) != len(prob.variables):
        return False
    if any(nonneg and value < 0 for nonneg, value in zip(prob.nonneg, x)):
        return False
    for con in prob.constraints:
        lhs = con.lhs(x)
        if (con.sense == GE and lhs < con.rhs) or (con.sense == LE and lhs > con.rhs):
            return False
        if con.sense == EQ and lhs != con.rhs:
            return False
    return True


def verify_farkas(prob: LPProblem, ray: Sequence[Fraction]) -> bool:
    """Check that ``ray`` certifies infeasibility of ``prob``."""
    if len(ray) != len(prob.constraints):
        return False
    combined = [Fraction(0)] * len(prob.variables)
    rhs = Fraction(0)
    for lam, con in zip(ray, prob.constraints):
        if (con.sense == GE and lam < 0) or (con.sense == LE and lam > 0):
            return False
        for j, a in con.coeffs.items():
            combined[j] += lam * a
        rhs += lam * con.rhs
    for nonneg, value in zip(prob.nonneg, combined):
        if value > 0 or (not nonneg and value != 0):
            return False
    return rhs > 0


def verify_unbounded(prob: LPProblem, x: Sequence[Fraction], direction: Sequence[Fraction]) -> bool:
    """Check a feasible point plus a recession direction that decreases the objective."""
    if prob.objective is None or not verify_point(prob, x):
        return False
    if any(nonneg and value < 0 for nonneg, value in zip(prob.nonneg, direction)):
        return False
    for con in prob.constraints:
        slope = con.lhs(direction)
        if (con.sense == GE and slope < 0) or (con.sense == LE and slope > 0) or (con.sense == EQ and slope != 0):
            return False
    return sum((c * direction[j] for j, c in prob.objective.items()), Fraction(0)) < 0


def lp_solve(prob: LPProblem) -> LPCertificate:
    """Solve an exact LP and re-check the certificate before returning it.

    Feasibility problems with more constraints than unknowns go through the
    alternative system; all others through the two-phase primal simplex.

    Args:
        prob (LPProblem): The program.

    Returns:
        LPCertificate: Feasible point, Farkas ray or unbounded ray.

    Raises:
        CertificateCheckFailed: If the produced certificate does not re-verify.
    """
    if prob.objective is None and len(prob.variables) + 1 < len(prob.constraints):
        cert = _solve_via_alternative(prob)
    else:
        cert = _solve_primal(prob)
    ok = {
        FEASIBLE: lambda: verify_point(prob, cert.point),
        INFEASIBLE: lambda: verify_farkas(prob, cert.ray),
        UNBOUNDED: lambda: verify_unbounded(prob, cert.point, cert.direction),
    }[cert.status]()
    if not ok:
        raise CertificateCheckFailed(cert.status)
    logging.debug(f"lp_solve: {len(prob.variables)} unknowns, {len(prob.constraints)} rows -> {cert.status}")
    return cert


@dataclass(frozen=True)
class FnSpec:
    """A +-1 valued Boolean function.

    Inputs are +-1 vectors; Hamming weight counts the -1 entries. Explicit
    tables are indexed by the integer whose bit j is set iff x_j = -1.
    Block-symmetric values are indexed by ``k1 * (m2 + 1) + k2``.

    Attributes:
        arity (int): Number of input bits.
        kind (str): ``explicit``, ``symmetric`` or ``block_symmetric``.
        values (tuple[int, ...]): Function values.
        blocks (tuple[int, int] | None): Block sizes for block-symmetric functions.
        name (str): Display name.
    """

    arity: int
    kind: str
    values: tuple[int, ...]
    blocks: tuple[int, int] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if any(v not in (-1, 1) for v in self.values):
            raise ValueError("Function values must be +1 or -1")
        expected = {
            EXPLICIT: lambda: 1 << self.arity,
            SYMMETRIC: lambda: self.arity + 1,
            BLOCK_SYMMETRIC: lambda: (self.blocks[0] + 1) * (self.blocks[1] + 1),
        }
        if self.kind not in expected:
            raise ValueError(f"Unknown function kind: {self.kind}")
        if self.kind == BLOCK_SYMMETRIC and (self.blocks is None or sum(self.blocks) != self.arity):
            raise ValueError(f"Block sizes {self.blocks} do not add up to arity {self.arity}")
        if len(self.values) != expected[self.kind]():
            raise ValueError(f"{self.kind} function of arity {self.arity} needs {expected[self.kind]()} values")

    def __call__(self, x: Sequence[int]) -> int:
        if len(x) != self.arity:
            raise ValueError(f"Expected {self.arity} inputs, got {len(x)}")
        if self.kind == EXPLICIT:
            return self.values[sum(1 << j for j, xj in enumerate(x) if xj == -1)]
        if self.kind == SYMMETRIC:
            return self.values[sum(1 for xj in x if xj == -1)]
        m1, m2 = self.blocks
        k1 = sum(1 for xj in x[:m1] if xj == -1)
        k2 = sum(1 for xj in x[m1:] if xj == -1)
        return self.values[k1 * (m2 + 1) + k2]

    def negated(self) -> "FnSpec":
        return FnSpec(self.arity, self.kind, tuple(-v for v in self.values), self.blocks, f"-{self.name}")

    def to_explicit(self) -> "FnSpec":
        if self.arity > MAX_EXPLICIT_ARITY:
            raise ResourceBound(f"explicit table for arity {self.arity}")
        values = tuple(self(_cube_point(i, self.arity)) for i in range(1 << self.arity))
        return FnSpec(self.arity, EXPLICIT, values, None, self.name)

    def to_json(self) -> dict[str, object]:
        data: dict[str, object] = {"arity": self.arity, "kind": self.kind, "values": list(self.values)}
        if self.blocks:
            data["blocks"] = list(self.blocks)
        return data


def _cube_point(index: int, arity: int) -> tuple[int, ...]:
    return tuple(-1 if (index >> j) & 1 else 1 for j in range(arity))


def _popcount(value: int) -> int:
    return bin(value).count("1")


def builtin_fn(name: str, arity: int) -> FnSpec:
    """Named functions; for ``maj_and_maj`` the arity is the size of each block.

    ``maj`` is -1 iff at least half the inputs are -1, ``and`` is -1 iff all
    are, ``or`` iff any is, ``parity`` is (-1)^weight.
    """
    if arity < 1:
        raise ValueError(f"arity must be positive, got {arity}")
    symmetric: dict[str, Callable[[int], int]] = {
        "maj": lambda k: -1 if 2 * k >= arity else 1,
        "parity": lambda k: -1 if k % 2 else 1,
        "and": lambda k: -1 if k == arity else 1,
        "or": lambda k: -1 if k >= 1 else 1,
    }
    if name in symmetric:
        return FnSpec(arity, SYMMETRIC, tuple(symmetric[name](k) for k in range(arity + 1)), None, f"{name}{arity}")
    if name == "maj_and_maj":
        values = tuple(
            -1 if 2 * k1 >= arity and 2 * k2 >= arity else 1 for k1 in range(arity + 1) for k2 in range(arity + 1)
        )
        return FnSpec(2 * arity, BLOCK_SYMMETRIC, values, (arity, arity), f"maj_and_maj{arity}")
    raise ValueError(f"Unknown built-in function: {name}")


def explicit_fn(arity: int, table_index: int) -> FnSpec:
    """Explicit function whose value at input i is -1 iff bit i of ``table_index`` is set."""
    values = tuple(-1 if (table_index >> i) & 1 else 1 for i in range(1 << arity))
    return FnSpec(arity, EXPLICIT, values, None, f"f{arity}_{table_index}")


def fn_from_dict(data: dict, name: str = "") -> FnSpec:
    """Build a FnSpec from its ``{"arity", "kind", "values", "blocks"?}`` document."""
    try:
        blocks = tuple(int(b) for b in data["blocks"]) if data.get("blocks") else None
        return FnSpec(int(data["arity"]), str(data["kind"]), tuple(int(v) for v in data["values"]), blocks, name)
    except (KeyError, TypeError) as e:
        raise ValueError(f"Invalid function spec: {e}") from e


def load_fn_spec(path: str) -> FnSpec:
    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        raise ValueError(f"Function spec file {path} does not contain a mapping")
    return fn_from_dict(data, name=path)


def parse_fn_arg(value: str) -> FnSpec:
    """Resolve ``name[:arity]`` built-ins (default arity 2) or a spec file path."""
    name, _, arity = value.partition(":")
    if name in ("maj", "parity", "and", "or", "maj_and_maj"):
        return builtin_fn(name, int(arity) if arity else 2)
    return load_fn_spec(value)


def check_resources(f: FnSpec) -> None:
    if f.kind == EXPLICIT and f.arity > MAX_EXPLICIT_ARITY:
        raise ResourceBound(f"explicit arity {f.arity} > {MAX_EXPLICIT_ARITY}")
    if f.kind == SYMMETRIC and f.arity > MAX_BLOCK_SIZE:
        raise ResourceBound(f"symmetric arity {f.arity} > {MAX_BLOCK_SIZE}")
    if f.kind == BLOCK_SYMMETRIC and max(f.blocks) > MAX_BLOCK_SIZE:
        raise ResourceBound(f"block size {max(f.blocks)} > {MAX_BLOCK_SIZE}")


def domain_points(f: FnSpec) -> list[tuple[Point, int, int]]:
    """``(point, multiplicity, value)`` for each explicit input or weight class."""
    if f.kind == EXPLICIT:
        return [((i,), 1, v) for i, v in enumerate(f.values)]
    if f.kind == SYMMETRIC:
        return [((k,), binomial(f.arity, k), v) for k, v in enumerate(f.values)]
    m1, m2 = f.blocks
    points = []
    for k1 in range(m1 + 1):
        for k2 in range(m2 + 1):
            points.append(((k1, k2), binomial(m1, k1) * binomial(m2, k2), f.values[k1 * (m2 + 1) + k2]))
    return points


def basis(f: FnSpec, degree: int) -> list[tuple[str, Callable[[Point], int]]]:
    """Polynomial basis of total degree <= ``degree`` as (label, evaluator at a domain point).

    Explicit: multilinear monomials ordered by size then lexicographically.
    Symmetric: powers of s = m - 2k. Block-symmetric: s1^a * s2^b.
    """
    if degree < 0:
        return []
    if f.kind == EXPLICIT:
        out = []
        for size in range(min(degree, f.arity) + 1):
            for subset in itertools.combinations(range(f.arity), size):
                mask = sum(1 << j for j in subset)
                label = "*".join(f"x{j}" for j in subset) or "1"
                out.append((label, lambda pt, mask=mask: -1 if _popcount(pt[0] & mask) % 2 else 1))
        return out
    if f.kind == SYMMETRIC:
        m = f.arity
        return [(f"s^{j}", lambda pt, j=j: (m - 2 * pt[0]) ** j) for j in range(min(degree, m) + 1)]
    m1, m2 = f.blocks
    out = []
    for total in range(degree + 1):
        for a in range(total + 1):
            b = total - a
            if a <= m1 and b <= m2:
                out.append((f"s1^{a}*s2^{b}", lambda pt, a=a, b=b: (m1 - 2 * pt[0]) ** a * (m2 - 2 * pt[1]) ** b))
    return out


def threshold_lp(f: FnSpec, degree: int) -> LPProblem:
    """Sign-representation at ``degree``: ``f(x) * p(x) >= 1`` on every domain point."""
    check_resources(f)
    prob = LPProblem()
    terms = basis(f, degree)
    for label, _ in terms:
        prob.add_variable(label)
    for point, _, value in domain_points(f):
        prob.add_constraint({j: value * phi(point) for j, (_, phi) in enumerate(terms)}, GE, 1, label=str(point))
    return prob


@dataclass
class DualWitness:
    """Dual object certifying a degree lower bound.

    Attributes:
        kind (str): ``threshold`` or ``rational_pair``.
        fn (FnSpec): The function it certifies against.
        phd (int): Pure high degree (orthogonal to every polynomial of degree <= phd).
        psi (dict[Point, Fraction]): Per-input value on each domain point (psi0 for pairs).
        psi1 (dict[Point, Fraction] | None): Second function of a rational pair.
        phd1 (int | None): Pure high degree of ``psi1``.
        eps (Fraction | None): Domination constant of a rational pair.
    """

    kind: str
    fn: FnSpec
    phd: int
    psi: dict[Point, Fraction]
    psi1: dict[Point, Fraction] | None = None
    phd1: int | None = None
    eps: Fraction | None = None

    def to_json(self) -> dict[str, object]:
        data: dict[str, object] = {
            "kind": self.kind,
            "phd": self.phd,
            "psi": [{"point": list(pt), "value": format_rational(v)} for pt, v in self.psi.items()],
        }
        if self.psi1 is not None:
            data["psi1"] = [{"point": list(pt), "value": format_rational(v)} for pt, v in self.psi1.items()]
            data["phd1"] = self.phd1
            data["eps"] = format_rational(self.eps)
        return data


def _l1(f: FnSpec, psi: dict[Point, Fraction]) -> Fraction:
    return sum((mult * abs(psi[pt]) for pt, mult, _ in domain_points(f)), Fraction(0))


def _phd_checks(f: FnSpec, psi: dict[Point, Fraction], degree: int, label: str) -> list:
    checks = []
    points = domain_points(f)
    for name, phi in basis(f, degree):
        correlation = sum((mult * psi[pt] * phi(pt) for pt, mult, _ in points), Fraction(0))
        checks.append(exact_check(f"{label} <psi,{name}>", identity_margin(correlation)))
    return checks


def verify_dual_witness(w: DualWitness) -> Report:
    """Re-verify a threshold or rational-pair witness from scratch."""
    f = w.fn
    points = domain_points(f)
    if w.kind == THRESHOLD:
        properties = [
            PropertyResult("pure_high_degree", _phd_checks(f, w.psi, w.phd, "psi")),
            PropertyResult(
                "sign_agreement", [exact_check(f"point={pt}", w.psi[pt] * value) for pt, _, value in points]
            ),
            PropertyResult("nontrivial", [exact_check("||psi||_1", _l1(f, w.psi), strict=True)]),
        ]
    else:
        eps = w.eps
        psi0, psi1 = w.psi, w.psi1
        dominance = []
        for pt, _, value in points:
            if value == 1:
                dominance.append(exact_check(f"f=1 point={pt}", psi0[pt] - eps * abs(psi1[pt])))
            else:
                dominance.append(exact_check(f"f=-1 point={pt}", psi1[pt] - eps * abs(psi0[pt])))
        properties = [
            PropertyResult("domination", dominance),
            PropertyResult("pure_high_degree_0", _phd_checks(f, psi0, w.phd, "psi0")),
            PropertyResult("pure_high_degree_1", _phd_checks(f, psi1, w.phd1, "psi1")),
            PropertyResult(
                "nontrivial",
                [
                    exact_check("||psi0||_1", _l1(f, psi0), strict=True),
                    exact_check("||psi1||_1", _l1(f, psi1), strict=True),
                ],
            ),
        ]
    return Report(f"Dual witness ({w.kind}) for {f.name or f.kind}", properties, {"phd": w.phd})


def extract_dual_witness(cert: LPCertificate, f: FnSpec, d: int) -> DualWitness:
    """Turn the Farkas ray of the degree-``d`` sign-representation LP into a dual witness.

    Args:
        cert (LPCertificate): Infeasibility certificate of ``threshold_lp(f, d)``.
        f (FnSpec): The function.
        d (int): Degree at which the LP was infeasible.

    Returns:
        DualWitness: ``psi = mu * f / multiplicity`` normalized to unit l1 norm.

    Raises:
        MalformedCertificate: On a non-infeasible certificate, a ray of the wrong
            length, a ray with no mass, or a witness that fails re-verification.
    """
    if cert.status != INFEASIBLE or cert.ray is None:
        raise MalformedCertificate(f"expected an infeasibility ray, got status {cert.status}")
    points = domain_points(f)
    if len(cert.ray) != len(points):
        raise MalformedCertificate(f"ray has {len(cert.ray)} entries for {len(points)} domain points")
    mass = sum(cert.ray, Fraction(0))
    if mass <= 0 or any(mu < 0 for mu in cert.ray):
        raise MalformedCertificate("ray puts no (or negative) weight on the function constraints")
    psi = {pt: mu * value / (mult * mass) for (pt, mult, value), mu in zip(points, cert.ray)}
    witness = DualWitness(THRESHOLD, f, d, psi)
    report = verify_dual_witness(witness)
    if report.status != PASS:
        raise MalformedCertificate(f"extracted witness fails {[p.name for p in report.properties if p.failures()]}")
    return witness


@dataclass
class ThresholdResult:
    """Threshold degree with the representing polynomial and the dual witness one degree below."""

    degree: int
    polynomial: dict[str, Fraction]
    witness: DualWitness | None


def threshold_degree(f: FnSpec) -> ThresholdResult:
    """Least degree of a sign-representing polynomial, by scanning degrees upward.

    Args:
        f (FnSpec): The function.

    Returns:
        ThresholdResult: Degree, representing polynomial, and dual witness at degree-1 (None at degree 0).

    Raises:
        ResourceBound: For arities beyond the chosen representation's limits.
    """
    check_resources(f)
    witness = None
    for d in range(f.arity + 1):
        prob = threshold_lp(f, d)
        cert = lp_solve(prob)
        if cert.status == FEASIBLE:
            polynomial = dict(zip(prob.variables, cert.point))
            logging.info(f"threshold_degree({f.name or f.kind}) = {d}")
            return ThresholdResult(d, polynomial, witness)
        witness = extract_dual_witness(cert, f, d)
        logging.debug(f"threshold_degree({f.name or f.kind}): degree {d} infeasible")
    raise AssertionError("multilinear interpolation always sign-represents at full degree")


def evaluate_polynomial(f: FnSpec, degree: int, coefficients: dict[str, Fraction], point: Point) -> Fraction:
    """Evaluate a basis-coefficient polynomial at a domain point."""
    return sum((coefficients.get(label, Fraction(0)) * phi(point) for label, phi in basis(f, degree)), Fraction(0))


def rational_lp(f: FnSpec, d0: int, d1: int, eps: Fraction) -> LPProblem:
    """Fixed-eps system: ``eps*p0 -+ p1 >= 1`` where f = 1, ``eps*p1 -+ p0 >= 1`` where f = -1."""
    check_resources(f)
    prob = LPProblem()
    terms0 = basis(f, d0)
    terms1 = basis(f, d1)
    idx0 = [prob.add_variable(f"p0:{label}") for label, _ in terms0]
    idx1 = [prob.add_variable(f"p1:{label}") for label, _ in terms1]
    for point, _, value in domain_points(f):
        main, other = ((idx0, terms0), (idx1, terms1)) if value == 1 else ((idx1, terms1), (idx0, terms0))
        for sign in (-1, 1):
            coeffs: dict[int, Fraction] = {}
            for j, (_, phi) in zip(main[0], main[1]):
                coeffs[j] = eps * phi(point)
            for j, (_, phi) in zip(other[0], other[1]):
                coeffs[j] = coeffs.get(j, Fraction(0)) + sign * phi(point)
            prob.add_constraint(coeffs, GE, 1, label=f"{point}{'+' if sign > 0 else '-'}")
    return prob


@dataclass
class RationalResult:
    """Outcome of the fixed-eps rational-approximation query."""

    feasible: bool
    eps: Fraction
    p0: dict[str, Fraction] | None = None
    p1: dict[str, Fraction] | None = None
    witness: DualWitness | None = None


def rational_degree_feasible(f: FnSpec, d0: int, d1: int, eps: int | Fraction) -> RationalResult:
    """Decide whether degree-(d0, d1) polynomials achieve ``eps`` in the one-sided sense.

    Feasible answers carry (p0, p1). Infeasible answers carry the dual pair
    (psi0, psi1) built from the Farkas ray and re-verified exactly.

    Args:
        f (FnSpec): The function.
        d0 (int): Degree bound for p0.
        d1 (int): Degree bound for p1.
        eps (int | Fraction): Positive approximation parameter.

    Returns:
        RationalResult: Primal pair or dual pair.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    prob = rational_lp(f, d0, d1, eps)
    cert = lp_solve(prob)
    if cert.status == FEASIBLE:
        names = prob.variables
        p0 = {n[3:]: v for n, v in zip(names, cert.point) if n.startswith("p0:")}
        p1 = {n[3:]: v for n, v in zip(names, cert.point) if n.startswith("p1:")}
        return RationalResult(True, eps, p0, p1)
    psi0: dict[Point, Fraction] = {}
    psi1: dict[Point, Fraction] = {}
    ray = iter(cert.ray)
    for point, mult, value in domain_points(f):
        minus, plus = next(ray), next(ray)
        if value == 1:
            psi0[point], psi1[point] = eps * (minus + plus) / mult, (plus - minus) / mult
        else:
            psi0[point], psi1[point] = (plus - minus) / mult, eps * (minus + plus) / mult
    witness = DualWitness(RATIONAL_PAIR, f, d0, psi0, psi1, d1, eps)
    report = verify_dual_witness(witness)
    if report.status != PASS:
        raise MalformedCertificate(f"rational dual pair fails {[p.name for p in report.properties if p.failures()]}")
    return RationalResult(False, eps, witness=witness)


def rational_degree_search(f: FnSpec, eps: int | Fraction) -> int:
    """Least d with ``rational_degree_feasible(f, d, d, eps)`` feasible (linear scan from 0)."""
    eps = as_rational(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    check_resources(f)
    for d in range(f.arity + 1):
        if rational_degree_feasible(f, d, d, eps).feasible:
            logging.info(f"rational degree of {f.name or f.kind} at eps={eps}: {d}")
            return d
    raise AssertionError("indicator polynomials are feasible at full degree")


def bisect_rational_bound(
    f: FnSpec, d0: int, d1: int, lo: int | Fraction, hi: int | Fraction, steps: int = 16
) -> tuple[Fraction, Fraction]:
    """Bracket the infimum eps for degrees (d0, d1) by rational bisection.

    Requires the query to be infeasible at ``lo`` and feasible at ``hi``; the
    returned bracket keeps that invariant.
    """
    lo, hi = as_rational(lo), as_rational(hi)
    if rational_degree_feasible(f, d0, d1, lo).feasible or not rational_degree_feasible(f, d0, d1, hi).feasible:
        raise ValueError(f"bisection needs infeasible lo={lo} and feasible hi={hi}")
    for _ in range(steps):
        mid = (lo + hi) / 2
        if rational_degree_feasible(f, d0, d1, mid).feasible:
            hi = mid
        else:
            lo = mid
    return lo, hi


def parse_eps(text: str) -> Fraction:
    value = parse_rational(text)
    if value <= 0:
        raise ValueError(f"eps must be positive, got {text}")
    return value
