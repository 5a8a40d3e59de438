"""Exact Fourier-Motzkin elimination over rational linear inequalities.

Each row reads ``sum_k coefs[k] * var_k <= sum_c bound[c] * const_c``: the
bound is a rational combination of named constants that are only known to
be nonnegative (capacity terms such as ``B1`` or ``C2``). Keeping bounds in
that space lets rate-split derivations be eliminated exactly; numbers enter
only in :func:`equivalent_sampled`, the numeric oracle.

Text format, one inequality per line::

    # comment
    nonneg: B1 B2 B3
    vars: R1 R2 R3 R11 R12
    R11 + R12 - R1 <= 0
    R11 + 1/2 R2 <= B1 + B2
    R12 >= 0

``vars:`` is optional (variables are then taken in order of appearance).
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-9         # Float slack for numeric membership.
ORACLE_GRID = 20          # Rate grid points per variable.
MAX_ORACLE_POINTS = 200_000
MAX_CONSTANT_VALUE = 8    # Sampled constants are k/4 with 0 <= k <= 4 * this.

_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:\.\d+)?(?:/\d+)?)?\s*\*?\s*([A-Za-z_][A-Za-z0-9_']*)?\s*")
_RELATION = re.compile(r"<=|>=")


class FMEError(ValueError):
    """Ill-formed system or an operation on unknown names."""


class FMEParseError(FMEError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Inequality:
    coefs: "tuple[Fraction, ...]"
    bound: "tuple[Fraction, ...]"

    def is_constant_only(self) -> bool:
        return not any(self.coefs)


@dataclass(frozen=True)
class LinSystem:
    variables: "tuple[str, ...]"
    constants: "tuple[str, ...]"
    rows: "tuple[Inequality, ...]"

    def __post_init__(self):
        for name, items in (("variable", self.variables), ("constant", self.constants)):
            if len(set(items)) != len(items):
                raise FMEError(f"duplicate {name} name in {items}")
        overlap = set(self.variables) & set(self.constants)
        if overlap:
            raise FMEError(f"names used as both variable and constant: {sorted(overlap)}")
        for row in self.rows:
            if len(row.coefs) != len(self.variables) or len(row.bound) != len(self.constants):
                raise FMEError("row dimension does not match the variable/constant lists")

    def __len__(self) -> int:
        return len(self.rows)

    def index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise FMEError(f"unknown variable {var!r}; system has {', '.join(self.variables)}") from None

    def evaluate(self, values: "dict[str, float]") -> "tuple[np.ndarray, np.ndarray]":
        """Numeric ``(A, b)`` with ``A x <= b`` at the given constant values."""
        missing = [c for c in self.constants if c not in values]
        if missing:
            raise FMEError(f"no value for constants {missing}")
        consts = np.array([float(values[c]) for c in self.constants])
        A = np.array([[float(c) for c in row.coefs] for row in self.rows], dtype=float)
        B = np.array([[float(x) for x in row.bound] for row in self.rows], dtype=float)
        B = B.reshape(len(self.rows), len(self.constants))
        return A.reshape(len(self.rows), len(self.variables)), B @ consts

    def contains(self, point: Sequence[float], values: "dict[str, float]", tol: float = ORACLE_TOL) -> bool:
        A, b = self.evaluate(values)
        return bool(np.all(A @ np.asarray(point, dtype=float) <= b + tol))


def make_system(variables: Iterable[str], constants: Iterable[str],
                rows: "Iterable[tuple[dict, dict]]") -> LinSystem:
    """Build from ``({var: coef}, {const: coef})`` pairs; missing names are 0."""
    variables, constants = tuple(variables), tuple(constants)
    built = []
    for lhs, rhs in rows:
        for name in lhs:
            if name not in variables:
                raise FMEError(f"unknown variable {name!r}")
        for name in rhs:
            if name not in constants:
                raise FMEError(f"unknown constant {name!r}")
        built.append(Inequality(
            tuple(Fraction(lhs.get(v, 0)) for v in variables),
            tuple(Fraction(rhs.get(c, 0)) for c in constants),
        ))
    return LinSystem(variables, constants, tuple(built))


def _scale(row: Inequality, k: Fraction) -> Inequality:
    return Inequality(tuple(c * k for c in row.coefs), tuple(b * k for b in row.bound))


def _add(a: Inequality, b: Inequality) -> Inequality:
    return Inequality(tuple(x + y for x, y in zip(a.coefs, b.coefs)),
                      tuple(x + y for x, y in zip(a.bound, b.bound)))


def _drop_column(row: Inequality, k: int) -> Inequality:
    return Inequality(row.coefs[:k] + row.coefs[k + 1:], row.bound)


def eliminate(sys: LinSystem, var: str) -> LinSystem:
    """Project ``var`` out by pairing every upper with every lower bound on it."""
    k = sys.index(var)
    zero, pos, neg = [], [], []
    for row in sys.rows:
        c = row.coefs[k]
        (zero if c == 0 else pos if c > 0 else neg).append(row)
    rows = [_drop_column(r, k) for r in zero]
    for p in pos:
        for n in neg:
            combined = _add(_scale(p, 1 / p.coefs[k]), _scale(n, 1 / -n.coefs[k]))
            rows.append(_drop_column(combined, k))
    logger.debug("eliminate %s: z=%d p=%d n=%d -> %d rows", var, len(zero), len(pos), len(neg), len(rows))
    return LinSystem(sys.variables[:k] + sys.variables[k + 1:], sys.constants, tuple(rows))


def eliminate_all(sys: LinSystem, variables: Sequence[str], prune: bool = False) -> LinSystem:
    """Eliminate in the given order; ``prune`` drops redundant rows after each step."""
    for var in variables:
        sys = eliminate(sys, var)
        if prune:
            sys = remove_redundant(sys)
    return sys


def _normalize(row: Inequality) -> Inequality:
    lead = next((c for c in row.coefs if c != 0), None)
    if lead is None:
        lead = next((b for b in row.bound if b != 0), None)
    if lead is None:
        return row
    return _scale(row, 1 / abs(lead))


def _nonneg(bound: "tuple[Fraction, ...]") -> bool:
    return all(b >= 0 for b in bound)


def remove_redundant(sys: LinSystem) -> LinSystem:
    """Drop duplicates, trivially true rows and rows dominated by a tighter bound.

    Row B is dominated by row A when both have the same variable part and
    ``bound_B - bound_A`` is a nonnegative combination of the constants.
    """
    unique = []
    seen = set()
    for row in sys.rows:
        row = _normalize(row)
        if row.is_constant_only() and _nonneg(row.bound):
            continue
        if row in seen:
            continue
        seen.add(row)
        unique.append(row)
    kept = []
    for i, row in enumerate(unique):
        dominated = any(
            j != i
            and other.coefs == row.coefs
            and _nonneg(tuple(b - a for a, b in zip(other.bound, row.bound)))
            for j, other in enumerate(unique)
        )
        if not dominated:
            kept.append(row)
    return LinSystem(sys.variables, sys.constants, tuple(kept))


def substitute(sys: LinSystem, var: str, expr: "dict[str, Fraction]") -> LinSystem:
    """Replace ``var`` by ``sum expr[v] * v``; names in ``expr`` not yet in the system are appended."""
    k = sys.index(var)
    if var in expr:
        raise FMEError(f"{var} cannot be substituted by an expression containing itself")
    extra = tuple(v for v in expr if v not in sys.variables)
    variables = sys.variables + extra
    rows = []
    for row in sys.rows:
        coefs = list(row.coefs) + [Fraction(0)] * len(extra)
        c = coefs[k]
        for name, weight in expr.items():
            coefs[variables.index(name)] += c * Fraction(weight)
        coefs[k] = Fraction(0)
        rows.append(_drop_column(Inequality(tuple(coefs), row.bound), k))
    return LinSystem(variables[:k] + variables[k + 1:], sys.constants, tuple(rows))


def reorder(sys: LinSystem, variables: Sequence[str]) -> LinSystem:
    """Same system with its variable columns in the given order."""
    if sorted(variables) != sorted(sys.variables):
        raise FMEError(f"variable mismatch: {sorted(variables)} vs {sorted(sys.variables)}")
    idx = [sys.variables.index(v) for v in variables]
    rows = tuple(Inequality(tuple(r.coefs[i] for i in idx), r.bound) for r in sys.rows)
    return LinSystem(tuple(variables), sys.constants, rows)


def _oracle_points(dim: int, hi: float, grid: int, rng: np.random.Generator) -> np.ndarray:
    if grid ** dim <= MAX_ORACLE_POINTS:
        axis = np.linspace(0.0, hi, grid)
        mesh = np.meshgrid(*([axis] * dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh])
    return rng.uniform(0.0, hi, size=(dim, MAX_ORACLE_POINTS))


def equivalent_sampled(a: LinSystem, b: LinSystem, assignments: int = 100, seed: int = 0,
                       grid: int = ORACLE_GRID, hi: Optional[float] = None) -> bool:
    """Whether ``a`` and ``b`` agree on membership at sampled constant values and rate points.

    Constants take random multiples of 1/4; rate points span ``[0, hi]`` per
    variable (by default the sum of the constant values, which bounds every
    rate region built from them).
    """
    if sorted(a.variables) != sorted(b.variables):
        raise FMEError(f"variable mismatch: {sorted(a.variables)} vs {sorted(b.variables)}")
    b = reorder(b, a.variables)
    constants = sorted(set(a.constants) | set(b.constants))
    rng = np.random.default_rng(seed)
    for trial in range(assignments):
        values = {c: int(v) / 4 for c, v in zip(constants, rng.integers(0, 4 * MAX_CONSTANT_VALUE + 1, len(constants)))}
        top = hi if hi is not None else max(sum(values.values()), 1.0) * 1.05
        points = _oracle_points(len(a.variables), top, grid, rng)
        Aa, ba = a.evaluate(values)
        Ab, bb = b.evaluate(values)
        in_a = np.all(Aa @ points <= ba[:, None] + ORACLE_TOL, axis=0)
        in_b = np.all(Ab @ points <= bb[:, None] + ORACLE_TOL, axis=0)
        if np.any(in_a != in_b):
            bad = int(np.argmax(in_a != in_b))
            logger.info("systems differ at assignment %d (%s), point %s", trial, values, points[:, bad])
            return False
    return True


def _parse_side(text: str, lineno: int) -> "tuple[dict[str, Fraction], Fraction]":
    """Linear combination of names plus a numeric literal."""
    terms: "dict[str, Fraction]" = {}
    literal = Fraction(0)
    pos = 0
    first = True
    text = text.strip()
    if not text:
        raise FMEParseError(lineno, "empty side of inequality")
    while pos < len(text):
        m = _TERM.match(text, pos)
        sign, number, name = m.group(1), m.group(2), m.group(3)
        if m.end() == pos or (number is None and name is None):
            raise FMEParseError(lineno, f"cannot parse {text[pos:]!r}")
        if sign is None and not first:
            raise FMEParseError(lineno, f"missing operator before {text[pos:m.end()].strip()!r}")
        value = Fraction(number) if number else Fraction(1)
        if sign == "-":
            value = -value
        if name is None:
            literal += value
        else:
            terms[name] = terms.get(name, Fraction(0)) + value
        pos = m.end()
        first = False
    return terms, literal


def parse_system(text: str) -> LinSystem:
    constants: "list[str]" = []
    declared_vars: "Optional[list[str]]" = None
    declared: "dict[str, tuple[str, int]]" = {}
    header = 0
    parsed = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith(("nonneg:", "vars:")):
            kind, names = line.split(":", 1)
            for name in names.split():
                if name in declared:
                    first_kind, first_line = declared[name]
                    raise FMEParseError(lineno, f"{name!r} already listed under {first_kind}: on line {first_line}")
                declared[name] = (kind, lineno)
            if kind == "nonneg":
                constants.extend(names.split())
            else:
                declared_vars = (declared_vars or []) + names.split()
            header = lineno
            continue
        parts = _RELATION.split(line)
        if len(parts) != 2:
            raise FMEParseError(lineno, "expected exactly one '<=' or '>='")
        op = _RELATION.search(line).group(0)
        left, left_lit = _parse_side(parts[0], lineno)
        right, right_lit = _parse_side(parts[1], lineno)
        if left_lit != right_lit:
            raise FMEParseError(lineno, "numeric literals other than 0 are not supported; declare a constant")
        parsed.append((lineno, op, left, right))

    const_set = set(constants)
    variables = list(declared_vars or [])
    for lineno, _, left, right in parsed:
        for name in list(left) + list(right):
            if name not in const_set and name not in variables:
                if declared_vars is not None:
                    raise FMEParseError(lineno, f"{name!r} is neither a declared variable nor a constant")
                variables.append(name)

    rows = []
    for lineno, op, left, right in parsed:
        lhs: "dict[str, Fraction]" = {}
        rhs: "dict[str, Fraction]" = {}
        for side, sign in ((left, 1), (right, -1)):
            for name, value in side.items():
                if name in const_set:
                    rhs[name] = rhs.get(name, Fraction(0)) - sign * value
                else:
                    lhs[name] = lhs.get(name, Fraction(0)) + sign * value
        if op == ">=":
            lhs = {k: -v for k, v in lhs.items()}
            rhs = {k: -v for k, v in rhs.items()}
        rows.append((lhs, rhs))
    try:
        return make_system(variables, constants, rows)
    except FMEError as e:
        raise FMEParseError(header, str(e)) from e


def _format_terms(names: Sequence[str], coefs: Sequence[Fraction]) -> str:
    out = ""
    for name, c in zip(names, coefs):
        if c == 0:
            continue
        mag = abs(c)
        term = name if mag == 1 else f"{mag} {name}"
        if not out:
            out = term if c > 0 else f"-{term}"
        else:
            out += f" + {term}" if c > 0 else f" - {term}"
    return out or "0"


def format_system(sys: LinSystem) -> str:
    lines = [f"nonneg: {' '.join(sys.constants)}", f"vars: {' '.join(sys.variables)}"]
    for row in sys.rows:
        lines.append(f"{_format_terms(sys.variables, row.coefs)} <= {_format_terms(sys.constants, row.bound)}")
    return "\n".join(lines) + "\n"
