"""Algebra of multi-valued-input (MVI) literals, expressions, truth tables,
and polarity matrices over GF(2).

Conventions: a value set over a radix-v variable is an int bitmask with bit k
representing value k.  Polarity matrices are tuples of such row masks; row r
(1-indexed) is the value set of polarity literal P^r.  Normalized codes store
P^r in bit r-1 and print most-significant (P^1) first.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .gf2 import gf2_rank, gf2_solve

__all__ = [
    "MviVariable",
    "TruthSet",
    "MviLiteral",
    "ProductTerm",
    "MviExpression",
    "PolarityMatrix",
    "PolarityAssignment",
    "NormalizedCode",
    "TruthTable",
    "ContractError",
    "combine_literals",
    "negate_literal",
    "eval_literal",
    "eval_expression",
    "truth_table",
    "count_polarities",
    "enumerate_polarities",
    "solve_normalized_code",
    "solve_code_exhaustive",
    "polarity_kernel",
    "assignments",
    "assignment_index",
]

MAX_EXHAUSTIVE_RADIX = 4


class ContractError(ValueError):
    """A precondition or invariant of the algebra was violated."""


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ContractError(msg)


@dataclass(frozen=True)
class MviVariable:
    """A multi-valued variable with a natural-binary encoding (MSB first)."""

    name: str
    radix: int
    encoding_bits: Tuple[str, ...]

    def __post_init__(self) -> None:
        _check(self.radix >= 2, f"radix must be >= 2, got {self.radix}")
        _check(
            self.radix <= (1 << len(self.encoding_bits)),
            f"{self.name}: radix {self.radix} needs more than "
            f"{len(self.encoding_bits)} encoding bits",
        )
        _check(
            len(set(self.encoding_bits)) == len(self.encoding_bits),
            f"{self.name}: duplicate encoding bit",
        )

    @property
    def n_bits(self) -> int:
        return len(self.encoding_bits)

    def encode(self, value: int) -> Tuple[int, ...]:
        """Natural binary code of a value, MSB first."""
        _check(0 <= value < self.radix, f"value {value} out of range")
        b = self.n_bits
        return tuple((value >> (b - 1 - i)) & 1 for i in range(b))


@dataclass(frozen=True)
class TruthSet:
    """A subset of {0..v-1} stored as a bitmask (bit k = value k)."""

    mask: int
    radix: int

    def __post_init__(self) -> None:
        _check(self.radix >= 2, "radix must be >= 2")
        _check(
            0 <= self.mask < (1 << self.radix),
            f"mask {self.mask:#b} has bits outside radix {self.radix}",
        )

    @classmethod
    def from_values(cls, values: Iterable[int], radix: int) -> "TruthSet":
        mask = 0
        for v in values:
            _check(0 <= v < radix, f"value {v} out of range for radix {radix}")
            mask |= 1 << v
        return cls(mask, radix)

    @classmethod
    def full(cls, radix: int) -> "TruthSet":
        return cls((1 << radix) - 1, radix)

    @classmethod
    def empty(cls, radix: int) -> "TruthSet":
        return cls(0, radix)

    @property
    def is_full(self) -> bool:
        return self.mask == (1 << self.radix) - 1

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def values(self) -> Tuple[int, ...]:
        return tuple(k for k in range(self.radix) if (self.mask >> k) & 1)

    def contains(self, value: int) -> bool:
        _check(0 <= value < self.radix, f"value {value} out of range")
        return bool((self.mask >> value) & 1)

    def __str__(self) -> str:
        return "{%s}" % ",".join(str(v) for v in self.values())


@dataclass(frozen=True)
class MviLiteral:
    """Predicate X^S: variable's value lies in the truth set S."""

    variable: MviVariable
    truth_set: TruthSet

    def __post_init__(self) -> None:
        _check(
            self.truth_set.radix == self.variable.radix,
            f"literal radix {self.truth_set.radix} != variable radix "
            f"{self.variable.radix}",
        )

    def __str__(self) -> str:
        return f"{self.variable.name}{self.truth_set}"


def combine_literals(kind: str, s1: TruthSet, s2: TruthSet) -> TruthSet:
    """AND/OR/XOR of two same-variable literals as set operations."""
    _check(s1.radix == s2.radix, "radix mismatch in combine_literals")
    if kind == "AND":
        return TruthSet(s1.mask & s2.mask, s1.radix)
    if kind == "OR":
        return TruthSet(s1.mask | s2.mask, s1.radix)
    if kind == "XOR":
        return TruthSet(s1.mask ^ s2.mask, s1.radix)
    raise ContractError(f"unknown combine kind {kind!r}")


def negate_literal(s: TruthSet) -> TruthSet:
    """Complement within {0..v-1}."""
    return TruthSet(s.mask ^ ((1 << s.radix) - 1), s.radix)


def eval_literal(lit: MviLiteral, value: int) -> int:
    """1 iff value is in the literal's truth set."""
    return 1 if lit.truth_set.contains(value) else 0


@dataclass(frozen=True)
class ProductTerm:
    """AND of literals, at most one per variable; full sets are dropped."""

    literals: Tuple[Tuple[str, TruthSet], ...]  # sorted by variable name

    @classmethod
    def of(cls, sets: Dict[str, TruthSet]) -> "ProductTerm":
        kept = {}
        for name, ts in sets.items():
            _check(not ts.is_empty, f"empty literal for {name} annihilates term")
            if ts.is_full:
                continue
            kept[name] = ts
        return cls(tuple(sorted(kept.items())))

    @property
    def is_constant_one(self) -> bool:
        return not self.literals

    def truth_sets(self) -> Dict[str, TruthSet]:
        return dict(self.literals)

    def evaluate(self, assignment: Dict[str, int]) -> int:
        for name, ts in self.literals:
            _check(name in assignment, f"missing variable {name}")
            if not ts.contains(assignment[name]):
                return 0
        return 1

    def __str__(self) -> str:
        if not self.literals:
            return "1"
        return "*".join(f"{n}{ts}" for n, ts in self.literals)


@dataclass(frozen=True)
class MviExpression:
    """XOR of product terms over a fixed variable context."""

    variables: Tuple[MviVariable, ...]
    terms: Tuple[ProductTerm, ...]
    label: Optional[str] = None

    @classmethod
    def of(
        cls,
        variables: Sequence[MviVariable],
        terms: Iterable[ProductTerm],
        label: Optional[str] = None,
    ) -> "MviExpression":
        """Build the XOR-canonical form: duplicate term pairs cancel."""
        counts: Dict[ProductTerm, int] = {}
        for t in terms:
            counts[t] = counts.get(t, 0) + 1
        kept = sorted(
            (t for t, c in counts.items() if c % 2), key=lambda t: str(t)
        )
        return cls(tuple(variables), tuple(kept), label)

    def var_map(self) -> Dict[str, MviVariable]:
        return {v.name: v for v in self.variables}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " ^ ".join(str(t) for t in self.terms)


def eval_expression(expr: MviExpression, assignment: Dict[str, int]) -> int:
    """XOR over terms of AND over literal evaluations."""
    for v in expr.variables:
        _check(v.name in assignment, f"missing variable {v.name}")
        _check(
            0 <= assignment[v.name] < v.radix,
            f"value {assignment[v.name]} out of range for {v.name}",
        )
    acc = 0
    for term in expr.terms:
        acc ^= term.evaluate(assignment)
    return acc


def assignments(radices: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """All assignments in natural order (first variable most significant)."""
    yield from itertools.product(*(range(v) for v in radices))


def assignment_index(values: Sequence[int], radices: Sequence[int]) -> int:
    """Mixed-radix natural index of an assignment."""
    idx = 0
    for v, r in zip(values, radices):
        idx = idx * r + v
    return idx


@dataclass(frozen=True)
class TruthTable:
    """One bit-vector per output over the natural assignment order."""

    radices: Tuple[int, ...]
    outputs: Tuple[Tuple[str, int], ...]  # (label, bits) with bit i = row i

    @property
    def size(self) -> int:
        return math.prod(self.radices)

    def column(self, label: str) -> int:
        for name, bits in self.outputs:
            if name == label:
                return bits
        raise ContractError(f"no output {label!r}")

    def bit(self, label: str, values: Sequence[int]) -> int:
        idx = assignment_index(values, self.radices)
        return (self.column(label) >> idx) & 1


def truth_table(
    exprs: Sequence[MviExpression] | MviExpression,
) -> TruthTable:
    """Exhaustive evaluation over the shared variable context."""
    if isinstance(exprs, MviExpression):
        exprs = [exprs]
    _check(len(exprs) > 0, "no expressions")
    variables = exprs[0].variables
    for e in exprs:
        _check(e.variables == variables, "expressions share one context")
    radices = tuple(v.radix for v in variables)
    names = [v.name for v in variables]
    out: List[Tuple[str, int]] = []
    for pos, e in enumerate(exprs):
        bits = 0
        for idx, vals in enumerate(assignments(radices)):
            if eval_expression(e, dict(zip(names, vals))):
                bits |= 1 << idx
        out.append((e.label or f"F{pos}", bits))
    return TruthTable(radices, tuple(out))


def set_to_string(mask: int, radix: int) -> str:
    """Bit-vector string, value 0 first (paper table layout)."""
    return "".join("1" if (mask >> k) & 1 else "0" for k in range(radix))


def set_from_string(s: str) -> int:
    mask = 0
    for k, ch in enumerate(s):
        if ch == "1":
            mask |= 1 << k
        elif ch != "0":
            raise ContractError(f"bad bit-vector string {s!r}")
    return mask


@dataclass(frozen=True)
class PolarityMatrix:
    """v x v GF(2) matrix; row r (1-indexed) is polarity literal P^r."""

    rows: Tuple[int, ...]
    radix: int

    def __post_init__(self) -> None:
        _check(len(self.rows) == self.radix, "polarity matrix must be square")
        for r in self.rows:
            _check(0 < r < (1 << self.radix), "polarity rows must be nonzero")

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "PolarityMatrix":
        v = len(rows)
        for s in rows:
            _check(len(s) == v, "polarity matrix must be square")
        return cls(tuple(set_from_string(s) for s in rows), v)

    @property
    def canonical(self) -> bool:
        return gf2_rank(list(self.rows), self.radix) == self.radix

    def row_set(self, r: int) -> TruthSet:
        """Truth set of polarity literal P^r (r is 1-indexed)."""
        _check(1 <= r <= self.radix, f"row index {r} out of range")
        return TruthSet(self.rows[r - 1], self.radix)

    def row_strings(self) -> Tuple[str, ...]:
        return tuple(set_to_string(r, self.radix) for r in self.rows)

    def __str__(self) -> str:
        return "[" + ";".join(self.row_strings()) + "]"


@dataclass(frozen=True)
class PolarityAssignment:
    """One polarity matrix per MVI variable."""

    matrices: Tuple[Tuple[str, PolarityMatrix], ...]

    @classmethod
    def of(cls, mapping: Dict[str, PolarityMatrix]) -> "PolarityAssignment":
        return cls(tuple(sorted(mapping.items())))

    def matrix(self, var_name: str) -> PolarityMatrix:
        for name, m in self.matrices:
            if name == var_name:
                return m
        raise ContractError(f"no polarity for variable {var_name!r}")

    def has(self, var_name: str) -> bool:
        return any(name == var_name for name, _ in self.matrices)

    @property
    def all_canonical(self) -> bool:
        return all(m.canonical for _, m in self.matrices)

    def sort_key(self) -> Tuple:
        return tuple((name, m.rows) for name, m in self.matrices)


@dataclass(frozen=True)
class NormalizedCode:
    """Bit r-1 set <=> polarity literal P^r participates in the XOR."""

    code: int
    radix: int

    def rows(self) -> Tuple[int, ...]:
        """1-indexed participating rows."""
        return tuple(r for r in range(1, self.radix + 1) if (self.code >> (r - 1)) & 1)

    def __str__(self) -> str:
        return "".join(
            "1" if (self.code >> (r - 1)) & 1 else "0"
            for r in range(1, self.radix + 1)
        )

    @classmethod
    def from_string(cls, s: str) -> "NormalizedCode":
        code = 0
        for i, ch in enumerate(s):
            if ch == "1":
                code |= 1 << i
        return cls(code, len(s))


def count_polarities(v: int) -> int:
    """Number of canonical polarities: unordered GF(2) bases of dimension v."""
    _check(v >= 2, "radix must be >= 2")
    prod = 1
    for k in range(v):
        prod *= (1 << v) - (1 << k)
    count, rem = divmod(prod, math.factorial(v))
    assert rem == 0
    return count


def _row_value(mask: int, v: int) -> int:
    """Integer value of a row printed value-0-first (for deterministic order)."""
    return int(set_to_string(mask, v), 2)


def enumerate_polarities(
    v: int, first_row_all_ones: bool = False, allow_large: bool = False
) -> Iterator[PolarityMatrix]:
    """Yield every linearly independent v x v matrix once as a row-set.

    Rows are sorted descending by printed integer value; with
    first_row_all_ones the all-ones row is placed first and only matrices
    containing it are yielded.  Matrices stream in lexicographic order of
    their sorted row tuples.
    """
    _check(v >= 2, "radix must be >= 2")
    if v > MAX_EXHAUSTIVE_RADIX and not allow_large:
        raise ContractError(
            f"radix {v} exceeds the exhaustive enumeration guard "
            f"({MAX_EXHAUSTIVE_RADIX}); pass allow_large to opt in"
        )
    full = (1 << v) - 1
    nonzero = sorted(range(1, 1 << v), key=lambda m: -_row_value(m, v))
    results: List[Tuple[int, ...]] = []
    for combo in itertools.combinations(nonzero, v):
        if first_row_all_ones and full not in combo:
            continue
        if gf2_rank(list(combo), v) != v:
            continue
        rows = sorted(combo, key=lambda m: -_row_value(m, v))
        if first_row_all_ones:
            rows = [full] + [r for r in rows if r != full]
        results.append(tuple(rows))
    results.sort(key=lambda rows: tuple(_row_value(r, v) for r in rows))
    for rows in results:
        yield PolarityMatrix(tuple(rows), v)


def solve_code_exhaustive(s: TruthSet, p: PolarityMatrix) -> List[NormalizedCode]:
    """All XOR combinations of rows equal to S (the paper's table method)."""
    v = p.radix
    out = []
    for code in range(1 << v):
        acc = 0
        for r in range(v):
            if (code >> r) & 1:
                acc ^= p.rows[r]
        if acc == s.mask:
            out.append(NormalizedCode(code, v))
    return out


def solve_normalized_code(s: TruthSet, p: PolarityMatrix) -> NormalizedCode:
    """The code whose selected rows XOR to S.

    Canonical polarity: unique solution by GF(2) solve.  Non-canonical:
    minimum-weight solution, ties broken by smallest code integer; raises if
    the literal is unrepresentable.
    """
    _check(s.radix == p.radix, "radix mismatch")
    if p.canonical:
        sel = gf2_solve(list(p.rows), s.mask, p.radix)
        assert sel is not None
        return NormalizedCode(sel, p.radix)
    sols = solve_code_exhaustive(s, p)
    if not sols:
        raise ContractError(
            f"literal {set_to_string(s.mask, s.radix)} is unrepresentable "
            f"under non-canonical polarity {p}"
        )
    return min(sols, key=lambda c: (bin(c.code).count("1"), c.code))


def polarity_kernel(p: PolarityMatrix) -> Tuple[int, ...]:
    """Single-variable butterfly kernel K with M = K . a.

    Row r-1 of the result is a bitmask over minterm indices k; column k of K
    is the normalized code of the single-valued literal {k}.
    """
    _check(p.canonical, "kernel requires a canonical (invertible) polarity")
    v = p.radix
    kernel = [0] * v
    for k in range(v):
        code = solve_normalized_code(TruthSet(1 << k, v), p)
        for r in range(v):
            if (code.code >> r) & 1:
                kernel[r] |= 1 << k
    return tuple(kernel)
