"""MVI-FPRM spectra: products-matching, butterfly transform, and an
independent brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .core import (
    ContractError,
    MviExpression,
    MviVariable,
    NormalizedCode,
    PolarityAssignment,
    ProductTerm,
    TruthSet,
    TruthTable,
    assignments,
    polarity_kernel,
    solve_normalized_code,
    truth_table,
)

__all__ = [
    "MintermVector",
    "Spectrum",
    "minterm_vector",
    "butterfly_spectrum",
    "products_matching",
    "spectrum_to_expression",
    "oracle_spectrum",
]

DENSE_LIMIT = 1 << 16


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ContractError(msg)


@dataclass(frozen=True)
class MintermVector:
    """Minterm coefficients in natural order; coefficients equal function
    values, so this is a truth table reinterpreted."""

    variables: Tuple[MviVariable, ...]
    labels: Tuple[str, ...]
    bits: Tuple[int, ...]  # one bit-vector per output, bit i = minterm i

    @property
    def radices(self) -> Tuple[int, ...]:
        return tuple(v.radix for v in self.variables)

    @property
    def size(self) -> int:
        return math.prod(self.radices)


class Spectrum:
    """MVI-FPRM coefficients indexed by 1-based polarity-literal tuples.

    Stored densely (list of output masks in natural index order) up to
    DENSE_LIMIT indices, sparsely (index map) above.
    """

    def __init__(
        self,
        variables: Tuple[MviVariable, ...],
        labels: Tuple[str, ...],
        pa: PolarityAssignment,
        coeffs: Optional[Dict[Tuple[int, ...], int]] = None,
    ) -> None:
        self.variables = variables
        self.labels = labels
        self.pa = pa
        self.radices = tuple(v.radix for v in variables)
        self.size = math.prod(self.radices)
        self._dense: Optional[List[int]]
        self._sparse: Optional[Dict[Tuple[int, ...], int]]
        if self.size <= DENSE_LIMIT:
            self._dense = [0] * self.size
            self._sparse = None
        else:
            self._dense = None
            self._sparse = {}
        if coeffs:
            for idx, mask in coeffs.items():
                self.set(idx, mask)

    def _flat(self, index: Tuple[int, ...]) -> int:
        flat = 0
        for r, v in zip(index, self.radices):
            _check(1 <= r <= v, f"index entry {r} out of range")
            flat = flat * v + (r - 1)
        return flat

    def get(self, index: Tuple[int, ...]) -> int:
        if self._dense is not None:
            return self._dense[self._flat(index)]
        return self._sparse.get(index, 0)  # type: ignore[union-attr]

    def set(self, index: Tuple[int, ...], mask: int) -> None:
        if self._dense is not None:
            self._dense[self._flat(index)] = mask
        elif mask:
            self._sparse[index] = mask  # type: ignore[index]
        else:
            self._sparse.pop(index, None)  # type: ignore[union-attr]

    def xor_into(self, index: Tuple[int, ...], mask: int) -> None:
        self.set(index, self.get(index) ^ mask)

    def indices(self) -> Iterator[Tuple[int, ...]]:
        """All index tuples in natural order."""
        for vals in assignments(self.radices):
            yield tuple(r + 1 for r in vals)

    def nonzero(self) -> List[Tuple[Tuple[int, ...], int]]:
        """(index, output mask) pairs in natural order, nonzero only."""
        return [(idx, self.get(idx)) for idx in self.indices() if self.get(idx)]

    def dense_masks(self) -> List[int]:
        return [self.get(idx) for idx in self.indices()]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            self.radices == other.radices
            and self.labels == other.labels
            and self.dense_masks() == other.dense_masks()
        )

    def __repr__(self) -> str:
        nz = ", ".join(f"{idx}:{mask:b}" for idx, mask in self.nonzero())
        return f"Spectrum({nz})"


def minterm_vector(exprs: Sequence[MviExpression] | MviExpression) -> MintermVector:
    """Minterm coefficients = truth table bits in natural order."""
    tt = truth_table(exprs)
    if isinstance(exprs, MviExpression):
        exprs = [exprs]
    variables = exprs[0].variables
    return MintermVector(
        variables,
        tuple(label for label, _ in tt.outputs),
        tuple(bits for _, bits in tt.outputs),
    )


def _require_canonical(pa: PolarityAssignment, variables: Sequence[MviVariable]) -> None:
    for v in variables:
        _check(pa.has(v.name), f"no polarity for {v.name}")
        _check(
            pa.matrix(v.name).radix == v.radix,
            f"polarity radix mismatch for {v.name}",
        )
        _check(
            pa.matrix(v.name).canonical,
            f"polarity for {v.name} is not canonical",
        )


def butterfly_spectrum(a: MintermVector, pa: PolarityAssignment) -> Spectrum:
    """Layered Kronecker application of per-variable kernels.

    Variables are processed in descending order (last declared first); each
    layer applies that variable's kernel across its stride.  The result is
    order-independent (layers act on disjoint index digits).
    """
    _require_canonical(pa, a.variables)
    radices = a.radices
    n = len(radices)
    size = a.size
    work = list(a.bits)  # one packed vector per output
    # Per-position strides in the natural mixed-radix layout.
    strides = [0] * n
    s = 1
    for i in range(n - 1, -1, -1):
        strides[i] = s
        s *= radices[i]
    for i in range(n - 1, -1, -1):  # descending order X_n .. X_1
        v = radices[i]
        kernel = polarity_kernel(pa.matrix(a.variables[i].name))
        stride = strides[i]
        block = stride * v
        for o, vec in enumerate(work):
            out = 0
            for base in range(0, size, block):
                for off in range(stride):
                    # gather the v digit values at this position
                    vals = [
                        (vec >> (base + off + k * stride)) & 1 for k in range(v)
                    ]
                    for r in range(v):
                        acc = 0
                        row = kernel[r]
                        for k in range(v):
                            if (row >> k) & 1:
                                acc ^= vals[k]
                        if acc:
                            out |= 1 << (base + off + r * stride)
            work[o] = out
    sp = Spectrum(a.variables, a.labels, pa)
    for flat, idx in enumerate(
        tuple(r + 1 for r in vals) for vals in assignments(radices)
    ):
        mask = 0
        for o in range(len(work)):
            if (work[o] >> flat) & 1:
                mask |= 1 << o
        if mask:
            sp.set(idx, mask)
    return sp


def products_matching(
    terms: Sequence[Tuple[ProductTerm, int]],
    variables: Sequence[MviVariable],
    pa: PolarityAssignment,
    labels: Sequence[str] = ("F",),
    allow_non_canonical: bool = False,
) -> Spectrum:
    """Spectrum by normalized-code intersection with XOR accumulation.

    Each term carries an output bitmask.  Variables absent from a term are
    treated as the constant-1 literal X^V.
    """
    if not allow_non_canonical:
        _require_canonical(pa, variables)
    code_cache: Dict[Tuple[str, int], NormalizedCode] = {}

    def code_for(var: MviVariable, ts: TruthSet) -> NormalizedCode:
        key = (var.name, ts.mask)
        if key not in code_cache:
            try:
                code_cache[key] = solve_normalized_code(ts, pa.matrix(var.name))
            except ContractError as exc:
                raise ContractError(
                    f"literal {var.name}{ts} unrepresentable: {exc}"
                ) from exc
        return code_cache[key]

    variables = tuple(variables)
    sp = Spectrum(variables, tuple(labels), pa)
    term_codes: List[Tuple[Tuple[int, ...], int]] = []
    for term, mask in terms:
        sets = term.truth_sets()
        codes = []
        for var in variables:
            ts = sets.get(var.name, TruthSet.full(var.radix))
            codes.append(code_for(var, ts).code)
        term_codes.append((tuple(codes), mask))
    for idx in sp.indices():
        acc = 0
        for codes, mask in term_codes:
            if all((codes[i] >> (idx[i] - 1)) & 1 for i in range(len(variables))):
                acc ^= mask
        if acc:
            sp.set(idx, acc)
    return sp


def expression_terms(
    exprs: Sequence[MviExpression] | MviExpression,
) -> Tuple[Tuple[MviVariable, ...], Tuple[str, ...], List[Tuple[ProductTerm, int]]]:
    """Flatten expressions into (term, output-mask) pairs over one context."""
    if isinstance(exprs, MviExpression):
        exprs = [exprs]
    variables = exprs[0].variables
    labels = tuple(e.label or f"F{i}" for i, e in enumerate(exprs))
    merged: Dict[ProductTerm, int] = {}
    for i, e in enumerate(exprs):
        _check(e.variables == variables, "expressions share one context")
        for t in e.terms:
            merged[t] = merged.get(t, 0) ^ (1 << i)
    terms = [(t, m) for t, m in sorted(merged.items(), key=lambda kv: str(kv[0])) if m]
    return variables, labels, terms


def spectrum_to_expression(sp: Spectrum, output: str) -> MviExpression:
    """One term per index whose output bit is set; constant rows dropped."""
    pos = sp.labels.index(output)
    terms = []
    for idx, mask in sp.nonzero():
        if not (mask >> pos) & 1:
            continue
        sets: Dict[str, TruthSet] = {}
        for var, r in zip(sp.variables, idx):
            ts = sp.pa.matrix(var.name).row_set(r)
            if ts.is_full:
                continue
            sets[var.name] = ts
        terms.append(ProductTerm.of(sets))
    return MviExpression.of(sp.variables, terms, label=output)


def oracle_spectrum(
    tt: TruthTable,
    variables: Sequence[MviVariable],
    pa: PolarityAssignment,
) -> Spectrum:
    """Independent spectrum by solving the GF(2) evaluation system.

    Builds the evaluation matrix of every polarity product term over every
    assignment and solves for the unique coefficients by elimination.  Shares
    no code with products_matching or butterfly_spectrum.
    """
    variables = tuple(variables)
    _require_canonical(pa, variables)
    radices = tuple(v.radix for v in variables)
    n_rows = math.prod(radices)
    _check(n_rows <= DENSE_LIMIT, f"assignment count {n_rows} exceeds guard")
    index_list = list(assignments(radices))
    # Column j = evaluations of polarity product term j over all assignments.
    columns: List[int] = []
    for digits in assignments(radices):
        col = 0
        for row_i, vals in enumerate(index_list):
            prod = 1
            for var, r0, value in zip(variables, digits, vals):
                t_mask = pa.matrix(var.name).rows[r0]
                if not (t_mask >> value) & 1:
                    prod = 0
                    break
            if prod:
                col |= 1 << row_i
        columns.append(col)
    # Gaussian elimination on the augmented system, one RHS per output.
    targets = [bits for _, bits in tt.outputs]
    aug = [(columns[j], 1 << j) for j in range(len(columns))]
    rank = 0
    pivots: List[Tuple[int, int, int]] = []
    for bit in range(n_rows):
        piv = None
        for r in range(rank, len(aug)):
            if (aug[r][0] >> bit) & 1:
                piv = r
                break
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        pv, pt = aug[rank]
        for r in range(len(aug)):
            if r != rank and ((aug[r][0] >> bit) & 1):
                aug[r] = (aug[r][0] ^ pv, aug[r][1] ^ pt)
        pivots.append((bit, pv, pt))
        rank += 1
    if rank != len(columns):
        raise ContractError("singular evaluation system for canonical polarity")
    sp = Spectrum(variables, tuple(label for label, _ in tt.outputs), pa)
    for o, target in enumerate(targets):
        residue, sel = target, 0
        for bit, pv, pt in pivots:
            if (residue >> bit) & 1:
                residue ^= pv
                sel ^= pt
        if residue:
            raise ContractError("singular evaluation system for canonical polarity")
        for j, digits in enumerate(assignments(radices)):
            if (sel >> j) & 1:
                idx = tuple(d + 1 for d in digits)
                sp.xor_into(idx, 1 << o)
    return sp
