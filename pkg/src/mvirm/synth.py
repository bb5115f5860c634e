"""Reversible-circuit synthesis: polarity decoders, three-level MVI-FPRM
circuits with multi-output sharing, a degree-2 resynthesis pass, the binary
ESOP baseline, and MVI-GRM factorization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .circuit import Circuit, Gate, Qubit, gate_maslov, maslov_cost
from .core import (
    ContractError,
    MviExpression,
    MviLiteral,
    MviVariable,
    PolarityAssignment,
    ProductTerm,
    TruthSet,
    TruthTable,
    truth_table,
)
from .transform import Spectrum, spectrum_to_expression

__all__ = [
    "BinaryEsop",
    "FactoredExpression",
    "FConst",
    "FLit",
    "FAnd",
    "FXor",
    "literal_binary_esop",
    "synthesize_decoder",
    "synthesize_fprm",
    "expand_to_binary_esop",
    "synthesize_esop_baseline",
    "synthesize_esop",
    "factorize_grm",
    "synthesize_factored",
    "synthesize_grm",
    "expression_to_factored",
    "factored_to_expression",
    "is_grm",
]


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ContractError(msg)


# ---------------------------------------------------------------------------
# Binary ESOP representation


# A product is a sorted tuple of (bit symbol, positive?) pairs; the empty
# product is the constant 1.
Product = Tuple[Tuple[str, bool], ...]


@dataclass(frozen=True)
class BinaryEsop:
    """XOR-list of binary products in a canonical order."""

    products: Tuple[Product, ...]

    @classmethod
    def of(cls, products: Sequence[Product]) -> "BinaryEsop":
        seen: Dict[Product, int] = {}
        for p in products:
            key = tuple(sorted(p))
            seen[key] = seen.get(key, 0) + 1
        kept = sorted((p for p, c in seen.items() if c % 2), key=_product_key)
        return cls(tuple(kept))

    @property
    def is_affine(self) -> bool:
        return all(len(p) <= 1 for p in self.products)

    def __str__(self) -> str:
        if not self.products:
            return "0"
        return " ^ ".join(
            "1" if not p else "".join(("" if pos else "!") + b for b, pos in p)
            for p in self.products
        )


def _product_key(p: Product) -> Tuple:
    return (len(p), tuple((b, not pos) for b, pos in p))


def _negations(p: Product) -> Tuple[str, ...]:
    return tuple(sorted(b for b, pos in p if not pos))


def _esop_score(products: Sequence[Product]) -> int:
    """Gate-cost proxy: Toffoli cost per product plus a NOT estimate."""
    cost = 0
    for p in products:
        cost += gate_maslov(len(p)) if len(p) >= 2 else 1
        cost += sum(1 for _, pos in p if not pos)
    return cost


def _anf(table: int, n: int) -> List[int]:
    """Moebius transform: ANF coefficients of a truth vector over n bits."""
    coeffs = [(table >> m) & 1 for m in range(1 << n)]
    for i in range(n):
        for m in range(1 << n):
            if (m >> i) & 1:
                coeffs[m] ^= coeffs[m ^ (1 << i)]
    return coeffs


def literal_binary_esop(lit: MviLiteral) -> BinaryEsop:
    """Minimal-cost binary ESOP for a literal over its encoding bits.

    Unused codes (v < 2^b) are don't-cares.  For b <= 3 the search is
    exhaustive over all binary fixed polarities and all don't-care
    completions; beyond that a positive-polarity PPRM is used.
    """
    var = lit.variable
    b = var.n_bits
    v = var.radix
    n_codes = 1 << b
    base = 0
    for c in range(v):
        if lit.truth_set.contains(c):
            base |= 1 << c
    dc_codes = list(range(v, n_codes))

    def products_for(table: int, pol: int) -> List[Product]:
        # FPRM with per-code-bit polarity pol (bit j set = negative literal).
        shifted = 0
        for c in range(n_codes):
            if (table >> (c ^ pol)) & 1:
                shifted |= 1 << c
        coeffs = _anf(shifted, b)
        prods: List[Product] = []
        for m in range(n_codes):
            if not coeffs[m]:
                continue
            prod = []
            for j in range(b):
                if (m >> j) & 1:
                    # code bit j corresponds to encoding bit b-1-j (MSB first)
                    prod.append((var.encoding_bits[b - 1 - j], not (pol >> j) & 1))
            prods.append(tuple(sorted(prod)))
        return prods

    if b <= 3:
        best: Optional[Tuple[Tuple, List[Product]]] = None
        for completion in range(1 << len(dc_codes)):
            table = base
            for i, c in enumerate(dc_codes):
                if (completion >> i) & 1:
                    table |= 1 << c
            for pol in range(n_codes):
                prods = products_for(table, pol)
                key = (
                    _esop_score(prods),
                    len(prods),
                    max((len(p) for p in prods), default=0),
                    tuple(sorted(_product_key(p) for p in prods)),
                )
                if best is None or key < best[0]:
                    best = (key, prods)
        assert best is not None
        return BinaryEsop.of(best[1])
    return BinaryEsop.of(products_for(base, 0))


def expand_to_binary_esop(expr: MviExpression) -> BinaryEsop:
    """Substitute literal ESOPs, distribute AND over XOR, and simplify."""
    var_map = expr.var_map()
    acc: Dict[Product, int] = {}
    for term in expr.terms:
        partials: List[Product] = [()]
        for name, ts in term.literals:
            esop = literal_binary_esop(MviLiteral(var_map[name], ts))
            nxt: List[Product] = []
            for left in partials:
                for p in esop.products:
                    merged = _merge_products(left, p)
                    if merged is not None:
                        nxt.append(merged)
            partials = nxt
        for p in partials:
            key = tuple(sorted(p))
            acc[key] = acc.get(key, 0) ^ 1
    products = [p for p, c in acc.items() if c]
    products = _simplify_products(products)
    return BinaryEsop.of(products)


def _merge_products(a: Product, b: Product) -> Optional[Product]:
    """AND of two products; None when a bit appears with both polarities."""
    merged = dict(a)
    for bit, pos in b:
        if bit in merged and merged[bit] != pos:
            return None
        merged[bit] = pos
    return tuple(sorted(merged.items()))


def _simplify_products(products: List[Product]) -> List[Product]:
    """Greedy XOR-identity rewriting while the cost proxy decreases."""
    current: Set[Product] = set(products)
    while True:
        rewrite = _find_product_rewrite(current)
        if rewrite is None:
            return sorted(current, key=_product_key)
        removed, added = rewrite
        for p in removed:
            current.discard(p)
        for p in added:
            if p in current:
                current.discard(p)
            else:
                current.add(p)


def _find_product_rewrite(
    current: Set[Product],
) -> Optional[Tuple[List[Product], List[Product]]]:
    by_support: Dict[Tuple[str, ...], List[Product]] = {}
    for p in current:
        by_support.setdefault(tuple(b for b, _ in p), []).append(p)
    ordered = sorted(current, key=_product_key)

    def score(ps: Sequence[Product]) -> int:
        return _esop_score(ps)

    for p1 in ordered:
        sup1 = tuple(b for b, _ in p1)
        # same-support pairs differing in one or two polarities
        for p2 in sorted(by_support.get(sup1, []), key=_product_key):
            if p2 <= p1:
                continue
            diff = [b for (b, x), (_, y) in zip(p1, p2) if x != y]
            if len(diff) == 1:
                shrunk = tuple(kv for kv in p1 if kv[0] != diff[0])
                if score([shrunk]) < score([p1, p2]):
                    return [p1, p2], [shrunk]
            elif len(diff) == 2:
                rest = tuple(kv for kv in p1 if kv[0] not in diff)
                u = tuple(kv for kv in p1 if kv[0] == diff[0])
                w = tuple(kv for kv in p1 if kv[0] == diff[1])
                added = [rest, _merge_products(rest, u), _merge_products(rest, w)]
                added = [a for a in added if a is not None]
                net = _xor_products(added, current, [p1, p2])
                if score(net[1]) < score(net[0]):
                    return net
        # absorb: A{x} ^ A -> A{!x}
        for drop in range(len(p1)):
            shrunk = p1[:drop] + p1[drop + 1 :]
            if shrunk in current:
                bit, pos = p1[drop]
                repl = tuple(sorted(shrunk + ((bit, not pos),)))
                if score([repl]) < score([p1, shrunk]):
                    return [p1, shrunk], [repl]
    return None


def _xor_products(
    added: List[Product], current: Set[Product], removed: List[Product]
) -> Tuple[List[Product], List[Product]]:
    """Fold duplicate additions against the current set for fair scoring."""
    before = list(removed)
    after: List[Product] = []
    for a in added:
        if a in current and a not in removed:
            before.append(a)  # cancels an existing product
        elif a in after:
            after.remove(a)
        else:
            after.append(a)
    return before, after


# ---------------------------------------------------------------------------
# Circuit builder


class _Builder:
    def __init__(self) -> None:
        self.qubits: List[Qubit] = []
        self.gates: List[Gate] = []
        self.restorable: List[bool] = []
        self.out_ids: Set[int] = set()

    def add_qubit(self, name: str, role: str) -> int:
        qid = len(self.qubits)
        self.qubits.append(Qubit(qid, name, role))
        if role == "output":
            self.out_ids.add(qid)
        return qid

    def gate(self, controls: Sequence[int], target: int) -> None:
        self.gates.append(Gate(tuple(controls), target))
        self.restorable.append(target not in self.out_ids)

    def apply_mirror(self) -> None:
        """Append reversed wire/ancilla gates; restores everything but the
        output lines (gates never use output lines as controls)."""
        mirror = [g for g, r in zip(self.gates, self.restorable) if r]
        for g in reversed(mirror):
            self.gates.append(g)
            self.restorable.append(False)

    def finish(
        self,
        variables: Sequence[Tuple[str, int, Tuple[int, ...]]],
        outputs: Sequence[Tuple[str, int]],
    ) -> Circuit:
        return Circuit(
            tuple(self.qubits),
            tuple(self.gates),
            tuple(variables),
            tuple(outputs),
        )


def _input_frame(
    builder: _Builder, variables: Sequence[MviVariable]
) -> Tuple[Dict[str, int], List[Tuple[str, int, Tuple[int, ...]]]]:
    """Register one input qubit per encoding bit, declaration order."""
    bit_qid: Dict[str, int] = {}
    binding = []
    for var in variables:
        qids = []
        for bit in var.encoding_bits:
            qid = builder.add_qubit(bit, "input")
            bit_qid[bit] = qid
            qids.append(qid)
        binding.append((var.name, var.radix, tuple(qids)))
    return bit_qid, binding


# ---------------------------------------------------------------------------
# Decoder planning

# Abstract decoder ops: ("not", line), ("cnot", src_line, dst_line),
# ("toffoli", (src lines), dst_line), ("alloc", row) allocates an ancilla.


class _DecoderPlan:
    def __init__(
        self,
        gates: List[Tuple],
        row_line: Dict[int, int],
        n_ancillas: int,
        cost: int,
    ) -> None:
        self.gates = gates
        self.row_line = row_line
        self.n_ancillas = n_ancillas
        self.cost = cost


def _bit_func(i: int, b: int) -> int:
    """Truth vector over codes of encoding bit i (MSB first)."""
    f = 0
    for c in range(1 << b):
        if (c >> (b - 1 - i)) & 1:
            f |= 1 << c
    return f


def _literal_func(mask: int, v: int) -> int:
    """Truth vector over codes of a literal; codes >= v are left 0 (dc)."""
    return mask  # value k corresponds to code k


def _plan_variable(
    var: MviVariable, p, needed_rows: Sequence[int]
) -> _DecoderPlan:
    """Plan gates computing the needed polarity literals of one variable.

    Tries every realization order; per literal, prefers (1) an existing line
    that already matches, (2) an XOR of current lines (in place on an
    expendable line when possible), (3) a PPRM product realization on a fresh
    ancilla.  Cost is Maslov.
    """
    b = var.n_bits
    v = var.radix
    n_codes = 1 << b
    reach = (1 << v) - 1
    full_mask = (1 << n_codes) - 1

    targets = {}
    for r in needed_rows:
        targets[r] = _literal_func(p.rows[r - 1], v)

    raw_funcs = [_bit_func(i, b) for i in range(b)]

    def matches(f: int, t: int) -> bool:
        return (f ^ t) & reach == 0

    def pprm_plan(t: int) -> Optional[Tuple[int, List[Tuple]]]:
        """Best PPRM realization of a target onto a fresh ancilla, using
        lines that still match the raw encoding bits."""
        best: Optional[Tuple[int, List[Tuple]]] = None
        dc = [c for c in range(v, n_codes)]
        for completion in range(1 << len(dc)):
            table = t & reach
            for i, c in enumerate(dc):
                if (completion >> i) & 1:
                    table |= 1 << c
            coeffs = _anf(table, b)
            ops: List[Tuple] = [("alloc",)]
            cost = 0
            ok = True
            for m in range(n_codes):
                if not coeffs[m]:
                    continue
                bits = [j for j in range(b) if (m >> j) & 1]
                # code bit j is encoding bit b-1-j
                idxs = [b - 1 - j for j in bits]
                if not idxs:
                    ops.append(("not", -1))
                    cost += 1
                elif len(idxs) == 1:
                    ops.append(("cnot_raw", idxs[0], -1))
                    cost += 1
                else:
                    ops.append(("toffoli_raw", tuple(sorted(idxs)), -1))
                    cost += gate_maslov(len(idxs))
            if ok and (best is None or cost < best[0]):
                best = (cost, ops)
        return best

    def realize_order(order: Sequence[int]) -> Optional[Tuple[int, List[Tuple], Dict[int, int]]]:
        # line state: list of (func, protected)
        lines: List[Tuple[int, bool]] = [(f, False) for f in raw_funcs]
        ops: List[Tuple] = []
        row_line: Dict[int, int] = {}
        total = 0
        for r in order:
            t = targets[r]
            # 1) existing line already matches
            hit = None
            for li, (f, _prot) in enumerate(lines):
                if matches(f, t):
                    hit = li
                    break
            if hit is not None:
                lines[hit] = (lines[hit][0], True)
                row_line[r] = hit
                continue
            # 2) XOR of current lines (+ optional constant)
            best_span = None
            n_lines = len(lines)
            for const in (0, 1):
                want = t ^ (full_mask if const else 0)
                for subset in range(1, 1 << n_lines):
                    acc = 0
                    m = subset
                    while m:
                        li = (m & -m).bit_length() - 1
                        acc ^= lines[li][0]
                        m &= m - 1
                    if (acc ^ want) & reach:
                        continue
                    members = [li for li in range(n_lines) if (subset >> li) & 1]
                    dests = [li for li in members if not lines[li][1]]
                    if dests:
                        cost = len(members) - 1 + const
                        key = (cost, const, tuple(members), dests[0])
                        if best_span is None or key < best_span[0]:
                            best_span = (key, members, dests[0], const, False)
                    cost = len(members) + const
                    key = (cost, const, tuple(members), n_lines)
                    if best_span is None or key < best_span[0]:
                        best_span = (key, members, None, const, True)
            if best_span is not None:
                key, members, dest, const, fresh = best_span
                if fresh:
                    ops.append(("alloc",))
                    dest = len(lines)
                    lines.append((0, False))
                new_f = lines[dest][0]
                for li in members:
                    if li != dest:
                        ops.append(("cnot", li, dest))
                        new_f ^= lines[li][0]
                if const:
                    ops.append(("not", dest))
                    new_f ^= full_mask
                total += key[0]
                lines[dest] = (new_f, True)
                row_line[r] = dest
                continue
            # 3) PPRM products on a fresh ancilla
            # (requires lines still matching the raw bits)
            raw_line = {}
            for i in range(b):
                for li, (f, _prot) in enumerate(lines):
                    if matches(f, raw_funcs[i]):
                        raw_line[i] = li
                        break
            plan = pprm_plan(t)
            if plan is None:
                return None
            cost, pops = plan
            dest = len(lines)
            lines.append((0, False))
            ok = True
            new_f = 0
            for op in pops:
                if op[0] == "alloc":
                    ops.append(("alloc",))
                elif op[0] == "not":
                    ops.append(("not", dest))
                    new_f ^= full_mask
                elif op[0] == "cnot_raw":
                    if op[1] not in raw_line:
                        ok = False
                        break
                    ops.append(("cnot", raw_line[op[1]], dest))
                    new_f ^= lines[raw_line[op[1]]][0]
                else:  # toffoli_raw
                    srcs = []
                    prod = full_mask
                    for i in op[1]:
                        if i not in raw_line:
                            ok = False
                            break
                        srcs.append(raw_line[i])
                        prod &= lines[raw_line[i]][0]
                    if not ok:
                        break
                    ops.append(("toffoli", tuple(srcs), dest))
                    new_f ^= prod
            if not ok:
                return None
            total += cost
            lines[dest] = (new_f, True)
            row_line[r] = dest
        return total, ops, row_line

    rows = sorted(targets)
    best: Optional[Tuple[int, List[Tuple], Dict[int, int], Tuple[int, ...]]] = None
    for order in itertools.permutations(rows):
        result = realize_order(order)
        if result is None:
            continue
        total, ops, row_line = result
        if best is None or (total, order) < (best[0], best[3]):
            best = (total, ops, row_line, order)
    _check(best is not None, f"cannot realize decoder for {var.name}")
    total, ops, row_line, _ = best
    n_anc = sum(1 for op in ops if op[0] == "alloc")
    return _DecoderPlan(ops, row_line, n_anc, total)


def _emit_plan(
    builder: _Builder,
    plan: _DecoderPlan,
    var: MviVariable,
    bit_qid: Dict[str, int],
) -> Dict[int, int]:
    """Emit a decoder plan; returns row -> qubit id."""
    line_qid: List[int] = [bit_qid[bit] for bit in var.encoding_bits]
    anc_no = 0
    for op in plan.gates:
        if op[0] == "alloc":
            anc_no += 1
            qid = builder.add_qubit(f"{var.name}_d{anc_no}", "ancilla-decoder")
            line_qid.append(qid)
        elif op[0] == "not":
            builder.gate((), line_qid[op[1]])
        elif op[0] == "cnot":
            builder.gate((line_qid[op[1]],), line_qid[op[2]])
        else:  # toffoli
            builder.gate(tuple(line_qid[i] for i in op[1]), line_qid[op[2]])
    return {r: line_qid[li] for r, li in plan.row_line.items()}


def synthesize_decoder(var: MviVariable, p) -> Circuit:
    """Standalone decoder: one line per non-constant polarity literal.

    The fragment's outputs are the decoder lines themselves, labelled P2..Pv
    (the all-ones literal P^1 needs no line).
    """
    _check(p.canonical, "decoder requires a canonical polarity")
    builder = _Builder()
    bit_qid, binding = _input_frame(builder, [var])
    rows = [r for r in range(1, p.radix + 1) if not p.row_set(r).is_full]
    plan = _plan_variable(var, p, rows)
    row_qid = _emit_plan(builder, plan, var, bit_qid)
    outputs = [(f"P{r}", row_qid[r]) for r in rows]
    return builder.finish(binding, outputs)


# ---------------------------------------------------------------------------
# MVI-FPRM synthesis


def _spectrum_truth_table(sp: Spectrum) -> TruthTable:
    exprs = [spectrum_to_expression(sp, label) for label in sp.labels]
    return truth_table(exprs)


def synthesize_fprm(
    sp: Spectrum,
    mirror: bool = False,
    full_decoders: bool = False,
    optimize: str = "auto",
) -> Circuit:
    """Three-level circuit: decoders, AND level, XOR level.

    Decoders compute only the polarity literals the spectrum uses unless
    full_decoders is set.  Terms feeding two or more outputs are computed
    once on a shared ancilla and fanned out.  With optimize="auto" a
    degree-2 resynthesis pass may replace the structural circuit for
    single-output functions when it is cheaper.  The result is always
    verified against the spectrum's truth table.
    """
    _check(optimize in ("auto", "structural"), f"unknown optimize {optimize!r}")
    for _name, m in sp.pa.matrices:
        _check(m.canonical, "synthesis requires canonical polarities")
    want = _spectrum_truth_table(sp)
    circuit = _synthesize_fprm_structural(sp, mirror, full_decoders)
    if optimize == "auto" and len(sp.labels) == 1:
        alt = _quadratic_synth(sp, mirror)
        if alt is not None and maslov_cost(alt) < maslov_cost(circuit):
            circuit = alt
    ok, counterexample = _verify(circuit, want)
    _check(ok, f"synthesized circuit mismatch at {counterexample}")
    return circuit


def _verify(circuit: Circuit, want: TruthTable):
    from .circuit import equivalence

    return equivalence(circuit, want)


def _synthesize_fprm_structural(
    sp: Spectrum, mirror: bool, full_decoders: bool
) -> Circuit:
    builder = _Builder()
    bit_qid, binding = _input_frame(builder, sp.variables)
    nonzero = sp.nonzero()
    # rows needed per variable
    needed: Dict[str, Set[int]] = {v.name: set() for v in sp.variables}
    for i, var in enumerate(sp.variables):
        p = sp.pa.matrix(var.name)
        if full_decoders:
            for r in range(1, var.radix + 1):
                if not p.row_set(r).is_full:
                    needed[var.name].add(r)
        else:
            for idx, _mask in nonzero:
                if not p.row_set(idx[i]).is_full:
                    needed[var.name].add(idx[i])
    row_qid: Dict[str, Dict[int, int]] = {}
    for var in sp.variables:
        p = sp.pa.matrix(var.name)
        plan = _plan_variable(var, p, sorted(needed[var.name]))
        row_qid[var.name] = _emit_plan(builder, plan, var, bit_qid)
    out_qid = [builder.add_qubit(label, "output") for label in sp.labels]
    outputs = list(zip(sp.labels, out_qid))
    shared_no = 0
    for idx, mask in nonzero:
        controls = []
        for i, var in enumerate(sp.variables):
            p = sp.pa.matrix(var.name)
            if p.row_set(idx[i]).is_full:
                continue
            controls.append(row_qid[var.name][idx[i]])
        outs = [out_qid[o] for o in range(len(sp.labels)) if (mask >> o) & 1]
        if not controls:
            for q in outs:
                builder.gate((), q)
        elif len(controls) == 1:
            for q in outs:
                builder.gate((controls[0],), q)
        elif len(outs) >= 2:
            shared_no += 1
            anc = builder.add_qubit(f"t{shared_no}", "ancilla-term")
            builder.gate(tuple(controls), anc)
            for q in outs:
                builder.gate((anc,), q)
        else:
            builder.gate(tuple(controls), outs[0])
    if mirror:
        builder.apply_mirror()
    return builder.finish(binding, outputs)


# ---------------------------------------------------------------------------
# Degree-2 resynthesis pass


def _quadratic_synth(sp: Spectrum, mirror: bool) -> Optional[Circuit]:
    """Try to realize a single-output spectrum as products of affine forms.

    Searches per-literal don't-care completions for a completion whose
    binary polynomial has degree <= 2, decomposes the quadratic part into
    products of two linear forms, and emits CNOT-prepared Toffolis.
    """
    variables = sp.variables
    n_bits = sum(v.n_bits for v in variables)
    if n_bits > 8 or len(sp.labels) != 1:
        return None
    expr = spectrum_to_expression(sp, sp.labels[0])
    if not expr.terms:
        return None
    var_map = {v.name: v for v in variables}
    # distinct literals and their don't-care codes
    literals: List[Tuple[str, TruthSet, List[int]]] = []
    seen = set()
    for term in expr.terms:
        for name, ts in term.literals:
            if (name, ts.mask) in seen:
                continue
            seen.add((name, ts.mask))
            var = var_map[name]
            dc = list(range(var.radix, 1 << var.n_bits))
            literals.append((name, ts, dc))
    total_dc = sum(len(dc) for _, _, dc in literals)
    if total_dc > 10:
        return None
    # bit layout: declaration order, MSB first; bit index from the left
    bit_index: Dict[str, int] = {}
    for var in variables:
        for bit in var.encoding_bits:
            bit_index[bit] = len(bit_index)
    var_bits = {v.name: [bit_index[b] for b in v.encoding_bits] for v in variables}

    def code_of(assign: int, name: str) -> int:
        code = 0
        for qi in var_bits[name]:
            code = (code << 1) | ((assign >> qi) & 1)
        return code

    # Within-variable bit pairs never both set on a reachable code vanish on
    # the domain, so their ANF coefficients are free and any higher monomial
    # containing one can be dropped.
    free_pairs: List[int] = []
    for var in variables:
        pos = var_bits[var.name]
        b = len(pos)
        for ii in range(b):
            for jj in range(ii + 1, b):
                if all(
                    not (
                        ((code >> (b - 1 - ii)) & 1)
                        and ((code >> (b - 1 - jj)) & 1)
                    )
                    for code in range(var.radix)
                ):
                    free_pairs.append((1 << pos[ii]) | (1 << pos[jj]))
    if len(free_pairs) > 8:
        return None

    best: Optional[Tuple[Tuple, List[int]]] = None
    size = 1 << n_bits
    for completion in range(1 << total_dc):
        lit_tables: Dict[Tuple[str, int], int] = {}
        pos = 0
        for name, ts, dc in literals:
            table = ts.mask
            for c in dc:
                if (completion >> pos) & 1:
                    table |= 1 << c
                pos += 1
            lit_tables[(name, ts.mask)] = table
        table = 0
        for assign in range(size):
            val = 0
            for term in expr.terms:
                t = 1
                for name, ts in term.literals:
                    c = code_of(assign, name)
                    if not (lit_tables[(name, ts.mask)] >> c) & 1:
                        t = 0
                        break
                val ^= t
            if val:
                table |= 1 << assign
        coeffs = _anf(table, n_bits)
        ok = True
        for m in range(size):
            if not coeffs[m] or bin(m).count("1") <= 2:
                continue
            if any(m & fp == fp for fp in free_pairs):
                coeffs[m] = 0
            else:
                ok = False
                break
        if not ok:
            continue
        for choice in range(1 << len(free_pairs)):
            cs = coeffs[:]
            for fi, fp in enumerate(free_pairs):
                if (choice >> fi) & 1:
                    cs[fp] ^= 1
            quad = [m for m in range(size) if cs[m] and bin(m).count("1") == 2]
            rank = _alternating_rank(quad, n_bits)
            n_terms = sum(cs)
            key = (rank, n_terms, tuple(m for m in range(size) if cs[m]))
            if best is None or key < best[0]:
                best = (key, cs)
    if best is None:
        return None
    coeffs = best[1]
    candidates = _decompose_quadratic(coeffs, n_bits)
    if not candidates:
        return None
    base_lin = 0
    for m in range(size):
        if coeffs[m] and bin(m).count("1") == 1:
            base_lin |= m
    const = coeffs[0]
    scored = []
    for products in candidates:
        # (p.x)(q.x) ANF: cross monomials + shared-bit linear terms
        rem = base_lin
        for p, q in products:
            for i in range(n_bits):
                if (p >> i) & 1 and (q >> i) & 1:
                    rem ^= 1 << i
        est = sum(
            bin(p).count("1") + bin(q).count("1") - 2 for p, q in products
        ) + bin(rem).count("1")
        scored.append((est, products, rem))
    scored.sort(key=lambda t: (t[0], t[1]))
    chosen = None
    for est, products, rem in scored[:10]:
        plan = _plan_affine_products(products, n_bits)
        if plan is None:
            continue
        cost = sum(len(ops) for ops, _ in plan) + bin(rem).count("1")
        if chosen is None or cost < chosen[0]:
            chosen = (cost, plan, rem)
    if chosen is None:
        return None
    _, toffolis, rem_lin = chosen
    # note: bit i in masks = position i in the declaration-order bit list
    builder = _Builder()
    bit_qid, binding = _input_frame(builder, variables)
    wires = [bit_qid[b] for b in sorted(bit_index, key=bit_index.get)]
    out = builder.add_qubit(sp.labels[0], "output")
    for i in range(n_bits):
        if (rem_lin >> i) & 1:
            builder.gate((wires[i],), out)
    if const:
        builder.gate((), out)
    for ops, (wp, wq) in toffolis:
        for kind, a, bwire in ops:
            if kind == "cnot":
                builder.gate((wires[a],), wires[bwire])
            else:
                builder.gate((), wires[a])
        builder.gate((wires[wp], wires[wq]), out)
    if mirror:
        builder.apply_mirror()
    return builder.finish(binding, [(sp.labels[0], out)])


def _alternating_rank(quad: List[int], n: int) -> int:
    from .gf2 import gf2_rank

    rows = [0] * n
    for m in quad:
        i = (m & -m).bit_length() - 1
        j = (m ^ (1 << i)).bit_length() - 1
        rows[i] |= 1 << j
        rows[j] |= 1 << i
    return gf2_rank(rows, n)


def _decompose_quadratic(
    coeffs: List[int], n: int, branch: int = 12, limit: int = 40
) -> List[List[Tuple[int, int]]]:
    """Symplectic reduction into products of linear forms.

    Each step must lower the alternating rank by two; branches over the
    cheapest (by support size) rank-lowering pairs and returns up to `limit`
    complete decompositions.
    """
    quad0 = frozenset(
        m for m in range(1 << n) if coeffs[m] and bin(m).count("1") == 2
    )
    results: List[List[Tuple[int, int]]] = []

    def rec(quad: frozenset, acc: List[Tuple[int, int]]) -> None:
        if len(results) >= limit:
            return
        if not quad:
            results.append(list(acc))
            return
        if len(acc) >= 4:
            return
        cur_rank = _alternating_rank(sorted(quad), n)
        cands = []
        for p in range(1, 1 << n):
            for q in range(p + 1, 1 << n):
                wedge = _wedge(p, q, n)
                if not wedge:
                    continue
                left = quad ^ wedge
                if _alternating_rank(sorted(left), n) == cur_rank - 2:
                    cands.append(
                        (bin(p).count("1") + bin(q).count("1"), p, q, left)
                    )
        cands.sort()
        for _w, p, q, left in cands[:branch]:
            rec(frozenset(left), acc + [(p, q)])
            if len(results) >= limit:
                return

    rec(quad0, [])
    return results


def _wedge(p: int, q: int, n: int) -> Set[int]:
    out: Set[int] = set()
    for i in range(n):
        for j in range(i + 1, n):
            a = ((p >> i) & 1) & ((q >> j) & 1)
            bb = ((p >> j) & 1) & ((q >> i) & 1)
            if a ^ bb:
                out.add((1 << i) | (1 << j))
    return out


def _plan_affine_products(
    products: List[Tuple[int, int]], n: int
) -> Optional[List[Tuple[List, Tuple[int, int]]]]:
    """Schedule CNOT preparation of linear forms on the input wires.

    Returns per-product (prep ops, (wire_p, wire_q)); ops use
    declaration-order wire indices.  Searches product orders, form orders,
    and destination choices for the cheapest schedule.  The wire functions
    always stay an invertible basis, so each form has a unique expansion.
    """
    from .gf2 import gf2_solve

    best: List[Optional[Tuple[int, List]]] = [None]
    budget = [200000]

    def dfs(
        remaining: List[Tuple[int, int]],
        funcs: List[int],
        acc: List[Tuple[List, Tuple[int, int]]],
        cost: int,
    ) -> None:
        if budget[0] <= 0:
            return
        budget[0] -= 1
        if best[0] is not None and cost >= best[0][0]:
            return
        if not remaining:
            best[0] = (cost, list(acc))
            return
        for pi, (p, q) in enumerate(remaining):
            rest = remaining[:pi] + remaining[pi + 1 :]
            for first, second in ((p, q), (q, p)):
                rep1 = gf2_solve(funcs, first, n)
                if rep1 is None:
                    continue
                sup1 = [i for i in range(n) if (rep1 >> i) & 1]
                for d1 in sup1:
                    ops1 = [("cnot", s, d1) for s in sup1 if s != d1]
                    funcs1 = funcs[:]
                    funcs1[d1] = first
                    rep2 = gf2_solve(funcs1, second, n)
                    if rep2 is None:
                        continue
                    sup2 = [i for i in range(n) if (rep2 >> i) & 1]
                    # d1 may feed CNOTs but must survive for the Toffoli
                    for d2 in (i for i in sup2 if i != d1):
                        ops2 = [("cnot", s, d2) for s in sup2 if s != d2]
                        funcs2 = funcs1[:]
                        funcs2[d2] = second
                        step_cost = len(ops1) + len(ops2) + gate_maslov(2)
                        dfs(
                            rest,
                            funcs2,
                            acc + [(ops1 + ops2, (d1, d2))],
                            cost + step_cost,
                        )

    dfs(products, [1 << i for i in range(n)], [], 0)
    if best[0] is None:
        return None
    return best[0][1]


# ---------------------------------------------------------------------------
# Binary ESOP baseline synthesis


def _sweep_key(p: Product) -> Tuple:
    negs = _negations(p)
    return (len(negs), negs, p)


def synthesize_esop_baseline(
    esops: Sequence[Tuple[str, BinaryEsop]],
    variables: Sequence[MviVariable],
    mirror: bool = False,
) -> Circuit:
    """NOT-sweep cascade synthesis of binary ESOPs.

    Products are ordered by their negation sets; wire polarity flips are
    applied lazily and never restored (unless mirrored), so consecutive
    products pay only for the flips they change.
    """
    builder = _Builder()
    bit_qid, binding = _input_frame(builder, variables)
    flipped: Dict[str, int] = {}
    outputs = []
    for label, esop in esops:
        out = builder.add_qubit(label, "output")
        outputs.append((label, out))
        for p in sorted(esop.products, key=_sweep_key):
            for bit, pos in p:
                want = 0 if pos else 1
                if flipped.get(bit, 0) != want:
                    builder.gate((), bit_qid[bit])
                    flipped[bit] = want
            if p:
                builder.gate(tuple(bit_qid[bit] for bit, _ in p), out)
            else:
                builder.gate((), out)
    if mirror:
        builder.apply_mirror()
    return builder.finish(binding, outputs)


def synthesize_esop(
    exprs: Sequence[MviExpression] | MviExpression, mirror: bool = False
) -> Circuit:
    """Expand expressions to binary ESOPs, synthesize, and verify."""
    if isinstance(exprs, MviExpression):
        exprs = [exprs]
    variables = exprs[0].variables
    items = []
    for i, e in enumerate(exprs):
        _check(e.variables == variables, "expressions share one context")
        items.append((e.label or f"F{i}", expand_to_binary_esop(e)))
    circuit = synthesize_esop_baseline(items, variables, mirror)
    ok, cex = _verify(circuit, truth_table(list(exprs)))
    _check(ok, f"ESOP circuit mismatch at {cex}")
    return circuit


# ---------------------------------------------------------------------------
# MVI-GRM factored forms


class FactoredExpression:
    """Base class for factored-form nodes."""

    def key(self) -> Tuple:
        raise NotImplementedError


@dataclass(frozen=True)
class FConst(FactoredExpression):
    value: int

    def key(self) -> Tuple:
        return (0, self.value)

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class FLit(FactoredExpression):
    literal: MviLiteral

    def key(self) -> Tuple:
        return (1, self.literal.variable.name, self.literal.truth_set.mask)

    def __str__(self) -> str:
        return str(self.literal)


@dataclass(frozen=True)
class FAnd(FactoredExpression):
    children: Tuple[FactoredExpression, ...]

    def key(self) -> Tuple:
        return (2,) + tuple(c.key() for c in self.children)

    def __str__(self) -> str:
        return " * ".join(
            f"({c})" if isinstance(c, FXor) else str(c) for c in self.children
        )


@dataclass(frozen=True)
class FXor(FactoredExpression):
    children: Tuple[FactoredExpression, ...]

    def key(self) -> Tuple:
        return (3,) + tuple(c.key() for c in self.children)

    def __str__(self) -> str:
        return " ^ ".join(str(c) for c in self.children)


def _fand(children: Sequence[FactoredExpression]) -> FactoredExpression:
    flat: List[FactoredExpression] = []
    for c in children:
        if isinstance(c, FAnd):
            flat.extend(c.children)
        elif isinstance(c, FConst):
            if c.value == 0:
                return FConst(0)
        elif isinstance(c, FLit):
            if c.literal.truth_set.is_empty:
                return FConst(0)
            if not c.literal.truth_set.is_full:
                flat.append(c)
        else:
            flat.append(c)
    flat.sort(key=lambda c: c.key())
    if not flat:
        return FConst(1)
    if len(flat) == 1:
        return flat[0]
    return FAnd(tuple(flat))


def _fxor(children: Sequence[FactoredExpression]) -> FactoredExpression:
    flat: List[FactoredExpression] = []
    for c in children:
        if isinstance(c, FXor):
            flat.extend(c.children)
        elif isinstance(c, FConst) and c.value == 0:
            continue
        elif isinstance(c, FLit) and c.literal.truth_set.is_empty:
            continue
        elif isinstance(c, FLit) and c.literal.truth_set.is_full:
            flat.append(FConst(1))
        else:
            flat.append(c)
    # same-variable literals XOR into one literal (symmetric difference)
    lit_masks: Dict[str, List] = {}
    others: List[FactoredExpression] = []
    for c in flat:
        if isinstance(c, FLit):
            entry = lit_masks.setdefault(c.literal.variable.name, [c.literal.variable, 0])
            entry[1] ^= c.literal.truth_set.mask
        else:
            others.append(c)
    for var, mask in lit_masks.values():
        if not mask:
            continue
        ts = TruthSet(mask, var.radix)
        others.append(FConst(1) if ts.is_full else FLit(MviLiteral(var, ts)))
    parity: Dict[Tuple, List] = {}
    for c in others:
        entry = parity.setdefault(c.key(), [c, 0])
        entry[1] ^= 1
    kept = [c for c, odd in parity.values() if odd]
    kept.sort(key=lambda c: c.key())
    if not kept:
        return FConst(0)
    if len(kept) == 1:
        return kept[0]
    return FXor(tuple(kept))


def expression_to_factored(expr: MviExpression) -> FactoredExpression:
    var_map = expr.var_map()
    terms = []
    for t in expr.terms:
        lits = [FLit(MviLiteral(var_map[name], ts)) for name, ts in t.literals]
        terms.append(_fand(lits) if lits else FConst(1))
    return _fxor(terms)


def factored_to_expression(
    f: FactoredExpression,
    variables: Sequence[MviVariable],
    label: Optional[str] = None,
) -> MviExpression:
    """Distribute a factored form back into a flat XOR of products."""
    from .core import combine_literals

    def expand(node: FactoredExpression) -> List[Dict[str, TruthSet]]:
        if isinstance(node, FConst):
            return [{}] if node.value else []
        if isinstance(node, FLit):
            if node.literal.truth_set.is_empty:
                return []
            return [{node.literal.variable.name: node.literal.truth_set}]
        if isinstance(node, FXor):
            out: List[Dict[str, TruthSet]] = []
            for c in node.children:
                out.extend(expand(c))
            return out
        terms: List[Dict[str, TruthSet]] = [{}]
        for c in node.children:
            nxt: List[Dict[str, TruthSet]] = []
            for left in terms:
                for right in expand(c):
                    merged = dict(left)
                    dead = False
                    for name, ts in right.items():
                        cur = merged.get(name)
                        ts2 = ts if cur is None else combine_literals("AND", cur, ts)
                        if ts2.is_empty:
                            dead = True
                            break
                        merged[name] = ts2
                    if not dead:
                        nxt.append(merged)
            terms = nxt
        return terms

    return MviExpression.of(
        tuple(variables),
        [ProductTerm.of(sets) for sets in expand(f)],
        label=label,
    )


def is_grm(expr: MviExpression) -> bool:
    """Every two product terms use a different set of variables."""
    seen = set()
    for t in expr.terms:
        names = tuple(name for name, _ in t.literals)
        if names in seen:
            return False
        seen.add(names)
    return True


# ---------------------------------------------------------------------------
# Factored-form emission


class _FactoredEmitter:
    """Shared lazy wire-flip state for emitting a factored form."""

    def __init__(self, builder: _Builder, bit_qid: Dict[str, int]) -> None:
        self.builder = builder
        self.bit_qid = bit_qid
        self.flips: Dict[int, int] = {}
        self.dirty: Set[int] = set()
        self.usage: Dict[str, int] = {}
        self.anc_no = 0
        self._esops: Dict[Tuple[str, int], BinaryEsop] = {}

    def esop(self, lit: MviLiteral) -> BinaryEsop:
        key = (lit.variable.name, lit.truth_set.mask)
        if key not in self._esops:
            self._esops[key] = literal_binary_esop(lit)
        return self._esops[key]

    def count_usage(self, node: FactoredExpression) -> Dict[str, int]:
        counts: Dict[str, int] = {}

        def walk(n: FactoredExpression) -> None:
            if isinstance(n, FLit):
                for p in self.esop(n.literal).products:
                    for bit, _ in p:
                        counts[bit] = counts.get(bit, 0) + 1
            elif isinstance(n, (FAnd, FXor)):
                for c in n.children:
                    walk(c)

        walk(node)
        return counts

    def charge(self, node: FactoredExpression) -> None:
        for bit, n in self.count_usage(node).items():
            self.usage[bit] = self.usage.get(bit, 0) - n

    def ensure(self, bit: str, positive: bool) -> None:
        qid = self.bit_qid[bit]
        _check(qid not in self.dirty, f"wire {bit} already consumed")
        want = 0 if positive else 1
        if self.flips.get(qid, 0) != want:
            self.builder.gate((), qid)
            self.flips[qid] = want

    def flip_need(self, node: FactoredExpression) -> int:
        if isinstance(node, FLit):
            esop = self.esop(node.literal)
            if len(esop.products) == 1 and esop.products[0]:
                return sum(
                    1
                    for bit, pos in esop.products[0]
                    if self.flips.get(self.bit_qid[bit], 0) != (0 if pos else 1)
                )
            return 0
        if isinstance(node, FAnd):
            return sum(self.flip_need(c) for c in node.children)
        return 0

    def affine_parts(
        self, node: FactoredExpression
    ) -> Optional[Tuple[Set[str], int]]:
        """(bit support, constant) for an XOR of bits; None when nonlinear."""
        if isinstance(node, FConst):
            return set(), node.value
        if isinstance(node, FLit):
            esop = self.esop(node.literal)
            if not esop.is_affine:
                return None
            sup: Set[str] = set()
            const = 0
            for p in esop.products:
                if not p:
                    const ^= 1
                else:
                    bit, pos = p[0]
                    sup ^= {bit}
                    if not pos:
                        const ^= 1
            return sup, const
        if isinstance(node, FXor):
            sup, const = set(), 0
            for c in node.children:
                parts = self.affine_parts(c)
                if parts is None:
                    return None
                sup ^= parts[0]
                const ^= parts[1]
            return sup, const
        return None

    def free_wire(self, sup: Set[str], node: FactoredExpression) -> Optional[str]:
        """A support wire not referenced by anything emitted later."""
        own = self.count_usage(node)
        for bit in sorted(sup):
            if self.bit_qid[bit] in self.dirty:
                continue
            if self.usage.get(bit, 0) - own.get(bit, 0) <= 0:
                return bit
        return None

    def emit_xor(self, node: FactoredExpression, target: int) -> None:
        """XOR the node's value into the target line."""
        if isinstance(node, FConst):
            if node.value:
                self.builder.gate((), target)
            return
        if isinstance(node, FLit):
            self.charge(node)
            self.emit_esop(self.esop(node.literal), target)
            return
        if isinstance(node, FAnd):
            controls = self.resolve_controls(node)
            if controls is None:
                return
            self.builder.gate(tuple(controls), target)
            return
        pending = list(node.children)
        while pending:
            pending.sort(key=lambda c: (self.flip_need(c), c.key()))
            child = pending.pop(0)
            self.emit_xor(child, target)

    def emit_esop(self, esop: BinaryEsop, target: int) -> None:
        for p in sorted(esop.products, key=_sweep_key):
            for bit, pos in p:
                self.ensure(bit, pos)
            self.builder.gate(tuple(self.bit_qid[bit] for bit, _ in p), target)

    def resolve_controls(self, node: FAnd) -> Optional[List[int]]:
        """Control lines for an AND; single-product literals fold in place."""
        controls: List[int] = []
        for c in node.children:
            if isinstance(c, FConst):
                if c.value == 0:
                    return None
                continue
            if isinstance(c, FLit):
                esop = self.esop(c.literal)
                if len(esop.products) == 1 and esop.products[0]:
                    self.charge(c)
                    for bit, pos in esop.products[0]:
                        self.ensure(bit, pos)
                        controls.append(self.bit_qid[bit])
                    continue
            controls.append(self.compute_line(c))
        return controls

    def compute_line(self, node: FactoredExpression) -> int:
        """Place a composite factor on its own line: in place on a free
        input wire when the factor is affine, else on a fresh ancilla."""
        parts = self.affine_parts(node)
        if parts is not None:
            sup, const = parts
            dest = self.free_wire(sup, node)
            if dest is not None:
                self.charge(node)
                return self.emit_affine_inplace(sup, const, dest)
        self.anc_no += 1
        qid = self.builder.add_qubit(f"g{self.anc_no}", "ancilla-term")
        self.emit_xor(node, qid)
        return qid

    def emit_affine_inplace(self, sup: Set[str], const: int, dest: str) -> int:
        dqid = self.bit_qid[dest]
        c = const ^ self.flips.get(dqid, 0)
        for bit in sorted(sup):
            if bit == dest:
                continue
            qid = self.bit_qid[bit]
            _check(qid not in self.dirty, f"wire {bit} already consumed")
            c ^= self.flips.get(qid, 0)
            self.builder.gate((qid,), dqid)
        if c:
            self.builder.gate((), dqid)
        self.dirty.add(dqid)
        self.flips[dqid] = 0
        return dqid


def synthesize_factored(
    factored: FactoredExpression,
    variables: Sequence[MviVariable],
    label: str = "F",
    mirror: bool = False,
    verify: bool = True,
) -> Circuit:
    """Emit a factored form; verified against its flattened expression."""
    builder = _Builder()
    bit_qid, binding = _input_frame(builder, variables)
    emitter = _FactoredEmitter(builder, bit_qid)
    emitter.usage = emitter.count_usage(factored)
    out = builder.add_qubit(label, "output")
    emitter.emit_xor(factored, out)
    if mirror:
        builder.apply_mirror()
    circuit = builder.finish(binding, [(label, out)])
    if verify:
        want = truth_table(factored_to_expression(factored, variables, label))
        ok, cex = _verify(circuit, want)
        _check(ok, f"factored circuit mismatch at {cex}")
    return circuit


# ---------------------------------------------------------------------------
# GRM factorization search


def _remove_factor(child: FactoredExpression, key: Tuple) -> FactoredExpression:
    if isinstance(child, FAnd):
        kept = list(child.children)
        for i, c in enumerate(kept):
            if c.key() == key:
                del kept[i]
                break
        return _fand(kept)
    return FConst(1)


def _merge_xor_pair(
    a: FactoredExpression, b: FactoredExpression
) -> Optional[FactoredExpression]:
    from .core import negate_literal

    if isinstance(a, FLit) and isinstance(b, FLit):
        va, vb = a.literal.variable, b.literal.variable
        if va.name == vb.name:
            mask = a.literal.truth_set.mask ^ b.literal.truth_set.mask
            return FLit(MviLiteral(va, TruthSet(mask, va.radix)))
        return None
    for x, y in ((a, b), (b, a)):
        if isinstance(x, FConst) and x.value == 1 and isinstance(y, FLit):
            return FLit(
                MviLiteral(y.literal.variable, negate_literal(y.literal.truth_set))
            )
    return None


def _xor_extractions(node: FXor):
    """Rule (a): common-factor extraction across XOR terms."""
    children = node.children

    def factors(c: FactoredExpression) -> List[FactoredExpression]:
        if isinstance(c, FAnd):
            return list(c.children)
        if isinstance(c, (FLit, FXor)):
            return [c]
        return []

    occur: Dict[Tuple, List[int]] = {}
    by_key: Dict[Tuple, FactoredExpression] = {}
    for i, c in enumerate(children):
        for f in factors(c):
            occur.setdefault(f.key(), []).append(i)
            by_key.setdefault(f.key(), f)
    for key in sorted(occur):
        idxs = sorted(set(occur[key]))
        if len(idxs) < 2:
            continue
        residues = [_remove_factor(children[i], key) for i in idxs]
        rest = [c for i, c in enumerate(children) if i not in idxs]
        yield len(idxs), _fxor([_fand([by_key[key], _fxor(residues)])] + rest)
    # same-variable partial-overlap extraction: with C = A intersect B,
    # X^A R1 (+) X^B R2 = X^C (R1 (+) R2) (+) X^{A\C} R1 (+) X^{B\C} R2
    lit_factors: List[List[Tuple]] = []
    for c in children:
        lit_factors.append(
            [(f.literal, f.key()) for f in factors(c) if isinstance(f, FLit)]
        )
    for i in range(len(children)):
        for j in range(i + 1, len(children)):
            for la, key_a in lit_factors[i]:
                for lb, key_b in lit_factors[j]:
                    if la.variable.name != lb.variable.name or key_a == key_b:
                        continue
                    var = la.variable
                    common = la.truth_set.mask & lb.truth_set.mask
                    if not common:
                        continue
                    ra = _remove_factor(children[i], key_a)
                    rb = _remove_factor(children[j], key_b)
                    pieces = [
                        _fand([
                            FLit(MviLiteral(var, TruthSet(common, var.radix))),
                            _fxor([ra, rb]),
                        ])
                    ]
                    for mask, residue in (
                        (la.truth_set.mask ^ common, ra),
                        (lb.truth_set.mask ^ common, rb),
                    ):
                        if mask:
                            pieces.append(_fand([
                                FLit(MviLiteral(var, TruthSet(mask, var.radix))),
                                residue,
                            ]))
                    rest = [c for k, c in enumerate(children) if k not in (i, j)]
                    yield 2, _fxor(pieces + rest)


def _xor_merges(node: FXor):
    """Rule (b): same-variable literal merges, including 1 (+) X^S."""
    children = node.children
    for i in range(len(children)):
        for j in range(i + 1, len(children)):
            merged = _merge_xor_pair(children[i], children[j])
            if merged is None:
                continue
            rest = [c for k, c in enumerate(children) if k not in (i, j)]
            yield 2, _fxor([merged] + rest)


def _grm_rewrites(tree: FactoredExpression, rule: str):
    """(covered-term count, rewritten tree) pairs for one rule, outermost
    first, left to right."""
    if isinstance(tree, FXor):
        gen = _xor_extractions if rule == "a" else _xor_merges
        yield from gen(tree)
    if isinstance(tree, (FAnd, FXor)):
        make = _fand if isinstance(tree, FAnd) else _fxor
        for i, child in enumerate(tree.children):
            for cov, rewritten in _grm_rewrites(child, rule):
                yield cov, make(
                    list(tree.children[:i])
                    + [rewritten]
                    + list(tree.children[i + 1 :])
                )


def factorize_grm(expr: MviExpression) -> FactoredExpression:
    """Greedy fixed-order tree rewriting until fixpoint.

    Rules in priority order: (a) common-factor extraction across XOR terms,
    (b) same-variable literal merges (including 1 (+) X^S); constant
    absorption happens in the node normalizers.  Within a rule, candidates
    are generated outermost-leftmost; among rewrites whose synthesized
    Maslov cost does not increase, extractions covering more terms win,
    then cheaper cost, then generation order.  After each accepted rewrite
    the scan restarts from rule (a).
    """
    current = expression_to_factored(expr)
    label = expr.label or "F"

    def cost(tree: FactoredExpression) -> int:
        return maslov_cost(
            synthesize_factored(tree, expr.variables, label, verify=False)
        )

    seen = {current.key()}
    cur_cost = cost(current)
    progress = True
    while progress:
        progress = False
        for rule in ("a", "b"):
            best = None
            for order, (cov, candidate) in enumerate(_grm_rewrites(current, rule)):
                key = candidate.key()
                if key in seen:
                    continue
                seen.add(key)
                c = cost(candidate)
                if c <= cur_cost and (best is None or (-cov, c, order) < best[0]):
                    best = ((-cov, c, order), c, candidate)
            if best is not None:
                _, cur_cost, current = best
                progress = True
                break
    back = factored_to_expression(current, expr.variables, label)
    same = truth_table(back).outputs[0][1] == truth_table(expr).outputs[0][1]
    _check(same, "factorization changed the function")
    return current


def synthesize_grm(expr: MviExpression, mirror: bool = False) -> Circuit:
    """Factorize and emit in one step."""
    f = factorize_grm(expr)
    return synthesize_factored(f, expr.variables, expr.label or "F", mirror=mirror)
