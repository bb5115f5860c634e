"""Reversible-circuit IR, classical simulator, equivalence check, and the
two gate-cost metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .core import ContractError, TruthTable, assignments

__all__ = [
    "Gate",
    "Qubit",
    "Circuit",
    "CostReport",
    "simulate",
    "circuit_truth_table",
    "maslov_cost",
    "tqc_cost",
    "cost_report",
    "ancillas_restored",
    "equivalence",
]

ROLES = ("input", "ancilla-decoder", "ancilla-term", "output")
TQC_WEIGHTS = {0: 1, 1: 14, 2: 54, 3: 109, 4: 219}
SIM_BIT_GUARD = 20


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ContractError(msg)


@dataclass(frozen=True)
class Gate:
    """Positive-control Toffoli family: 0 controls = NOT, 1 = CNOT."""

    controls: Tuple[int, ...]
    target: int

    def __post_init__(self) -> None:
        _check(self.target not in self.controls, "target cannot be a control")
        _check(
            len(set(self.controls)) == len(self.controls),
            "controls must be distinct",
        )


@dataclass(frozen=True)
class Qubit:
    qid: int
    name: str
    role: str

    def __post_init__(self) -> None:
        _check(self.role in ROLES, f"unknown qubit role {self.role!r}")


@dataclass(frozen=True)
class Circuit:
    """Qubit registry, ordered gates, and the MVI input/output binding.

    variables maps each MVI variable to (radix, encoding-bit qubit ids, MSB
    first); outputs maps each output label to the qubit carrying it at the
    end.  Ancillas and outputs initialize to 0.
    """

    qubits: Tuple[Qubit, ...]
    gates: Tuple[Gate, ...]
    variables: Tuple[Tuple[str, int, Tuple[int, ...]], ...]
    outputs: Tuple[Tuple[str, int], ...]

    def __post_init__(self) -> None:
        ids = {q.qid for q in self.qubits}
        _check(len(ids) == len(self.qubits), "duplicate qubit id")
        for g in self.gates:
            for q in g.controls + (g.target,):
                _check(q in ids, f"gate uses unregistered qubit {q}")

    @property
    def input_qubits(self) -> Tuple[int, ...]:
        return tuple(q.qid for q in self.qubits if q.role == "input")

    @property
    def ancilla_qubits(self) -> Tuple[int, ...]:
        return tuple(
            q.qid for q in self.qubits if q.role.startswith("ancilla")
        )

    @property
    def radices(self) -> Tuple[int, ...]:
        return tuple(radix for _, radix, _ in self.variables)


@dataclass(frozen=True)
class CostReport:
    """Per-control-count gate counts plus both metrics."""

    counts: Tuple[Tuple[int, int], ...]  # (n_controls, count), sorted
    maslov: int
    tqc: int
    tqc_extrapolated: bool

    def count(self, n_controls: int) -> int:
        for k, c in self.counts:
            if k == n_controls:
                return c
        return 0


def simulate(c: Circuit, input_bits: Dict[int, int]) -> Dict[int, int]:
    """Apply gates in order (target ^= AND of controls); return final bits."""
    state: Dict[int, int] = {}
    for q in c.qubits:
        if q.role == "input":
            _check(q.qid in input_bits, f"input qubit {q.qid} unassigned")
            state[q.qid] = input_bits[q.qid] & 1
        else:
            state[q.qid] = 0
    for g in c.gates:
        if all(state[q] for q in g.controls):
            state[g.target] ^= 1
    return state


def circuit_truth_table(c: Circuit, guard_bits: int = SIM_BIT_GUARD) -> TruthTable:
    """Exhaustive simulation over the declared MVI assignment space.

    Unreachable encodings of sub-power-of-two radices are never visited.
    """
    n_bits = sum(len(bits) for _, _, bits in c.variables)
    _check(
        n_bits <= guard_bits,
        f"{n_bits} input bits exceed the simulation guard ({guard_bits})",
    )
    radices = c.radices
    out_bits = [0] * len(c.outputs)
    for idx, vals in enumerate(assignments(radices)):
        bits: Dict[int, int] = {}
        for (name, radix, qids), value in zip(c.variables, vals):
            b = len(qids)
            for i, qid in enumerate(qids):
                bits[qid] = (value >> (b - 1 - i)) & 1
        state = simulate(c, bits)
        for o, (_, qid) in enumerate(c.outputs):
            if state[qid]:
                out_bits[o] |= 1 << idx
    return TruthTable(
        radices,
        tuple((label, out_bits[o]) for o, (label, _) in enumerate(c.outputs)),
    )


def gate_maslov(n_controls: int) -> int:
    return 1 if n_controls < 2 else (1 << (n_controls + 1)) - 3


def gate_tqc(n_controls: int) -> Tuple[int, bool]:
    if n_controls in TQC_WEIGHTS:
        return TQC_WEIGHTS[n_controls], False
    w = TQC_WEIGHTS[4]
    for _ in range(n_controls - 4):
        w = 2 * w + 1
    return w, True


def maslov_cost(c: Circuit) -> int:
    return sum(gate_maslov(len(g.controls)) for g in c.gates)


def tqc_cost(c: Circuit) -> int:
    return sum(gate_tqc(len(g.controls))[0] for g in c.gates)


def cost_report(c: Circuit) -> CostReport:
    counts: Dict[int, int] = {}
    for g in c.gates:
        counts[len(g.controls)] = counts.get(len(g.controls), 0) + 1
    extrapolated = any(k > 4 for k in counts)
    return CostReport(
        tuple(sorted(counts.items())),
        maslov_cost(c),
        tqc_cost(c),
        extrapolated,
    )


def ancillas_restored(c: Circuit, guard_bits: int = SIM_BIT_GUARD) -> bool:
    """True iff every ancilla ends at 0 for every reachable input."""
    n_bits = sum(len(bits) for _, _, bits in c.variables)
    _check(
        n_bits <= guard_bits,
        f"{n_bits} input bits exceed the simulation guard ({guard_bits})",
    )
    ancillas = c.ancilla_qubits
    for vals in assignments(c.radices):
        bits: Dict[int, int] = {}
        for (name, radix, qids), value in zip(c.variables, vals):
            b = len(qids)
            for i, qid in enumerate(qids):
                bits[qid] = (value >> (b - 1 - i)) & 1
        state = simulate(c, bits)
        if any(state[q] for q in ancillas):
            return False
    return True


def equivalence(
    c: Circuit, tt: TruthTable
) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """Compare against a reference table; return the first mismatch if any."""
    got = circuit_truth_table(c)
    _check(got.radices == tt.radices, "incompatible assignment spaces")
    got_cols = {label: bits for label, bits in got.outputs}
    worst: Optional[int] = None
    for label, want in tt.outputs:
        _check(label in got_cols, f"circuit lacks output {label!r}")
        diff = got_cols[label] ^ want
        if diff:
            idx = (diff & -diff).bit_length() - 1
            if worst is None or idx < worst:
                worst = idx
    if worst is None:
        return True, None
    vals: List[int] = []
    rem = worst
    for r in reversed(tt.radices):
        vals.append(rem % r)
        rem //= r
    return False, tuple(reversed(vals))
