"""Deterministic artifact emission: cost report, netlist JSON, OpenQASM."""

from __future__ import annotations

import hashlib
import json
from typing import Dict, List, Optional, Sequence, Tuple

from .circuit import Circuit, CostReport, Gate, Qubit, cost_report
from .core import ContractError

__all__ = [
    "NETLIST_FORMAT",
    "NETLIST_VERSION",
    "render_report",
    "render_netlist",
    "parse_netlist",
    "render_qasm",
]

NETLIST_FORMAT = "mvirm-netlist"
NETLIST_VERSION = 1


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ContractError(msg)


def render_report(
    label: str,
    circuit: Circuit,
    report: Optional[CostReport] = None,
    verified: Optional[bool] = None,
    extra: Sequence[Tuple[str, str]] = (),
) -> str:
    """Plain-text cost report, one key=value pair per line."""
    r = report or cost_report(circuit)
    lines = [f"label={label}"]
    lines.append(f"qubits={len(circuit.qubits)}")
    lines.append(f"gates={len(circuit.gates)}")
    for k, c in r.counts:
        lines.append(f"gates_with_{k}_controls={c}")
    lines.append(f"maslov={r.maslov}")
    lines.append(f"tqc={r.tqc}")
    if r.tqc_extrapolated:
        lines.append("tqc_extrapolated=true")
    if verified is not None:
        lines.append(f"verified={'true' if verified else 'false'}")
    for k, v in extra:
        lines.append(f"{k}={v}")
    return "\n".join(lines) + "\n"


def _netlist_document(circuit: Circuit) -> Dict:
    r = cost_report(circuit)
    return {
        "format": NETLIST_FORMAT,
        "version": NETLIST_VERSION,
        "qubits": [
            {"id": q.qid, "name": q.name, "role": q.role}
            for q in circuit.qubits
        ],
        "gates": [
            {"controls": list(g.controls), "target": g.target}
            for g in circuit.gates
        ],
        "variables": [
            {"name": name, "radix": radix, "qubits": list(qids)}
            for name, radix, qids in circuit.variables
        ],
        "outputs": [
            {"label": label, "qubit": qid} for label, qid in circuit.outputs
        ],
        "cost": {
            "counts": [[k, c] for k, c in r.counts],
            "maslov": r.maslov,
            "tqc": r.tqc,
        },
    }


def render_netlist(circuit: Circuit) -> str:
    """Deterministic JSON netlist with a sha256 content hash."""
    doc = _netlist_document(circuit)
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    doc["hash"] = hashlib.sha256(payload.encode()).hexdigest()
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def parse_netlist(text: str) -> Circuit:
    """Import a netlist; the content hash and cost block are re-checked."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContractError(f"netlist is not valid JSON: {exc}") from exc
    _check(isinstance(doc, dict), "netlist must be a JSON object")
    _check(doc.get("format") == NETLIST_FORMAT, "unknown netlist format")
    _check(doc.get("version") == NETLIST_VERSION, "unsupported netlist version")
    stated_hash = doc.pop("hash", None)
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(payload.encode()).hexdigest()
    _check(stated_hash == digest, "netlist content hash mismatch")
    circuit = Circuit(
        qubits=tuple(
            Qubit(q["id"], q["name"], q["role"]) for q in doc["qubits"]
        ),
        gates=tuple(
            Gate(tuple(g["controls"]), g["target"]) for g in doc["gates"]
        ),
        variables=tuple(
            (v["name"], v["radix"], tuple(v["qubits"]))
            for v in doc["variables"]
        ),
        outputs=tuple((o["label"], o["qubit"]) for o in doc["outputs"]),
    )
    r = cost_report(circuit)
    stated = doc["cost"]
    _check(
        stated["maslov"] == r.maslov
        and stated["tqc"] == r.tqc
        and [[k, c] for k, c in r.counts] == stated["counts"],
        "netlist cost block disagrees with its gates",
    )
    return circuit


def render_qasm(circuit: Circuit) -> str:
    """OpenQASM 2.0 subset: x, cx, ccx; k>2 controls as opaque mcx_k."""
    id_index = {q.qid: i for i, q in enumerate(circuit.qubits)}
    widths = sorted(
        {len(g.controls) for g in circuit.gates if len(g.controls) > 2}
    )
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
    ]
    for k in widths:
        args = ",".join(f"q{i}" for i in range(k + 1))
        lines.append(
            f"opaque mcx_{k} {args};  "
            f"// {k}-control Toffoli, Maslov cost {(1 << (k + 1)) - 3}"
        )
    lines.append(f"qreg q[{len(circuit.qubits)}];")
    for q in circuit.qubits:
        lines.append(f"// q[{id_index[q.qid]}] = {q.name} ({q.role})")
    for g in circuit.gates:
        ops = [id_index[c] for c in g.controls] + [id_index[g.target]]
        args = ",".join(f"q[{i}]" for i in ops)
        k = len(g.controls)
        name = {0: "x", 1: "cx", 2: "ccx"}.get(k, f"mcx_{k}")
        lines.append(f"{name} {args};")
    return "\n".join(lines) + "\n"
