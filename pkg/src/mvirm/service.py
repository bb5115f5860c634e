"""FastAPI service wrapping the synthesis pipeline.

The handler functions are plain callables over pydantic models; the CLI
calls them in-process, the app exposes them over HTTP.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .circuit import ancillas_restored, cost_report, equivalence
from .core import (
    ContractError,
    MviExpression,
    PolarityAssignment,
    enumerate_polarities,
    set_to_string,
    truth_table,
)
from .dsl import ParsedFile, parse_function_file
from .formats import parse_netlist, render_netlist, render_qasm, render_report
from .search import (
    Pairing,
    SearchConfig,
    Solution,
    enumerate_pairings,
    search_best,
)
from .transform import (
    butterfly_spectrum,
    expression_terms,
    minterm_vector,
    products_matching,
)

__all__ = [
    "app",
    "SynthRequest",
    "SynthResponse",
    "SolutionOut",
    "TransformRequest",
    "TransformResponse",
    "CostRequest",
    "CostResponse",
    "VerifyRequest",
    "VerifyResponse",
    "EnumerateRequest",
    "EnumerateResponse",
    "handle_synth",
    "handle_transform",
    "handle_cost",
    "handle_verify",
    "handle_enumerate",
]

EMITS = ("report", "netlist", "qasm")


class SynthRequest(BaseModel):
    source: str
    polarity_source: Optional[str] = None
    method: str = "butterfly"
    target: str = "fprm"
    mirror: bool = False
    emit: List[str] = Field(default_factory=lambda: ["report"])
    search: Optional[str] = None  # "exhaustive" | "sample:K"
    pairing: str = "fixed"  # "fixed" | "exhaustive"
    max_group: int = 3
    full_polarities: bool = False
    objective: str = "maslov"
    seed: Optional[int] = None
    top: int = 5
    jobs: int = 1


class SolutionOut(BaseModel):
    outputs: List[str]
    pairing: List[List[str]]
    polarity: Dict[str, List[str]]
    counts: List[List[int]]
    maslov: int
    tqc: int
    verified: bool
    ancillas_clean: Optional[bool] = None
    report: Optional[str] = None
    netlist: Optional[str] = None
    qasm: Optional[str] = None


class SynthResponse(BaseModel):
    solutions: List[SolutionOut]


class TransformRequest(BaseModel):
    source: str
    polarity_source: Optional[str] = None
    method: str = "butterfly"


class Coefficient(BaseModel):
    index: List[int]
    outputs: List[str]


class TransformResponse(BaseModel):
    variables: List[str]
    labels: List[str]
    coefficients: List[Coefficient]


class CostRequest(BaseModel):
    netlist: str


class CostResponse(BaseModel):
    counts: List[List[int]]
    maslov: int
    tqc: int


class VerifyRequest(BaseModel):
    netlist: str
    source: str


class VerifyResponse(BaseModel):
    equivalent: bool
    counterexample: Optional[List[int]] = None


class EnumerateRequest(BaseModel):
    kind: str  # "polarities" | "pairings"
    radix: Optional[int] = None
    first_row_ones: bool = True
    variables: Optional[List[str]] = None
    max_group: int = 3
    limit: Optional[int] = None


class EnumerateResponse(BaseModel):
    count: int
    items: List[List[str]]


def _parse_sources(source: str, polarity_source: Optional[str]) -> ParsedFile:
    text = source
    if polarity_source:
        text = text + "\n" + polarity_source
    parsed = parse_function_file(text)
    if not parsed.expressions:
        raise ContractError("function file defines no outputs")
    return parsed


def _solution_out(sol: Solution, emit: List[str], mirror: bool) -> SolutionOut:
    report = sol.report
    labels = [label for label, _ in sol.circuit.outputs]
    polarity = {
        name: [set_to_string(mask, m.radix) for mask in m.rows]
        for name, m in sol.pa.matrices
    }
    out = SolutionOut(
        outputs=labels,
        pairing=[list(g) for g in sol.pairing.groups],
        polarity=polarity,
        counts=[[k, c] for k, c in report.counts],
        maslov=report.maslov,
        tqc=report.tqc,
        verified=True,  # evaluate_candidate verified or raised
        ancillas_clean=ancillas_restored(sol.circuit) if mirror else None,
    )
    if "report" in emit:
        extra = [("outputs", ",".join(labels))]
        for name, rows in sorted(polarity.items()):
            extra.append((f"polarity_{name}", ";".join(rows)))
        extra.append(
            ("pairing", "|".join(",".join(g) for g in sol.pairing.groups))
        )
        out.report = render_report(
            "+".join(labels), sol.circuit, report, verified=True, extra=extra
        )
    if "netlist" in emit:
        out.netlist = render_netlist(sol.circuit)
    if "qasm" in emit:
        out.qasm = render_qasm(sol.circuit)
    return out


def handle_synth(req: SynthRequest) -> SynthResponse:
    for e in req.emit:
        if e not in EMITS:
            raise ContractError(f"unknown emit format {e!r}")
    parsed = _parse_sources(req.source, req.polarity_source)
    exprs = list(parsed.expressions)
    if req.pairing == "exhaustive":
        for v in parsed.variables:
            if v.radix != 2:
                raise ContractError(
                    "pairing search requires all-binary declarations"
                )
        pairings: Optional[Tuple[Pairing, ...]] = tuple(
            enumerate_pairings([v.name for v in parsed.variables], req.max_group)
        )
    else:
        pairings = None
    if pairings is not None and req.search is None and req.target != "esop":
        raise ContractError("pairing search needs a polarity search scope")
    fixed: Optional[Tuple[PolarityAssignment, ...]] = None
    scope = "exhaustive"
    if req.search is None:
        if parsed.polarity is not None:
            fixed = (parsed.polarity,)
        elif req.target != "esop":
            raise ContractError(
                "no polarity given: declare one or pass a search scope"
            )
    else:
        scope = req.search
    cfg = SearchConfig(
        method=req.method,
        target=req.target,
        objective=req.objective,
        polarity_scope=scope,
        full_polarities=req.full_polarities,
        fixed_polarities=fixed,
        pairings=pairings,
        max_group=req.max_group,
        mirror=req.mirror,
        jobs=req.jobs,
        seed=req.seed,
        top=req.top,
    )
    solutions = search_best(exprs, cfg)
    return SynthResponse(
        solutions=[_solution_out(s, req.emit, req.mirror) for s in solutions]
    )


def handle_transform(req: TransformRequest) -> TransformResponse:
    parsed = _parse_sources(req.source, req.polarity_source)
    if parsed.polarity is None:
        raise ContractError("transform requires a polarity block")
    exprs = list(parsed.expressions)
    if req.method == "butterfly":
        sp = butterfly_spectrum(minterm_vector(exprs), parsed.polarity)
    elif req.method == "products-matching":
        variables, labels, terms = expression_terms(exprs)
        sp = products_matching(terms, variables, parsed.polarity, labels)
    else:
        raise ContractError(f"unknown method {req.method!r}")
    coeffs = [
        Coefficient(
            index=list(idx),
            outputs=[
                sp.labels[o]
                for o in range(len(sp.labels))
                if (mask >> o) & 1
            ],
        )
        for idx, mask in sp.nonzero()
    ]
    return TransformResponse(
        variables=[v.name for v in sp.variables],
        labels=list(sp.labels),
        coefficients=coeffs,
    )


def handle_cost(req: CostRequest) -> CostResponse:
    circuit = parse_netlist(req.netlist)
    r = cost_report(circuit)
    return CostResponse(
        counts=[[k, c] for k, c in r.counts], maslov=r.maslov, tqc=r.tqc
    )


def handle_verify(req: VerifyRequest) -> VerifyResponse:
    circuit = parse_netlist(req.netlist)
    parsed = _parse_sources(req.source, None)
    ok, cex = equivalence(circuit, truth_table(list(parsed.expressions)))
    return VerifyResponse(
        equivalent=ok, counterexample=list(cex) if cex else None
    )


def handle_enumerate(req: EnumerateRequest) -> EnumerateResponse:
    if req.kind == "polarities":
        if req.radix is None:
            raise ContractError("polarity enumeration requires a radix")
        items = [
            [set_to_string(mask, m.radix) for mask in m.rows]
            for m in enumerate_polarities(
                req.radix, first_row_all_ones=req.first_row_ones
            )
        ]
    elif req.kind == "pairings":
        if not req.variables:
            raise ContractError("pairing enumeration requires variable names")
        items = [
            [",".join(g) for g in p.groups]
            for p in enumerate_pairings(req.variables, req.max_group)
        ]
    else:
        raise ContractError(f"unknown enumeration kind {req.kind!r}")
    count = len(items)
    if req.limit is not None:
        items = items[: req.limit]
    return EnumerateResponse(count=count, items=items)


app = FastAPI(title="mvirm", description="MVI Reed-Muller synthesis service")


def _wrap(handler, req):
    try:
        return handler(req)
    except ContractError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/synth", response_model=SynthResponse)
def synth(req: SynthRequest) -> SynthResponse:
    return _wrap(handle_synth, req)


@app.post("/transform", response_model=TransformResponse)
def transform(req: TransformRequest) -> TransformResponse:
    return _wrap(handle_transform, req)


@app.post("/cost", response_model=CostResponse)
def cost(req: CostRequest) -> CostResponse:
    return _wrap(handle_cost, req)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest) -> VerifyResponse:
    return _wrap(handle_verify, req)


@app.post("/enumerate", response_model=EnumerateResponse)
def enumerate_(req: EnumerateRequest) -> EnumerateResponse:
    return _wrap(handle_enumerate, req)
