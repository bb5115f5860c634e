"""Pairing / polarity search: enumerate candidates, synthesize, rank."""

from __future__ import annotations

import itertools
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .circuit import Circuit, CostReport, cost_report
from .core import (
    ContractError,
    MviExpression,
    MviVariable,
    PolarityAssignment,
    PolarityMatrix,
    ProductTerm,
    TruthSet,
    enumerate_polarities,
    truth_table,
)
from .transform import (
    Spectrum,
    butterfly_spectrum,
    expression_terms,
    minterm_vector,
    products_matching,
    spectrum_to_expression,
)
from .synth import (
    factorize_grm,
    synthesize_esop,
    synthesize_factored,
    synthesize_fprm,
)

__all__ = [
    "Pairing",
    "SearchConfig",
    "Solution",
    "enumerate_pairings",
    "apply_pairing",
    "evaluate_candidate",
    "search_best",
]

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 200
SEARCH_GUARD = 200_000


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ContractError(msg)


@dataclass(frozen=True)
class Pairing:
    """Partition of the input variables into ordered groups.

    Each multi-bit group becomes one MVI variable of radix 2^size; singleton
    groups keep the original variable (any radix).
    """

    groups: Tuple[Tuple[str, ...], ...]

    def __post_init__(self) -> None:
        names = [n for g in self.groups for n in g]
        _check(len(names) == len(set(names)), "variable in two groups")
        _check(all(g for g in self.groups), "empty group")

    @classmethod
    def trivial(cls, variables: Sequence[MviVariable]) -> "Pairing":
        return cls(tuple((v.name,) for v in variables))

    def sort_key(self) -> Tuple:
        return self.groups


@dataclass(frozen=True)
class SearchConfig:
    """What to explore and how to score it."""

    method: str = "butterfly"  # or "products-matching"
    target: str = "fprm"  # or "grm", "esop"
    objective: str = "maslov"  # or "tqc"
    polarity_scope: str = "exhaustive"  # or "sample:K"
    full_polarities: bool = False  # drop the first-row-all-ones restriction
    fixed_polarities: Optional[Tuple[PolarityAssignment, ...]] = None
    pairings: Optional[Tuple[Pairing, ...]] = None  # None = trivial pairing
    max_group: int = 3
    mirror: bool = False
    jobs: int = 1
    seed: Optional[int] = None
    top: int = 5

    def __post_init__(self) -> None:
        _check(self.method in ("butterfly", "products-matching"), "bad method")
        _check(self.target in ("fprm", "grm", "esop"), "bad target")
        _check(self.objective in ("maslov", "tqc"), "bad objective")
        if self.polarity_scope != "exhaustive":
            _check(
                self.polarity_scope.startswith("sample:")
                and self.polarity_scope[7:].isdigit(),
                "polarity scope is 'exhaustive' or 'sample:K'",
            )
            _check(self.seed is not None, "sampling requires a seed")

    @property
    def sample_size(self) -> Optional[int]:
        if self.polarity_scope.startswith("sample:"):
            return int(self.polarity_scope[7:])
        return None


@dataclass(frozen=True)
class Solution:
    """A fully verified candidate synthesis."""

    pairing: Pairing
    pa: PolarityAssignment
    spectrum: Optional[Spectrum]
    expressions: Tuple[MviExpression, ...]
    circuit: Circuit
    report: CostReport

    def objective(self, name: str) -> int:
        return self.report.maslov if name == "maslov" else self.report.tqc

    def sort_key(self, objective: str) -> Tuple:
        other = "tqc" if objective == "maslov" else "maslov"
        return (
            self.objective(objective),
            self.objective(other),
            self.pa.sort_key(),
            self.pairing.sort_key(),
        )


def enumerate_pairings(
    binary_vars: Sequence[str], max_group: int = 3
) -> Iterator[Pairing]:
    """All set partitions into groups of size <= max_group.

    Deterministic order; group order and within-group bit order follow
    declaration order (MSB first).
    """
    names = list(binary_vars)
    _check(len(names) > 0, "no variables to pair")

    def rec(remaining: Tuple[str, ...]) -> Iterator[Tuple[Tuple[str, ...], ...]]:
        if not remaining:
            yield ()
            return
        head, rest = remaining[0], remaining[1:]
        for k in range(min(max_group - 1, len(rest)) + 1):
            for extra in itertools.combinations(rest, k):
                group = (head,) + extra
                left = tuple(n for n in rest if n not in extra)
                for tail in rec(left):
                    yield (group,) + tail

    for groups in rec(tuple(names)):
        yield Pairing(groups)


def apply_pairing(
    exprs: Sequence[MviExpression], pairing: Pairing
) -> List[MviExpression]:
    """Re-express functions over the paired variables.

    Multi-bit groups require radix-2 members; each group becomes an MVI
    variable named by joining its members, natural binary encoding with the
    first member as MSB.  A product term maps group-wise to the value set
    consistent with its per-bit constraints.
    """
    variables = exprs[0].variables
    var_map = {v.name: v for v in variables}
    _check(
        sorted(n for g in pairing.groups for n in g) == sorted(var_map),
        "pairing does not cover the variable set",
    )
    new_vars: List[MviVariable] = []
    group_of: Dict[str, Tuple[str, ...]] = {}
    paired: Dict[Tuple[str, ...], MviVariable] = {}
    for group in pairing.groups:
        if len(group) == 1:
            nv = var_map[group[0]]
        else:
            for n in group:
                _check(
                    var_map[n].radix == 2 and var_map[n].n_bits == 1,
                    f"grouped variable {n} is not binary",
                )
            nv = MviVariable(
                "_".join(group),
                1 << len(group),
                tuple(var_map[n].encoding_bits[0] for n in group),
            )
        new_vars.append(nv)
        paired[group] = nv
        for n in group:
            group_of[n] = group

    def convert(term: ProductTerm) -> ProductTerm:
        sets = term.truth_sets()
        out: Dict[str, TruthSet] = {}
        for group in pairing.groups:
            nv = paired[group]
            if len(group) == 1:
                if group[0] in sets:
                    out[nv.name] = sets[group[0]]
                continue
            if not any(n in sets for n in group):
                continue
            mask = 0
            for value in range(nv.radix):
                fits = True
                for pos, n in enumerate(group):
                    if n not in sets:
                        continue
                    bit = (value >> (len(group) - 1 - pos)) & 1
                    if not (sets[n].mask >> bit) & 1:
                        fits = False
                        break
                if fits:
                    mask |= 1 << value
            _check(mask, "annihilating group constraint")
            if mask != (1 << nv.radix) - 1:
                out[nv.name] = TruthSet(mask, nv.radix)
        return ProductTerm.of(out)

    return [
        MviExpression.of(
            tuple(new_vars), [convert(t) for t in e.terms], label=e.label
        )
        for e in exprs
    ]


def _verify_or_die(circuit: Circuit, exprs: Sequence[MviExpression]) -> None:
    from .circuit import equivalence

    ok, cex = equivalence(circuit, truth_table(exprs))
    _check(ok, f"candidate circuit failed verification at {cex}")


def evaluate_candidate(
    exprs: Sequence[MviExpression] | MviExpression,
    pairing: Pairing,
    pa: PolarityAssignment,
    cfg: SearchConfig,
) -> Solution:
    """Transform, synthesize, verify, and cost one candidate."""
    if isinstance(exprs, MviExpression):
        exprs = [exprs]
    paired = apply_pairing(exprs, pairing)
    spectrum: Optional[Spectrum] = None
    if cfg.target == "esop":
        circuit = synthesize_esop(paired, mirror=cfg.mirror)
    else:
        if cfg.method == "butterfly":
            spectrum = butterfly_spectrum(minterm_vector(paired), pa)
        else:
            variables, labels, terms = expression_terms(paired)
            spectrum = products_matching(terms, variables, pa, labels)
        if cfg.target == "fprm":
            circuit = synthesize_fprm(spectrum, mirror=cfg.mirror)
        else:
            _check(len(paired) == 1, "grm target needs a single output")
            expr = spectrum_to_expression(spectrum, spectrum.labels[0])
            factored = factorize_grm(expr)
            circuit = synthesize_factored(
                factored,
                paired[0].variables,
                paired[0].label or "F",
                mirror=cfg.mirror,
            )
    _verify_or_die(circuit, paired)
    return Solution(
        pairing, pa, spectrum, tuple(paired), circuit, cost_report(circuit)
    )


def _polarity_space(
    variables: Sequence[MviVariable], cfg: SearchConfig
) -> List[PolarityAssignment]:
    if cfg.fixed_polarities is not None:
        return list(cfg.fixed_polarities)
    per_var = [
        list(
            enumerate_polarities(
                v.radix, first_row_all_ones=not cfg.full_polarities
            )
        )
        for v in variables
    ]
    total = 1
    for opts in per_var:
        total *= len(opts)
    k = cfg.sample_size
    if k is None:
        _check(total <= SEARCH_GUARD, f"polarity space {total} exceeds guard")
        combos: Iterator[Tuple[PolarityMatrix, ...]] = itertools.product(*per_var)
        return [
            PolarityAssignment.of(
                {v.name: m for v, m in zip(variables, combo)}
            )
            for combo in combos
        ]
    rng = random.Random(cfg.seed)
    chosen: List[PolarityAssignment] = []
    taken = set()
    while len(chosen) < min(k, total):
        idx = tuple(rng.randrange(len(opts)) for opts in per_var)
        if idx in taken:
            continue
        taken.add(idx)
        chosen.append(
            PolarityAssignment.of(
                {
                    v.name: per_var[i][idx[i]]
                    for i, v in enumerate(variables)
                }
            )
        )
    return chosen


def search_best(
    exprs: Sequence[MviExpression] | MviExpression, cfg: SearchConfig
) -> List[Solution]:
    """Rank the configured candidate set; deterministic for a fixed seed.

    Ties break by the other cost metric, then lexicographic polarity, then
    lexicographic pairing; parallel evaluation cannot change the ranking.
    """
    if isinstance(exprs, MviExpression):
        exprs = [exprs]
    pairings = cfg.pairings or (Pairing.trivial(exprs[0].variables),)
    candidates: List[Tuple[Pairing, PolarityAssignment]] = []
    for pairing in pairings:
        paired_vars = apply_pairing(exprs, pairing)[0].variables
        if cfg.target == "esop":
            # polarity-independent; evaluate once with an identity assignment
            pas = [
                PolarityAssignment.of(
                    {
                        v.name: next(
                            enumerate_polarities(v.radix, first_row_all_ones=True)
                        )
                        for v in paired_vars
                    }
                )
            ]
        else:
            pas = _polarity_space(paired_vars, cfg)
        candidates.extend((pairing, pa) for pa in pas)
    _check(len(candidates) > 0, "empty candidate set")
    logger.info("search start candidates=%d", len(candidates))

    def run(item: Tuple[Pairing, PolarityAssignment]) -> Solution:
        return evaluate_candidate(exprs, item[0], item[1], cfg)

    solutions: List[Solution] = []
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            solutions = list(pool.map(run, candidates))
    else:
        best_so_far: Optional[int] = None
        for i, item in enumerate(candidates, 1):
            sol = run(item)
            solutions.append(sol)
            obj = sol.objective(cfg.objective)
            if best_so_far is None or obj < best_so_far:
                best_so_far = obj
            if i % PROGRESS_EVERY == 0:
                logger.info(
                    "progress done=%d total=%d best=%d",
                    i,
                    len(candidates),
                    best_so_far,
                )
    solutions.sort(key=lambda s: s.sort_key(cfg.objective))
    logger.info(
        "search done candidates=%d best=%d",
        len(candidates),
        solutions[0].objective(cfg.objective),
    )
    return solutions[: cfg.top]
