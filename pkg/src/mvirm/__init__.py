"""Multi-valued-input Reed-Muller synthesis toolkit.

Converts Boolean / multi-valued-input binary-output functions into verified
reversible circuits via MVI-FPRM and MVI-GRM forms with polarity decoders.
"""

from __future__ import annotations

from .core import (
    ContractError,
    MviExpression,
    MviLiteral,
    MviVariable,
    NormalizedCode,
    PolarityAssignment,
    PolarityMatrix,
    ProductTerm,
    TruthSet,
    TruthTable,
    assignments,
    combine_literals,
    count_polarities,
    enumerate_polarities,
    negate_literal,
    polarity_kernel,
    set_from_string,
    set_to_string,
    solve_normalized_code,
    truth_table,
)
from .transform import (
    MintermVector,
    Spectrum,
    butterfly_spectrum,
    expression_terms,
    minterm_vector,
    oracle_spectrum,
    products_matching,
    spectrum_to_expression,
)
from .circuit import (
    Circuit,
    CostReport,
    Gate,
    Qubit,
    ancillas_restored,
    circuit_truth_table,
    cost_report,
    equivalence,
    maslov_cost,
    simulate,
    tqc_cost,
)
from .synth import (
    BinaryEsop,
    FactoredExpression,
    factorize_grm,
    synthesize_decoder,
    synthesize_esop,
    synthesize_factored,
    synthesize_fprm,
    synthesize_grm,
)
from .search import (
    Pairing,
    SearchConfig,
    Solution,
    apply_pairing,
    enumerate_pairings,
    evaluate_candidate,
    search_best,
)
from .dsl import ParsedFile, ParseError, parse_function_file, print_function_file
from .formats import (
    parse_netlist,
    render_netlist,
    render_qasm,
    render_report,
)

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "MviVariable",
    "TruthSet",
    "MviLiteral",
    "ProductTerm",
    "MviExpression",
    "TruthTable",
    "PolarityMatrix",
    "PolarityAssignment",
    "NormalizedCode",
    "assignments",
    "combine_literals",
    "negate_literal",
    "count_polarities",
    "enumerate_polarities",
    "polarity_kernel",
    "solve_normalized_code",
    "set_to_string",
    "set_from_string",
    "truth_table",
    "MintermVector",
    "Spectrum",
    "minterm_vector",
    "butterfly_spectrum",
    "products_matching",
    "oracle_spectrum",
    "expression_terms",
    "spectrum_to_expression",
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
    "BinaryEsop",
    "FactoredExpression",
    "synthesize_decoder",
    "synthesize_fprm",
    "synthesize_esop",
    "factorize_grm",
    "synthesize_factored",
    "synthesize_grm",
    "Pairing",
    "SearchConfig",
    "Solution",
    "enumerate_pairings",
    "apply_pairing",
    "evaluate_candidate",
    "search_best",
    "ParsedFile",
    "ParseError",
    "parse_function_file",
    "print_function_file",
    "render_report",
    "render_netlist",
    "parse_netlist",
    "render_qasm",
    "__version__",
]
