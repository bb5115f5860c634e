"""Shared fixtures: reference functions, polarities, and golden data.

All golden values were transcribed from the published worked examples and
cross-checked against an independent brute-force oracle before being frozen
here.
"""

from __future__ import annotations

import pytest

from mvirm.core import (
    MviExpression,
    MviVariable,
    PolarityAssignment,
    PolarityMatrix,
    ProductTerm,
    TruthSet,
)
from mvirm.transform import MintermVector


def pmat(*rows: str) -> PolarityMatrix:
    return PolarityMatrix.from_strings(rows)


def lit(var: MviVariable, *vals: int):
    return (var.name, TruthSet.from_values(vals, var.radix))


def expr(variables, label, *terms) -> MviExpression:
    pts = [ProductTerm.of({name: ts for name, ts in t}) for t in terms]
    return MviExpression.of(tuple(variables), pts, label=label)


# ---------------------------------------------------------------------------
# Quaternary X1 / ternary X2 pair used by F1 and F2
# ---------------------------------------------------------------------------

X1 = MviVariable("X1", 4, ("x1a", "x1b"))
X2 = MviVariable("X2", 3, ("x2a", "x2b"))

P1 = pmat("1111", "0101", "0011", "0111")
P2 = pmat("111", "100", "001")
Q1 = pmat("1111", "1000", "0110", "0011")
Q2 = pmat("111", "110", "101")


@pytest.fixture(scope="session")
def pa_P() -> PolarityAssignment:
    return PolarityAssignment.of({"X1": P1, "X2": P2})


@pytest.fixture(scope="session")
def pa_Q() -> PolarityAssignment:
    return PolarityAssignment.of({"X1": Q1, "X2": Q2})


@pytest.fixture(scope="session")
def f1() -> MviExpression:
    return expr([X1, X2], "F1", [lit(X1, 0, 2, 3), lit(X2, 0, 1)])


@pytest.fixture(scope="session")
def f2() -> MviExpression:
    return expr(
        [X1, X2],
        "F2",
        [lit(X1, 0, 2, 3), lit(X2, 0, 1)],
        [lit(X1, 0), lit(X2, 2)],
    )


# F1 spectrum under (P1, P2): full 12-coefficient row, (r1, r2) natural order.
F1_SPECTRUM_P = {
    (1, 1): 1, (1, 2): 0, (1, 3): 1,
    (2, 1): 0, (2, 2): 0, (2, 3): 0,
    (3, 1): 1, (3, 2): 0, (3, 3): 1,
    (4, 1): 1, (4, 2): 0, (4, 3): 1,
}
# F2 spectrum under (P1, P2): result row of the two-term calculation.
F2_SPECTRUM_P = {
    (1, 1): 1, (1, 2): 0, (1, 3): 0,
    (2, 1): 0, (2, 2): 0, (2, 3): 0,
    (3, 1): 1, (3, 2): 0, (3, 3): 1,
    (4, 1): 1, (4, 2): 0, (4, 3): 0,
}
F2_SPECTRUM_Q = {(2, 1), (4, 2)}


# ---------------------------------------------------------------------------
# Three ternary variables: F3
# ---------------------------------------------------------------------------

X3 = MviVariable("X3", 3, ("x3a", "x3b"))
X4 = MviVariable("X4", 3, ("x4a", "x4b"))
X5 = MviVariable("X5", 3, ("x5a", "x5b"))

P3 = pmat("111", "101", "011")
P4 = pmat("111", "110", "010")
P5 = pmat("111", "110", "011")


@pytest.fixture(scope="session")
def pa_f3() -> PolarityAssignment:
    return PolarityAssignment.of({"X3": P3, "X4": P4, "X5": P5})


@pytest.fixture(scope="session")
def f3() -> MviExpression:
    """The three-term form (the one all spectra reproduce)."""
    return expr(
        [X3, X4, X5],
        "F3",
        [lit(X3, 1, 2), lit(X4, 0, 1)],
        [lit(X3, 0, 2), lit(X5, 1, 2)],
        [lit(X4, 1), lit(X5, 0, 1)],
    )


@pytest.fixture(scope="session")
def f3_esop_form() -> MviExpression:
    """The four-term variant used for the ESOP baseline comparison."""
    return expr(
        [X3, X4, X5],
        "F3",
        [lit(X4, 1), lit(X5, 0, 2)],
        [lit(X3, 1, 2), lit(X4, 0, 1), lit(X5, 0)],
        [lit(X4, 0, 2), lit(X5, 1, 2)],
        [lit(X3, 2), lit(X4, 1), lit(X5, 1)],
    )


F3_SPECTRUM = {(1, 3, 2), (2, 1, 3), (3, 2, 1)}

# Published minterm coefficients of F3 in natural (X3, X4, X5) order.
F3_MINTERMS = [
    0, 1, 1, 1, 0, 1, 0, 1, 1,
    1, 1, 1, 0, 0, 1, 0, 0, 0,
    1, 0, 0, 0, 1, 0, 0, 1, 1,
]


# ---------------------------------------------------------------------------
# Three quaternary variables: F4
# ---------------------------------------------------------------------------

X6 = MviVariable("X6", 4, ("xa", "xb"))
X7 = MviVariable("X7", 4, ("xc", "xd"))
X8 = MviVariable("X8", 4, ("xe", "xf"))

P6 = pmat("1111", "0010", "0001", "0101")
P7 = pmat("1111", "1000", "0001", "0101")
P8 = pmat("1111", "1100", "1010", "0111")


@pytest.fixture(scope="session")
def pa_f4() -> PolarityAssignment:
    return PolarityAssignment.of({"X6": P6, "X7": P7, "X8": P8})


@pytest.fixture(scope="session")
def f4() -> MviExpression:
    return expr(
        [X6, X7, X8],
        "F4",
        [lit(X6, 3)],
        [lit(X6, 2), lit(X7, 1, 3)],
        [lit(X7, 3), lit(X8, 0, 1)],
        [lit(X7, 0), lit(X8, 0, 2)],
    )


F4_SPECTRUM = {(3, 1, 1), (2, 4, 1), (1, 3, 2), (1, 2, 3)}


# ---------------------------------------------------------------------------
# Binary three-variable function from the ESOP / GRM comparison
# ---------------------------------------------------------------------------

B1 = MviVariable("x1", 2, ("x1",))
B2 = MviVariable("x2", 2, ("x2",))
B3 = MviVariable("x3", 2, ("x3",))


@pytest.fixture(scope="session")
def binary_f() -> MviExpression:
    """f = x1 x2 x3 XOR !x1 !x2 !x3."""
    return expr(
        [B1, B2, B3],
        "f",
        [lit(B1, 1), lit(B2, 1), lit(B3, 1)],
        [lit(B1, 0), lit(B2, 0), lit(B3, 0)],
    )


@pytest.fixture(scope="session")
def binary_f_grm() -> MviExpression:
    """Equivalent GRM: x1 x2 XOR !x1 !x3 XOR x2 !x3."""
    return expr(
        [B1, B2, B3],
        "f",
        [lit(B1, 1), lit(B2, 1)],
        [lit(B1, 0), lit(B3, 0)],
        [lit(B2, 1), lit(B3, 0)],
    )


# ---------------------------------------------------------------------------
# 2-bit adder over two quaternary variables
# ---------------------------------------------------------------------------

A1 = MviVariable("X1", 4, ("xa", "xb"))
A2 = MviVariable("X2", 4, ("xc", "xd"))

ADDER_P = pmat("1111", "0101", "0010", "1100")
ADDER_Q = pmat("1111", "0110", "0010", "1100")


def _adder_minterms() -> MintermVector:
    bits = {"fc": 0, "f0": 0, "f1": 0}
    idx = 0
    for v1 in range(4):
        for v2 in range(4):
            s = v1 + v2
            if (s >> 2) & 1:
                bits["fc"] |= 1 << idx
            if (s >> 1) & 1:
                bits["f0"] |= 1 << idx
            if s & 1:
                bits["f1"] |= 1 << idx
            idx += 1
    return MintermVector(
        (A1, A2), ("fc", "f0", "f1"), (bits["fc"], bits["f0"], bits["f1"])
    )


@pytest.fixture(scope="session")
def adder_minterms() -> MintermVector:
    return _adder_minterms()


@pytest.fixture(scope="session")
def pa_adder_P() -> PolarityAssignment:
    return PolarityAssignment.of({"X1": ADDER_P, "X2": ADDER_P})


@pytest.fixture(scope="session")
def pa_adder_Q() -> PolarityAssignment:
    return PolarityAssignment.of({"X1": ADDER_Q, "X2": ADDER_Q})


def _triples_to_masks(triples):
    """fc f0 f1 strings (natural (r1, r2) order) -> {(r1, r2): output mask}."""
    out = {}
    i = 0
    for r1 in range(1, 5):
        for r2 in range(1, 5):
            s = triples[i]
            i += 1
            mask = (int(s[0]) << 0) | (int(s[1]) << 1) | (int(s[2]) << 2)
            if mask:
                out[(r1, r2)] = mask
    return out


# All 16 coefficient triples (fc f0 f1) under the P polarity pair.
ADDER_SPECTRUM_P = _triples_to_masks([
    "100", "101", "000", "110",
    "101", "010", "100", "100",
    "000", "100", "000", "000",
    "110", "100", "000", "100",
])

# All 16 triples under the Q polarity pair.  The published result row says
# 100 for (3, 3), but XOR-ing that table's own column entries gives 000 and
# the accompanying carry expression omits the (3, 3) term; 000 is used here.
ADDER_SPECTRUM_Q = _triples_to_masks([
    "110", "111", "100", "101",
    "111", "010", "100", "110",
    "100", "100", "000", "100",
    "101", "110", "100", "110",
])


# ---------------------------------------------------------------------------
# Normalized-code golden data (quaternary example polarity)
# ---------------------------------------------------------------------------

CODES_POLARITY = pmat("1111", "0101", "0011", "0111")

# All 15 nonempty value sets -> normalized code strings.
NORMALIZED_CODES = {
    (0,): "1001", (1,): "0011", (2,): "0101", (3,): "0111",
    (0, 1): "1010", (0, 2): "1100", (0, 3): "1110",
    (1, 2): "0110", (1, 3): "0100", (2, 3): "0010",
    (0, 1, 2): "1111", (0, 1, 3): "1101", (0, 2, 3): "1011",
    (1, 2, 3): "0001", (0, 1, 2, 3): "1000",
}


# ---------------------------------------------------------------------------
# The 28 canonical ternary polarities (unordered row sets)
# ---------------------------------------------------------------------------

TERNARY_POLARITY_ROWSETS = {
    frozenset(rows)
    for rows in [
        ("100", "010", "001"), ("100", "010", "101"), ("100", "010", "011"),
        ("100", "010", "111"), ("100", "001", "110"), ("100", "001", "011"),
        ("100", "001", "111"), ("100", "110", "101"), ("100", "110", "011"),
        ("100", "110", "111"), ("100", "101", "011"), ("100", "101", "111"),
        ("010", "001", "110"), ("010", "001", "101"), ("010", "001", "111"),
        ("010", "110", "101"), ("010", "110", "011"), ("010", "110", "111"),
        ("010", "101", "011"), ("010", "011", "111"), ("001", "110", "101"),
        ("001", "110", "011"), ("001", "101", "011"), ("001", "101", "111"),
        ("001", "011", "111"), ("110", "101", "111"), ("110", "011", "111"),
        ("101", "011", "111"),
    ]
}
