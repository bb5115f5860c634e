"""Text DSL for function files: declarations, polarities, outputs.

Grammar:
    file    := (vardecl | poldecl | outdecl)*
    vardecl := "var" ID ":" "radix" INT "encode" "(" IDLIST ")" ";"
    poldecl := "polarity" ID "=" "[" ROW (";" ROW)* "]" ";"
    outdecl := "out" ID "=" expr ";"
    expr    := "0" | term ("^" term)*
    term    := "1" | lit ("*" lit)*
    lit     := ID "{" INTLIST "}" | ID | "!" ID

Bare and "!"-prefixed identifiers are binary shorthand for X{1} and X{0}.
Polarity rows are value-0-first bit strings ("0101" = {1,3}).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .core import (
    ContractError,
    MviExpression,
    MviVariable,
    PolarityAssignment,
    PolarityMatrix,
    ProductTerm,
    TruthSet,
    set_to_string,
)

__all__ = [
    "ParsedFile",
    "ParseError",
    "parse_function_file",
    "print_function_file",
]


class ParseError(ContractError):
    """Syntax or semantic error with source position."""

    def __init__(self, msg: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ParsedFile:
    variables: Tuple[MviVariable, ...]
    expressions: Tuple[MviExpression, ...]
    polarity: Optional[PolarityAssignment]


_TOKEN = re.compile(
    r"(?P<ws>\s+|#[^\n]*)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>\d+)"
    r"|(?P<sym>[:;,=*^!{}()\[\]])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "id" | "int" | "sym" | "eof"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[_Tok]:
    toks: List[_Tok] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup or ""
        value = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, value, line, col))
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.cur.line, self.cur.column)

    def take(self, kind: str, text: Optional[str] = None) -> _Tok:
        t = self.cur
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise self.error(f"expected {want!r}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    # ---- grammar ---------------------------------------------------------

    def file(self) -> ParsedFile:
        variables: List[MviVariable] = []
        var_map: Dict[str, MviVariable] = {}
        bit_owner: Dict[str, str] = {}
        polarities: Dict[str, PolarityMatrix] = {}
        outputs: List[Tuple[str, List[ProductTerm], _Tok]] = []
        while not self.at("eof"):
            if self.at("id", "var"):
                v = self.vardecl(var_map, bit_owner)
                variables.append(v)
                var_map[v.name] = v
            elif self.at("id", "polarity"):
                name, matrix = self.poldecl(var_map)
                if name in polarities:
                    raise self.error(f"duplicate polarity for {name!r}")
                polarities[name] = matrix
            elif self.at("id", "out"):
                outputs.append(self.outdecl(var_map, {n for n, _, _ in outputs}))
            else:
                raise self.error(
                    f"expected 'var', 'polarity' or 'out', found {self.cur.text!r}"
                )
        ctx = tuple(variables)
        exprs = tuple(
            MviExpression.of(ctx, terms, label=name) for name, terms, _ in outputs
        )
        pa = PolarityAssignment.of(polarities) if polarities else None
        return ParsedFile(ctx, exprs, pa)

    def vardecl(
        self, var_map: Dict[str, MviVariable], bit_owner: Dict[str, str]
    ) -> MviVariable:
        self.take("id", "var")
        name_tok = self.take("id")
        if name_tok.text in var_map:
            raise ParseError(
                f"duplicate variable {name_tok.text!r}",
                name_tok.line,
                name_tok.column,
            )
        self.take("sym", ":")
        self.take("id", "radix")
        radix = int(self.take("int").text)
        self.take("id", "encode")
        self.take("sym", "(")
        bits = [self.take("id").text]
        while self.at("sym", ","):
            self.take("sym", ",")
            bits.append(self.take("id").text)
        self.take("sym", ")")
        self.take("sym", ";")
        for b in bits:
            if b in bit_owner:
                raise ParseError(
                    f"encoding bit {b!r} already used by {bit_owner[b]!r}",
                    name_tok.line,
                    name_tok.column,
                )
            bit_owner[b] = name_tok.text
        try:
            return MviVariable(name_tok.text, radix, tuple(bits))
        except ContractError as exc:
            raise ParseError(str(exc), name_tok.line, name_tok.column) from exc

    def poldecl(
        self, var_map: Dict[str, MviVariable]
    ) -> Tuple[str, PolarityMatrix]:
        self.take("id", "polarity")
        name_tok = self.take("id")
        var = var_map.get(name_tok.text)
        if var is None:
            raise ParseError(
                f"undeclared variable {name_tok.text!r}",
                name_tok.line,
                name_tok.column,
            )
        self.take("sym", "=")
        self.take("sym", "[")
        rows = [self.row(var.radix)]
        while self.at("sym", ";"):
            self.take("sym", ";")
            rows.append(self.row(var.radix))
        self.take("sym", "]")
        self.take("sym", ";")
        if len(rows) != var.radix:
            raise self.error(
                f"polarity for {var.name!r} needs {var.radix} rows, got {len(rows)}"
            )
        try:
            return var.name, PolarityMatrix.from_strings(rows)
        except ContractError as exc:
            raise ParseError(str(exc), name_tok.line, name_tok.column) from exc

    def row(self, radix: int) -> str:
        tok = self.cur
        if tok.kind != "int":
            raise self.error(f"expected a polarity row, found {tok.text!r}")
        self.i += 1
        text = tok.text
        if len(text) != radix or any(c not in "01" for c in text):
            raise ParseError(
                f"polarity row must be {radix} binary digits, got {text!r}",
                tok.line,
                tok.column,
            )
        return text

    def outdecl(
        self, var_map: Dict[str, MviVariable], taken: set
    ) -> Tuple[str, List[ProductTerm], _Tok]:
        self.take("id", "out")
        name_tok = self.take("id")
        if name_tok.text in taken:
            raise ParseError(
                f"duplicate output {name_tok.text!r}",
                name_tok.line,
                name_tok.column,
            )
        self.take("sym", "=")
        terms = self.expr(var_map)
        self.take("sym", ";")
        return name_tok.text, terms, name_tok

    def expr(self, var_map: Dict[str, MviVariable]) -> List[ProductTerm]:
        if self.at("int", "0"):
            self.take("int", "0")
            return []
        terms = [self.term(var_map)]
        while self.at("sym", "^"):
            self.take("sym", "^")
            terms.append(self.term(var_map))
        return terms

    def term(self, var_map: Dict[str, MviVariable]) -> ProductTerm:
        if self.at("int", "1"):
            self.take("int", "1")
            return ProductTerm.of({})
        sets: Dict[str, TruthSet] = {}
        name, ts = self.lit(var_map)
        sets[name] = ts
        while self.at("sym", "*"):
            self.take("sym", "*")
            name, ts = self.lit(var_map)
            if name in sets:
                from .core import combine_literals

                ts = combine_literals("AND", sets[name], ts)
                if ts.is_empty:
                    raise self.error(f"contradictory literals for {name!r}")
            sets[name] = ts
        return ProductTerm.of(sets)

    def lit(self, var_map: Dict[str, MviVariable]) -> Tuple[str, TruthSet]:
        negated = False
        if self.at("sym", "!"):
            self.take("sym", "!")
            negated = True
        name_tok = self.take("id")
        var = var_map.get(name_tok.text)
        if var is None:
            raise ParseError(
                f"undeclared variable {name_tok.text!r}",
                name_tok.line,
                name_tok.column,
            )
        if negated or not self.at("sym", "{"):
            if var.radix != 2:
                raise ParseError(
                    f"bare literal needs a binary variable, {var.name!r} has "
                    f"radix {var.radix}",
                    name_tok.line,
                    name_tok.column,
                )
            value = 0 if negated else 1
            return var.name, TruthSet(1 << value, 2)
        self.take("sym", "{")
        values = [self.value(var)]
        while self.at("sym", ","):
            self.take("sym", ",")
            values.append(self.value(var))
        self.take("sym", "}")
        mask = 0
        for v in values:
            mask |= 1 << v
        return var.name, TruthSet(mask, var.radix)

    def value(self, var: MviVariable) -> int:
        tok = self.take("int")
        v = int(tok.text)
        if v >= var.radix:
            raise ParseError(
                f"value {v} out of range for {var.name!r} (radix {var.radix})",
                tok.line,
                tok.column,
            )
        return v


def parse_function_file(text: str) -> ParsedFile:
    """Parse a function file; ParseError carries line/column."""
    return _Parser(text).file()


def _print_term(term: ProductTerm) -> str:
    if term.is_constant_one:
        return "1"
    parts = []
    for name, ts in term.literals:
        values = ",".join(str(v) for v in ts.values())
        parts.append(f"{name}{{{values}}}")
    return " * ".join(parts)


def print_function_file(parsed: ParsedFile) -> str:
    """Canonical text form; parse(print(parsed)) reproduces parsed."""
    lines: List[str] = []
    for v in parsed.variables:
        bits = ",".join(v.encoding_bits)
        lines.append(f"var {v.name}: radix {v.radix} encode({bits});")
    if parsed.polarity is not None:
        for name, matrix in parsed.polarity.matrices:
            rows = ";".join(
                set_to_string(mask, matrix.radix) for mask in matrix.rows
            )
            lines.append(f"polarity {name} = [{rows}];")
    for e in parsed.expressions:
        if not e.terms:
            body = "0"
        else:
            body = " ^ ".join(_print_term(t) for t in e.terms)
        lines.append(f"out {e.label} = {body};")
    return "\n".join(lines) + "\n"
