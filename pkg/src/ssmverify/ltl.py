"""Linear temporal logic over finite traces: grammar, 1-based semantics,
brute-force satisfiability, and the small-model bound.

Core connectives are atom, !, |, &, X and U; ->, F, G, tt and ff are sugar
lowered at parse time (tt becomes ``a | !a`` over the formula's first atom,
or the atom ``p`` when the formula mentions none).  Traces are tuples of
letters, each letter a frozenset of proposition names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Union

from .errors import LtlSyntaxError, TracePositionError

Trace = tuple[frozenset, ...]


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    sub: "LtlFormula"


@dataclass(frozen=True)
class Or:
    left: "LtlFormula"
    right: "LtlFormula"


@dataclass(frozen=True)
class And:
    left: "LtlFormula"
    right: "LtlFormula"


@dataclass(frozen=True)
class Next:
    sub: "LtlFormula"


@dataclass(frozen=True)
class Until:
    left: "LtlFormula"
    right: "LtlFormula"


LtlFormula = Union[Atom, Not, Or, And, Next, Until]


def size(phi: LtlFormula) -> int:
    """Node count of the lowered formula tree."""
    if isinstance(phi, Atom):
        return 1
    if isinstance(phi, (Not, Next)):
        return 1 + size(phi.sub)
    return 1 + size(phi.left) + size(phi.right)


def atoms(phi: LtlFormula) -> frozenset:
    if isinstance(phi, Atom):
        return frozenset((phi.name,))
    if isinstance(phi, (Not, Next)):
        return atoms(phi.sub)
    return atoms(phi.left) | atoms(phi.right)


def small_model_bound(phi: LtlFormula) -> int:
    """Every satisfiable formula has a model no longer than |phi| * 2**|phi|."""
    n = size(phi)
    return n * (1 << n)


# ---------------------------------------------------------------------------
# Parsing.  Sugar nodes exist only inside the parser.

@dataclass(frozen=True)
class _Sugar:
    kind: str  # "tt" | "ff"


@dataclass(frozen=True)
class _Unary:
    op: str  # "F" | "G"
    sub: object


@dataclass(frozen=True)
class _Implies:
    left: object
    right: object


_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<op>[!&|()])|(?P<temporal>[XUFG])|(?P<word>[a-z][a-z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise LtlSyntaxError(f"unexpected character {stripped[0]!r}", pos)
        if m.lastgroup == "word":
            word = m.group("word")
            kind = word if word in ("tt", "ff") else "atom"
            tokens.append((kind, word, m.start("word")))
        elif m.lastgroup == "arrow":
            tokens.append(("->", "->", m.start("arrow")))
        else:
            val = m.group(m.lastgroup)
            tokens.append((val, val, m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise LtlSyntaxError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        ast = self.implication()
        tok = self.peek()
        if tok[0] != "eof":
            raise LtlSyntaxError(f"trailing input {tok[1]!r}", tok[2])
        return ast

    def implication(self):
        left = self.disjunction()
        if self.peek()[0] == "->":
            self.take("->")
            return _Implies(left, self.implication())
        return left

    def disjunction(self):
        node = self.conjunction()
        while self.peek()[0] == "|":
            self.take("|")
            node = Or(node, self.conjunction())
        return node

    def conjunction(self):
        node = self.until()
        while self.peek()[0] == "&":
            self.take("&")
            node = And(node, self.until())
        return node

    def until(self):
        left = self.unary()
        if self.peek()[0] == "U":
            self.take("U")
            return Until(left, self.until())
        return left

    def unary(self):
        kind, _, _ = self.peek()
        if kind == "!":
            self.take("!")
            return Not(self.unary())
        if kind == "X":
            self.take("X")
            return Next(self.unary())
        if kind in ("F", "G"):
            self.take(kind)
            return _Unary(kind, self.unary())
        return self.primary()

    def primary(self):
        kind, value, pos = self.peek()
        if kind == "atom":
            self.take("atom")
            return Atom(value)
        if kind in ("tt", "ff"):
            self.take(kind)
            return _Sugar(kind)
        if kind == "(":
            self.take("(")
            node = self.implication()
            self.take(")")
            return node
        raise LtlSyntaxError(f"expected a formula, found {value or 'end of input'!r}", pos)


def _raw_atoms(ast) -> set:
    if isinstance(ast, Atom):
        return {ast.name}
    if isinstance(ast, (Not, Next)):
        return _raw_atoms(ast.sub)
    if isinstance(ast, _Unary):
        return _raw_atoms(ast.sub)
    if isinstance(ast, (Or, And, Until, _Implies)):
        return _raw_atoms(ast.left) | _raw_atoms(ast.right)
    return set()


def _lower(ast, anchor: str) -> LtlFormula:
    if isinstance(ast, Atom):
        return ast
    if isinstance(ast, _Sugar):
        a = Atom(anchor)
        return Or(a, Not(a)) if ast.kind == "tt" else And(a, Not(a))
    if isinstance(ast, Not):
        return Not(_lower(ast.sub, anchor))
    if isinstance(ast, Next):
        return Next(_lower(ast.sub, anchor))
    if isinstance(ast, _Unary):
        sub = _lower(ast.sub, anchor)
        tt = _lower(_Sugar("tt"), anchor)
        if ast.op == "F":
            return Until(tt, sub)
        return Not(Until(tt, Not(sub)))
    if isinstance(ast, _Implies):
        return Or(Not(_lower(ast.left, anchor)), _lower(ast.right, anchor))
    if isinstance(ast, Or):
        return Or(_lower(ast.left, anchor), _lower(ast.right, anchor))
    if isinstance(ast, And):
        return And(_lower(ast.left, anchor), _lower(ast.right, anchor))
    if isinstance(ast, Until):
        return Until(_lower(ast.left, anchor), _lower(ast.right, anchor))
    raise AssertionError(f"unreachable node {ast!r}")


def parse(text: str) -> LtlFormula:
    """Parse and lower a formula; round-trips through ``pretty``."""
    ast = _Parser(text).parse()
    names = _raw_atoms(ast)
    anchor = min(names) if names else "p"
    return _lower(ast, anchor)


_PREC = {Or: 1, And: 2, Until: 3, Not: 4, Next: 4, Atom: 5}


def pretty(phi: LtlFormula) -> str:
    """Core-syntax text; ``parse(pretty(phi)) == phi``."""

    def wrap(sub: LtlFormula, limit: int) -> str:
        text = pretty(sub)
        return f"({text})" if _PREC[type(sub)] < limit else text

    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Not):
        return "!" + wrap(phi.sub, 4)
    if isinstance(phi, Next):
        return "X " + wrap(phi.sub, 4)
    if isinstance(phi, Until):
        # right-associative: parenthesise a left child that is itself an U
        left = wrap(phi.left, 4)
        return f"{left} U {wrap(phi.right, 3)}"
    if isinstance(phi, And):
        return f"{wrap(phi.left, 2)} & {wrap(phi.right, 3)}"
    return f"{wrap(phi.left, 1)} | {wrap(phi.right, 2)}"


# ---------------------------------------------------------------------------
# Semantics

def holds(phi: LtlFormula, trace: Trace, i: int) -> bool:
    """The inductive satisfaction relation at 1-based position i."""
    n = len(trace)
    if not 1 <= i <= n:
        raise TracePositionError(f"position {i} outside 1..{n}")
    if isinstance(phi, Atom):
        return phi.name in trace[i - 1]
    if isinstance(phi, Not):
        return not holds(phi.sub, trace, i)
    if isinstance(phi, And):
        return holds(phi.left, trace, i) and holds(phi.right, trace, i)
    if isinstance(phi, Or):
        return holds(phi.left, trace, i) or holds(phi.right, trace, i)
    if isinstance(phi, Next):
        return i < n and holds(phi.sub, trace, i + 1)
    # Until: some k in [i, n] satisfies the right side, left holds before it
    for k in range(i, n + 1):
        if holds(phi.right, trace, k):
            return True
        if not holds(phi.left, trace, k):
            return False
    return False


def subformulas_topo(phi: LtlFormula) -> list[LtlFormula]:
    """Distinct subformulas ordered so children precede parents (syntactic
    duplicates shared); the last entry is the formula itself."""
    seen: dict[LtlFormula, None] = {}

    def walk(node: LtlFormula):
        if node in seen:
            return
        if isinstance(node, (Not, Next)):
            walk(node.sub)
        elif not isinstance(node, Atom):
            walk(node.left)
            walk(node.right)
        seen[node] = None

    walk(phi)
    return list(seen)


def trace_labels(phi: LtlFormula, trace: Trace) -> dict[LtlFormula, list[bool]]:
    """Bottom-up truth tables: for each distinct subformula, its value at
    every position.  Agrees with ``holds`` but costs O(k * n) per trace."""
    n = len(trace)
    labels: dict[LtlFormula, list[bool]] = {}
    for sub in subformulas_topo(phi):
        if isinstance(sub, Atom):
            row = [sub.name in letter for letter in trace]
        elif isinstance(sub, Not):
            inner = labels[sub.sub]
            row = [not v for v in inner]
        elif isinstance(sub, And):
            lrow, rrow = labels[sub.left], labels[sub.right]
            row = [a and b for a, b in zip(lrow, rrow)]
        elif isinstance(sub, Or):
            lrow, rrow = labels[sub.left], labels[sub.right]
            row = [a or b for a, b in zip(lrow, rrow)]
        elif isinstance(sub, Next):
            inner = labels[sub.sub]
            row = [inner[i + 1] if i + 1 < n else False for i in range(n)]
        else:
            lrow, rrow = labels[sub.left], labels[sub.right]
            row = [False] * n
            for i in range(n - 1, -1, -1):
                nxt = row[i + 1] if i + 1 < n else False
                row[i] = rrow[i] or (lrow[i] and nxt)
        labels[sub] = row
    return labels


def models(phi: LtlFormula, trace: Trace) -> bool:
    if not trace:
        return False
    return trace_labels(phi, trace)[phi][0]


def letters(props) -> list[frozenset]:
    """All subsets of the proposition set in binary-counting order."""
    names = sorted(props)
    return [
        frozenset(name for bit, name in enumerate(names) if m >> bit & 1)
        for m in range(1 << len(names))
    ]


def enumerate_traces(props, length: int) -> Iterator[Trace]:
    """All traces of exactly this length, lexicographic in the letter order."""
    for combo in product(letters(props), repeat=length):
        yield combo


def satisfiable_bruteforce(phi: LtlFormula, max_len: int) -> Optional[Trace]:
    """First model in canonical order among traces of length 1..max_len over
    the formula's own propositions; None is a definite no-model-up-to-bound."""
    props = atoms(phi)
    for length in range(1, max_len + 1):
        for trace in enumerate_traces(props, length):
            if models(phi, trace):
                return trace
    return None
