"""Model-emitting compilers: temporal-logic formulas, two-counter machines
and 0-1 integer programs all reduce to SSM satisfiability.

Each compiler ships with an independent brute-force oracle over its source
language so compiled models can be checked differentially.  The shared
machinery lives up front: copy/masked matrices and the previous-bit layer
that smuggles one step of history through the recurrence ``h = h/4 + x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import ltl as ltl_mod
from .errors import DimensionError, InputFormatError, InvalidMachineError
from .fnn import (
    Fnn,
    FnnLayer,
    FnnNode,
    IDENTITY,
    RELU,
    compose,
    concat_all,
    gadget_and,
    gadget_eq,
    gadget_geq0,
    gadget_implies,
    gadget_leq,
    gadget_lookup,
    identity_fnn,
    linear_fnn,
    select_fnn,
)
from .ltl import LtlFormula, Atom, Not, And, Or, Next, atoms, subformulas_topo
from .ssm import (
    AffineMap,
    DiagonalAffineGate,
    Matrix,
    SsmLayer,
    SsmModel,
    TimeInvariantGate,
    Vector,
    classify_gates,
    projection_phi,
)
from .words import pair_symbol, set_symbol, symbol_pair

F0, F1 = Fraction(0), Fraction(1)


# ---------------------------------------------------------------------------
# Matrix helpers (0-indexed throughout)

def zero_matrix(d: int) -> Matrix:
    return tuple((F0,) * d for _ in range(d))


def identity_matrix(d: int) -> Matrix:
    return tuple(tuple(F1 if i == j else F0 for j in range(d)) for i in range(d))


def copy_matrix(i: int, j: int, d: int) -> Matrix:
    """C applied to x yields the vector whose j-th entry is x_i, rest zero."""
    if not (0 <= i < d and 0 <= j < d):
        raise DimensionError(f"copy indices ({i}, {j}) outside dimension {d}")
    return tuple(
        tuple(F1 if (r == j and c == i) else F0 for c in range(d)) for r in range(d)
    )


def masked_identity(i: int, j: int, d: int) -> Matrix:
    """Identity restricted to the diagonal window i..j (inclusive)."""
    if not (0 <= i < d and 0 <= j < d):
        raise DimensionError(f"mask window ({i}, {j}) outside dimension {d}")
    return tuple(
        tuple(F1 if (r == c and i <= r <= j) else F0 for c in range(d)) for r in range(d)
    )


def mat_add(*mats: Matrix) -> Matrix:
    d = len(mats[0])
    return tuple(
        tuple(sum((m[r][c] for m in mats), F0) for c in range(d)) for r in range(d)
    )


def mat_scale(c, m: Matrix) -> Matrix:
    c = Fraction(c)
    return tuple(tuple(c * w for w in row) for row in m)


def _zeros(d: int) -> Vector:
    return (F0,) * d


def _node(width: int, terms, bias=0, activation=RELU) -> FnnNode:
    weights = [F0] * width
    for idx, w in terms:
        weights[idx] += Fraction(w)
    return FnnNode(tuple(weights), Fraction(bias), activation)


# ---------------------------------------------------------------------------
# Previous-bit layer (history in the binary expansion of h = h/4 + x)

_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)
_EIGHTH = Fraction(1, 8)


def prev_decode_fnn(d: int, positions: Iterable[int]) -> Fnn:
    """Decoder for the four-interval rule: on each tracked dimension the
    recurrence value r lies in [0,1/8], [1/4,1/2], [1,9/8] or [5/4,3/2] and
    the previous bit is 1 exactly on the second and fourth interval.

    All weights are within +-2 and the pipeline is exact under any fixed
    format with at least 3 fractional bits and 6 total, so the slope-8 ramps
    of the naive piecewise-linear decoder never need to materialise.
    Untracked dimensions pass through on identity nodes.
    """
    tracked = set(positions)
    if any(not 0 <= p < d for p in tracked):
        raise DimensionError(f"tracked positions {sorted(tracked)} outside dimension {d}")
    layers = []
    slots: dict[int, tuple[int, ...]] = {j: (j,) for j in range(d)}
    width = 2 * d

    def emit(stage):
        nonlocal width, slots
        nodes: list[FnnNode] = []
        new_slots = {}
        for j in range(d):
            if j in tracked:
                new_slots[j] = stage(slots[j], nodes)
            else:
                nodes.append(_node(width, [(slots[j][0], 1)], 0, IDENTITY))
                new_slots[j] = (len(nodes) - 1,)
        layers.append(FnnLayer(tuple(nodes)))
        slots = new_slots
        width = len(nodes)

    def thresholds(s, nodes):
        (r,) = s
        base = len(nodes)
        nodes.append(_node(width, [(r, 1)], -_HALF))  # relu(r - 1/2)
        nodes.append(_node(width, [(r, 1)], -1))      # relu(r - 1)
        nodes.append(_node(width, [(r, 1)], 0))       # carry r (r >= 0)
        return (base, base + 1, base + 2)

    def integer_bit(s, nodes):
        a, b, r = s
        base = len(nodes)
        nodes.append(_node(width, [(a, 2), (b, -2)], 0))  # 1 iff the current bit is 1
        nodes.append(_node(width, [(r, 1)], 0))
        return (base, base + 1)

    def strip_current(s, nodes):
        ind, r = s
        nodes.append(_node(width, [(r, 1), (ind, -1)], -_EIGHTH))
        return (len(nodes) - 1,)

    def double(s, nodes):
        nodes.append(_node(width, [(s[0], 2)], 0))
        return (len(nodes) - 1,)

    def clamp_parts(s, nodes):
        base = len(nodes)
        nodes.append(_node(width, [(s[0], 1)], 0))
        nodes.append(_node(width, [(s[0], 1)], -1))
        return (base, base + 1)

    def clamp(s, nodes):
        e, f = s
        nodes.append(_node(width, [(e, 1), (f, -1)], 0))
        return (len(nodes) - 1,)

    emit(thresholds)
    emit(integer_bit)
    emit(strip_current)
    for _ in range(3):  # scale the 1/8-spaced remainder up to >= 1
        emit(double)
    emit(clamp_parts)
    emit(clamp)
    return Fnn(tuple(layers))


def prev_bit_layer(d: int, positions: Iterable[int]) -> SsmLayer:
    """Layer whose output on each tracked 0/1 dimension is that dimension's
    previous input (0 at the first position); passthrough elsewhere."""
    tracked = sorted(set(positions))
    gate = mat_add(*[mat_scale(_QUARTER, masked_identity(p, p, d)) for p in tracked]) \
        if tracked else zero_matrix(d)
    return SsmLayer(
        h0=_zeros(d),
        gate=TimeInvariantGate(gate),
        inc=AffineMap(identity_matrix(d), _zeros(d)),
        phi=prev_decode_fnn(d, tracked),
    )


# ---------------------------------------------------------------------------
# Pointwise maps used by the logic compiler

def relu_on_dim(d: int, i: int) -> Fnn:
    """(h, x) -> h with relu applied to coordinate i only."""
    nodes = tuple(
        _node(2 * d, [(m, 1)], 0, RELU if m == i else IDENTITY) for m in range(d)
    )
    return Fnn((FnnLayer(nodes),))


def min1_on_dim(d: int, i: int) -> Fnn:
    """(h, x) -> h with coordinate i clamped to min(1, h_i)."""
    first: list[FnnNode] = []
    slot = {}
    for m in range(d):
        if m == i:
            slot[m] = len(first)
            first.append(_node(2 * d, [(m, 1)], 0, RELU))
            first.append(_node(2 * d, [(m, -1)], 0, RELU))
            first.append(_node(2 * d, [(m, 1)], -1, RELU))
        else:
            slot[m] = len(first)
            first.append(_node(2 * d, [(m, 1)], 0, IDENTITY))
    width = len(first)
    second = []
    for m in range(d):
        if m == i:
            s = slot[m]
            second.append(_node(width, [(s, 1), (s + 1, -1), (s + 2, -1)], 0, IDENTITY))
        else:
            second.append(_node(width, [(slot[m], 1)], 0, IDENTITY))
    return Fnn((FnnLayer(tuple(first)), FnnLayer(tuple(second))))


# ---------------------------------------------------------------------------
# LTL_f -> SSM (models are checked on reversed words)

@dataclass(frozen=True)
class LtlLayout:
    """Dimension bookkeeping of a compiled formula."""

    props: tuple[str, ...]
    subformulas: tuple[LtlFormula, ...]
    dim_of: tuple[tuple[LtlFormula, int], ...]
    const_dim: int
    dimension: int

    def dim(self, sub: LtlFormula) -> int:
        return dict(self.dim_of)[sub]


def ltl_layout(phi: LtlFormula) -> LtlLayout:
    props = tuple(sorted(atoms(phi)))
    subs = tuple(subformulas_topo(phi))
    dim_of = tuple((sub, len(props) + i) for i, sub in enumerate(subs))
    return LtlLayout(
        props=props,
        subformulas=subs,
        dim_of=dim_of,
        const_dim=len(props) + len(subs),
        dimension=len(props) + len(subs) + 1,
    )


def compile_ltl(phi: LtlFormula) -> SsmModel:
    """Model over 2^P that accepts a word iff its reversal is a model of the
    formula.  One layer per subformula in dependency order (two for X); the
    compiled model is exact under the 6-bit profile."""
    layout = ltl_layout(phi)
    d = layout.dimension
    dim = dict(layout.dim_of)
    prop_dim = {p: i for i, p in enumerate(layout.props)}
    const = layout.const_dim
    eye = identity_matrix(d)
    no_gate = TimeInvariantGate(zero_matrix(d))
    zero_off = _zeros(d)

    layers: list[SsmLayer] = []
    for sub in layout.subformulas:
        i = dim[sub]
        if isinstance(sub, Atom):
            inc = mat_add(eye, copy_matrix(prop_dim[sub.name], i, d))
            layers.append(SsmLayer(_zeros(d), no_gate, AffineMap(inc, zero_off),
                                   projection_phi(d)))
        elif isinstance(sub, Not):
            inc = mat_add(eye, copy_matrix(const, i, d),
                          mat_scale(-1, copy_matrix(dim[sub.sub], i, d)))
            layers.append(SsmLayer(_zeros(d), no_gate, AffineMap(inc, zero_off),
                                   projection_phi(d)))
        elif isinstance(sub, And):
            inc = mat_add(eye, copy_matrix(dim[sub.left], i, d),
                          copy_matrix(dim[sub.right], i, d),
                          mat_scale(-1, copy_matrix(const, i, d)))
            layers.append(SsmLayer(_zeros(d), no_gate, AffineMap(inc, zero_off),
                                   relu_on_dim(d, i)))
        elif isinstance(sub, Or):
            # disjunction as min(1, left + right), the same clamp as until
            inc = mat_add(eye, copy_matrix(dim[sub.left], i, d),
                          copy_matrix(dim[sub.right], i, d))
            layers.append(SsmLayer(_zeros(d), no_gate, AffineMap(inc, zero_off),
                                   min1_on_dim(d, i)))
        elif isinstance(sub, Next):
            inc = mat_add(eye, copy_matrix(dim[sub.sub], i, d))
            layers.append(SsmLayer(_zeros(d), no_gate, AffineMap(inc, zero_off),
                                   projection_phi(d)))
            layers.append(prev_bit_layer(d, (i,)))
        else:  # Until: requires the input-dependent diagonal gate
            gate = DiagonalAffineGate(copy_matrix(dim[sub.left], i, d), zero_off)
            inc = mat_add(eye, copy_matrix(dim[sub.right], i, d))
            layers.append(SsmLayer(_zeros(d), gate, AffineMap(inc, zero_off),
                                   min1_on_dim(d, i)))

    out = compose(gadget_eq(1), select_fnn([dim[phi]], d))
    alphabet = tuple(set_symbol(l) for l in ltl_mod.letters(layout.props))
    emb = tuple(
        tuple(F1 if p in letter else F0 for p in layout.props)
        + _zeros(len(layout.subformulas)) + (F1,)
        for letter in ltl_mod.letters(layout.props)
    )
    model = SsmModel(alphabet=alphabet, emb=emb, layers=tuple(layers), out=out)
    classes = classify_gates(model)
    meta = (
        ("source", "ltl"),
        ("formula", ltl_mod.pretty(phi)),
        ("min_bits", "6"),
        ("gate_classes", _class_string(classes)),
    )
    return SsmModel(model.alphabet, model.emb, model.layers, model.out, meta)


def _class_string(classes) -> str:
    parts = []
    if classes.time_invariant:
        parts.append("time_invariant")
    if classes.diagonal:
        parts.append("diagonal")
    return ",".join(parts) if parts else "none"


# ---------------------------------------------------------------------------
# Minsky machines

ACTIONS = ("inc1", "inc2", "dec1", "dec2", "ztest1", "ztest2")
_ACTION_INDEX = {a: i for i, a in enumerate(ACTIONS)}
_COUNTER_OF = {"inc1": 0, "dec1": 0, "ztest1": 0, "inc2": 1, "dec2": 1, "ztest2": 1}


@dataclass(frozen=True)
class MinskyMachine:
    states: tuple[str, ...]
    start: str
    final: str
    transitions: frozenset

    def __post_init__(self):
        known = set(self.states)
        if len(known) != len(self.states):
            raise InvalidMachineError("duplicate state names")
        if self.start not in known or self.final not in known:
            raise InvalidMachineError("start/final state not among the states")
        outgoing: dict[str, list[tuple[str, str]]] = {}
        for q, a, q2 in self.transitions:
            if q not in known or q2 not in known:
                raise InvalidMachineError(f"transition ({q}, {a}, {q2}) uses unknown states")
            if a not in _ACTION_INDEX:
                raise InvalidMachineError(f"unknown action {a!r}")
            outgoing.setdefault(q, []).append((a, q2))
        # determinism rule: a state either halts, increments one counter, or
        # branches on exactly one counter with a dec/ztest pair
        for q, outs in outgoing.items():
            acts = sorted(a for a, _ in outs)
            if len(outs) == 1 and acts[0] in ("inc1", "inc2"):
                continue
            if len(outs) == 2 and (
                acts == ["dec1", "ztest1"] or acts == ["dec2", "ztest2"]
            ):
                continue
            raise InvalidMachineError(
                f"state {q!r} must have one inc or a dec/ztest pair on one counter"
            )

    def outgoing(self, q: str) -> list[tuple[str, str]]:
        return sorted(
            ((a, q2) for (src, a, q2) in self.transitions if src == q),
            key=lambda t: _ACTION_INDEX[t[0]],
        )


@dataclass(frozen=True)
class MinskyRun:
    """A run as the sequence of (entered state, action) pairs, the initial
    state being implicit."""

    steps: tuple[tuple[str, str], ...]

    def counters(self) -> list[tuple[int, int]]:
        c = [0, 0]
        trajectory = []
        for _, a in self.steps:
            if a.startswith("inc"):
                c[_COUNTER_OF[a]] += 1
            elif a.startswith("dec"):
                c[_COUNTER_OF[a]] -= 1
            trajectory.append((c[0], c[1]))
        return trajectory


def minsky_oracle(machine: MinskyMachine, max_steps: int) -> Optional[MinskyRun]:
    """Deterministic simulation from (q0, 0, 0); the machine structure admits
    exactly one applicable transition per configuration."""
    q, c = machine.start, [0, 0]
    steps: list[tuple[str, str]] = []
    for _ in range(max_steps + 1):
        if q == machine.final:
            return MinskyRun(tuple(steps))
        outs = machine.outgoing(q)
        if not outs:
            return None
        if len(outs) == 1:
            a, q2 = outs[0]
        else:
            (dec_a, dec_q), (zt_a, zt_q) = outs
            i = _COUNTER_OF[dec_a]
            a, q2 = (dec_a, dec_q) if c[i] > 0 else (zt_a, zt_q)
        if a.startswith("inc"):
            c[_COUNTER_OF[a]] += 1
        elif a.startswith("dec"):
            c[_COUNTER_OF[a]] -= 1
        steps.append((q2, a))
        q = q2
    return None


def run_encode(run: MinskyRun) -> list[str]:
    """The word spelling a run: one (state, action) letter per step."""
    return [pair_symbol(q, a) for q, a in run.steps]


def minsky_alphabet(machine: MinskyMachine) -> list[tuple[str, str]]:
    """(target state, action) pairs occurring in the transition relation, in
    canonical (state order, action order)."""
    state_idx = {q: i for i, q in enumerate(machine.states)}
    pairs = {(q2, a) for (_, a, q2) in machine.transitions}
    return sorted(pairs, key=lambda p: (state_idx[p[0]], _ACTION_INDEX[p[1]]))


def validate_word(machine: MinskyMachine, symbols: Sequence[str]) -> bool:
    """True iff the word spells a valid run from the start state that ends in
    the final state (the independent judge for the compiled model)."""
    q, c = machine.start, [0, 0]
    for symbol in symbols:
        q2, a = symbol_pair(symbol)
        if (q, a, q2) not in machine.transitions:
            return False
        i = _COUNTER_OF.get(a)
        if a.startswith("inc"):
            c[i] += 1
        elif a.startswith("dec"):
            if c[i] <= 0:
                return False
            c[i] -= 1
        else:
            if c[i] != 0:
                return False
        q = q2
    return q == machine.final and len(symbols) > 0


def parse_minsky(text: str) -> MinskyMachine:
    """Line format: `start: q` / `final: q` headers, then `state action state`
    triples; `#` starts a comment.  States are ordered by first appearance."""
    start = final = None
    states: list[str] = []
    seen: set[str] = set()

    def note(q: str):
        if q not in seen:
            seen.add(q)
            states.append(q)

    transitions = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("start:"):
            start = line.split(":", 1)[1].strip()
            note(start)
        elif line.startswith("final:"):
            final = line.split(":", 1)[1].strip()
            note(final)
        else:
            parts = line.split()
            if len(parts) != 3:
                raise InputFormatError(f"line {lineno}: expected `state action state`")
            q, a, q2 = parts
            note(q)
            note(q2)
            transitions.append((q, a, q2))
    if start is None or final is None:
        raise InputFormatError("missing start:/final: header")
    try:
        return MinskyMachine(tuple(states), start, final, frozenset(transitions))
    except InvalidMachineError as exc:
        raise InputFormatError(str(exc)) from None


def minsky_min_bits(max_len: int) -> int:
    """Fixed-point width sufficient for words up to max_len: three fractional
    bits for the state history plus integer bits covering the violation sum,
    which grows at most 5 per position."""
    return 3 + 1 + max(2, (5 * max_len + 1).bit_length())


def compile_minsky(machine: MinskyMachine, word_bound: int = 64) -> SsmModel:
    """Model accepting exactly the words that spell accepting runs.

    Dimension layout: current-state block, previous-state block (recovered
    from the quarter-shift history), six action flags, two counters, one
    violation accumulator.  Gates are constant diagonal masks, so the model
    is both time-invariant and diagonal.
    """
    n = len(machine.states)
    d = 2 * n + 9
    state_idx = {q: i for i, q in enumerate(machine.states)}
    act_base = 2 * n
    c_dims = (2 * n + 6, 2 * n + 7)
    chk = 2 * n + 8

    pairs = minsky_alphabet(machine)
    alphabet = tuple(pair_symbol(q, a) for q, a in pairs)
    emb = []
    for q, a in pairs:
        vec = [F0] * d
        vec[state_idx[q]] = F1
        vec[n + state_idx[q]] = F1
        vec[act_base + _ACTION_INDEX[a]] = F1
        i = _COUNTER_OF[a]
        if a.startswith("inc"):
            vec[c_dims[i]] = F1
        elif a.startswith("dec"):
            vec[c_dims[i]] = -F1
        emb.append(tuple(vec))

    eye = identity_matrix(d)
    zero_off = _zeros(d)

    # layer 1: accumulate the counters, pass everything else through
    l1 = SsmLayer(
        h0=_zeros(d),
        gate=TimeInvariantGate(masked_identity(c_dims[0], c_dims[1], d)),
        inc=AffineMap(eye, zero_off),
        phi=projection_phi(d),
    )

    # layer 2: quarter-shift history on the second state block, seeded with
    # the start state, then decode + transition/counter checks in phi
    h0_2 = [F0] * d
    h0_2[n + state_idx[machine.start]] = F1
    l2_gate = TimeInvariantGate(mat_scale(_QUARTER, masked_identity(n, 2 * n - 1, d)))
    decode = prev_decode_fnn(d, range(n, 2 * n))

    dup_rows = [[F0] * d for _ in range(d)]
    for m in range(d):
        dup_rows[m][m] = F1
    trans_inputs = list(range(n, 2 * n)) + list(range(0, n)) + list(range(act_base, act_base + 6))
    for src in trans_inputs:
        row = [F0] * d
        row[src] = F1
        dup_rows.append(row)
    valid_cases = (
        ("dec1", c_dims[0], "geq0"),
        ("dec2", c_dims[1], "geq0"),
        ("ztest1", c_dims[0], "eq0"),
        ("ztest2", c_dims[1], "eq0"),
    )
    for action, c_dim, _ in valid_cases:
        for src in (act_base + _ACTION_INDEX[action], c_dim):
            row = [F0] * d
            row[src] = F1
            dup_rows.append(row)
    dup = linear_fnn(dup_rows)

    accepted = {
        (state_idx[q], state_idx[q2], _ACTION_INDEX[a])
        for (q, a, q2) in machine.transitions
    }
    trans = gadget_lookup((n, n, 6), accepted)
    validators = [
        compose(
            gadget_implies(),
            concat_all([identity_fnn(1), gadget_geq0() if kind == "geq0" else gadget_eq(0)]),
        )
        for _, _, kind in valid_cases
    ]
    checks = concat_all([identity_fnn(d), trans] + validators)

    assemble_rows = []
    for m in range(d):
        row = [F0] * (d + 5)
        row[m] = F1
        if m == chk:
            for extra in range(d, d + 5):
                row[extra] = F1
        assemble_rows.append(row)
    assemble = linear_fnn(assemble_rows)

    phi2 = compose(assemble, compose(checks, compose(dup, decode)))
    l2 = SsmLayer(tuple(h0_2), l2_gate, AffineMap(eye, zero_off), phi2)

    # layer 3: accumulate the violation dimension
    l3 = SsmLayer(
        h0=_zeros(d),
        gate=TimeInvariantGate(masked_identity(chk, chk, d)),
        inc=AffineMap(eye, zero_off),
        phi=projection_phi(d),
    )

    out = compose(
        gadget_and(2),
        compose(
            concat_all([gadget_eq(0), gadget_eq(1)]),
            select_fnn([chk, state_idx[machine.final]], d),
        ),
    )
    model = SsmModel(alphabet=alphabet, emb=tuple(emb), layers=(l1, l2, l3), out=out)
    classes = classify_gates(model)
    meta = (
        ("source", "minsky"),
        ("min_bits", str(minsky_min_bits(word_bound))),
        ("min_bits_word_bound", str(word_bound)),
        ("gate_classes", _class_string(classes)),
    )
    return SsmModel(model.alphabet, model.emb, model.layers, model.out, meta)


# ---------------------------------------------------------------------------
# 0-1 integer programming

@dataclass(frozen=True)
class IlpInstance:
    matrix: tuple[tuple[int, ...], ...]
    target: tuple[int, ...]

    def __post_init__(self):
        d = len(self.matrix)
        if d == 0:
            raise DimensionError("empty instance")
        if any(len(row) != d for row in self.matrix) or len(self.target) != d:
            raise DimensionError("matrix must be square and match the target length")
        if any(w < 0 for row in self.matrix for w in row) or any(b < 0 for b in self.target):
            raise DimensionError("entries must be natural numbers")

    @property
    def dim(self) -> int:
        return len(self.matrix)


def ilp_oracle(inst: IlpInstance) -> Optional[tuple[int, ...]]:
    """Exhaustive search over {0,1}^d in binary-counting order."""
    d = inst.dim
    for m in range(1 << d):
        v = tuple((m >> i) & 1 for i in range(d))
        if all(
            sum(inst.matrix[r][c] * v[c] for c in range(d)) == inst.target[r]
            for r in range(d)
        ):
            return v
    return None


def ilp_alphabet(d: int) -> tuple[str, ...]:
    return tuple(str(i + 1) for i in range(d))


def compile_ilp(inst: IlpInstance) -> SsmModel:
    """Single-layer model over {1..d}: the first half of the state accumulates
    A v, the second half counts index occurrences; the output demands the
    target and occurrence counts of at most one."""
    d = inst.dim
    dd = 2 * d
    emb = tuple(
        tuple(F1 if j == i else F0 for j in range(d)) + _zeros(d) for i in range(d)
    )
    inc_rows = []
    for r in range(d):
        inc_rows.append(tuple(Fraction(inst.matrix[r][c]) for c in range(d)) + _zeros(d))
    for r in range(d):
        inc_rows.append(tuple(F1 if c == r else F0 for c in range(d)) + _zeros(d))
    layer = SsmLayer(
        h0=_zeros(dd),
        gate=TimeInvariantGate(identity_matrix(dd)),
        inc=AffineMap(tuple(inc_rows), _zeros(dd)),
        phi=projection_phi(dd),
    )
    out = compose(
        gadget_and(dd),
        concat_all([gadget_eq(b) for b in inst.target] + [gadget_leq(1)] * d),
    )
    model = SsmModel(alphabet=ilp_alphabet(d), emb=emb, layers=(layer,), out=out)
    biggest = max(max(sum(row) for row in inst.matrix), max(inst.target), d, 1)
    classes = classify_gates(model)
    meta = (
        ("source", "ilp"),
        ("min_bits", str(biggest.bit_length() + 2)),
        ("gate_classes", _class_string(classes)),
    )
    return SsmModel(model.alphabet, model.emb, model.layers, model.out, meta)


def ilp_decode_word(inst: IlpInstance, word: Sequence[str]) -> Optional[tuple[int, ...]]:
    """The 0/1 vector a duplicate-free word encodes, None on duplicates."""
    v = [0] * inst.dim
    for symbol in word:
        try:
            i = int(symbol) - 1
        except ValueError:
            return None
        if not 0 <= i < inst.dim or v[i]:
            return None
        v[i] = 1
    return tuple(v)


_INT_LINE = re.compile(r"-?\d+")


def parse_ilp(text: str) -> IlpInstance:
    """Decimal file: dimension, then d matrix rows, then the target row."""
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines:
        raise InputFormatError("empty instance file")
    try:
        d = int(lines[0])
    except ValueError:
        raise InputFormatError("first line must be the dimension") from None
    if len(lines) != d + 2:
        raise InputFormatError(f"expected {d} matrix rows plus a target row")
    rows = []
    for line in lines[1 : d + 1]:
        row = tuple(int(t) for t in _INT_LINE.findall(line))
        if len(row) != d:
            raise InputFormatError(f"matrix row {line!r} must have {d} entries")
        rows.append(row)
    target = tuple(int(t) for t in _INT_LINE.findall(lines[d + 1]))
    if len(target) != d:
        raise InputFormatError("target row length mismatch")
    try:
        return IlpInstance(tuple(rows), target)
    except DimensionError as exc:
        raise InputFormatError(str(exc)) from None
