"""Relu feedforward networks: nodes, layers, combinators and gadgets.

A node computes ``act(sum_i c_i * x_i + b)`` where ``act`` is relu or, as an
internal lowering target, the identity.  Identity nodes let a network pass
possibly-negative values through (counter dimensions in compiled models);
``lower_identities`` rewrites interior identity nodes to the relu pair
``x = relu(x) - relu(-x)``, leaving only final-layer identities, which no
pure-relu network can express.

Evaluation is available over both scalar domains.  Networks are compiled
once into sparse term lists (zero weights dropped, plain copies shortcut),
which is what makes exhaustive differential testing affordable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .arithmetic import (
    ArithMode,
    FixedPointFormat,
    FixedPointValue,
    Scalar,
    raw_add,
    raw_encode,
    raw_mul,
    raw_relu,
)
from .errors import DimensionError, FormatMismatchError

RELU = "relu"
IDENTITY = "identity"


@dataclass(frozen=True)
class FnnNode:
    weights: tuple[Fraction, ...]
    bias: Fraction
    activation: str = RELU

    def __post_init__(self):
        if self.activation not in (RELU, IDENTITY):
            raise DimensionError(f"unknown activation {self.activation!r}")


@dataclass(frozen=True)
class FnnLayer:
    nodes: tuple[FnnNode, ...]

    def __post_init__(self):
        if not self.nodes:
            raise DimensionError("a layer needs at least one node")
        width = len(self.nodes[0].weights)
        if any(len(n.weights) != width for n in self.nodes):
            raise DimensionError("all nodes of a layer must share the input dimension")

    @property
    def input_dim(self) -> int:
        return len(self.nodes[0].weights)

    @property
    def output_dim(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class Fnn:
    layers: tuple[FnnLayer, ...]

    def __post_init__(self):
        if not self.layers:
            raise DimensionError("a network needs at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.output_dim != b.input_dim:
                raise DimensionError(
                    f"layer dimensions do not chain: {a.output_dim} -> {b.input_dim}"
                )

    @property
    def input_dim(self) -> int:
        return self.layers[0].input_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].output_dim

    @property
    def size(self) -> int:
        return sum(layer.output_dim for layer in self.layers)

    # Sparse programs: each node becomes ("pass", src) for a bare copy or
    # (relu?, bias, ((src, weight), ...)) with zero weights dropped.
    @cached_property
    def _program(self):
        prog = []
        for layer in self.layers:
            nodes = []
            for node in layer.nodes:
                terms = tuple(
                    (i, w) for i, w in enumerate(node.weights) if w != 0
                )
                if (
                    node.activation == IDENTITY
                    and node.bias == 0
                    and len(terms) == 1
                    and terms[0][1] == 1
                ):
                    nodes.append(("pass", terms[0][0]))
                else:
                    nodes.append((node.activation == RELU, node.bias, terms))
            prog.append(tuple(nodes))
        return tuple(prog)

    @cached_property
    def _fixed_programs(self):
        return {}

    def _program_for(self, fmt: FixedPointFormat):
        """The sparse program with weights/biases pre-encoded in ``fmt``."""
        prog = self._fixed_programs.get(fmt)
        if prog is None:
            prog = tuple(
                tuple(
                    node
                    if node[0] == "pass"
                    else (
                        node[0],
                        raw_encode(node[1], fmt),
                        tuple((i, raw_encode(w, fmt)) for i, w in node[2]),
                    )
                    for node in layer
                )
                for layer in self._program
            )
            self._fixed_programs[fmt] = prog
        return prog


def eval_fractions(net: Fnn, values: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Exact-mode evaluation on a tuple of rationals."""
    current = values
    for layer in net._program:
        out = []
        for node in layer:
            if node[0] == "pass":
                out.append(current[node[1]])
                continue
            is_relu, bias, terms = node
            acc = bias
            for i, w in terms:
                acc += w * current[i]
            if is_relu and acc < 0:
                acc = Fraction(0)
            out.append(acc)
        current = out
    return tuple(current)


def eval_raws(net: Fnn, raws: Sequence[int], fmt: FixedPointFormat) -> tuple[int, ...]:
    """Fixed-mode evaluation on raw mantissas; every partial sum, product and
    node output lives in ``fmt`` (saturating, truncating)."""
    current = raws
    for layer in net._program_for(fmt):
        out = []
        for node in layer:
            if node[0] == "pass":
                out.append(current[node[1]])
                continue
            is_relu, bias, terms = node
            acc = bias
            for i, w in terms:
                acc = raw_add(acc, raw_mul(w, current[i], fmt), fmt)
            if is_relu:
                acc = raw_relu(acc)
            out.append(acc)
        current = out
    return tuple(current)


def fnn_eval(net: Fnn, inputs: Sequence[Scalar], mode: ArithMode) -> list[Scalar]:
    """Evaluate ``net`` on an input vector, entirely within ``mode``."""
    if len(inputs) != net.input_dim:
        raise DimensionError(f"expected {net.input_dim} inputs, got {len(inputs)}")
    if mode.is_exact:
        vals = tuple(Fraction(x) for x in inputs)
        return list(eval_fractions(net, vals))
    fmt = mode.fmt
    raws = []
    for x in inputs:
        if isinstance(x, FixedPointValue):
            if x.fmt != fmt:
                raise FormatMismatchError(f"input format {x.fmt} differs from mode {fmt}")
            raws.append(x.raw)
        else:
            raws.append(raw_encode(Fraction(x), fmt))
    return [FixedPointValue(r, fmt) for r in eval_raws(net, raws, fmt)]


# ---------------------------------------------------------------------------
# Combinators

def compose(n1: Fnn, n2: Fnn) -> Fnn:
    """The network computing n1(n2(x))."""
    if n2.output_dim != n1.input_dim:
        raise DimensionError(
            f"cannot compose: inner output {n2.output_dim} != outer input {n1.input_dim}"
        )
    return Fnn(n2.layers + n1.layers)


def _identity_layer(dim: int) -> FnnLayer:
    return FnnLayer(
        tuple(
            FnnNode(tuple(Fraction(int(i == j)) for j in range(dim)), Fraction(0), IDENTITY)
            for i in range(dim)
        )
    )


def _pad_depth(net: Fnn, depth: int) -> Fnn:
    layers = list(net.layers)
    while len(layers) < depth:
        layers.append(_identity_layer(layers[-1].output_dim))
    return Fnn(tuple(layers))


def concat(n1: Fnn, n2: Fnn) -> Fnn:
    """The network computing (n1(x1), n2(x2)) on disjoint input slices."""
    depth = max(len(n1.layers), len(n2.layers))
    a, b = _pad_depth(n1, depth), _pad_depth(n2, depth)
    layers = []
    for la, lb in zip(a.layers, b.layers):
        za, zb = la.input_dim, lb.input_dim
        nodes = [
            FnnNode(n.weights + (Fraction(0),) * zb, n.bias, n.activation) for n in la.nodes
        ]
        nodes += [
            FnnNode((Fraction(0),) * za + n.weights, n.bias, n.activation) for n in lb.nodes
        ]
        layers.append(FnnLayer(tuple(nodes)))
    return Fnn(tuple(layers))


def concat_all(nets: Iterable[Fnn]) -> Fnn:
    nets = list(nets)
    result = nets[0]
    for net in nets[1:]:
        result = concat(result, net)
    return result


def lower_identities(net: Fnn) -> Fnn:
    """Rewrite interior identity nodes to relu pairs; final-layer identities
    stay (a relu output node cannot reproduce a negative value)."""
    layers = []
    # maps old node index -> (positive part index, negative part index or None)
    mapping = [(i, None) for i in range(net.input_dim)]
    for li, layer in enumerate(net.layers):
        last = li == len(net.layers) - 1
        nodes = []
        new_mapping = []
        for node in layer.nodes:
            expanded = _expand_weights(node.weights, mapping)
            if node.activation == IDENTITY and not last:
                nodes.append(FnnNode(tuple(expanded), node.bias, RELU))
                neg = tuple(-w for w in expanded)
                nodes.append(FnnNode(neg, -node.bias, RELU))
                new_mapping.append((len(nodes) - 2, len(nodes) - 1))
            else:
                nodes.append(FnnNode(tuple(expanded), node.bias, node.activation))
                new_mapping.append((len(nodes) - 1, None))
        layers.append(FnnLayer(tuple(nodes)))
        mapping = new_mapping
    return Fnn(tuple(layers))


def _expand_weights(weights, mapping) -> list[Fraction]:
    width = max(pi for pi, _ in mapping) + 1
    width = max(width, max((ni for _, ni in mapping if ni is not None), default=-1) + 1)
    out = [Fraction(0)] * width
    for w, (pi, ni) in zip(weights, mapping):
        out[pi] += w
        if ni is not None:
            out[ni] -= w
    return out


# ---------------------------------------------------------------------------
# Construction helpers

def linear_fnn(matrix: Sequence[Sequence], bias: Sequence | None = None,
               activation: str = IDENTITY) -> Fnn:
    """One layer computing ``act(M x + b)`` row by row."""
    rows = [tuple(Fraction(w) for w in row) for row in matrix]
    if bias is None:
        bias = [Fraction(0)] * len(rows)
    nodes = tuple(
        FnnNode(row, Fraction(b), activation) for row, b in zip(rows, bias)
    )
    return Fnn((FnnLayer(nodes),))


def identity_fnn(dim: int) -> Fnn:
    return Fnn((_identity_layer(dim),))


def select_fnn(indices: Sequence[int], input_dim: int) -> Fnn:
    """Identity routing that picks the given input coordinates, in order."""
    matrix = [[int(j == i) for j in range(input_dim)] for i in indices]
    return linear_fnn(matrix)


def _relu_layer(rows: Sequence[tuple[Sequence, int | Fraction]]) -> FnnLayer:
    return FnnLayer(
        tuple(FnnNode(tuple(Fraction(w) for w in ws), Fraction(b), RELU) for ws, b in rows)
    )


# ---------------------------------------------------------------------------
# Gadgets.  Exact predicates on integer inputs; outputs are 0/1.

def gadget_eq(b: int) -> Fnn:
    """1 iff the integer input equals b: relu(relu(x-(b-1)) - 2*relu(x-b))."""
    l1 = _relu_layer([((1,), -(b - 1)), ((1,), -b)])
    l2 = _relu_layer([((1, -2), 0)])
    return Fnn((l1, l2))


def gadget_leq(b: int) -> Fnn:
    """1 iff the integer input is <= b: relu(relu(b+1-x) - relu(b-x))."""
    l1 = _relu_layer([((-1,), b + 1), ((-1,), b)])
    l2 = _relu_layer([((1, -1), 0)])
    return Fnn((l1, l2))


def gadget_and(k: int) -> Fnn:
    """1 iff all k 0/1 inputs are 1: the equality gadget over their sum."""
    if k < 1:
        raise DimensionError("conjunction needs arity >= 1")
    summing = Fnn((_relu_layer([((1,) * k, 0)]),))
    return compose(gadget_eq(k), summing)


def gadget_geq0() -> Fnn:
    """1 iff the integer input is >= 0: relu(relu(x+1) - relu(x))."""
    l1 = _relu_layer([((1,), 1), ((1,), 0)])
    l2 = _relu_layer([((1, -1), 0)])
    return Fnn((l1, l2))


def gadget_min1() -> Fnn:
    """min(1, x) for any scalar: relu(x) - relu(-x) - relu(x-1)."""
    l1 = _relu_layer([((1,), 0), ((-1,), 0), ((1,), -1)])
    combine = FnnNode((Fraction(1), Fraction(-1), Fraction(-1)), Fraction(0), IDENTITY)
    return Fnn((l1, FnnLayer((combine,))))


def gadget_implies() -> Fnn:
    """On 0/1 inputs (x, y): 0 iff x -> y holds, 1 otherwise (inverted
    polarity): 1 - min(1, 1 - x + y)."""
    # z = 1 - x + y; the three relus of min(1, z), then 1 - (z+ - z- - (z-1)+).
    l1 = _relu_layer([((-1, 1), 1), ((1, -1), -1), ((-1, 1), 0)])
    l2 = _relu_layer([((-1, 1, 1), 1)])
    return Fnn((l1, l2))


def gadget_lookup(block_sizes: Sequence[int], accepted: Iterable[tuple[int, ...]]) -> Fnn:
    """Tabulated predicate over concatenated one-hot blocks: 0 on every tuple
    in ``accepted``, 1 on every other well-formed one-hot combination."""
    sizes = tuple(block_sizes)
    offsets = [sum(sizes[:i]) for i in range(len(sizes))]
    width = sum(sizes)
    entries = sorted(set(tuple(t) for t in accepted))
    for entry in entries:
        if len(entry) != len(sizes) or any(
            not 0 <= idx < size for idx, size in zip(entry, sizes)
        ):
            raise DimensionError(f"lookup entry {entry} does not match blocks {sizes}")
    rows = []
    for entry in entries:
        weights = [0] * width
        for idx, off in zip(entry, offsets):
            weights[off + idx] = 1
        rows.append((weights, -(len(sizes) - 1)))
    if not rows:
        rows.append(([0] * width, 0))
    l1 = _relu_layer(rows)
    l2 = _relu_layer([((-1,) * len(rows), 1)])
    return Fnn((l1, l2))
