"""State space models: layers with a linear recurrence, stacked, and the
symbol-by-symbol evaluator.

A layer computes ``h_t = gate(x_t) . h_{t-1} + inc(x_t)`` followed by the
pointwise map ``z_t = phi(h_t, x_t)``; layer outputs feed the next layer and
the final output network maps the last layer's ``z`` to a scalar.  A word is
accepted iff that scalar equals exactly 1 in the evaluation domain.

Two evaluation orders are implemented: the streaming ``step``/``evaluate``
path compiles each model into sparse term lists (cached per arithmetic
mode), while ``evaluate_layerwise`` materialises whole sequences layer by
layer; both apply per-dimension terms in the same canonical order (gate
terms, inc offset, inc terms, each by ascending column) so fixed-mode
saturation behaves identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

from .arithmetic import (
    ArithMode,
    FixedPointFormat,
    FixedPointValue,
    Scalar,
    raw_add,
    raw_encode,
    raw_mul,
)
from .errors import DimensionError, EmptyWordError, UnknownSymbolError
from .fnn import Fnn, eval_fractions, eval_raws, select_fnn

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]


def as_vector(values: Sequence) -> Vector:
    return tuple(Fraction(v) for v in values)


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(as_vector(row) for row in rows)


@dataclass(frozen=True)
class TimeInvariantGate:
    """gate(x) = A for a constant square matrix A."""

    matrix: Matrix

    def __post_init__(self):
        d = len(self.matrix)
        if any(len(row) != d for row in self.matrix):
            raise DimensionError("gate matrix must be square")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def is_diagonal(self) -> bool:
        return all(
            w == 0 for i, row in enumerate(self.matrix) for j, w in enumerate(row) if i != j
        )


@dataclass(frozen=True)
class DiagonalAffineGate:
    """gate(x) = diag(G x + g0): diagonal, but input-dependent."""

    matrix: Matrix
    offset: Vector

    def __post_init__(self):
        d = len(self.matrix)
        if any(len(row) != d for row in self.matrix) or len(self.offset) != d:
            raise DimensionError("diagonal gate needs a square matrix and a matching offset")

    @property
    def dim(self) -> int:
        return len(self.matrix)


GateSpec = Union[TimeInvariantGate, DiagonalAffineGate]


@dataclass(frozen=True)
class AffineMap:
    """inc(x) = B x + c."""

    matrix: Matrix
    offset: Vector

    def __post_init__(self):
        d = len(self.matrix)
        if any(len(row) != d for row in self.matrix) or len(self.offset) != d:
            raise DimensionError("affine map needs a square matrix and a matching offset")

    @property
    def dim(self) -> int:
        return len(self.matrix)


def projection_phi(d: int) -> Fnn:
    """The default pointwise map: (h, x) -> h."""
    return select_fnn(range(d), 2 * d)


@dataclass(frozen=True)
class SsmLayer:
    h0: Vector
    gate: GateSpec
    inc: AffineMap
    phi: Fnn

    def __post_init__(self):
        d = len(self.h0)
        if self.gate.dim != d or self.inc.dim != d:
            raise DimensionError("layer gate/inc dimensions disagree with h0")
        if self.phi.input_dim != 2 * d or self.phi.output_dim != d:
            raise DimensionError(
                f"phi must map 2d -> d, got {self.phi.input_dim} -> {self.phi.output_dim}"
            )

    @property
    def dim(self) -> int:
        return len(self.h0)


@dataclass(frozen=True)
class SsmModel:
    """(emb, l_1 .. l_L, out) with the embedding table aligned to the ordered
    alphabet; the alphabet order is the canonical symbol order everywhere."""

    alphabet: tuple[str, ...]
    emb: tuple[Vector, ...]
    layers: tuple[SsmLayer, ...]
    out: Fnn
    metadata: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.alphabet:
            raise DimensionError("alphabet must be non-empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise DimensionError("alphabet symbols must be unique")
        if len(self.emb) != len(self.alphabet):
            raise DimensionError("one embedding vector per symbol required")
        d = self.dim
        if any(len(v) != d for v in self.emb):
            raise DimensionError("embedding vectors must share the model dimension")
        for layer in self.layers:
            if layer.dim != d:
                raise DimensionError("all layers must share the model dimension")
        if self.out.input_dim != d or self.out.output_dim != 1:
            raise DimensionError(
                f"out must map d -> 1, got {self.out.input_dim} -> {self.out.output_dim}"
            )

    @property
    def dim(self) -> int:
        return len(self.emb[0])

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        return len(self.alphabet) + self.num_layers + self.dim

    @property
    def metadata_dict(self) -> dict[str, str]:
        return dict(self.metadata)

    @cached_property
    def symbol_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.alphabet)}

    @cached_property
    def _steppers(self) -> dict:
        return {}


@dataclass(frozen=True)
class StreamState:
    """Per-layer hidden vectors, sufficient to continue symbol by symbol.

    Entries are Fractions in exact mode and raw mantissas in fixed mode;
    states compare and hash bit-exactly, which is what reachability search
    relies on.
    """

    hidden: tuple[tuple, ...]
    mode: ArithMode

    def hidden_values(self) -> tuple[tuple[Fraction, ...], ...]:
        if self.mode.is_exact:
            return self.hidden
        scale = self.mode.fmt.scale
        return tuple(tuple(Fraction(r, scale) for r in h) for h in self.hidden)


# ---------------------------------------------------------------------------
# Streaming evaluation

def _sparse_rows(matrix: Matrix):
    return tuple(
        tuple((j, w) for j, w in enumerate(row) if w != 0) for row in matrix
    )


def _encode_rows(rows, fmt: FixedPointFormat):
    return tuple(
        tuple((j, raw_encode(w, fmt)) for j, w in row) for row in rows
    )


class _Stepper:
    """Model compiled for one arithmetic mode: sparse gate/inc rows plus the
    phi/out programs, evaluated on plain Fractions or raw ints."""

    def __init__(self, model: SsmModel, mode: ArithMode):
        self.model = model
        self.mode = mode
        self.fmt = mode.fmt
        exact = mode.is_exact
        self.zero = Fraction(0) if exact else 0
        self.one = Fraction(1) if exact else self.fmt.scale

        def enc_vec(vec):
            if exact:
                return tuple(vec)
            return tuple(raw_encode(v, self.fmt) for v in vec)

        def enc_rows(rows):
            return rows if exact else _encode_rows(rows, self.fmt)

        self.emb = {s: enc_vec(v) for s, v in zip(model.alphabet, model.emb)}
        self.h0 = tuple(enc_vec(layer.h0) for layer in model.layers)
        self.layers = []
        for layer in model.layers:
            if isinstance(layer.gate, TimeInvariantGate):
                gate = ("ti", enc_rows(_sparse_rows(layer.gate.matrix)))
            else:
                gate = (
                    "da",
                    enc_vec(layer.gate.offset),
                    enc_rows(_sparse_rows(layer.gate.matrix)),
                )
            inc = (enc_vec(layer.inc.offset), enc_rows(_sparse_rows(layer.inc.matrix)))
            self.layers.append((gate, inc, layer.phi, layer.dim))

    def initial_hidden(self) -> tuple[tuple, ...]:
        return self.h0

    def step(self, hidden, symbol):
        x = self.emb.get(symbol)
        if x is None:
            raise UnknownSymbolError(f"symbol {symbol!r} not in model alphabet")
        if self.mode.is_exact:
            return self._step_exact(hidden, x)
        return self._step_fixed(hidden, x)

    def _step_exact(self, hidden, x):
        new_hidden = []
        for (gate, inc, phi, d), h in zip(self.layers, hidden):
            c, rows = inc
            hp = []
            if gate[0] == "ti":
                for j in range(d):
                    acc = Fraction(0)
                    for k, w in gate[1][j]:
                        acc += w * h[k]
                    acc += c[j]
                    for k, w in rows[j]:
                        acc += w * x[k]
                    hp.append(acc)
            else:
                g0, grows = gate[1], gate[2]
                for j in range(d):
                    g = g0[j]
                    for k, w in grows[j]:
                        g += w * x[k]
                    acc = g * h[j]
                    acc += c[j]
                    for k, w in rows[j]:
                        acc += w * x[k]
                    hp.append(acc)
            new_hidden.append(tuple(hp))
            x = eval_fractions(phi, tuple(hp) + tuple(x))
        y = eval_fractions(self.model.out, x)[0]
        return tuple(new_hidden), y

    def _step_fixed(self, hidden, x):
        fmt = self.fmt
        new_hidden = []
        for (gate, inc, phi, d), h in zip(self.layers, hidden):
            c, rows = inc
            hp = []
            if gate[0] == "ti":
                for j in range(d):
                    acc = 0
                    for k, w in gate[1][j]:
                        acc = raw_add(acc, raw_mul(w, h[k], fmt), fmt)
                    acc = raw_add(acc, c[j], fmt)
                    for k, w in rows[j]:
                        acc = raw_add(acc, raw_mul(w, x[k], fmt), fmt)
                    hp.append(acc)
            else:
                g0, grows = gate[1], gate[2]
                for j in range(d):
                    g = g0[j]
                    for k, w in grows[j]:
                        g = raw_add(g, raw_mul(w, x[k], fmt), fmt)
                    acc = raw_mul(g, h[j], fmt)
                    acc = raw_add(acc, c[j], fmt)
                    for k, w in rows[j]:
                        acc = raw_add(acc, raw_mul(w, x[k], fmt), fmt)
                    hp.append(acc)
            new_hidden.append(tuple(hp))
            x = eval_raws(phi, tuple(hp) + tuple(x), fmt)
        y = eval_raws(self.model.out, x, fmt)[0]
        return tuple(new_hidden), y


def _stepper(model: SsmModel, mode: ArithMode) -> _Stepper:
    stepper = model._steppers.get(mode)
    if stepper is None:
        stepper = _Stepper(model, mode)
        model._steppers[mode] = stepper
    return stepper


def initial_state(model: SsmModel, mode: ArithMode) -> StreamState:
    return StreamState(_stepper(model, mode).initial_hidden(), mode)


def step(model: SsmModel, state: StreamState, symbol: str) -> tuple[StreamState, Scalar]:
    """Consume one symbol; returns the successor state and this position's
    output scalar (the value `accepts` compares against 1)."""
    stepper = _stepper(model, state.mode)
    hidden, y = stepper.step(state.hidden, symbol)
    out = y if state.mode.is_exact else FixedPointValue(y, state.mode.fmt)
    return StreamState(hidden, state.mode), out


def evaluate(model: SsmModel, word: Sequence[str], mode: ArithMode) -> Scalar:
    """Fold of step over a non-empty word; returns the final output."""
    if len(word) == 0:
        raise EmptyWordError("evaluation of the empty word is undefined")
    stepper = _stepper(model, mode)
    hidden = stepper.initial_hidden()
    for symbol in word:
        hidden, y = stepper.step(hidden, symbol)
    if mode.is_exact:
        return y
    return FixedPointValue(y, mode.fmt)


def accepts(model: SsmModel, word: Sequence[str], mode: ArithMode) -> bool:
    """Exact equality with 1 in the evaluation domain; no tolerance band."""
    if len(word) == 0:
        raise EmptyWordError("acceptance of the empty word is undefined")
    stepper = _stepper(model, mode)
    hidden = stepper.initial_hidden()
    for symbol in word:
        hidden, y = stepper.step(hidden, symbol)
    return y == stepper.one


# ---------------------------------------------------------------------------
# Layer-major (batch) evaluation: the independent second order of computation.

def _mat_terms_exact(gate, inc, h, x, d):
    out = []
    for j in range(d):
        if isinstance(gate, TimeInvariantGate):
            acc = Fraction(0)
            for k in range(d):
                w = gate.matrix[j][k]
                if w:
                    acc += w * h[k]
        else:
            g = gate.offset[j]
            for k in range(d):
                w = gate.matrix[j][k]
                if w:
                    g += w * x[k]
            acc = g * h[j]
        acc += inc.offset[j]
        for k in range(d):
            w = inc.matrix[j][k]
            if w:
                acc += w * x[k]
        out.append(acc)
    return tuple(out)


def _mat_terms_fixed(gate, inc, h, x, d, fmt):
    out = []
    enc = lambda v: raw_encode(v, fmt)
    for j in range(d):
        if isinstance(gate, TimeInvariantGate):
            acc = 0
            for k in range(d):
                w = gate.matrix[j][k]
                if w:
                    acc = raw_add(acc, raw_mul(enc(w), h[k], fmt), fmt)
        else:
            g = enc(gate.offset[j])
            for k in range(d):
                w = gate.matrix[j][k]
                if w:
                    g = raw_add(g, raw_mul(enc(w), x[k], fmt), fmt)
            acc = raw_mul(g, h[j], fmt)
        acc = raw_add(acc, enc(inc.offset[j]), fmt)
        for k in range(d):
            w = inc.matrix[j][k]
            if w:
                acc = raw_add(acc, raw_mul(enc(w), x[k], fmt), fmt)
        out.append(acc)
    return tuple(out)


def run_layer(layer: SsmLayer, xs: Sequence[Sequence], mode: ArithMode) -> list[tuple]:
    """Apply one SSM layer to a whole input sequence, returning the z
    sequence.  Inputs/outputs are Fractions (exact) or raw ints (fixed)."""
    d = layer.dim
    if mode.is_exact:
        h = tuple(layer.h0)
        zs = []
        for x in xs:
            h = _mat_terms_exact(layer.gate, layer.inc, h, x, d)
            zs.append(eval_fractions(layer.phi, h + tuple(x)))
        return zs
    fmt = mode.fmt
    h = tuple(raw_encode(v, fmt) for v in layer.h0)
    zs = []
    for x in xs:
        h = _mat_terms_fixed(layer.gate, layer.inc, h, x, d, fmt)
        zs.append(eval_raws(layer.phi, h + tuple(x), fmt))
    return zs


def evaluate_layerwise(model: SsmModel, word: Sequence[str], mode: ArithMode) -> Scalar:
    """Whole-sequence evaluation, one layer at a time; must agree with the
    streaming order on every model and word."""
    if len(word) == 0:
        raise EmptyWordError("evaluation of the empty word is undefined")
    idx = model.symbol_index
    for symbol in word:
        if symbol not in idx:
            raise UnknownSymbolError(f"symbol {symbol!r} not in model alphabet")
    if mode.is_exact:
        xs = [tuple(model.emb[idx[s]]) for s in word]
    else:
        fmt = mode.fmt
        xs = [tuple(raw_encode(v, fmt) for v in model.emb[idx[s]]) for s in word]
    for layer in model.layers:
        xs = run_layer(layer, xs, mode)
    if mode.is_exact:
        return eval_fractions(model.out, xs[-1])[0]
    return FixedPointValue(eval_raws(model.out, xs[-1], mode.fmt)[0], mode.fmt)


# ---------------------------------------------------------------------------
# Model metadata operations

def state_count_bound(model: SsmModel, bits: int) -> int:
    """The pigeonhole bound 2**(2*L*d*b) on shortest accepted words under
    b-bit fixed-width arithmetic."""
    if bits < 0:
        raise DimensionError("bit-width must be >= 0")
    return 1 << (2 * model.num_layers * model.dim * bits)


@dataclass(frozen=True)
class GateClasses:
    time_invariant: bool
    diagonal: bool


def classify_gates(model: SsmModel) -> GateClasses:
    """Membership in the time-invariant and diagonal model classes."""
    ti = all(isinstance(l.gate, TimeInvariantGate) for l in model.layers)
    diag = all(
        isinstance(l.gate, DiagonalAffineGate)
        or (isinstance(l.gate, TimeInvariantGate) and l.gate.is_diagonal())
        for l in model.layers
    )
    return GateClasses(time_invariant=ti, diagonal=diag)


def quantization_report(model: SsmModel, fmt: FixedPointFormat) -> list[tuple[str, Fraction]]:
    """Model constants that are not exactly representable in ``fmt`` (they
    will be truncated/saturated when evaluating in that format)."""
    issues: list[tuple[str, Fraction]] = []

    def check(path: str, value: Fraction):
        if Fraction(raw_encode(value, fmt), fmt.scale) != value:
            issues.append((path, value))

    def check_fnn(path: str, net: Fnn):
        for li, layer in enumerate(net.layers):
            for ni, node in enumerate(layer.nodes):
                check(f"{path}.layer{li}.node{ni}.bias", node.bias)
                for wi, w in enumerate(node.weights):
                    check(f"{path}.layer{li}.node{ni}.w{wi}", w)

    for s, vec in zip(model.alphabet, model.emb):
        for i, v in enumerate(vec):
            check(f"emb[{s}][{i}]", v)
    for li, layer in enumerate(model.layers):
        for i, v in enumerate(layer.h0):
            check(f"layer{li}.h0[{i}]", v)
        mats = [("gate", layer.gate.matrix), ("inc", layer.inc.matrix)]
        for name, mat in mats:
            for i, row in enumerate(mat):
                for j, w in enumerate(row):
                    check(f"layer{li}.{name}[{i}][{j}]", w)
        if isinstance(layer.gate, DiagonalAffineGate):
            for i, v in enumerate(layer.gate.offset):
                check(f"layer{li}.gate.offset[{i}]", v)
        for i, v in enumerate(layer.inc.offset):
            check(f"layer{li}.inc.offset[{i}]", v)
        check_fnn(f"layer{li}.phi", layer.phi)
    check_fnn("out", model.out)
    return issues
