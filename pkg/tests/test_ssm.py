"""SSM evaluator: streaming vs batch order, closure, classification."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssmverify.arithmetic import EXACT, FX6, ArithMode, FixedPointFormat
from ssmverify.errors import DimensionError, EmptyWordError, UnknownSymbolError
from ssmverify.fnn import gadget_eq, compose, select_fnn
from ssmverify.ssm import (
    AffineMap,
    DiagonalAffineGate,
    GateClasses,
    SsmLayer,
    SsmModel,
    TimeInvariantGate,
    accepts,
    as_matrix,
    as_vector,
    classify_gates,
    evaluate,
    evaluate_layerwise,
    initial_state,
    projection_phi,
    quantization_report,
    state_count_bound,
    step,
)

FX6_MODE = ArithMode(FX6)


def eye(d):
    return as_matrix([[int(i == j) for j in range(d)] for i in range(d)])


def zeros_mat(d):
    return as_matrix([[0] * d for _ in range(d)])


def accumulator_model(d=2):
    """gate = I, inc = identity map: the hidden state sums the embeddings."""
    layer = SsmLayer(
        h0=as_vector([0] * d),
        gate=TimeInvariantGate(eye(d)),
        inc=AffineMap(eye(d), as_vector([0] * d)),
        phi=projection_phi(d),
    )
    out = compose(gadget_eq(3), select_fnn([0], d))
    return SsmModel(
        alphabet=("a", "b"),
        emb=(as_vector([1, 0]), as_vector([0, 1])),
        layers=(layer,),
        out=out,
    )


def test_pure_accumulation():
    model = accumulator_model()
    state = initial_state(model, EXACT)
    for _ in range(3):
        state, y = step(model, state, "a")
    assert state.hidden[0] == (Fraction(3), Fraction(0))
    assert y == 1  # out checks the first coordinate equals 3
    assert accepts(model, ["a", "a", "a"], EXACT)
    assert not accepts(model, ["a", "a"], EXACT)


def test_step_determinism():
    model = accumulator_model()
    s1 = initial_state(model, EXACT)
    s2 = initial_state(model, EXACT)
    for sym in ("a", "b", "a"):
        s1, y1 = step(model, s1, sym)
        s2, y2 = step(model, s2, sym)
        assert s1 == s2 and y1 == y2


def test_unknown_symbol_and_empty_word():
    model = accumulator_model()
    with pytest.raises(UnknownSymbolError):
        evaluate(model, ["zz"], EXACT)
    with pytest.raises(EmptyWordError):
        evaluate(model, [], EXACT)
    with pytest.raises(EmptyWordError):
        accepts(model, [], EXACT)


def test_dimension_validation():
    with pytest.raises(DimensionError):
        SsmModel(
            alphabet=("a",),
            emb=(as_vector([1, 0]),),
            layers=(),
            out=gadget_eq(1),  # input dim 1 but d = 2
        )


def test_zero_layer_model_applies_out_to_embedding():
    model = SsmModel(
        alphabet=("a", "b"),
        emb=(as_vector([1]), as_vector([0])),
        layers=(),
        out=gadget_eq(1),
    )
    assert accepts(model, ["a"], EXACT)
    assert not accepts(model, ["b"], EXACT)
    assert classify_gates(model) == GateClasses(True, True)


@st.composite
def small_models(draw):
    d = draw(st.integers(1, 3))
    nsyms = draw(st.integers(1, 3))
    L = draw(st.integers(1, 2))
    frac = lambda: Fraction(draw(st.integers(-2, 2)), draw(st.sampled_from([1, 2, 4])))
    vec = lambda: as_vector([frac() for _ in range(d)])
    mat = lambda: as_matrix([[frac() for _ in range(d)] for _ in range(d)])
    layers = []
    for _ in range(L):
        if draw(st.booleans()):
            gate = TimeInvariantGate(mat())
        else:
            gate = DiagonalAffineGate(mat(), vec())
        layers.append(SsmLayer(vec(), gate, AffineMap(mat(), vec()), projection_phi(d)))
    out = compose(gadget_eq(1), select_fnn([0], d))
    alphabet = tuple(chr(ord("a") + i) for i in range(nsyms))
    return SsmModel(alphabet, tuple(vec() for _ in range(nsyms)), tuple(layers), out)


@given(small_models(), st.data())
@settings(max_examples=120, deadline=None)
def test_streaming_equals_layerwise_exact(model, data):
    n = data.draw(st.integers(1, 5))
    word = [data.draw(st.sampled_from(model.alphabet)) for _ in range(n)]
    assert evaluate(model, word, EXACT) == evaluate_layerwise(model, word, EXACT)


@given(small_models(), st.data())
@settings(max_examples=120, deadline=None)
def test_streaming_equals_layerwise_fixed(model, data):
    fmt = data.draw(st.sampled_from([FX6, FixedPointFormat(8, 4), FixedPointFormat(10, 2)]))
    mode = ArithMode(fmt)
    n = data.draw(st.integers(1, 5))
    word = [data.draw(st.sampled_from(model.alphabet)) for _ in range(n)]
    assert evaluate(model, word, mode) == evaluate_layerwise(model, word, mode)


@given(small_models(), st.data())
@settings(max_examples=100, deadline=None)
def test_fixed_state_entries_stay_representable(model, data):
    fmt = data.draw(st.sampled_from([FX6, FixedPointFormat(8, 4)]))
    mode = ArithMode(fmt)
    state = initial_state(model, mode)
    for _ in range(data.draw(st.integers(1, 6))):
        symbol = data.draw(st.sampled_from(model.alphabet))
        state, _ = step(model, state, symbol)
        for h in state.hidden:
            for raw in h:
                assert fmt.min_raw <= raw <= fmt.max_raw


@given(small_models(), st.data())
@settings(max_examples=80, deadline=None)
def test_alphabet_permutation_invariance(model, data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    order = list(range(len(model.alphabet)))
    rng.shuffle(order)
    permuted = SsmModel(
        alphabet=tuple(model.alphabet[i] for i in order),
        emb=tuple(model.emb[i] for i in order),
        layers=model.layers,
        out=model.out,
    )
    n = data.draw(st.integers(1, 4))
    word = [data.draw(st.sampled_from(model.alphabet)) for _ in range(n)]
    assert evaluate(model, word, EXACT) == evaluate(permuted, word, EXACT)


def test_state_count_bound_formula():
    model_1 = accumulator_model()  # L=1, d=2
    assert state_count_bound(model_1, 2) == 1 << 8
    assert state_count_bound(model_1, 0) == 1
    three = SsmModel(
        alphabet=("a",),
        emb=(as_vector([0, 0, 0]),),
        layers=tuple(
            SsmLayer(
                as_vector([0, 0, 0]),
                TimeInvariantGate(zeros_mat(3)),
                AffineMap(eye(3), as_vector([0, 0, 0])),
                projection_phi(3),
            )
            for _ in range(2)
        ),
        out=compose(gadget_eq(1), select_fnn([0], 3)),
    )
    assert state_count_bound(three, 6) == 1 << 72


def test_classify_diagonal_and_time_invariant():
    d = 2
    ti_diag = SsmLayer(
        as_vector([0, 0]),
        TimeInvariantGate(as_matrix([[1, 0], [0, Fraction(1, 4)]])),
        AffineMap(eye(d), as_vector([0, 0])),
        projection_phi(d),
    )
    ti_full = SsmLayer(
        as_vector([0, 0]),
        TimeInvariantGate(as_matrix([[1, 1], [0, 1]])),
        AffineMap(eye(d), as_vector([0, 0])),
        projection_phi(d),
    )
    da = SsmLayer(
        as_vector([0, 0]),
        DiagonalAffineGate(eye(d), as_vector([0, 0])),
        AffineMap(eye(d), as_vector([0, 0])),
        projection_phi(d),
    )
    out = compose(gadget_eq(1), select_fnn([0], d))
    emb = (as_vector([1, 0]),)
    mk = lambda *layers: SsmModel(("a",), emb, layers, out)
    assert classify_gates(mk(ti_diag)) == GateClasses(True, True)
    assert classify_gates(mk(ti_full)) == GateClasses(True, False)
    assert classify_gates(mk(da)) == GateClasses(False, True)
    assert classify_gates(mk(ti_diag, da)) == GateClasses(False, True)


def test_quantization_report_flags_unrepresentable():
    d = 1
    layer = SsmLayer(
        as_vector([Fraction(1, 3)]),
        TimeInvariantGate(as_matrix([[1]])),
        AffineMap(as_matrix([[1]]), as_vector([0])),
        projection_phi(d),
    )
    model = SsmModel(("a",), (as_vector([1]),), (layer,), gadget_eq(1))
    issues = quantization_report(model, FX6)
    assert [(p, v) for p, v in issues] == [("layer0.h0[0]", Fraction(1, 3))]
    assert quantization_report(accumulator_model(), FX6) == []
