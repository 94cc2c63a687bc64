"""Shared test machinery: corpus generators and differential walkers."""

from __future__ import annotations

import random
from fractions import Fraction

from ssmverify.arithmetic import ArithMode
from ssmverify.compilers import IlpInstance, MinskyMachine
from ssmverify.ltl import Atom, Not, And, Or, Next, Until
from ssmverify.ssm import SsmModel, initial_state, step
from ssmverify.words import set_symbol, symbol_set


def is_one(value, mode: ArithMode) -> bool:
    if mode.is_exact:
        return value == Fraction(1)
    return value.raw == mode.fmt.scale


def walk_words(model: SsmModel, mode: ArithMode, max_len: int):
    """Yield (word, accepted) for every word of length 1..max_len, sharing
    prefix computations through the streaming state."""

    def rec(state, word):
        for symbol in model.alphabet:
            nxt, y = step(model, state, symbol)
            extended = word + (symbol,)
            yield extended, is_one(y, mode)
            if len(extended) < max_len:
                yield from rec(nxt, extended)

    yield from rec(initial_state(model, mode), ())


def word_to_trace(word) -> tuple:
    return tuple(symbol_set(s) for s in word)


def trace_to_word(trace) -> list[str]:
    return [set_symbol(letter) for letter in trace]


# ---------------------------------------------------------------------------
# Random corpora (all deterministic under a caller-provided rng)

def random_formula(rng: random.Random, target_size: int, props=("p", "q")):
    """A random formula of exactly the given node count in core syntax."""
    if target_size <= 1:
        return Atom(rng.choice(props))
    if target_size == 2:
        op = rng.choice((Not, Next))
        return op(random_formula(rng, 1, props))
    if rng.random() < 0.4:
        op = rng.choice((Not, Next))
        return op(random_formula(rng, target_size - 1, props))
    op = rng.choice((And, Or, Until))
    left_size = rng.randint(1, target_size - 2)
    return op(
        random_formula(rng, left_size, props),
        random_formula(rng, target_size - 1 - left_size, props),
    )


def hand_formulas() -> list[str]:
    """25 formulas covering each operator, sugar, and nested temporal use."""
    return [
        "p",
        "q",
        "!p",
        "p & q",
        "p | q",
        "X p",
        "p U q",
        "F p",
        "G p",
        "p -> q",
        "tt",
        "ff",
        "tt U p",
        "X X p",
        "X (p U q)",
        "(X p) U q",
        "p U (q U p)",
        "p U X q",
        "!(p U !q)",
        "G (p -> X q)",
        "F (p & X p)",
        "(p | q) U (p & q)",
        "!X !p",
        "G F p",
        "F G p",
    ]


def random_machine(rng: random.Random, num_states: int) -> MinskyMachine:
    """A structurally valid machine: every non-final state either increments
    or branches on one counter; the final state halts."""
    states = tuple(f"q{i}" for i in range(num_states))
    transitions = set()
    for q in states[:-1]:
        if rng.random() < 0.5:
            i = rng.choice((1, 2))
            transitions.add((q, f"inc{i}", rng.choice(states)))
        else:
            i = rng.choice((1, 2))
            transitions.add((q, f"dec{i}", rng.choice(states)))
            transitions.add((q, f"ztest{i}", rng.choice(states)))
    return MinskyMachine(states, states[0], states[-1], frozenset(transitions))


def random_ilp(rng: random.Random, max_dim: int = 4, max_entry: int = 3) -> IlpInstance:
    """Random instance with natural entries; the target is resampled until it
    is nonzero, since an all-zero target is solved by the empty support,
    which no nonempty word can encode."""
    d = rng.randint(1, max_dim)
    matrix = tuple(
        tuple(rng.randint(0, max_entry) for _ in range(d)) for _ in range(d)
    )
    while True:
        target = tuple(rng.randint(0, max_entry) for _ in range(d))
        if any(target):
            return IlpInstance(matrix, target)
