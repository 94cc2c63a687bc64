"""Decision procedures for SSM satisfiability.

``sat_bounded`` enumerates words up to a length bound (iterative-deepening
depth-first search in canonical symbol order, optionally memoising visited
(depth, state) pairs), so the witness it returns is the lexicographically
least among the shortest.  ``sat_fixed`` decides satisfiability outright
under a fixed-point format by breadth-first reachability over the finite
space of stream states, reconstructing witnesses through predecessor links.
``pump_down`` shortens accepted words by cutting segments between repeated
states.

Hitting a state or memory ceiling raises ``ResourceLimitError`` with partial
stats; it is never reported as unsatisfiable.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .arithmetic import ArithMode, FixedPointFormat
from .errors import PreconditionError, ResourceLimitError
from .ssm import SsmModel, _stepper, quantization_report

try:
    import resource as _resource
except ImportError:  # non-Unix platforms lack the resource module
    _resource = None

SATISFIABLE = "satisfiable"
UNSAT_WITHIN_BOUND = "unsatisfiable-within-bound"
UNSATISFIABLE = "unsatisfiable"


@dataclass
class SearchStats:
    states_explored: int = 0
    max_frontier: int = 0
    elapsed_s: float = 0.0
    quantized_constants: int = 0


@dataclass(frozen=True)
class SatResult:
    verdict: str
    witness: Optional[tuple[str, ...]]
    stats: SearchStats

    @property
    def satisfiable(self) -> bool:
        return self.verdict == SATISFIABLE


@dataclass(frozen=True)
class LengthBound:
    """A word-length limit plus the encoding it came from; a binary-encoded
    problem parameter n denotes the limit 2**n."""

    value: int
    encoding: str = "unary"

    def __post_init__(self):
        if self.encoding not in ("unary", "binary"):
            raise PreconditionError(f"unknown encoding {self.encoding!r}")
        if self.value < 1:
            raise PreconditionError("length bound must be >= 1")

    @staticmethod
    def unary(n: int) -> "LengthBound":
        return LengthBound(n, "unary")

    @staticmethod
    def binary(n: int) -> "LengthBound":
        return LengthBound(1 << n, "binary")


@dataclass(frozen=True)
class ResourceLimits:
    max_states: int = 5_000_000
    max_mem_mb: Optional[int] = None

    @staticmethod
    def from_env() -> "ResourceLimits":
        states = os.environ.get("SSMVERIFY_MAX_STATES")
        mem = os.environ.get("SSMVERIFY_MAX_MEM_MB")
        return ResourceLimits(
            max_states=int(states) if states else 5_000_000,
            max_mem_mb=int(mem) if mem else None,
        )


def _mem_mb() -> float:
    if _resource is None:
        return 0.0
    # ru_maxrss is in KiB on Linux
    return _resource.getrusage(_resource.RUSAGE_SELF).ru_maxrss / 1024.0


def _check_limits(stats: SearchStats, limits: ResourceLimits, start: float):
    if stats.states_explored > limits.max_states:
        stats.elapsed_s = time.monotonic() - start
        raise ResourceLimitError(
            f"state ceiling {limits.max_states} exceeded", stats=stats
        )
    if limits.max_mem_mb is not None and _mem_mb() > limits.max_mem_mb:
        stats.elapsed_s = time.monotonic() - start
        raise ResourceLimitError(
            f"memory ceiling {limits.max_mem_mb} MB exceeded", stats=stats
        )


def _as_bound(bound) -> LengthBound:
    if isinstance(bound, LengthBound):
        return bound
    return LengthBound.unary(int(bound))


def sat_bounded(
    model: SsmModel,
    bound,
    mode: ArithMode,
    memoize: bool = True,
    limits: Optional[ResourceLimits] = None,
) -> SatResult:
    """Is some word of length <= bound accepted?  Guess-and-check by
    exhaustive streaming enumeration; the returned witness is the
    lexicographically least among the shortest accepted words."""
    bound = _as_bound(bound)
    limits = limits or ResourceLimits.from_env()
    stepper = _stepper(model, mode)
    alphabet = model.alphabet
    one = stepper.one
    stats = SearchStats()
    start = time.monotonic()

    init = stepper.initial_hidden()
    # States seen at the end of any earlier pass.  Once a pass reaches only
    # such states, every longer accepted word could be spliced down to a
    # length already checked, so the remaining lengths cannot succeed.
    seen: set = set()
    for target_len in range(1, bound.value + 1):
        memo: set = set()
        leaf_states: set = set()
        # frame per consumed prefix: [hidden, next symbol index]
        frames: list[list] = [[init, 0]]
        path: list[str] = []
        while frames:
            hidden, idx = frames[-1]
            if idx == len(alphabet):
                frames.pop()
                if path:
                    path.pop()
                continue
            frames[-1][1] += 1
            symbol = alphabet[idx]
            new_hidden, y = stepper.step(hidden, symbol)
            stats.states_explored += 1
            if stats.states_explored % 4096 == 0:
                _check_limits(stats, limits, start)
            depth = len(frames)  # symbols consumed including this one
            if depth == target_len:
                if y == one:
                    stats.elapsed_s = time.monotonic() - start
                    stats.max_frontier = max(stats.max_frontier, len(frames))
                    return SatResult(SATISFIABLE, tuple(path + [symbol]), stats)
                leaf_states.add(new_hidden)
                continue
            if memoize:
                key = (depth, new_hidden)
                if key in memo:
                    continue
                memo.add(key)
            frames.append([new_hidden, 0])
            path.append(symbol)
            stats.max_frontier = max(stats.max_frontier, len(frames))
        _check_limits(stats, limits, start)
        if leaf_states <= seen:
            break
        seen |= leaf_states
    stats.elapsed_s = time.monotonic() - start
    return SatResult(UNSAT_WITHIN_BOUND, None, stats)


def _expand(stepper, states):
    out = []
    for hidden in states:
        row = []
        for symbol in stepper.model.alphabet:
            row.append((symbol,) + stepper.step(hidden, symbol))
        out.append((hidden, row))
    return out


def sat_fixed(
    model: SsmModel,
    fmt: FixedPointFormat,
    length_cap: Optional[int] = None,
    limits: Optional[ResourceLimits] = None,
    threads: int = 1,
) -> SatResult:
    """Decide satisfiability under fixed-width arithmetic by breadth-first
    reachability over stream states.  An exhausted frontier is an
    unconditional 'unsatisfiable'; a length cap weakens that to
    'unsatisfiable-within-bound'.  Worker count never changes the answer."""
    limits = limits or ResourceLimits.from_env()
    mode = ArithMode(fmt)
    stepper = _stepper(model, mode)
    one = stepper.one
    stats = SearchStats(quantized_constants=len(quantization_report(model, fmt)))
    start = time.monotonic()

    init = stepper.initial_hidden()
    parents: dict = {init: None}
    level = [init]
    depth = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while level:
            if length_cap is not None and depth >= length_cap:
                stats.elapsed_s = time.monotonic() - start
                return SatResult(UNSAT_WITHIN_BOUND, None, stats)
            depth += 1
            if pool is None:
                expanded = _expand(stepper, level)
            else:
                chunk = max(1, len(level) // (threads * 4))
                chunks = [level[i : i + chunk] for i in range(0, len(level), chunk)]
                expanded = []
                for part in pool.map(lambda c: _expand(stepper, c), chunks):
                    expanded.extend(part)
            next_level = []
            for hidden, row in expanded:
                for symbol, new_hidden, y in row:
                    stats.states_explored += 1
                    if stats.states_explored % 4096 == 0:
                        _check_limits(stats, limits, start)
                    if y == one:
                        word = [symbol]
                        cur = hidden
                        while parents[cur] is not None:
                            prev, sym = parents[cur]
                            word.append(sym)
                            cur = prev
                        word.reverse()
                        stats.elapsed_s = time.monotonic() - start
                        return SatResult(SATISFIABLE, tuple(word), stats)
                    if new_hidden not in parents:
                        parents[new_hidden] = (hidden, symbol)
                        next_level.append(new_hidden)
            _check_limits(stats, limits, start)
            stats.max_frontier = max(stats.max_frontier, len(next_level))
            level = next_level
    finally:
        if pool is not None:
            pool.shutdown()
    stats.elapsed_s = time.monotonic() - start
    return SatResult(UNSATISFIABLE, None, stats)


def _state_sequence(stepper, word):
    states = [stepper.initial_hidden()]
    for symbol in word:
        hidden, _ = stepper.step(states[-1], symbol)
        states.append(hidden)
    return states


def pump_down(model: SsmModel, word: Sequence[str], fmt: FixedPointFormat) -> list[str]:
    """Shorten an accepted word by cutting (i, j] whenever the states before
    positions i and j coincide.  The result is accepted, never longer, and
    its departure states (positions 0..n-1) are pairwise distinct; a cut
    ending at the last position is only taken when the shortened word
    re-verifies, since equal states do not imply equal final outputs."""
    mode = ArithMode(fmt)
    stepper = _stepper(model, mode)
    word = list(word)
    states = _state_sequence(stepper, word)
    final_y = None
    if word:
        _, final_y = stepper.step(states[-2], word[-1])
    if not word or final_y != stepper.one:
        raise PreconditionError("pump_down requires an accepted word")

    while True:
        n = len(word)
        states = _state_sequence(stepper, word)
        first_seen: dict = {}
        cut = None
        for j in range(n):  # departure states only
            key = states[j]
            if key in first_seen:
                cut = (first_seen[key], j)
                break
            first_seen[key] = j
        if cut is None and states[n] in first_seen:
            i = first_seen[states[n]]
            candidate = word[:i]
            if candidate:
                _, y = stepper.step(
                    _state_sequence(stepper, candidate)[-2], candidate[-1]
                )
                if y == stepper.one:
                    cut = (i, n)
        if cut is None:
            return word
        i, j = cut
        word = word[:i] + word[j:]
