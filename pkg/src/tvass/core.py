"""TVASS data model and exact operational semantics.

A d-TVASS is a finite automaton whose transitions either add an integer
vector to d nonnegative counters or test the first counter for zero.
Counters are plain Python ints, so values never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

TST = "tst"
REVERSED_SUFFIX = "~"

IntVector = tuple[int, ...]
Action = Union[IntVector, str]
Trace = tuple[str, ...]


class UsageError(ValueError):
    """Raised when an operation is called with ids or shapes that do not fit the model."""


def norm(v: Iterable[int]) -> int:
    """Infinity norm; 0 for the empty vector."""
    return max((abs(c) for c in v), default=0)


def vadd(u: Sequence[int], v: Sequence[int]) -> IntVector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence[int], v: Sequence[int]) -> IntVector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(k: int, v: Sequence[int]) -> IntVector:
    return tuple(k * a for a in v)


def zero(d: int) -> IntVector:
    return (0,) * d


@dataclass(frozen=True)
class Transition:
    id: str
    source: str
    action: Action
    target: str

    @property
    def is_test(self) -> bool:
        return self.action == TST

    @property
    def delta(self) -> Optional[IntVector]:
        return None if self.is_test else self.action

    def __str__(self) -> str:
        act = TST if self.is_test else "(" + ",".join(map(str, self.action)) + ")"
        return f"{self.id}=({self.source},{act},{self.target})"


@dataclass(frozen=True)
class Configuration:
    state: str
    counters: IntVector

    def __post_init__(self):
        object.__setattr__(self, "counters", tuple(int(c) for c in self.counters))
        if any(c < 0 for c in self.counters):
            raise UsageError(f"negative counter in configuration {self}")

    def __str__(self) -> str:
        return f"{self.state}({','.join(map(str, self.counters))})"


def conf(state: str, *counters: int) -> Configuration:
    return Configuration(state, tuple(counters))


@dataclass(frozen=True)
class Tvass:
    """A d-TVASS; with ``testable=False`` it is a plain d-VASS, with d=1 an OCA."""

    dimension: int
    states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    testable: bool = True
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _out: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if self.dimension < 1:
            raise UsageError("dimension must be positive")
        if not self.states:
            raise UsageError("a model needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise UsageError("duplicate state ids")
        declared = set(self.states)
        index = {}
        out: dict[str, list[Transition]] = {s: [] for s in self.states}
        for t in self.transitions:
            if t.id in index:
                raise UsageError(f"duplicate transition id {t.id!r}")
            if t.source not in declared or t.target not in declared:
                raise UsageError(f"transition {t.id!r} uses an undeclared state")
            if t.is_test:
                if not self.testable:
                    raise UsageError(f"zero-test {t.id!r} in a non-testable model")
            elif len(t.action) != self.dimension:
                raise UsageError(f"transition {t.id!r} has arity {len(t.action)}, expected {self.dimension}")
            index[t.id] = t
            out[t.source].append(t)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_out", {s: tuple(ts) for s, ts in out.items()})

    @classmethod
    def build(cls, dimension: int, states: Iterable[str], transitions: Iterable[tuple], testable: bool = True) -> "Tvass":
        """Build from ``(id, source, action, target)`` tuples; action is a vector or ``TST``."""
        ts = []
        for tid, src, action, dst in transitions:
            if action != TST:
                action = tuple(int(a) for a in action)
            ts.append(Transition(tid, src, action, dst))
        return cls(dimension, tuple(states), tuple(ts), testable)

    def transition(self, tid: str) -> Transition:
        try:
            return self._index[tid]
        except KeyError:
            raise UsageError(f"unknown transition id {tid!r}") from None

    def has_transition(self, tid: str) -> bool:
        return tid in self._index

    def outgoing(self, state: str) -> tuple[Transition, ...]:
        return self._out.get(state, ())

    @property
    def addition_transitions(self) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if not t.is_test)

    @property
    def test_transitions(self) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.is_test)

    @property
    def norm(self) -> int:
        """Largest infinity norm of an addition action (0 if there are none)."""
        return max((norm(t.action) for t in self.addition_transitions), default=0)

    @property
    def num_states(self) -> int:
        return len(self.states)

    def check_configuration(self, c: Configuration) -> None:
        if c.state not in self._out:
            raise UsageError(f"unknown state {c.state!r}")
        if len(c.counters) != self.dimension:
            raise UsageError(f"configuration {c} has wrong dimension")

    def successors(self, c: Configuration):
        """Yield ``(transition, configuration)`` for every enabled step from ``c``."""
        x = c.counters
        for t in self._out.get(c.state, ()):
            if t.is_test:
                if x[0] == 0:
                    yield t, Configuration(t.target, x)
            else:
                y = tuple(a + b for a, b in zip(x, t.action))
                if min(y) >= 0:
                    yield t, Configuration(t.target, y)


@dataclass(frozen=True)
class Run:
    configurations: tuple[Configuration, ...]
    trace: Trace

    def __post_init__(self):
        if len(self.configurations) != len(self.trace) + 1:
            raise UsageError("a run of length n has n+1 configurations")

    @property
    def source(self) -> Configuration:
        return self.configurations[0]

    @property
    def target(self) -> Configuration:
        return self.configurations[-1]

    def __len__(self) -> int:
        return len(self.trace)


def step(model: Tvass, c: Configuration, tid: str) -> Optional[Configuration]:
    """One step under ``tid``; ``None`` when the step is disabled."""
    t = model.transition(tid)
    if c.state != t.source:
        raise UsageError(f"transition {tid!r} leaves {t.source!r}, not {c.state!r}")
    x = c.counters
    if t.is_test:
        return Configuration(t.target, x) if x[0] == 0 else None
    y = vadd(x, t.action)
    if min(y, default=0) < 0:
        return None
    return Configuration(t.target, y)


def apply_trace(model: Tvass, c: Configuration, pi: Sequence[str]) -> Optional[Configuration]:
    for tid in pi:
        c = step(model, c, tid)
        if c is None:
            return None
    return c


def run_of(model: Tvass, c: Configuration, pi: Sequence[str]) -> Optional[Run]:
    """The run visiting ``pi`` from ``c``, or ``None`` if some step is disabled."""
    confs = [c]
    for tid in pi:
        c = step(model, c, tid)
        if c is None:
            return None
        confs.append(c)
    return Run(tuple(confs), tuple(pi))


def path_endpoints(model: Tvass, pi: Sequence[str]) -> Optional[tuple[str, str]]:
    """``(source, target)`` of a nonempty path, ``None`` for the empty word.

    Raises UsageError if consecutive transitions do not chain.
    """
    if not pi:
        return None
    ts = [model.transition(tid) for tid in pi]
    for a, b in zip(ts, ts[1:]):
        if a.target != b.source:
            raise UsageError(f"{a.id!r} ends in {a.target!r} but {b.id!r} starts in {b.source!r}")
    return ts[0].source, ts[-1].target


def is_path(model: Tvass, pi: Sequence[str], source: str, target: str) -> bool:
    if not pi:
        return source == target
    try:
        ends = path_endpoints(model, pi)
    except UsageError:
        for tid in pi:
            model.transition(tid)  # unknown ids still raise
        return False
    return ends == (source, target)


def is_cycle(model: Tvass, pi: Sequence[str], state: Optional[str] = None) -> bool:
    if not pi:
        return True
    try:
        p, q = path_endpoints(model, pi)
    except UsageError:
        return False
    return p == q and (state is None or p == state)


def reversed_id(tid: str) -> str:
    if tid.endswith(REVERSED_SUFFIX):
        return tid[: -len(REVERSED_SUFFIX)]
    return tid + REVERSED_SUFFIX


def reverse(model: Tvass) -> Tvass:
    """The model with every transition turned around and its effect negated."""
    ts = []
    for t in model.transitions:
        action = TST if t.is_test else tuple(-a for a in t.action)
        ts.append(Transition(reversed_id(t.id), t.target, action, t.source))
    return Tvass(model.dimension, model.states, tuple(ts), model.testable)


def mirror(pi: Sequence[str]) -> Trace:
    return tuple(reversed_id(tid) for tid in reversed(pi))
