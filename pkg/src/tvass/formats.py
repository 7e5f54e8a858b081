"""Text model files, certificate JSON and seeded random instances.

Model file grammar (one item per line, ``#`` starts a comment)::

    dim 2
    states A B
    trans dAA A add -3 4 A
    trans dAB A tst B

A model is testable unless the optional line ``testable no`` appears.
"""

from __future__ import annotations

import json
import random
from typing import Any, Union

from .core import TST, Configuration, Tvass, UsageError
from .lps import CountedLps, LinearPathScheme


class ParseError(UsageError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def parse_model(text: str) -> Tvass:
    dim = None
    states: list[str] = []
    declared: set[str] = set()
    testable = True
    transitions: list[tuple] = []
    ids: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        head, args = words[0], words[1:]
        if head == "dim":
            if dim is not None:
                raise ParseError("more than one dim line", lineno)
            if transitions:
                raise ParseError("dim must come before any trans", lineno)
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError("dim takes one positive integer", lineno)
            dim = int(args[0])
        elif head == "states":
            if not args:
                raise ParseError("empty states line", lineno)
            for s in args:
                if s in declared:
                    raise ParseError(f"duplicate state {s!r}", lineno)
                declared.add(s)
                states.append(s)
        elif head == "testable":
            if args not in (["yes"], ["no"]):
                raise ParseError("testable takes yes or no", lineno)
            testable = args == ["yes"]
        elif head == "trans":
            if dim is None:
                raise ParseError("trans before dim", lineno)
            if len(args) < 4:
                raise ParseError("trans needs ID SRC (add Z1..ZD | tst) DST", lineno)
            tid, src, kind, rest = args[0], args[1], args[2], args[3:]
            if tid in ids:
                raise ParseError(f"duplicate transition id {tid!r}", lineno)
            if kind == "tst":
                if len(rest) != 1:
                    raise ParseError("tst takes no arguments", lineno)
                if not testable:
                    raise ParseError(f"zero-test {tid!r} in a non-testable model", lineno)
                action: Any = TST
            elif kind == "add":
                if len(rest) != dim + 1:
                    raise ParseError(f"add needs {dim} integers, got {len(rest) - 1}", lineno)
                try:
                    action = tuple(int(z) for z in rest[:-1])
                except ValueError:
                    raise ParseError("add arguments must be integers", lineno) from None
            else:
                raise ParseError(f"unknown action kind {kind!r}", lineno)
            dst = rest[-1]
            for s in (src, dst):
                if s not in declared:
                    raise ParseError(f"undeclared state {s!r}", lineno)
            ids.add(tid)
            transitions.append((tid, src, action, dst))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if dim is None:
        raise ParseError("missing dim line")
    if not states:
        raise ParseError("no states declared")
    return Tvass.build(dim, states, transitions, testable)


def print_model(model: Tvass) -> str:
    lines = [f"dim {model.dimension}", "states " + " ".join(model.states)]
    if not model.testable:
        lines.append("testable no")
    for t in model.transitions:
        if t.is_test:
            lines.append(f"trans {t.id} {t.source} tst {t.target}")
        else:
            lines.append(f"trans {t.id} {t.source} add {' '.join(map(str, t.action))} {t.target}")
    return "\n".join(lines) + "\n"


def parse_configuration(text: str, dimension: int) -> Configuration:
    """``"A 3 5"`` -> ``A(3,5)``."""
    words = text.split()
    if len(words) != dimension + 1:
        raise UsageError(f"expected a state and {dimension} counters, got {text!r}")
    try:
        return Configuration(words[0], tuple(int(w) for w in words[1:]))
    except ValueError:
        raise UsageError(f"counters must be integers in {text!r}") from None


def certificate_from_json(data: Union[str, dict]) -> Union[CountedLps, tuple]:
    """Parse a certificate document into a CountedLps or a plain trace."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"certificate is not JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("certificate must be a JSON object")
    kind = data.get("type")

    def ids(value, where):
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise ParseError(f"{where} must be a list of transition ids")
        return tuple(value)

    if kind == "trace":
        return ids(data.get("trace"), "trace")
    if kind != "lps":
        raise ParseError(f"unknown certificate type {kind!r}")
    segments = data.get("segments")
    if not isinstance(segments, list):
        raise ParseError("lps certificate needs a segments list")
    alpha: list[list[str]] = [[]]
    beta, counts = [], []
    for seg in segments:
        if not isinstance(seg, dict):
            raise ParseError("segments must be objects")
        if set(seg) == {"path"}:
            alpha[-1].extend(ids(seg["path"], "path"))
        elif set(seg) == {"cycle", "count"}:
            n = seg["count"]
            if not isinstance(n, int) or isinstance(n, bool) or n < 0:
                raise ParseError("cycle count must be a nonnegative integer")
            beta.append(ids(seg["cycle"], "cycle"))
            counts.append(n)
            alpha.append([])
        else:
            raise ParseError("a segment is {path} or {cycle, count}")
    return CountedLps(LinearPathScheme(tuple(map(tuple, alpha)), tuple(beta)), tuple(counts))


def certificate_to_text(cert: Union[CountedLps, tuple]) -> str:
    from .decide import certificate_to_json

    return json.dumps(certificate_to_json(cert), indent=2)


def random_instance(
    seed: int,
    num_states: int,
    max_norm: int = 2,
    test_density: float = 0.2,
    edge_prob: float = 0.5,
) -> Tvass:
    """A seeded random 2-TVASS.

    Every ordered pair of states (loops included) independently gets a
    transition with probability ``edge_prob``.  That transition is a zero-test
    with probability ``test_density`` and otherwise adds a vector drawn
    uniformly from ``[-max_norm, max_norm]^2``.
    """
    if num_states < 1:
        raise UsageError("num_states must be positive")
    rng = random.Random(seed)
    states = [f"q{i}" for i in range(num_states)]
    transitions = []
    for p in states:
        for q in states:
            if rng.random() >= edge_prob:
                continue
            tid = f"t{len(transitions)}"
            if rng.random() < test_density:
                transitions.append((tid, p, TST, q))
            else:
                a = (rng.randint(-max_norm, max_norm), rng.randint(-max_norm, max_norm))
                transitions.append((tid, p, a, q))
    return Tvass.build(2, states, transitions, testable=test_density > 0)
