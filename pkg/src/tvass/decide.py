"""Reachability, boundedness and termination for 2-TVASS.

Every answer is a :class:`Verdict`.  Positive answers carry a certificate
that can be replayed independently; negative answers record the caps under
which an exhaustive exploration closed.  When neither is available the
verdict is ``UNKNOWN`` and says which budget ran out.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence, Union

from .core import (
    Configuration,
    Run,
    Trace,
    Tvass,
    UsageError,
    apply_trace,
    mirror,
    norm,
    path_endpoints,
    reverse,
    run_of,
)
from .lps import CountedLps, LinearPathScheme, eval_counts

SCHEMA = "tvr/1"


class CertificateError(UsageError):
    """A certificate is malformed (as opposed to well-formed but wrong)."""


class Outcome(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Options:
    """Exploration caps; ``const_c`` is the exponent constant of the size bounds (off by default)."""

    cap_norm: int = 64
    cap_steps: int = 100_000
    const_c: Optional[int] = None


@dataclass(frozen=True)
class UnboundedWitness:
    prefix: Trace
    pump: Trace


@dataclass(frozen=True)
class Lasso:
    prefix: Trace
    cycle: Trace


@dataclass(frozen=True)
class BoundExceeded:
    """A run to a configuration whose norm exceeds the boundedness bound for constant ``c``."""

    trace: Trace
    bound: int
    c: int


@dataclass
class Verdict:
    outcome: Outcome
    label: str
    certificate: Any = None
    caps: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    note: str = ""

    @property
    def conclusive(self) -> bool:
        return self.outcome is not Outcome.UNKNOWN

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "verdict": self.label,
            "outcome": self.outcome.value,
            "certificate": certificate_to_json(self.certificate),
            "caps": self.caps,
            "stats": self.stats,
            "note": self.note,
        }


def certificate_to_json(cert: Any) -> Optional[dict]:
    if cert is None:
        return None
    if isinstance(cert, CountedLps):
        segments = []
        L = cert.scheme
        for j, a in enumerate(L.alpha):
            if a:
                segments.append({"path": list(a)})
            if j < L.star_length:
                segments.append({"cycle": list(L.beta[j]), "count": cert.counts[j]})
        return {"type": "lps", "segments": segments}
    if isinstance(cert, UnboundedWitness):
        return {"type": "pump", "prefix": list(cert.prefix), "pump": list(cert.pump)}
    if isinstance(cert, Lasso):
        return {"type": "lasso", "prefix": list(cert.prefix), "cycle": list(cert.cycle)}
    if isinstance(cert, BoundExceeded):
        return {"type": "bound_exceeded", "trace": list(cert.trace), "bound": str(cert.bound), "c": cert.c}
    return {"type": "trace", "trace": list(cert)}


def _require_dim2(model: Tvass) -> None:
    if model.dimension != 2:
        raise UsageError("the deciders handle 2-dimensional models")


# -- explicit exploration ----------------------------------------------------


class _Search:
    """One BFS direction with parent pointers, norm pruning and an optional depth limit."""

    def __init__(self, model: Tvass, start: Configuration, cap_norm: int, depth_limit: Optional[int] = None):
        self.model = model
        self.parent: dict[Configuration, Optional[tuple]] = {start: None}
        self.depth = {start: 0}
        self.queue = deque([start])
        self.cap_norm = cap_norm
        self.depth_limit = depth_limit
        self.pruned = False
        self.expansions = 0
        self.peak = 1

    @property
    def closed(self) -> bool:
        return not self.queue and not self.pruned

    def expand(self) -> list[Configuration]:
        c = self.queue.popleft()
        self.expansions += 1
        new = []
        if self.depth_limit is not None and self.depth[c] >= self.depth_limit:
            return new
        for t, c2 in self.model.successors(c):
            if c2 in self.parent:
                continue
            if norm(c2.counters) > self.cap_norm:
                self.pruned = True
                continue
            self.parent[c2] = (c, t.id)
            self.depth[c2] = self.depth[c] + 1
            self.queue.append(c2)
            new.append(c2)
        self.peak = max(self.peak, len(self.queue))
        return new

    def trace_to(self, c: Configuration) -> Trace:
        out = []
        while self.parent[c] is not None:
            c, tid = self.parent[c]
            out.append(tid)
        return tuple(reversed(out))


def oracle_reach(
    model: Tvass, source: Configuration, target: Configuration, cap_norm: int = 64, cap_steps: int = 100_000
) -> Verdict:
    """Brute-force reachability by alternating forward and backward BFS.

    The backward search runs in the reversed model.  ``NO`` is returned only
    if one direction closes without ever pruning a configuration above
    ``cap_norm``; either closed set is then the exact reachable (or
    co-reachable) set.
    """
    model.check_configuration(source)
    model.check_configuration(target)
    caps = {"cap_norm": cap_norm, "cap_steps": cap_steps}
    if source == target:
        return Verdict(Outcome.YES, "REACHABLE", (), caps, {"explored": 1, "peak_frontier": 1})
    fwd = _Search(model, source, cap_norm)
    rmodel = reverse(model)
    bwd = _Search(rmodel, target, cap_norm)

    def stats():
        return {
            "explored": len(fwd.parent) + len(bwd.parent),
            "expansions": fwd.expansions + bwd.expansions,
            "peak_frontier": max(fwd.peak, bwd.peak),
        }

    def joined(c: Configuration) -> Verdict:
        trace = fwd.trace_to(c) + mirror(bwd.trace_to(c))
        return Verdict(Outcome.YES, "REACHABLE", trace, caps, stats())

    if target in fwd.parent:
        return joined(target)
    while fwd.expansions + bwd.expansions < cap_steps:
        progressed = False
        for side, other in ((fwd, bwd), (bwd, fwd)):
            if side.closed:
                return Verdict(Outcome.NO, "UNREACHABLE", None, caps, stats(), f"{'forward' if side is fwd else 'backward'} exploration closed")
            if side.queue:
                progressed = True
                for c in side.expand():
                    if c in other.parent:
                        return joined(c)
        if not progressed:
            break
    return Verdict(Outcome.UNKNOWN, "UNKNOWN", None, caps, stats(), "exploration budget exhausted")


def shortpath_bound(model: Tvass, x: Sequence[int], y: Sequence[int], c: int) -> int:
    Q = model.num_states
    return (Q + norm(x) + norm(y) + model.norm) ** (c * Q**3)


def boundedness_bound(model: Tvass, x: Sequence[int], c: int) -> int:
    Q = model.num_states
    return (1 + norm(x)) * (Q + model.norm) ** (c * Q**3)


def reach(model: Tvass, source: Configuration, target: Configuration, opts: Options = Options()) -> Verdict:
    """Reachability with an LPS certificate on success."""
    _require_dim2(model)
    v = oracle_reach(model, source, target, opts.cap_norm, opts.cap_steps)
    if v.outcome is Outcome.UNKNOWN and opts.const_c is not None:
        v = _bounded_reach(model, source, target, opts)
    if v.outcome is Outcome.YES:
        trace = v.certificate
        cert = extract_lps(model, run_of(model, source, trace))
        if not check_certificate(model, source, target, cert):  # pragma: no cover - extraction invariant
            raise AssertionError("extracted certificate does not replay")
        v.certificate = cert
        v.stats["trace_length"] = len(trace)
    return v


def _bounded_reach(model: Tvass, source: Configuration, target: Configuration, opts: Options) -> Verdict:
    bound = shortpath_bound(model, source.counters, target.counters, opts.const_c)
    cap_norm = norm(source.counters) + norm(target.counters) + bound * model.norm
    caps = {"cap_norm": cap_norm, "depth": bound, "cap_steps": opts.cap_steps, "const_c": opts.const_c}
    s = _Search(model, source, cap_norm, depth_limit=bound)
    while s.queue and s.expansions < opts.cap_steps:
        for c in s.expand():
            if c == target:
                return Verdict(Outcome.YES, "REACHABLE", s.trace_to(c), caps, {"explored": len(s.parent)})
    stats = {"explored": len(s.parent), "peak_frontier": s.peak}
    if not s.queue:
        return Verdict(
            Outcome.NO,
            "UNREACHABLE",
            None,
            caps,
            stats,
            f"no run within the short-path bound for c={opts.const_c}; sound only if c is large enough",
        )
    return Verdict(Outcome.UNKNOWN, "UNKNOWN", None, caps, stats, "bounded exploration exceeded cap_steps")


# -- certificates ------------------------------------------------------------


def check_certificate(
    model: Tvass, source: Configuration, target: Configuration, cert: Union[CountedLps, Sequence[str]]
) -> bool:
    """Replay a trace or counted scheme and compare the end configuration with ``target``."""
    if isinstance(cert, CountedLps):
        try:
            ends = cert.scheme.validate(model)
        except UsageError as exc:
            raise CertificateError(str(exc)) from None
        if ends is None:
            return source == target
        if ends[0] != source.state:
            return False
        return eval_counts(model, cert, source.counters) == target
    if isinstance(cert, (str, bytes)) or not isinstance(cert, Sequence):
        raise CertificateError("a certificate is a trace or a CountedLps")
    try:
        ends = path_endpoints(model, tuple(cert))
    except UsageError as exc:
        raise CertificateError(str(exc)) from None
    if ends is None:
        return source == target
    if ends[0] != source.state:
        return False
    return apply_trace(model, source, cert) == target


def extract_lps(model: Tvass, run: Run) -> CountedLps:
    """Compress a run into a counted scheme by starring adjacent repeated blocks.

    Left to right, at each position the block with the largest coverage
    (length times repetitions, at least two repetitions) is starred, shorter
    blocks winning ties.  Positions without such a block are copied into the
    current connecting path.
    """
    pi = run.trace
    n = len(pi)
    alpha: list[list[str]] = [[]]
    beta: list[Trace] = []
    counts: list[int] = []
    pos = 0
    while pos < n:
        best = None  # (coverage, -length, reps)
        for length in range(1, (n - pos) // 2 + 1):
            block = pi[pos : pos + length]
            reps = 1
            while pi[pos + reps * length : pos + (reps + 1) * length] == block:
                reps += 1
            if reps >= 2:
                key = (reps * length, -length, reps)
                if best is None or key > best:
                    best = key
        if best is None:
            alpha[-1].append(pi[pos])
            pos += 1
            continue
        coverage, neg_len, reps = best
        length = -neg_len
        beta.append(pi[pos : pos + length])
        counts.append(reps)
        alpha.append([])
        pos += coverage
    scheme = LinearPathScheme(tuple(map(tuple, alpha)), tuple(beta))
    return CountedLps(scheme, tuple(counts))


# -- vertical loops ----------------------------------------------------------


@dataclass(frozen=True)
class Factor:
    """A piece of a run: ``"A*"`` (test-free), ``"T"`` (one zero-test) or ``"vloop"``."""

    kind: str
    start: int
    end: int
    trace: Trace
    source: Configuration
    target: Configuration

    def well_formed(self, model: Tvass) -> bool:
        tests = [model.transition(t).is_test for t in self.trace]
        if self.kind == "A*":
            return not any(tests)
        if self.kind == "T":
            return tests == [True]
        if self.kind == "vloop":
            return (
                self.source.state == self.target.state
                and self.source.counters[0] == 0
                and self.target.counters[0] == 0
            )
        return False


def vloop_decompose(model: Tvass, run: Run) -> list[Factor]:
    """Split a run into test-free segments, single zero-tests and vertical loops.

    The run is cut where counter 1 is zero; from each such cut the
    decomposition jumps to the last cut in the same state, so each state
    anchors at most one loop and the result has at most ``2|Q|+1`` factors.
    """
    _require_dim2(model)
    confs, pi = run.configurations, run.trace
    if not pi:
        return []

    def make(kind, i, j):
        return Factor(kind, i, j, pi[i:j], confs[i], confs[j])

    def segment(i, j):
        if j - i == 1 and model.transition(pi[i]).is_test:
            return make("T", i, j)
        return make("A*", i, j)

    zeros = [i for i, c in enumerate(confs) if c.counters[0] == 0]
    if not any(model.transition(t).is_test for t in pi) or not zeros:
        return [make("A*", 0, len(pi))]

    last = {}
    for i in zeros:
        last[confs[i].state] = i
    factors: list[Factor] = []
    if zeros[0] > 0:
        factors.append(make("A*", 0, zeros[0]))
    k = 0
    while True:
        i = zeros[k]
        j = last[confs[i].state]
        if j > i:
            factors.append(make("vloop", i, j))
            k = zeros.index(j)
        if k + 1 < len(zeros):
            factors.append(segment(zeros[k], zeros[k + 1]))
            k += 1
        else:
            if zeros[k] < len(pi):
                factors.append(make("A*", zeros[k], len(pi)))
            break

    merged: list[Factor] = []
    for f in factors:
        if merged and f.kind == "A*" and merged[-1].kind == "A*":
            g = merged.pop()
            f = make("A*", g.start, f.end)
        merged.append(f)
    return merged


@dataclass(frozen=True)
class DxResult:
    members: frozenset
    conclusive: bool
    undecided: frozenset


def compute_Dx(
    model: Tvass, q: str, x: int, cap_d: int, cap_norm: int = 64, cap_steps: int = 20_000
) -> DxResult:
    """``{d <= cap_d : q(0,x) ->* q(0,x+d)}``, each membership decided by the oracle."""
    _require_dim2(model)
    start = Configuration(q, (0, x))
    fwd = _Search(model, start, cap_norm)
    while fwd.queue and fwd.expansions < cap_steps:
        fwd.expand()
    members, undecided = set(), set()
    for d in range(cap_d + 1):
        c = Configuration(q, (0, x + d))
        if c in fwd.parent:
            members.add(d)
        elif not fwd.closed:
            v = oracle_reach(model, start, c, cap_norm, cap_steps)
            if v.outcome is Outcome.YES:
                members.add(d)
            elif v.outcome is Outcome.UNKNOWN:
                undecided.add(d)
    return DxResult(frozenset(members), not undecided, frozenset(undecided))


def conjectured_threshold(sets: Sequence[frozenset]) -> Optional[int]:
    """First index from which the given ``D_x`` sets no longer change (a guess, not a proof)."""
    if not sets:
        return None
    t = len(sets) - 1
    while t > 0 and sets[t - 1] == sets[-1]:
        t -= 1
    return t


@dataclass(frozen=True)
class IncreasingCycle:
    h: int
    beta: Trace
    m: int


def find_increasing_cycle(
    model: Tvass, q: str, cap_h: int = 16, cap_norm: int = 64, cap_steps: int = 20_000
) -> Optional[IncreasingCycle]:
    """Smallest ``h <= cap_h`` with a run ``q(0,h) -> q(0,h+m)``, ``m > 0``."""
    _require_dim2(model)
    for h in range(cap_h + 1):
        s = _Search(model, Configuration(q, (0, h)), cap_norm)
        while s.queue and s.expansions < cap_steps:
            for c in s.expand():
                if c.state == q and c.counters[0] == 0 and c.counters[1] > h:
                    return IncreasingCycle(h, s.trace_to(c), c.counters[1] - h)
    return None


# -- boundedness and termination ---------------------------------------------


def _pump_from_ancestors(model: Tvass, s: _Search, c: Configuration) -> Optional[UnboundedWitness]:
    """Look along the BFS-tree path to ``c`` for an ancestor that ``c`` pumps."""
    a = c
    tested = False
    while s.parent[a] is not None:
        a, tid = s.parent[a]
        tested = tested or model.transition(tid).is_test
        if a.state != c.state:
            continue
        (a1, a2), (c1, c2) = a.counters, c.counters
        if (a1 == c1 and c2 > a2) or (not tested and c1 >= a1 and c2 >= a2 and a != c):
            full = s.trace_to(c)
            k = len(s.trace_to(a))
            return UnboundedWitness(full[:k], full[k:])
    return None


def bounded(model: Tvass, source: Configuration, opts: Options = Options()) -> Verdict:
    """``YES``/``UNBOUNDED`` with a pump witness, ``NO``/``BOUNDED`` with the reachable-set size."""
    _require_dim2(model)
    model.check_configuration(source)
    cap_norm = opts.cap_norm
    bound = None
    if opts.const_c is not None:
        bound = boundedness_bound(model, source.counters, opts.const_c)
        cap_norm = bound + 1
    caps = {"cap_norm": cap_norm, "cap_steps": opts.cap_steps, "const_c": opts.const_c}
    s = _Search(model, source, cap_norm)
    while s.queue and s.expansions < opts.cap_steps:
        for c in s.expand():
            w = _pump_from_ancestors(model, s, c)
            if w is not None:
                return Verdict(Outcome.YES, "UNBOUNDED", w, caps, _stats(s))
            if bound is not None and norm(c.counters) > bound:
                return Verdict(
                    Outcome.YES,
                    "UNBOUNDED",
                    BoundExceeded(s.trace_to(c), bound, opts.const_c),
                    caps,
                    _stats(s),
                    f"a reachable configuration exceeds the boundedness bound for c={opts.const_c}",
                )
    stats = _stats(s)
    if s.closed:
        stats["reachable"] = len(s.parent)
        return Verdict(Outcome.NO, "BOUNDED", None, caps, stats)
    return Verdict(Outcome.UNKNOWN, "UNKNOWN", None, caps, stats, "no pump found within the caps")


def _stats(s: _Search) -> dict:
    return {"explored": len(s.parent), "expansions": s.expansions, "peak_frontier": s.peak}


def _find_lasso(model: Tvass, source: Configuration, nodes: Iterable[Configuration]) -> Optional[Lasso]:
    """A reachable exact-repeat cycle in the step graph restricted to ``nodes``."""
    nodes = set(nodes)
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(nodes, WHITE)
    colour[source] = GREY
    # stack of (configuration, successor iterator, transition id used to get here)
    stack = [(source, iter(list(model.successors(source))), None)]
    while stack:
        c, it, _ = stack[-1]
        for t, c2 in it:
            if c2 not in colour:
                continue
            if colour[c2] == GREY:
                path = [e[0] for e in stack]
                k = path.index(c2)
                ids = [e[2] for e in stack[k + 1 :]] + [t.id]
                prefix = [e[2] for e in stack[1 : k + 1]]
                return Lasso(tuple(prefix), tuple(ids))
            if colour[c2] == WHITE:
                colour[c2] = GREY
                stack.append((c2, iter(list(model.successors(c2))), t.id))
                break
        else:
            colour[c] = BLACK
            stack.pop()
    return None


def terminates(model: Tvass, source: Configuration, opts: Options = Options()) -> Verdict:
    """``YES``/``NONTERMINATING`` with a pump or a lasso, ``NO``/``TERMINATING`` when none exists."""
    _require_dim2(model)
    model.check_configuration(source)
    b = bounded(model, source, opts)
    caps, stats = b.caps, dict(b.stats)
    if b.outcome is Outcome.YES:
        if isinstance(b.certificate, UnboundedWitness):
            return Verdict(Outcome.YES, "NONTERMINATING", b.certificate, caps, stats, "unbounded, so some run is infinite")
        return Verdict(Outcome.YES, "NONTERMINATING", b.certificate, caps, stats, b.note)
    # re-enumerate within the same caps to get the explored node set
    s = _Search(model, source, b.caps["cap_norm"])
    while s.queue and s.expansions < opts.cap_steps:
        s.expand()
    lasso = _find_lasso(model, source, s.parent)
    if lasso is not None:
        return Verdict(Outcome.YES, "NONTERMINATING", lasso, caps, stats)
    if b.outcome is Outcome.NO:
        return Verdict(Outcome.NO, "TERMINATING", None, caps, stats)
    return Verdict(Outcome.UNKNOWN, "UNKNOWN", None, caps, stats, "no lasso in the explored part")


def check_unbounded_witness(model: Tvass, source: Configuration, w: UnboundedWitness) -> bool:
    """Replay the prefix and three pumps; each pump must return to the same state with growth."""
    if not isinstance(w, UnboundedWitness) or not w.pump:
        raise CertificateError("an unbounded witness needs a nonempty pump")
    for tid in tuple(w.prefix) + tuple(w.pump):
        if not model.has_transition(tid):
            raise CertificateError(f"unknown transition id {tid!r}")
    try:
        c = apply_trace(model, source, w.prefix)
    except UsageError:
        return False
    if c is None:
        return False
    anchor = c
    tested = any(model.transition(t).is_test for t in w.pump)
    seen = [c]
    for _ in range(3):
        try:
            c = apply_trace(model, c, w.pump)
        except UsageError:
            return False
        if c is None or c.state != anchor.state:
            return False
        seen.append(c)
    d = tuple(b - a for a, b in zip(seen[0].counters, seen[1].counters))
    if min(d) < 0 or d == (0, 0) or (tested and d[0] != 0):
        return False
    return all(
        tuple(b - a for a, b in zip(u.counters, v.counters)) == d for u, v in zip(seen, seen[1:])
    )


def check_lasso(model: Tvass, source: Configuration, lasso: Lasso) -> bool:
    if not isinstance(lasso, Lasso) or not lasso.cycle:
        raise CertificateError("a lasso needs a nonempty cycle")
    for tid in tuple(lasso.prefix) + tuple(lasso.cycle):
        if not model.has_transition(tid):
            raise CertificateError(f"unknown transition id {tid!r}")
    try:
        c = apply_trace(model, source, lasso.prefix)
        return c is not None and apply_trace(model, c, lasso.cycle) == c
    except UsageError:
        return False


def check_bound_exceeded(model: Tvass, source: Configuration, w: BoundExceeded) -> bool:
    try:
        c = apply_trace(model, source, w.trace)
    except UsageError:
        return False
    return c is not None and norm(c.counters) > w.bound == boundedness_bound(model, source.counters, w.c)
