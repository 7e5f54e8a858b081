"""Weighted one-counter automata and constructive pumping.

A WOCA is a 1-TVASS with unit actions whose transitions also carry a weight
in {-1, 0, 1}.  A 2-TVASS becomes a WOCA by keeping counter 1 as the counter
and moving counter 2 into the weight.  Weights are not guarded by
nonnegativity, so the WOCA over-approximates the 2-TVASS for small second
counters and is exact once the second counter is large enough.

The extractors below follow the classical hill-cutting arguments and return
factorizations that the caller can pump and replay.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence, Union

from .core import TST, Configuration, Trace, Transition, Tvass, UsageError, apply_trace, run_of
from .smallsol import Inconclusive

DEFAULT_SEARCH_BUDGET = 300
LPS_EXPONENT = 39


class ConstructionError(UsageError):
    """A sub-search needed by a construction failed; ``stage`` names it."""

    def __init__(self, message: str, stage: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class Woca:
    base: Tvass
    weights: dict = field(hash=False)

    def __post_init__(self):
        b = self.base
        if b.dimension != 1:
            raise UsageError("a WOCA has exactly one counter")
        if b.norm > 1:
            raise UsageError("WOCA actions must lie in {-1, 0, 1}")
        ids = {t.id for t in b.transitions}
        if set(self.weights) != ids:
            raise UsageError("every transition needs exactly one weight")
        if any(w not in (-1, 0, 1) for w in self.weights.values()):
            raise UsageError("weights must lie in {-1, 0, 1}")

    @classmethod
    def build(cls, states: Sequence[str], transitions: Sequence[tuple]) -> "Woca":
        """From ``(id, source, action, target, weight)`` with action an int or ``TST``."""
        ts, ws = [], {}
        for tid, src, action, dst, w in transitions:
            ts.append((tid, src, TST if action == TST else (int(action),), dst))
            ws[tid] = int(w)
        return cls(Tvass.build(1, states, ts, testable=True), ws)

    @property
    def num_states(self) -> int:
        return self.base.num_states

    def weight(self, pi: Sequence[str]) -> int:
        return sum(self.weights[self.base.transition(t).id] for t in pi)


OcaLike = Union[Woca, Tvass]


def _split(a: OcaLike) -> tuple[Tvass, Callable[[Sequence[str]], int]]:
    if isinstance(a, Woca):
        return a.base, a.weight
    if a.dimension != 1 or a.norm > 1:
        raise UsageError("expected a one-counter model with actions in {-1, 0, 1}")
    return a, lambda pi: 0


def weight(w: Woca, pi: Sequence[str]) -> int:
    return w.weight(pi)


# -- conversion --------------------------------------------------------------


@dataclass(frozen=True)
class TraceMap:
    """Translation between traces of a 2-TVASS and of its WOCA image."""

    chains: dict = field(hash=False)  # original id -> tuple of WOCA ids
    owner: dict = field(hash=False)  # WOCA id -> (original id, position in chain)

    def to_woca(self, pi: Sequence[str]) -> Trace:
        out: list[str] = []
        for tid in pi:
            try:
                out.extend(self.chains[tid])
            except KeyError:
                raise UsageError(f"unknown transition id {tid!r}") from None
        return tuple(out)

    def to_tvass(self, pi: Sequence[str]) -> Trace:
        """Inverse of :meth:`to_woca`; the WOCA trace must consist of whole chains."""
        out: list[str] = []
        pos = 0
        pi = tuple(pi)
        while pos < len(pi):
            if pi[pos] not in self.owner:
                raise UsageError(f"unknown WOCA transition {pi[pos]!r}")
            orig, idx = self.owner[pi[pos]]
            chain = self.chains[orig]
            if idx != 0 or pi[pos : pos + len(chain)] != chain:
                raise UsageError(f"trace splits the chain of {orig!r} at position {pos}")
            out.append(orig)
            pos += len(chain)
        return tuple(out)


def _unit_steps(t: Transition) -> list[tuple]:
    """``(counter action, weight)`` per unit step: counter steps first, then weight steps."""
    if t.is_test:
        return [(TST, 0)]
    a1, a2 = t.action
    steps = [(_sign(a1), 0)] * abs(a1) + [(0, _sign(a2))] * abs(a2)
    return steps or [(0, 0)]


def tvass_to_woca(model: Tvass) -> tuple[Woca, TraceMap]:
    """Unit-step WOCA whose counter is counter 1 and whose weight is the effect on counter 2.

    Each original transition becomes a chain through fresh intermediate
    states.  Single-step chains that would share source, counter action and
    target with a different weight are routed through an extra state, so that
    weight is a function of the (source, action, target) triple.
    """
    if model.dimension != 2:
        raise UsageError("conversion needs a 2-dimensional model")
    states = list(model.states)
    used_states = set(states)
    used_ids = {t.id for t in model.transitions}

    def fresh_state(base: str) -> str:
        name = base
        while name in used_states:
            name += "'"
        used_states.add(name)
        states.append(name)
        return name

    def fresh_id(base: str) -> str:
        name = base
        while name in used_ids:
            name += "'"
        used_ids.add(name)
        return name

    plans = {t.id: _unit_steps(t) for t in model.transitions}
    single_weights: dict[tuple, set] = {}
    for t in model.transitions:
        if len(plans[t.id]) == 1:
            act, w = plans[t.id][0]
            single_weights.setdefault((t.source, act, t.target), set()).add(w)

    transitions, weights, chains, owner = [], {}, {}, {}
    for t in model.transitions:
        steps = plans[t.id]
        if len(steps) == 1 and len(single_weights[(t.source, steps[0][0], t.target)]) > 1:
            steps = [(0, 0)] + steps
        if len(steps) == 1:
            ids = [t.id]
            path = [t.source, t.target]
        else:
            ids = [fresh_id(f"{t.id}.{i}") for i in range(1, len(steps) + 1)]
            path = [t.source] + [fresh_state(f"{t.id}@{i}") for i in range(1, len(steps))] + [t.target]
        for i, ((act, w), wid) in enumerate(zip(steps, ids)):
            transitions.append((wid, path[i], TST if act == TST else (act,), path[i + 1]))
            weights[wid] = w
            owner[wid] = (t.id, i)
        chains[t.id] = tuple(ids)
    base = Tvass.build(1, states, transitions, testable=True)
    return Woca(base, weights), TraceMap(chains, owner)


# -- pumping extractors ------------------------------------------------------


def _counter_profile(model: Tvass, p: str, pi: Sequence[str]) -> tuple[list[str], list[int]]:
    run = run_of(model, Configuration(p, (0,)), pi)
    if run is None:
        raise UsageError("trace is not a run from counter 0")
    if run.target.counters[0] != 0:
        raise UsageError("run must end with counter 0")
    return [c.state for c in run.configurations], [c.counters[0] for c in run.configurations]


@dataclass(frozen=True)
class HillFactorization:
    """``alpha beta_1..beta_m gamma theta_m..theta_1 eta``; ``theta[i]`` pairs with ``beta[i]``."""

    alpha: Trace
    beta: tuple[Trace, ...]
    gamma: Trace
    theta: tuple[Trace, ...]
    eta: Trace
    r: str
    s: str
    levels: tuple[int, ...]
    low: bool

    def pump(self, ns: Sequence[int]) -> Trace:
        if len(ns) != len(self.beta):
            raise UsageError(f"expected {len(self.beta)} exponents")
        out = list(self.alpha)
        for b, n in zip(self.beta, ns):
            out += b * n
        out += self.gamma
        for t, n in reversed(list(zip(self.theta, ns))):
            out += t * n
        out += self.eta
        return tuple(out)

    def concatenation(self) -> Trace:
        return self.pump([1] * len(self.beta))


def hill_cut(a: OcaLike, p: str, pi: Sequence[str], m: int) -> HillFactorization:
    """Factor a run ``p(0) -pi-> q(0)`` with ``|pi| >= m^2 |Q|^3`` into m nested pumpable pairs."""
    if m < 1:
        raise UsageError("m must be positive")
    model, _ = _split(a)
    Q = model.num_states
    pi = tuple(pi)
    need = m * m * Q**3
    if len(pi) < need:
        raise UsageError(f"hill cutting needs a trace of length >= m^2|Q|^3 = {need}, got {len(pi)}")
    states, xs = _counter_profile(model, p, pi)
    n = len(pi)
    threshold = m * Q * Q

    if max(xs) < threshold:
        seen: dict[tuple, list[int]] = {}
        for i in range(n + 1):
            occ = seen.setdefault((states[i], xs[i]), [])
            occ.append(i)
            if len(occ) == m + 1:
                break
        else:  # pragma: no cover - excluded by the pigeonhole count
            raise AssertionError("no configuration repeats m+1 times")
        pos = occ
        return HillFactorization(
            alpha=pi[: pos[0]],
            beta=tuple(pi[pos[k - 1] : pos[k]] for k in range(1, m + 1)),
            gamma=(),
            theta=((),) * m,
            eta=pi[pos[m] :],
            r=states[pos[0]],
            s=states[pos[0]],
            levels=(xs[pos[0]],) * (m + 1),
            low=True,
        )

    top = xs.index(max(xs))
    pairs: dict[tuple, list[int]] = {}
    ii, jj = {}, {}
    chosen = None
    for lvl in range(threshold + 1):
        ii[lvl] = max(i for i in range(top + 1) if xs[i] == lvl)
        jj[lvl] = min(j for j in range(top, n + 1) if xs[j] == lvl)
        occ = pairs.setdefault((states[ii[lvl]], states[jj[lvl]]), [])
        occ.append(lvl)
        if len(occ) == m + 1:
            chosen = occ
            break
    if chosen is None:  # pragma: no cover - excluded by the pigeonhole count
        raise AssertionError("no state pair repeats m+1 times")
    I = [ii[lvl] for lvl in chosen]
    J = [jj[lvl] for lvl in chosen]
    return HillFactorization(
        alpha=pi[: I[0]],
        beta=tuple(pi[I[k - 1] : I[k]] for k in range(1, m + 1)),
        gamma=pi[I[m] : J[m]],
        theta=tuple(pi[J[k] : J[k - 1]] for k in range(1, m + 1)),
        eta=pi[J[0] :],
        r=states[I[0]],
        s=states[J[0]],
        levels=tuple(chosen),
        low=False,
    )


@dataclass(frozen=True)
class ShortCycleFactorization:
    r: str
    s: str
    x: int
    d: int
    alpha: Trace
    beta: Trace
    gamma: Trace
    theta: Trace
    eta: Trace

    def pump(self, n: int) -> Trace:
        return self.alpha + self.beta * n + self.gamma + self.theta * n + self.eta


def cut_short_cycles(a: OcaLike, p: str, pi: Sequence[str]) -> ShortCycleFactorization:
    """Factor a run ``p(0) -pi-> q(0)`` with ``|pi| >= 2|Q|^3`` into one short pumpable pair."""
    model, _ = _split(a)
    Q = model.num_states
    pi = tuple(pi)
    if len(pi) < 2 * Q**3:
        raise UsageError(f"needs a trace of length >= 2|Q|^3 = {2 * Q**3}, got {len(pi)}")
    states, xs = _counter_profile(model, p, pi)
    n = len(pi)
    low, mid = 2 * Q * Q, Q * Q

    # first, a repeated configuration inside a window staying below 2|Q|^2
    window: dict[tuple, int] = {}
    for k in range(n + 1):
        if xs[k] >= low:
            window.clear()
            continue
        key = (states[k], xs[k])
        if key in window:
            h = window[key]
            return ShortCycleFactorization(
                states[h], states[h], xs[h], 0, pi[:h], pi[h:k], (), (), pi[k:]
            )
        window[key] = k

    top = xs.index(max(xs))
    i0 = max(i for i in range(top + 1) if xs[i] == mid)
    j0 = min(j for j in range(top, n + 1) if xs[j] == mid)
    ii, jj = {0: i0}, {0: j0}
    for lvl in range(1, mid + 1):
        ii[lvl] = min(i for i in range(i0, n + 1) if xs[i] == mid + lvl)
        jj[lvl] = max(j for j in range(j0 + 1) if xs[j] == mid + lvl)
    seen: dict[tuple, int] = {}
    for lp in range(mid + 1):
        key = (states[ii[lp]], states[jj[lp]])
        if key in seen:
            lvl = seen[key]
            break
        seen[key] = lp
    else:  # pragma: no cover - excluded by the pigeonhole count
        raise AssertionError("no repeated state pair")
    return ShortCycleFactorization(
        r=states[ii[lvl]],
        s=states[jj[lvl]],
        x=mid + lvl,
        d=lp - lvl,
        alpha=pi[: ii[lvl]],
        beta=pi[ii[lvl] : ii[lp]],
        gamma=pi[ii[lp] : jj[lp]],
        theta=pi[jj[lp] : jj[lvl]],
        eta=pi[jj[lvl] :],
    )


# -- short-run searches ------------------------------------------------------


def short_run_bound(num_states: int, x: int, y: int) -> int:
    return (num_states + x + y) ** 3


def short_run(a: OcaLike, p: str, x: int, q: str, y: int, cap: Optional[int] = None) -> Optional[Trace]:
    """Shortest run ``p(x) -> q(y)``; complete up to length ``(|Q|+x+y)^3 - 1``.

    ``cap`` limits the explored length; if it stops the search early,
    :class:`~tvass.smallsol.Inconclusive` is raised instead of returning ``None``.
    """
    model, _ = _split(a)
    bound = short_run_bound(model.num_states, x, y)
    depth = bound - 1 if cap is None else min(cap, bound - 1)
    start, goal = Configuration(p, (x,)), Configuration(q, (y,))
    model.check_configuration(start)
    model.check_configuration(goal)
    if start == goal:
        return ()
    parent: dict[Configuration, tuple] = {start: None}
    frontier = [start]
    for level in range(1, depth + 1):
        nxt = []
        for c in frontier:
            for t, c2 in model.successors(c):
                # unit decrements: anything higher cannot come back down in time
                if c2 in parent or c2.counters[0] - y > depth - level:
                    continue
                parent[c2] = (c, t.id)
                if c2 == goal:
                    trace = []
                    while parent[c2] is not None:
                        c2, tid = parent[c2]
                        trace.append(tid)
                    return tuple(reversed(trace))
                nxt.append(c2)
        frontier = nxt
        if not frontier:
            return None
    if depth < bound - 1:
        raise Inconclusive(depth, bound - 1)
    return None


class SignedRun(NamedTuple):
    trace: Optional[Trace]
    complete: bool


def signed_run_bound(num_states: int) -> int:
    return 539 * num_states**9


def _layered(
    w: Woca,
    p: str,
    q: str,
    max_len: int,
    modulus: int,
    better: Callable[[int, int], bool],
    accept: Callable[[int], bool],
) -> Optional[Trace]:
    """Shortest run ``p(0) -> q(0)`` whose weight passes ``accept``.

    Per length, each (state, counter, weight mod ``modulus``) keeps only its
    extreme weight under ``better``; extending a run adds the same weight to
    every run in a class, so the extreme one is the best candidate.
    """
    model = w.base
    layers: list[dict] = [{(p, 0, 0): (0, None, None)}]
    if p == q and accept(0):
        return ()
    for level in range(1, max_len + 1):
        cur, nxt = layers[-1], {}
        for key, (wt, _, _) in cur.items():
            s, c, _ = key
            for t, c2 in model.successors(Configuration(s, (c,))):
                x2 = c2.counters[0]
                if x2 > max_len - level:
                    continue
                w2 = wt + w.weights[t.id]
                k2 = (c2.state, x2, w2 % modulus)
                old = nxt.get(k2)
                if old is None or better(w2, old[0]):
                    nxt[k2] = (w2, key, t.id)
        layers.append(nxt)
        for (s, c, _), (wt, _, _) in nxt.items():
            if s == q and c == 0 and accept(wt):
                trace = []
                key = (s, c, wt % modulus)
                for lay in reversed(layers[1:]):
                    _, prev, tid = lay[key]
                    trace.append(tid)
                    key = prev
                return tuple(reversed(trace))
        if not nxt:
            return None
    return None


def short_signed_run(
    w: Woca, p: str, q: str, sign: int, cap: Optional[int] = None, budget: int = DEFAULT_SEARCH_BUDGET
) -> SignedRun:
    """Shortest run ``p(0) -> q(0)`` with weight of sign ``sign``.

    The complete length bound ``539|Q|^9`` is the default cap, clipped to
    ``budget``; ``complete`` reports whether an absent result is a proof.
    """
    if sign not in (1, -1):
        raise UsageError("sign must be +1 or -1")
    if cap is not None and cap < 1:
        raise UsageError("cap must be positive")
    bound = signed_run_bound(w.num_states)
    if not any(_sign(v) == sign for v in w.weights.values()):
        return SignedRun(None, True)
    limit = min(bound if cap is None else cap, budget)
    better = (lambda a, b: a > b) if sign > 0 else (lambda a, b: a < b)
    trace = _layered(w, p, q, limit, 1, better, lambda v: _sign(v) == sign)
    return SignedRun(trace, trace is not None or limit >= bound)


def weight_mod_bound(num_states: int, m: int) -> int:
    return m * m * num_states**3


def run_weight_mod(w: Woca, p: str, q: str, target_w: int, m: int) -> Optional[Trace]:
    """Shortest run ``p(0) -> q(0)`` with weight congruent to ``target_w`` mod ``m``, length < m^2|Q|^3."""
    if m < 1:
        raise UsageError("modulus must be positive")
    max_len = weight_mod_bound(w.num_states, m) - 1
    model = w.base
    goal_r = target_w % m
    start = (p, 0, 0)
    if p == q and goal_r == 0:
        return ()
    parent = {start: None}
    queue = deque([(start, 0)])
    while queue:
        key, depth = queue.popleft()
        if depth == max_len:
            continue
        s, c, r = key
        for t, c2 in model.successors(Configuration(s, (c,))):
            x2 = c2.counters[0]
            if x2 > max_len - depth - 1:
                continue
            k2 = (c2.state, x2, (r + w.weights[t.id]) % m)
            if k2 in parent:
                continue
            parent[k2] = (key, t.id)
            if k2 == (q, 0, goal_r):
                trace = []
                while parent[k2] is not None:
                    k2, tid = parent[k2]
                    trace.append(tid)
                return tuple(reversed(trace))
            queue.append((k2, depth + 1))
    return None


# -- small LPS for weights ---------------------------------------------------


@dataclass(frozen=True)
class WeightCertificate:
    alpha: Trace
    beta: Trace
    n: int
    w: int

    def trace(self) -> Trace:
        return tuple(self.alpha) + tuple(self.beta) * self.n


def lps_weight_bound(num_states: int) -> int:
    return (2 * num_states) ** LPS_EXPONENT


def check_weight_certificate(w: Woca, p: str, q: str, cert: WeightCertificate) -> bool:
    model = w.base
    q0 = Configuration(q, (0,))
    return (
        cert.n >= 0
        and apply_trace(model, Configuration(p, (0,)), cert.trace()) == q0
        and apply_trace(model, q0, cert.beta) == q0
        and w.weight(cert.trace()) == cert.w
        and len(cert.alpha) + len(cert.beta) <= lps_weight_bound(w.num_states)
    )


def lps_weight_certificate(
    w: Woca, p: str, q: str, target_w: int, budget: int = DEFAULT_SEARCH_BUDGET
) -> Optional[WeightCertificate]:
    """``(alpha, cycle, n)`` with ``p(0) -alpha cycle^n-> q(0)`` of weight ``target_w``.

    Assumes ``p(0)`` reaches ``q(0)`` with weight ``target_w`` and that ``q(0)``
    reaches back to ``p(0)``.  Returns ``None`` when ``q(0)`` is not reachable
    from ``p(0)`` at all; raises :class:`ConstructionError` when a later step
    contradicts the assumption (or a budgeted cycle search missed a cycle).
    """
    for s in (p, q):
        w.base.check_configuration(Configuration(s, (0,)))
    if run_weight_mod(w, p, q, 0, 1) is None:
        return None
    pos = short_signed_run(w, q, q, +1, budget=budget).trace or ()
    neg = short_signed_run(w, q, q, -1, budget=budget).trace or ()
    lb, lt = w.weight(pos), w.weight(neg)

    if pos and neg:
        m = -lb * lt
        alpha = run_weight_mod(w, p, q, target_w, m)
        stage = "congruent run"
    else:
        m = lb if pos else (-lt if neg else 1)
        max_len = weight_mod_bound(w.num_states, m) - 1
        if pos:
            # no negative cycle known: the leftover weight must be >= 0
            alpha = _layered(w, p, q, max_len, m, lambda a, b: a < b, lambda v: (target_w - v) % m == 0 and v <= target_w)
        elif neg:
            alpha = _layered(w, p, q, max_len, m, lambda a, b: a > b, lambda v: (target_w - v) % m == 0 and v >= target_w)
        else:
            alpha = run_weight_mod(w, p, q, target_w, 1)
        stage = "compensable run"
    if alpha is None:
        raise ConstructionError(f"no run p(0)->q(0) of weight = {target_w} mod {m} within {m}^2|Q|^3", stage)
    u = target_w - w.weight(alpha)
    if u == 0:
        cert = WeightCertificate(alpha, pos or neg, 0, target_w)
    elif u > 0 and pos:
        cert = WeightCertificate(alpha, pos, u // lb, target_w)
    elif u < 0 and neg:
        cert = WeightCertificate(alpha, neg, u // lt, target_w)
    else:
        raise ConstructionError(f"weight gap {u} has no compensating cycle on {q}(0)", "cycle search")
    if u % (lb if u > 0 else lt or 1):
        raise ConstructionError(f"weight gap {u} is not a multiple of the cycle weight", "congruent run")
    if not check_weight_certificate(w, p, q, cert):  # pragma: no cover - construction invariant
        raise AssertionError("constructed certificate does not replay")
    return cert
