"""Linear path schemes and their linear-inequality encoding.

A scheme ``a0 b1* a1 ... bk* ak`` together with counts ``n1..nk`` denotes
the concrete path ``a0 b1^n1 a1 ... bk^nk ak``.  The relation of a single
feasible path (or of an iterated feasible cycle) is characterised by its
displacement and its minimal-prefix vector, which turns reachability through
a scheme into a small system of inequalities over the counts.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    Configuration,
    IntVector,
    Trace,
    Tvass,
    UsageError,
    apply_trace,
    is_cycle,
    mirror,
    path_endpoints,
    reverse,
    vadd,
    vscale,
    zero,
)
from .smallsol import DEFAULT_BUDGET, Inconclusive, InhomSystem, find_small_solution


class InfeasibleSegment(UsageError):
    def __init__(self, message: str, segment: Optional[str] = None):
        super().__init__(message)
        self.segment = segment


class DominanceOrder(enum.Enum):
    FULL = "full"
    FIRST_EXACT = "first_exact"

    def holds(self, x: Sequence[int], m: Sequence[int]) -> bool:
        """``x`` dominates ``m``: componentwise ``>=``, with equality on counter 1 for FIRST_EXACT."""
        if self is DominanceOrder.FIRST_EXACT and x[0] != m[0]:
            return False
        return all(a >= b for a, b in zip(x, m))


@dataclass(frozen=True)
class LinearPathScheme:
    alpha: tuple[Trace, ...]
    beta: tuple[Trace, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(tuple(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(tuple(b) for b in self.beta))
        if len(self.alpha) != len(self.beta) + 1:
            raise UsageError("a scheme with k cycles has k+1 connecting paths")

    @classmethod
    def path(cls, pi: Sequence[str]) -> "LinearPathScheme":
        return cls((tuple(pi),), ())

    @property
    def star_length(self) -> int:
        return len(self.beta)

    def __len__(self) -> int:
        return sum(map(len, self.alpha)) + sum(map(len, self.beta))

    def skeleton(self) -> Trace:
        """``a0 b1 a1 ... bk ak``, the path underlying the scheme."""
        return self.instantiate((1,) * self.star_length)

    def instantiate(self, counts: Sequence[int]) -> Trace:
        if len(counts) != self.star_length:
            raise UsageError(f"expected {self.star_length} counts, got {len(counts)}")
        out = list(self.alpha[0])
        for b, n, a in zip(self.beta, counts, self.alpha[1:]):
            if n < 0:
                raise UsageError("cycle counts must be nonnegative")
            out.extend(b * n)
            out.extend(a)
        return tuple(out)

    def drop_cycles(self, keep: Sequence[bool]) -> "LinearPathScheme":
        """Remove cycles whose ``keep`` flag is false, merging the paths around them."""
        alpha = [list(self.alpha[0])]
        beta = []
        for b, flag, a in zip(self.beta, keep, self.alpha[1:]):
            if flag:
                beta.append(b)
                alpha.append(list(a))
            else:
                alpha[-1].extend(a)
        return LinearPathScheme(tuple(map(tuple, alpha)), tuple(beta))

    def validate(self, model: Tvass) -> Optional[tuple[str, str]]:
        """Check the scheme is a path whose starred factors are cycles; return its endpoints."""
        for j, b in enumerate(self.beta, 1):
            if not b:
                raise UsageError(f"cycle {j} is empty")
            if not is_cycle(model, b):
                raise UsageError(f"cycle {j} is not a cycle")
        return path_endpoints(model, self.skeleton())

    def __str__(self) -> str:
        parts = []
        for j, a in enumerate(self.alpha):
            if a:
                parts.append("·".join(a))
            if j < len(self.beta):
                parts.append("(" + "·".join(self.beta[j]) + ")*")
        return "·".join(parts) or "ε"


@dataclass(frozen=True)
class CountedLps:
    scheme: LinearPathScheme
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        if len(self.counts) != self.scheme.star_length:
            raise UsageError("counts length must equal the number of cycles")
        if any(n < 0 for n in self.counts):
            raise UsageError("cycle counts must be nonnegative")

    def trace(self) -> Trace:
        return self.scheme.instantiate(self.counts)


@dataclass(frozen=True)
class IneqRow:
    coeffs: tuple[int, ...]
    const: int
    tag: str

    def holds(self, n: Sequence[int]) -> bool:
        return sum(a * v for a, v in zip(self.coeffs, n)) >= self.const


@dataclass(frozen=True)
class IneqSystem:
    """Rows ``coeffs . n >= const`` over nonnegative counts, each tagged with its origin."""

    num_vars: int
    rows: tuple[IneqRow, ...]

    def __post_init__(self):
        if any(len(r.coeffs) != self.num_vars for r in self.rows):
            raise ValueError("row width does not match num_vars")

    def satisfied_by(self, n: Sequence[int]) -> bool:
        return all(v >= 0 for v in n) and all(r.holds(n) for r in self.rows)

    def violations(self, n: Sequence[int]) -> list[str]:
        return [r.tag for r in self.rows if not r.holds(n)]

    def to_inhom(self) -> InhomSystem:
        return InhomSystem(tuple(r.coeffs for r in self.rows), tuple(r.const for r in self.rows))

    def shifted(self) -> "IneqSystem":
        """Substitute ``n_j = 1 + n'_j`` for every variable."""
        return IneqSystem(
            self.num_vars,
            tuple(IneqRow(r.coeffs, r.const - sum(r.coeffs), r.tag) for r in self.rows),
        )


def displacement(model: Tvass, pi: Sequence[str]) -> IntVector:
    d = zero(model.dimension)
    for tid in pi:
        t = model.transition(tid)
        if not t.is_test:
            d = vadd(d, t.action)
    return d


def min_prefix_vector(model: Tvass, pi: Sequence[str]) -> IntVector:
    """Componentwise max over prefixes of the negated displacement."""
    d = zero(model.dimension)
    m = zero(model.dimension)
    for tid in pi:
        t = model.transition(tid)
        if not t.is_test:
            d = vadd(d, t.action)
            m = tuple(max(a, -b) for a, b in zip(m, d))
    return m


def dominance_of(model: Tvass, pi: Sequence[str]) -> DominanceOrder:
    if any(model.transition(tid).is_test for tid in pi):
        return DominanceOrder.FIRST_EXACT
    return DominanceOrder.FULL


def is_feasible(model: Tvass, pi: Sequence[str]) -> bool:
    """Whether some start configuration lets ``pi`` run to completion.

    Simulating from the minimal-prefix vector decides it: a feasible path is
    enabled from every start dominating that vector.
    """
    ends = path_endpoints(model, pi)
    if ends is None:
        return True
    return apply_trace(model, Configuration(ends[0], min_prefix_vector(model, pi)), pi) is not None


def _require_feasible(model: Tvass, pi: Sequence[str], what: str = "path") -> None:
    if not is_feasible(model, pi):
        raise InfeasibleSegment(f"{what} {'·'.join(pi) or 'ε'} is not feasible", what)


def path_relation(model: Tvass, pi: Sequence[str], x: Sequence[int], y: Sequence[int]) -> bool:
    """Closed-form test of ``p(x) -pi-> q(y)`` for a feasible path."""
    _require_feasible(model, pi)
    x, y = tuple(x), tuple(y)
    return dominance_of(model, pi).holds(x, min_prefix_vector(model, pi)) and y == vadd(
        x, displacement(model, pi)
    )


def reversed_min_prefix(model: Tvass, pi: Sequence[str]) -> IntVector:
    """Minimal-prefix vector of the mirrored path in the reversed model."""
    return min_prefix_vector(reverse(model), mirror(pi))


def cycle_relation(model: Tvass, beta: Sequence[str], x: Sequence[int], y: Sequence[int], n: int) -> bool:
    """Closed-form test of ``q(x) -beta^n-> q(y)`` for a feasible cycle and ``n >= 1``."""
    if n < 1:
        raise UsageError("cycle_relation needs n >= 1")
    if not is_cycle(model, beta):
        raise UsageError("beta is not a cycle")
    _require_feasible(model, beta, "cycle")
    x, y = tuple(x), tuple(y)
    order = dominance_of(model, beta)
    return (
        order.holds(x, min_prefix_vector(model, beta))
        and order.holds(y, reversed_min_prefix(model, beta))
        and y == vadd(x, vscale(n, displacement(model, beta)))
    )


def _affine_rows(order: DominanceOrder, const: IntVector, coeffs: list[list[int]], m: IntVector, tag: str):
    """Rows for ``expr >= m`` (or its FIRST_EXACT variant) with ``expr = const + coeffs . n``."""
    rows = []
    for i, (c, a, mi) in enumerate(zip(const, coeffs, m)):
        rows.append(IneqRow(tuple(a), mi - c, f"{tag}[{i + 1}]>="))
        if i == 0 and order is DominanceOrder.FIRST_EXACT:
            rows.append(IneqRow(tuple(-v for v in a), c - mi, f"{tag}[1]<="))
    return rows


def build_system(model: Tvass, L: LinearPathScheme, x: Sequence[int], y: Sequence[int]) -> IneqSystem:
    """Inequalities over the cycle counts of ``L`` characterising runs from ``x`` to ``y``."""
    L.validate(model)
    for j, a in enumerate(L.alpha):
        if not is_feasible(model, a):
            raise InfeasibleSegment(f"path alpha{j} is not feasible", f"alpha{j}")
    for j, b in enumerate(L.beta, 1):
        if not is_feasible(model, b):
            raise InfeasibleSegment(f"cycle beta{j} is not feasible", f"beta{j}")

    k = L.star_length
    d = model.dimension
    const = tuple(int(v) for v in x)
    coeffs = [[0] * k for _ in range(d)]
    rows: list[IneqRow] = []

    def snapshot():
        return const, [list(r) for r in coeffs]

    for j in range(k + 1):
        a = L.alpha[j]
        c0, a0 = snapshot()
        rows += _affine_rows(dominance_of(model, a), c0, a0, min_prefix_vector(model, a), f"alpha{j}:entry")
        const = vadd(const, displacement(model, a))
        if j == k:
            break
        b = L.beta[j]
        order = dominance_of(model, b)
        c0, a0 = snapshot()
        rows += _affine_rows(order, c0, a0, min_prefix_vector(model, b), f"beta{j + 1}:entry")
        db = displacement(model, b)
        for i in range(d):
            coeffs[i][j] += db[i]
        c0, a0 = snapshot()
        rows += _affine_rows(order, c0, a0, reversed_min_prefix(model, b), f"beta{j + 1}:exit")

    for i in range(d):
        rows.append(IneqRow(tuple(coeffs[i]), int(y[i]) - const[i], f"target[{i + 1}]>="))
        rows.append(IneqRow(tuple(-v for v in coeffs[i]), const[i] - int(y[i]), f"target[{i + 1}]<="))
    return IneqSystem(k, tuple(rows))


def eval_counts(model: Tvass, cert: CountedLps, x: Sequence[int]) -> Optional[Configuration]:
    """Replay the concrete path of a counted scheme from ``p(x)``."""
    ends = cert.scheme.validate(model)
    if ends is None:
        raise UsageError("cannot place an empty scheme; use apply_trace with an explicit state")
    return apply_trace(model, Configuration(ends[0], tuple(x)), cert.trace())


def lps_reach(
    model: Tvass,
    L: LinearPathScheme,
    x: Sequence[int],
    y: Sequence[int],
    budget: int = DEFAULT_BUDGET,
) -> Optional[tuple[int, ...]]:
    """Counts making ``L`` go from ``p(x)`` to ``q(y)``, or ``None`` if none exist.

    Every subset of cycles is tried with the dropped cycles at count 0 and the
    kept ones shifted to ``1 + n'``, so the converse direction of the system
    encoding applies.  Raises :class:`~tvass.smallsol.Inconclusive` if some
    subset could be neither solved nor refuted within ``budget``.
    """
    ends = L.validate(model)
    x, y = tuple(x), tuple(y)
    if ends is None:
        raise UsageError("cannot place an empty scheme")
    p, q = ends
    for j, b in enumerate(L.beta, 1):
        if not is_feasible(model, b):
            raise InfeasibleSegment(f"cycle beta{j} is not feasible", f"beta{j}")
    k = L.star_length
    inconclusive = None
    # fewer cycles first: smaller systems and shorter witnesses
    for keep in sorted(itertools.product((False, True), repeat=k), key=lambda f: (sum(f), f)):
        sub = L.drop_cycles(keep)
        if not all(is_feasible(model, a) for a in sub.alpha):
            continue
        system = build_system(model, sub, x, y).shifted()
        try:
            sol = find_small_solution(system.to_inhom(), budget)
        except Inconclusive as exc:
            inconclusive = exc
            continue
        if sol is None:
            continue
        it = iter(sol)
        counts = tuple(1 + next(it) if flag else 0 for flag in keep)
        end = apply_trace(model, Configuration(p, x), L.instantiate(counts))
        if end != Configuration(q, y):  # pragma: no cover - would contradict the encoding
            raise AssertionError(f"system solution {counts} does not replay")
        return counts
    if inconclusive is not None:
        raise inconclusive
    return None
