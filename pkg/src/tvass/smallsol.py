"""Small nonnegative solutions of integer linear systems.

Homogeneous systems ``M x = 0`` are handled through their minimal solutions
(the Hilbert basis), whose coordinate sums are bounded by ``(1+m)^k``.
Inhomogeneous systems ``M x >= b`` are searched by iterative deepening on
the coordinate sum, which is complete up to ``(2+m)^(k+1+e)``.

All bounds are exact Python ints and are checked against a budget before
any enumeration starts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

IntVector = tuple[int, ...]

DEFAULT_BUDGET = 256


class BoundTooLarge(RuntimeError):
    """The enumeration range exceeds the caller's budget."""

    def __init__(self, bound: int, budget: int):
        super().__init__(f"bound {bound} exceeds enumeration budget {budget}")
        self.bound = bound
        self.budget = budget


class Inconclusive(RuntimeError):
    """Nothing was found, but the searched range did not reach a completeness bound."""

    def __init__(self, searched: int, bound: int):
        super().__init__(f"no solution with coordinate sum <= {searched}; complete bound is {bound}")
        self.searched = searched
        self.bound = bound


def _matrix(rows: Sequence[Sequence[int]]) -> tuple[IntVector, ...]:
    return tuple(tuple(int(a) for a in row) for row in rows)


@dataclass(frozen=True)
class HomSystem:
    """``M x = 0`` over nonnegative integer vectors."""

    matrix: tuple[IntVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrix", _matrix(self.matrix))
        if not self.matrix or not self.matrix[0]:
            raise ValueError("need at least one row and one column")
        if len({len(r) for r in self.matrix}) != 1:
            raise ValueError("ragged matrix")

    @property
    def num_vars(self) -> int:
        return len(self.matrix[0])

    @property
    def m(self) -> int:
        return max(sum(abs(a) for a in row) for row in self.matrix)

    def is_solution(self, x: Sequence[int]) -> bool:
        return all(v >= 0 for v in x) and all(
            sum(a * v for a, v in zip(row, x)) == 0 for row in self.matrix
        )


@dataclass(frozen=True)
class InhomSystem:
    """``M x >= b`` over nonnegative integer vectors."""

    matrix: tuple[IntVector, ...]
    b: IntVector

    def __post_init__(self):
        object.__setattr__(self, "matrix", _matrix(self.matrix))
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        if len(self.matrix) != len(self.b):
            raise ValueError("matrix and b disagree on the number of rows")
        if self.matrix and len({len(r) for r in self.matrix}) != 1:
            raise ValueError("ragged matrix")

    @property
    def num_vars(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    @property
    def num_rows(self) -> int:
        return len(self.matrix)

    @property
    def m(self) -> int:
        return max(
            (sum(abs(a) for a in row) + abs(c) for row, c in zip(self.matrix, self.b)),
            default=0,
        )

    def is_solution(self, x: Sequence[int]) -> bool:
        return all(v >= 0 for v in x) and all(
            sum(a * v for a, v in zip(row, x)) >= c for row, c in zip(self.matrix, self.b)
        )


def pottier_bound(sys: HomSystem) -> int:
    return (1 + sys.m) ** sys.num_vars


def corollary_bound(sys: InhomSystem) -> int:
    return (2 + sys.m) ** (sys.num_vars + 1 + sys.num_rows)


def compositions(total: int, k: int) -> Iterator[IntVector]:
    """Vectors of ``k`` naturals summing to ``total``, in lexicographic order."""
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, k - 1):
            yield (first,) + rest


def _bounded_compositions(total: int, upper: Sequence[Optional[int]]) -> Iterator[IntVector]:
    """Like ``compositions`` but skipping vectors above per-variable upper bounds."""
    k = len(upper)
    if k == 0:
        if total == 0:
            yield ()
        return
    u = upper[0]
    hi = total if u is None else min(total, u)
    if k == 1:
        if total <= hi:
            yield (total,)
        return
    for first in range(hi + 1):
        for rest in _bounded_compositions(total - first, upper[1:]):
            yield (first,) + rest


def minimal_homogeneous(sys: HomSystem, budget: int = 10_000) -> set[IntVector]:
    """All minimal nonzero solutions of ``M y = 0``, by enumeration up to the Pottier bound."""
    bound = pottier_bound(sys)
    if bound > budget:
        raise BoundTooLarge(bound, budget)
    k = sys.num_vars
    found: list[IntVector] = []
    for s in range(1, bound + 1):
        for y in compositions(s, k):
            if not sys.is_solution(y):
                continue
            # everything found earlier has a smaller sum, so dominance is the only obstruction
            if any(all(a <= b for a, b in zip(g, y)) for g in found):
                continue
            found.append(y)
    return set(found)


def decompose(sys: HomSystem, x: Sequence[int], budget: int = 10_000) -> list[IntVector]:
    """Write a solution as a sum of minimal solutions (greedy subtraction)."""
    x = tuple(int(v) for v in x)
    if len(x) != sys.num_vars or not sys.is_solution(x):
        raise ValueError(f"{x} is not a nonnegative solution")
    gens = sorted(minimal_homogeneous(sys, budget), key=lambda g: (sum(g), g))
    parts: list[IntVector] = []
    while any(x):
        for g in gens:
            if all(a <= b for a, b in zip(g, x)):
                parts.append(g)
                x = tuple(b - a for a, b in zip(g, x))
                break
        else:  # pragma: no cover - impossible for a true solution
            raise AssertionError("no generator below a nonzero solution")
    return parts


def upper_bounds(sys: InhomSystem) -> list[Optional[int]]:
    """Per-variable upper bounds valid for some minimal-sum solution (``None`` = unbounded).

    A row ``a.x >= c`` with ``a_j < 0`` bounds ``x_j`` as soon as every other
    variable with a positive coefficient is already bounded.
    """
    k = sys.num_vars
    ub: list[Optional[int]] = [None] * k
    for j in range(k):
        # raising such a variable never helps, so minimal solutions keep it at 0
        if all(row[j] <= 0 for row in sys.matrix):
            ub[j] = 0
    changed = True
    while changed:
        changed = False
        for row, c in zip(sys.matrix, sys.b):
            for j, aj in enumerate(row):
                if aj >= 0:
                    continue
                slack = 0
                ok = True
                for i, ai in enumerate(row):
                    if i == j or ai <= 0:
                        continue
                    if ub[i] is None:
                        ok = False
                        break
                    slack += ai * ub[i]
                if not ok:
                    continue
                # -|aj| x_j >= c - slack
                limit = (slack - c) // (-aj)
                limit = max(limit, -1)
                if ub[j] is None or limit < ub[j]:
                    ub[j] = limit
                    changed = True
    return ub


def _equality_obstruction(sys: InhomSystem) -> bool:
    """True if two opposite rows force ``a.x = c`` with ``gcd(a)`` not dividing ``c``."""
    rows = {}
    for row, c in zip(sys.matrix, sys.b):
        rows[row] = max(rows.get(row, c), c)
    for row, c in rows.items():
        neg = tuple(-a for a in row)
        if neg in rows and rows[neg] == -c:
            g = math.gcd(*row)
            if g == 0:
                if c != 0:
                    return True
            elif c % g:
                return True
    return False


def _farkas_obstruction(sys: InhomSystem, top: int = 4) -> bool:
    """True if a small nonnegative row combination reads ``(<= 0) . x >= (> 0)``.

    All multiplier vectors in ``[0, top]`` are tried for up to four rows,
    otherwise only pairs of rows.
    """
    rows = list(zip(sys.matrix, sys.b))
    e = len(rows)

    def refutes(mult) -> bool:
        const = sum(l * c for l, (_, c) in zip(mult, rows))
        if const <= 0:
            return False
        return all(sum(l * r[j] for l, (r, _) in zip(mult, rows)) <= 0 for j in range(sys.num_vars))

    if e <= 4:
        return any(refutes(mult) for mult in itertools.product(range(top + 1), repeat=e))
    for i, j in itertools.combinations(range(e), 2):
        for li in range(1, top + 1):
            for lj in range(1, top + 1):
                mult = [0] * e
                mult[i], mult[j] = li, lj
                if refutes(mult):
                    return True
    return False


def complete_bound(sys: InhomSystem) -> int:
    """Smallest coordinate-sum range known to contain a solution whenever one exists."""
    bound = corollary_bound(sys)
    ub = upper_bounds(sys)
    if all(u is not None for u in ub):
        if any(u < 0 for u in ub):
            return 0
        bound = min(bound, sum(ub))
    return bound


def find_small_solution(sys: InhomSystem, budget: Optional[int] = DEFAULT_BUDGET) -> Optional[IntVector]:
    """Smallest-sum solution of ``M x >= b`` (lexicographically first among equals).

    Returns ``None`` only when the searched range is complete, i.e. no solution
    exists at all. Raises :class:`Inconclusive` when the budget stops the search
    before a completeness bound is reached. ``budget=None`` searches to the bound.
    """
    k = sys.num_vars
    if k == 0:
        return () if sys.is_solution(()) else None
    if any(c > 0 and all(a <= 0 for a in row) for row, c in zip(sys.matrix, sys.b)):
        return None
    ub = upper_bounds(sys)
    if any(u is not None and u < 0 for u in ub) or _equality_obstruction(sys) or _farkas_obstruction(sys):
        return None
    bound = complete_bound(sys)
    limit = bound if budget is None else min(bound, budget)
    for s in range(limit + 1):
        for x in _bounded_compositions(s, ub):
            if sys.is_solution(x):
                return x
    if limit < bound:
        raise Inconclusive(limit, bound)
    return None
