"""Search for {0,1} valuations with exactly one 1 per context and no two 1s
on an orthogonal pair.

A valuation is a weight-1 frame function on the finite ray set.  The search
is plain backtracking with unit propagation and a fixed branch order (lowest
unassigned id, value 1 before 0), so repeated runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .hypergraph import OrthoHypergraph

__all__ = [
    "Valuation",
    "SearchStats",
    "SearchResult",
    "ValuationCount",
    "Violation",
    "search_valuation",
    "count_valuations",
    "iter_valuations",
    "verify_valuation",
    "export_cnf",
]


@dataclass(frozen=True)
class Valuation:
    """Total assignment ray id -> {0, 1}; ``values[i]`` belongs to ray ``i``."""

    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("valuation values must be 0 or 1")

    @classmethod
    def from_mapping(cls, assignment: Mapping[int, int], n: int) -> Valuation:
        missing = [i for i in range(n) if i not in assignment]
        if missing:
            raise ValueError(f"partial valuation: no value for ray ids {missing}")
        return cls(tuple(int(assignment[i]) for i in range(n)))

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def ones(self) -> list[int]:
        return [i for i, v in enumerate(self.values) if v]


@dataclass
class SearchStats:
    nodes: int = 0
    propagations: int = 0
    max_depth: int = 0

    def as_dict(self) -> dict[str, int]:
        return {"nodes": self.nodes, "propagations": self.propagations, "max_depth": self.max_depth}


@dataclass(frozen=True)
class SearchResult:
    colorable: bool
    witness: Valuation | None
    stats: SearchStats = field(compare=False)

    @property
    def verdict(self) -> str:
        return "colorable" if self.colorable else "non-colorable"


@dataclass(frozen=True)
class ValuationCount:
    count: int
    exact: bool

    def __str__(self) -> str:
        return str(self.count) if self.exact else f">={self.count}"


@dataclass(frozen=True)
class Violation:
    kind: str  # "context" or "pair"
    rays: tuple[int, ...]
    ones: int

    def __str__(self) -> str:
        if self.kind == "context":
            return f"context {self.rays} has {self.ones} rays valued 1"
        return f"orthogonal pair {self.rays} both valued 1"


class _Search:
    UNSET = -1

    def __init__(self, h: OrthoHypergraph) -> None:
        self.n = h.n_rays
        self.neighbors = h.neighbors
        self.contexts = h.contexts
        self.contexts_of = h.contexts_of
        self.value = [self.UNSET] * self.n
        self.trail: list[int] = []
        self.stats = SearchStats()

    def _assign(self, r: int, v: int, queue: list[tuple[int, int]]) -> bool:
        cur = self.value[r]
        if cur != self.UNSET:
            return cur == v
        self.value[r] = v
        self.trail.append(r)
        queue.append((r, v))
        return True

    def propagate(self, queue: list[tuple[int, int]]) -> bool:
        value = self.value
        while queue:
            r, v = queue.pop()
            if v == 1:
                for s in self.neighbors[r]:
                    if value[s] == 1:
                        return False
                    if value[s] == self.UNSET:
                        self.stats.propagations += 1
                        self._assign(s, 0, queue)
            else:
                for k in self.contexts_of[r]:
                    free = None
                    n_free = 0
                    has_one = False
                    for s in self.contexts[k]:
                        x = value[s]
                        if x == 1:
                            has_one = True
                            break
                        if x == self.UNSET:
                            n_free += 1
                            free = s
                    if has_one:
                        continue
                    if n_free == 0:
                        return False
                    if n_free == 1:
                        self.stats.propagations += 1
                        if not self._assign(free, 1, queue):
                            return False
        return True

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.value[self.trail.pop()] = self.UNSET

    def decide(self, r: int, v: int) -> bool:
        queue: list[tuple[int, int]] = []
        self._assign(r, v, queue)
        return self.propagate(queue)

    def solutions(self) -> Iterator[tuple[int, ...]]:
        # contexts with no rays cannot occur, so the empty assignment is consistent
        yield from self._walk(0, 0)

    def _walk(self, start: int, depth: int) -> Iterator[tuple[int, ...]]:
        if depth > self.stats.max_depth:
            self.stats.max_depth = depth
        r = start
        while r < self.n and self.value[r] != self.UNSET:
            r += 1
        if r == self.n:
            yield tuple(self.value)
            return
        for v in (1, 0):
            self.stats.nodes += 1
            mark = len(self.trail)
            if self.decide(r, v):
                yield from self._walk(r + 1, depth + 1)
            self.undo(mark)


def search_valuation(h: OrthoHypergraph) -> SearchResult:
    s = _Search(h)
    witness = next(s.solutions(), None)
    if witness is None:
        return SearchResult(False, None, s.stats)
    return SearchResult(True, Valuation(witness), s.stats)


def iter_valuations(h: OrthoHypergraph) -> Iterator[Valuation]:
    """Every satisfying valuation, in branch order."""
    for sol in _Search(h).solutions():
        yield Valuation(sol)


def count_valuations(h: OrthoHypergraph, cap: int | None = None) -> ValuationCount:
    """Exact count of satisfying valuations, or ``>= cap`` once ``cap`` is reached."""
    if cap is not None and cap < 1:
        raise ValueError("cap must be >= 1")
    n = 0
    for _ in _Search(h).solutions():
        n += 1
        if cap is not None and n >= cap:
            return ValuationCount(n, False)
    return ValuationCount(n, True)


def verify_valuation(h: OrthoHypergraph, v: Valuation | Sequence[int]) -> list[Violation]:
    """Every context without exactly one 1 and every orthogonal pair of 1s."""
    if not isinstance(v, Valuation):
        v = Valuation(tuple(v))
    if len(v) != h.n_rays:
        raise ValueError(f"partial valuation: {len(v)} values for {h.n_rays} rays")
    out = []
    for ctx in h.contexts:
        ones = sum(v[r] for r in ctx)
        if ones != 1:
            out.append(Violation("context", ctx, ones))
    for i, j in h.pairs:
        if v[i] and v[j]:
            out.append(Violation("pair", (i, j), 2))
    return out


def export_cnf(h: OrthoHypergraph) -> str:
    """DIMACS CNF: variable i+1 is ray i; one at-least-one clause per context,
    then one at-most-one clause per orthogonal pair."""
    clauses = [" ".join(str(r + 1) for r in ctx) + " 0" for ctx in h.contexts]
    clauses += [f"-{i + 1} -{j + 1} 0" for i, j in h.pairs]
    lines = [f"c ray {r.id + 1} = {r}" for r in h.rayset]
    lines.append(f"p cnf {h.n_rays} {len(clauses)}")
    lines.extend(clauses)
    return "\n".join(lines) + "\n"
