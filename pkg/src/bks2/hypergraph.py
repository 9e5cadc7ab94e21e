"""Rays, orthogonality and complete contexts (resolutions of the identity)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .exact_algebra import (
    ONE,
    ZERO,
    Scalar,
    SymMatrix,
    Vec,
    identity,
    inner_product,
    projector_from_ray,
)

__all__ = [
    "Ray",
    "RaySet",
    "Context",
    "OrthoHypergraph",
    "canonicalize_ray",
    "build_hypergraph",
    "validate_context",
]

Context = tuple[int, ...]


@dataclass(frozen=True)
class Ray:
    """Canonical projective representative: first nonzero entry is 1."""

    entries: tuple[Scalar, ...]
    id: int | None = None

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @property
    def vec(self) -> Vec:
        return Vec(self.entries)

    def with_id(self, i: int) -> Ray:
        return Ray(self.entries, i)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.entries)


def canonicalize_ray(v: Vec | Sequence[Scalar | int]) -> Ray:
    """Scale ``v`` by the inverse of its first nonzero entry."""
    if not isinstance(v, Vec):
        v = Vec(v)
    lead = next((x for x in v.entries if x), None)
    if lead is None:
        raise ValueError("the zero vector does not define a ray")
    if lead == ONE:
        return Ray(v.entries)
    inv = lead.inverse()
    return Ray(tuple(x * inv for x in v.entries))


class RaySet:
    """Distinct canonical rays with ids assigned in a fixed canonical order.

    Rays are sorted lexicographically by Scalar value, largest first, so the
    standard basis comes out as e1, e2, e3 with ids 0, 1, 2.  The order does
    not depend on the order of the input.
    """

    def __init__(self, rays: Iterable[Ray | Vec | Sequence[Scalar | int]]) -> None:
        canon = {}
        dim = None
        for r in rays:
            c = canonicalize_ray(r.entries if isinstance(r, Ray) else r)
            if dim is None:
                dim = c.dimension
            elif c.dimension != dim:
                raise ValueError(f"ray {c} has dimension {c.dimension}, expected {dim}")
            canon.setdefault(c.entries, None)
        if dim is None:
            raise ValueError("a ray set needs at least one ray")
        ordered = sorted(canon, reverse=True)
        self.dimension: int = dim
        self.rays: tuple[Ray, ...] = tuple(Ray(e, i) for i, e in enumerate(ordered))
        self._index = {r.entries: r.id for r in self.rays}

    def __len__(self) -> int:
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def __getitem__(self, i: int) -> Ray:
        return self.rays[i]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RaySet) and self.rays == other.rays

    def __hash__(self) -> int:
        return hash(self.rays)

    def __repr__(self) -> str:
        return f"RaySet(dimension={self.dimension}, n={len(self.rays)})"

    def index_of(self, v: Ray | Vec | Sequence[Scalar | int]) -> int | None:
        """Id of the ray projectively equal to ``v``, or None."""
        c = canonicalize_ray(v.vec if isinstance(v, Ray) else v)
        return self._index.get(c.entries)

    def projector(self, i: int) -> SymMatrix:
        return _projector(self.rays[i].entries)


_PROJ_CACHE: dict[tuple[Scalar, ...], SymMatrix] = {}


def _projector(entries: tuple[Scalar, ...]) -> SymMatrix:
    p = _PROJ_CACHE.get(entries)
    if p is None:
        p = _PROJ_CACHE[entries] = projector_from_ray(Vec(entries))
    return p


@dataclass(frozen=True)
class OrthoHypergraph:
    rayset: RaySet
    pairs: tuple[tuple[int, int], ...]
    contexts: tuple[Context, ...]

    @property
    def dimension(self) -> int:
        return self.rayset.dimension

    @property
    def n_rays(self) -> int:
        return len(self.rayset)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n_rays)]
        for i, j in self.pairs:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def contexts_of(self) -> tuple[tuple[int, ...], ...]:
        """For each ray id, the indices of the contexts containing it."""
        inc: list[list[int]] = [[] for _ in range(self.n_rays)]
        for k, ctx in enumerate(self.contexts):
            for r in ctx:
                inc[r].append(k)
        return tuple(tuple(x) for x in inc)

    def stats(self) -> dict[str, int]:
        return {
            "dimension": self.dimension,
            "rays": self.n_rays,
            "pairs": len(self.pairs),
            "contexts": len(self.contexts),
        }


def _resolves_identity(ids: Sequence[int], rays: RaySet) -> bool:
    total = None
    for i in ids:
        p = rays.projector(i)
        total = p if total is None else total + p
    return total is not None and total.rows == identity(rays.dimension).rows


def build_hypergraph(rays: RaySet) -> OrthoHypergraph:
    """All orthogonal pairs, and every d-clique of them that sums to the identity.

    Cliques are grown in increasing id order, so each is found once.  This is
    O(n^d) in the worst case, which is fine at catalog scale (about 100 rays).
    """
    n, d = len(rays), rays.dimension
    vecs = [r.vec for r in rays]
    adj: list[set[int]] = [set() for _ in range(n)]
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if inner_product(vecs[i], vecs[j]) == ZERO:
                pairs.append((i, j))
                adj[i].add(j)
                adj[j].add(i)

    contexts: list[Context] = []

    def extend(clique: list[int], candidates: list[int]) -> None:
        if len(clique) == d:
            if _resolves_identity(clique, rays):
                contexts.append(tuple(clique))
            return
        for k, c in enumerate(candidates):
            if len(clique) + 1 + (len(candidates) - k - 1) < d:
                break
            extend(clique + [c], [x for x in candidates[k + 1 :] if x in adj[c]])

    for i in range(n):
        extend([i], sorted(x for x in adj[i] if x > i))
    return OrthoHypergraph(rays, tuple(pairs), tuple(sorted(contexts)))


def validate_context(ctx: Sequence[int], rays: RaySet) -> list[str]:
    """Violations of the context invariants; an empty list means the context is valid."""
    for i in ctx:
        if not 0 <= i < len(rays):
            raise IndexError(f"ray id {i} out of range 0..{len(rays) - 1}")
    problems = []
    if len(set(ctx)) != len(ctx):
        problems.append("repeated ray id")
    ids = sorted(set(ctx))
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            if inner_product(rays[ids[a]].vec, rays[ids[b]].vec) != ZERO:
                problems.append(f"rays {ids[a]} and {ids[b]} are not orthogonal")
    if not _resolves_identity(ids, rays):
        problems.append("does not resolve the identity")
    return problems
