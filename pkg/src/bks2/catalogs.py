"""Built-in ray sets.

Coordinates are source data.  Their correctness is checked structurally by
the test suite (ray, pair and context counts against a brute-force scan, and
non-colorability), not taken on trust.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .exact_algebra import SQRT2, Scalar
from .hypergraph import RaySet, canonicalize_ray

__all__ = ["Catalog", "CatalogError", "CATALOG_NAMES", "builtin_catalog"]


class CatalogError(KeyError):
    pass


@dataclass(frozen=True)
class Catalog:
    name: str
    dimension: int
    rays: tuple[tuple[Scalar, ...], ...]
    provenance: str

    def rayset(self) -> RaySet:
        rs = RaySet(self.rays)
        if len(rs) != len(self.rays):
            raise AssertionError(f"catalog {self.name} has projectively repeated rays")
        return rs


def _signed_permutations(patterns):
    seen = {}
    for pat in patterns:
        for perm in itertools.permutations(pat):
            key = canonicalize_ray(list(perm)).entries
            seen.setdefault(key, None)
    return tuple(seen)


def _basis3() -> Catalog:
    rays = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    return Catalog("basis3", 3, tuple(tuple(Scalar(x) for x in r) for r in rays), "standard basis of R^3")


def _peres33() -> Catalog:
    r2 = SQRT2
    patterns = [
        (0, 0, 1),
        (0, 1, 1), (0, 1, -1),
        (0, 1, r2), (0, 1, -r2),
        (1, 1, r2), (1, -1, r2), (1, 1, -r2), (1, -1, -r2),
    ]
    return Catalog(
        "peres33",
        3,
        _signed_permutations(patterns),
        "Peres (1991): all rays whose coordinates permute (0,0,1), (0,1,+-1), "
        "(0,1,+-sqrt2) or (1,+-1,+-sqrt2)",
    )


# Integer coordinates in {0, +-1, +-2}.  Obtained as a critical
# non-colorable subset of that coordinate pool and matching the published
# Conway-Kochen signature: 31 rays, 17 complete triads, 71 orthogonal pairs.
_CK31 = (
    (1, 2, 1), (1, 2, 0), (1, 2, -1), (1, 1, 2), (1, 1, 1), (1, 1, 0),
    (1, 1, -1), (2, 1, 0), (2, 1, -1), (1, 0, 2), (1, 0, 1), (1, 0, 0),
    (2, 0, -1), (1, 0, -1), (2, -1, 0), (2, -1, -1), (1, -1, 2), (1, -1, 1),
    (1, -1, 0), (1, -1, -1), (1, -2, 1), (1, -2, 0), (1, -2, -1), (0, 1, 2),
    (0, 1, 1), (0, 2, 1), (0, 1, 0), (0, 2, -1), (0, 1, -1), (0, 1, -2),
    (0, 0, 1),
)


def _ck31() -> Catalog:
    return Catalog(
        "ck31",
        3,
        tuple(canonicalize_ray(list(r)).entries for r in _CK31),
        "Conway-Kochen 31-ray set (integer coordinates, 31 rays / 17 triads)",
    )


_CABELLO18 = (
    (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (1, 1, 1, 1), (1, -1, 1, -1),
    (1, -1, -1, 1), (1, -1, -1, -1), (1, -1, 1, 1), (1, 1, 1, -1), (1, 1, 0, 0),
    (0, 0, 1, 1), (0, 0, 1, -1), (0, 1, 0, 1), (0, 1, 0, -1), (1, 0, -1, 0),
    (1, 0, 0, -1), (1, 0, 0, 1), (0, 1, -1, 0),
)


def _cabello18() -> Catalog:
    return Catalog(
        "cabello18",
        4,
        tuple(canonicalize_ray(list(r)).entries for r in _CABELLO18),
        "Cabello, Estebaranz, Garcia-Alcaine (1996): 18 rays in 9 bases of R^4",
    )


_BUILDERS = {"basis3": _basis3, "peres33": _peres33, "ck31": _ck31, "cabello18": _cabello18}
CATALOG_NAMES = tuple(_BUILDERS)


def builtin_catalog(name: str) -> Catalog:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise CatalogError(f"unknown catalog {name!r}; available: {', '.join(CATALOG_NAMES)}") from None
