"""Finite domains of Z^d, boxes and the nested windows P_n."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import _linalg
from .errors import DimensionMismatch, EmptyBox
from .family import AdaptedBasis, Site, to_basis


def as_site(s) -> Site:
    """Coerce an int (1D) or a coordinate sequence to a site tuple."""
    if isinstance(s, int):
        return (s,)
    return tuple(int(c) for c in s)


@dataclass(frozen=True, eq=False)
class Domain:
    """A finite nonempty set of sites, enumerated in row-major order."""

    sites: tuple[Site, ...]
    index: dict = field(repr=False)
    lo: Site
    hi: Site

    @classmethod
    def of(cls, sites: Iterable) -> "Domain":
        ordered = tuple(sorted({as_site(s) for s in sites}))
        if not ordered:
            raise EmptyBox("a domain needs at least one site")
        d = len(ordered[0])
        if any(len(s) != d for s in ordered):
            raise DimensionMismatch("all sites of a domain must share one dimension")
        lo = tuple(min(s[k] for s in ordered) for k in range(d))
        hi = tuple(max(s[k] for s in ordered) for k in range(d))
        return cls(ordered, {s: i for i, s in enumerate(ordered)}, lo, hi)

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def is_box(self) -> bool:
        return len(self.sites) == math.prod(h - l + 1 for l, h in zip(self.lo, self.hi))

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self) -> Iterator[Site]:
        return iter(self.sites)

    def __contains__(self, s) -> bool:
        return as_site(s) in self.index

    def __eq__(self, other):
        return isinstance(other, Domain) and self.sites == other.sites

    def __hash__(self):
        return hash(self.sites)

    def __repr__(self):
        if self.is_box:
            return f"Domain(box {list(self.lo)}..{list(self.hi)})"
        return f"Domain({len(self.sites)} sites in {list(self.lo)}..{list(self.hi)})"

    def to_json(self) -> dict:
        if self.is_box:
            return {"d": self.d, "lo": list(self.lo), "hi": list(self.hi)}
        return {"d": self.d, "sites": [list(s) for s in self.sites]}

    @classmethod
    def from_json(cls, doc: dict) -> "Domain":
        if "sites" in doc:
            return cls.of(doc["sites"])
        return make_box(BoxSpec(tuple(doc["lo"]), tuple(doc["hi"])))


@dataclass(frozen=True)
class BoxSpec:
    lo: Site
    hi: Site

    def __post_init__(self):
        object.__setattr__(self, "lo", as_site(self.lo))
        object.__setattr__(self, "hi", as_site(self.hi))
        if len(self.lo) != len(self.hi):
            raise DimensionMismatch("box bounds have different dimensions")

    @classmethod
    def cube(cls, lo: int, hi: int, d: int) -> "BoxSpec":
        return cls((lo,) * d, (hi,) * d)


def make_box(spec: BoxSpec) -> Domain:
    if any(l > h for l, h in zip(spec.lo, spec.hi)):
        raise EmptyBox(f"empty box {list(spec.lo)}..{list(spec.hi)}")
    ranges = [range(l, h + 1) for l, h in zip(spec.lo, spec.hi)]
    return Domain.of(itertools.product(*ranges))


def interval(lo: int, hi: int) -> Domain:
    return make_box(BoxSpec((lo,), (hi,)))


def a_n(n: int, r: int) -> int:
    return r * (2**n - 1)


def b_n(n: int, r: int) -> int:
    return r * n * 2 ** (n - 1) if n > 0 else 0


@dataclass(frozen=True)
class PnSpec:
    n: int
    r: int
    basis: AdaptedBasis | None = None

    @property
    def a(self) -> int:
        return a_n(self.n, self.r)

    @property
    def b(self) -> int:
        return b_n(self.n, self.r)


def to_basis_coords(s, basis: AdaptedBasis) -> tuple[Fraction, ...]:
    return to_basis(as_site(s), basis)


def from_basis_coords(c: Sequence[Fraction], basis: AdaptedBasis) -> tuple[Fraction, ...]:
    if len(c) != basis.d:
        raise DimensionMismatch("coordinate vector does not match basis dimension")
    return _linalg.matvec(basis.matrix, c)


def in_pn(s: Site, n: int, r: int, basis: AdaptedBasis | None = None) -> bool:
    lo, hi = -a_n(n, r), b_n(n, r)
    return all(lo <= c <= hi for c in to_basis(s, basis))


def make_pn(n: int, r: int, d: int, basis: AdaptedBasis | None = None) -> Domain:
    """Lattice sites whose (basis) coordinates all lie in [-a_n, b_n]."""
    lo, hi = -a_n(n, r), b_n(n, r)
    if basis is None:
        return make_box(BoxSpec.cube(lo, hi, d))
    if basis.d != d:
        raise DimensionMismatch("basis dimension differs from d")
    # bounding box of the parallelotope spanned by the corners
    corners = [
        _linalg.matvec(basis.matrix, c) for c in itertools.product((lo, hi), repeat=d)
    ]
    box_lo = [math.floor(min(p[k] for p in corners)) for k in range(d)]
    box_hi = [math.ceil(max(p[k] for p in corners)) for k in range(d)]
    ranges = [range(l, h + 1) for l, h in zip(box_lo, box_hi)]
    return Domain.of(s for s in itertools.product(*ranges) if in_pn(s, n, r, basis))
