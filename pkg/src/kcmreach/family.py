"""Update families, stable directions, classification and adapted bases.

Everything here is exact: directions are primitive integer vectors and the
basis change is carried in ``Fraction`` arithmetic.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from pathlib import Path
from typing import Iterable, Sequence

from . import _linalg
from .errors import (
    DimensionMismatch,
    EmptyRule,
    FamilyError,
    NoRules,
    NotLinearlyIndependent,
    RuleContainsOrigin,
)

Site = tuple[int, ...]

DEFAULT_SEARCH_NORM = 5


@dataclass(frozen=True)
class UpdateFamily:
    d: int
    rules: tuple[frozenset[Site], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise DimensionMismatch(f"dimension must be positive, got {self.d}")
        if not self.rules:
            raise NoRules("an update family needs at least one rule")
        for i, rule in enumerate(self.rules):
            if not rule:
                raise EmptyRule("rule is empty", i)
            for x in rule:
                if len(x) != self.d:
                    raise DimensionMismatch(f"site {list(x)} does not have dimension {self.d}", i)
                if not any(x):
                    raise RuleContainsOrigin("rule contains the origin", i)

    @property
    def sites(self) -> frozenset[Site]:
        return frozenset().union(*self.rules)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "rules": [[list(x) for x in sorted(rule)] for rule in self.rules],
        }

    def __str__(self):
        body = ", ".join(
            "{" + ", ".join(str(x[0]) if self.d == 1 else str(x) for x in sorted(rule)) + "}"
            for rule in self.rules
        )
        return f"{self.name or 'U'}(d={self.d}) = {{{body}}}"


def validate_family(d: int, rules: Iterable[Iterable], name: str | None = None) -> UpdateFamily:
    """Build an :class:`UpdateFamily` from raw nested lists.

    In dimension 1 a site may be given as a bare integer.
    """
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise DimensionMismatch(f"dimension must be a positive integer, got {d!r}")
    parsed = []
    for i, raw_rule in enumerate(rules):
        sites = set()
        for x in raw_rule:
            if isinstance(x, int) and not isinstance(x, bool):
                x = (x,)
            try:
                site = tuple(int(c) for c in x)
            except (TypeError, ValueError):
                raise FamilyError(f"malformed site {x!r}", i) from None
            if len(site) != d:
                raise DimensionMismatch(f"site {list(site)} does not have dimension {d}", i)
            sites.add(site)
        if not sites:
            raise EmptyRule("rule is empty", i)
        if (0,) * d in sites:
            raise RuleContainsOrigin("rule contains the origin", i)
        parsed.append(frozenset(sites))
    if not parsed:
        raise NoRules("an update family needs at least one rule")
    return UpdateFamily(d, tuple(parsed), name)


def family_from_json(doc: dict, name: str | None = None) -> UpdateFamily:
    if not isinstance(doc, dict) or "d" not in doc or "rules" not in doc:
        raise FamilyError('family document must be an object with "d" and "rules"')
    return validate_family(doc["d"], doc["rules"], name)


def load_family(path: str | Path) -> UpdateFamily:
    path = Path(path)
    with path.open() as fh:
        doc = json.load(fh)
    return family_from_json(doc, name=path.stem)


# ---------------------------------------------------------------- directions


@dataclass(frozen=True, order=True)
class Direction:
    """A ray in R^d, stored as a primitive integer vector."""

    vec: tuple[int, ...]

    def __post_init__(self):
        vec = tuple(int(c) for c in self.vec)
        g = math.gcd(*vec)
        if g == 0:
            raise ValueError("a direction must be a nonzero vector")
        object.__setattr__(self, "vec", tuple(c // g for c in vec))

    @classmethod
    def of(cls, *coords: int) -> "Direction":
        if len(coords) == 1 and not isinstance(coords[0], int):
            coords = tuple(coords[0])
        return cls(tuple(coords))

    @property
    def d(self) -> int:
        return len(self.vec)

    def __neg__(self) -> "Direction":
        return Direction(tuple(-c for c in self.vec))

    def __repr__(self):
        return f"Direction{self.vec}"


def _check_dim(family: UpdateFamily, u: Direction) -> None:
    if u.d != family.d:
        raise DimensionMismatch(f"direction {u.vec} does not match dimension {family.d}")


def is_stable(family: UpdateFamily, u: Direction) -> bool:
    """True iff no rule lies entirely in the open half-space {x : <x,u> < 0}."""
    _check_dim(family, u)
    for rule in family.rules:
        if all(_linalg.dot(x, u.vec) < 0 for x in rule):
            return False
    return True


def stable_set_1d(family: UpdateFamily) -> frozenset[Direction]:
    if family.d != 1:
        raise DimensionMismatch("stable_set_1d needs a one-dimensional family")
    return frozenset(u for u in (Direction((1,)), Direction((-1,))) if is_stable(family, u))


# -------------------------------------------------------------- 2D arc sets


def _cross(a: Sequence[int], b: Sequence[int]) -> int:
    return a[0] * b[1] - a[1] * b[0]


def _half(ref: Sequence[int], w: Sequence[int]) -> int:
    """0 if w is within [0, pi) counter-clockwise of ref, else 1."""
    c = _cross(ref, w)
    if c > 0 or (c == 0 and _linalg.dot(ref, w) > 0):
        return 0
    return 1


def _ccw_cmp(ref: Sequence[int], a: Sequence[int], b: Sequence[int]) -> int:
    """Compare the counter-clockwise angles of a and b measured from ref."""
    ha, hb = _half(ref, a), _half(ref, b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = _cross(a, b)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


def angle_sorted(dirs: Iterable[Direction]) -> list[Direction]:
    """Sort 2D directions by angle in [0, 2pi) from the positive x axis."""
    return sorted(dirs, key=cmp_to_key(lambda a, b: _ccw_cmp((1, 0), a.vec, b.vec)))


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise arc from ``start`` to ``end``.

    ``start == end`` with both endpoints closed is a single point; with both
    open it is the whole circle minus that point.
    """

    start: Direction
    end: Direction
    start_closed: bool
    end_closed: bool

    @property
    def is_point(self) -> bool:
        return self.start == self.end and self.start_closed and self.end_closed

    def contains(self, w: Direction) -> bool:
        if self.start == self.end:
            if w == self.start:
                return self.start_closed
            return not self.is_point
        if w == self.start:
            return self.start_closed
        if w == self.end:
            return self.end_closed
        return _ccw_cmp(self.start.vec, w.vec, self.end.vec) < 0


@dataclass(frozen=True)
class ArcSet:
    arcs: tuple[Arc, ...] = ()
    full: bool = False

    def __contains__(self, w: Direction) -> bool:
        if w.d != 2:
            raise DimensionMismatch("ArcSet membership needs a 2D direction")
        return self.full or any(a.contains(w) for a in self.arcs)

    @property
    def is_empty(self) -> bool:
        return not self.full and not self.arcs

    def points(self) -> list[Direction]:
        return [a.start for a in self.arcs if a.is_point]

    def __str__(self):
        if self.full:
            return "whole circle"
        if not self.arcs:
            return "empty"
        parts = []
        for a in self.arcs:
            if a.is_point:
                parts.append(f"{{{a.start.vec}}}")
            else:
                lb = "[" if a.start_closed else "("
                rb = "]" if a.end_closed else ")"
                parts.append(f"{lb}{a.start.vec} -> {a.end.vec}{rb}")
        return " u ".join(parts)


def _critical_directions(family: UpdateFamily) -> list[Direction]:
    crit = set()
    for x in family.sites:
        crit.add(Direction((-x[1], x[0])))
        crit.add(Direction((x[1], -x[0])))
    return angle_sorted(crit)


def _between(a: Direction, b: Direction) -> Direction:
    """A direction strictly inside the counter-clockwise arc (a, b) of span <= pi."""
    if _cross(a.vec, b.vec) == 0:
        return Direction((-a.vec[1], a.vec[0]))
    return Direction((a.vec[0] + b.vec[0], a.vec[1] + b.vec[1]))


def _arc_pieces(family: UpdateFamily) -> list[tuple[str, Direction, Direction, bool]]:
    """Circular decomposition into critical points and the open arcs between them.

    Stability is constant on each open arc because no <x,u> changes sign there.
    Each piece is (kind, lo, hi, stable) with kind "point" or "open".
    """
    crit = _critical_directions(family)
    pieces = []
    k = len(crit)
    for i, c in enumerate(crit):
        nxt = crit[(i + 1) % k]
        pieces.append(("point", c, c, is_stable(family, c)))
        pieces.append(("open", c, nxt, is_stable(family, _between(c, nxt))))
    return pieces


def stable_arcs_2d(family: UpdateFamily) -> ArcSet:
    """Exact set of stable directions of a two-dimensional family."""
    if family.d != 2:
        raise DimensionMismatch("stable_arcs_2d needs a two-dimensional family")
    pieces = _arc_pieces(family)
    if all(p[3] for p in pieces):
        return ArcSet(full=True)
    # rotate so the sequence starts right after an unstable piece
    first_bad = next(i for i, p in enumerate(pieces) if not p[3])
    pieces = pieces[first_bad + 1:] + pieces[: first_bad + 1]
    arcs = []
    run: list = []
    for p in pieces + [("sentinel", None, None, False)]:
        if p[3]:
            run.append(p)
            continue
        if run:
            head, tail = run[0], run[-1]
            if head[0] == "point":
                start, start_closed = head[1], True
            else:
                start, start_closed = head[1], False
            if tail[0] == "point":
                end, end_closed = tail[1], True
            else:
                end, end_closed = tail[2], False
            arcs.append(Arc(start, end, start_closed, end_closed))
            run = []
    order = {d: i for i, d in enumerate(angle_sorted(a.start for a in arcs))}
    arcs.sort(key=lambda a: order[a.start])
    return ArcSet(tuple(arcs))


# ------------------------------------------------------------ classification


class Classification(enum.Enum):
    SUPERCRITICAL_UNROOTED = "SupercriticalUnrooted"
    NOT_SUPERCRITICAL_UNROOTED = "NotSupercriticalUnrooted"
    UNDECIDED = "Undecided"

    def __str__(self):
        return self.value


def primitive_directions(d: int, norm: int) -> list[Direction]:
    """All primitive integer directions with sup-norm <= norm, in a fixed order."""
    out = []
    for v in itertools.product(range(-norm, norm + 1), repeat=d):
        if any(v) and math.gcd(*v) == 1:
            out.append(Direction(v))
    out.sort(key=lambda u: (sum(abs(c) for c in u.vec), tuple(-c for c in u.vec)))
    return out


def _greedy_independent(candidates: Iterable[Direction], d: int) -> list[Direction] | None:
    chosen: list[Direction] = []
    for u in candidates:
        if _linalg.rank([c.vec for c in chosen] + [u.vec]) == len(chosen) + 1:
            chosen.append(u)
            if len(chosen) == d:
                return chosen
    return None


def classify(
    family: UpdateFamily,
    hints: Sequence[Direction] = (),
    search_norm: int = DEFAULT_SEARCH_NORM,
) -> Classification:
    if family.d == 1:
        if stable_set_1d(family):
            return Classification.NOT_SUPERCRITICAL_UNROOTED
        return Classification.SUPERCRITICAL_UNROOTED
    if family.d == 2:
        arcs = stable_arcs_2d(family)
        if arcs.full or any(not a.is_point for a in arcs.arcs):
            return Classification.NOT_SUPERCRITICAL_UNROOTED
        pts = arcs.points()
        if len(pts) <= 1:
            return Classification.SUPERCRITICAL_UNROOTED
        if len(pts) == 2 and pts[0] == -pts[1]:
            return Classification.SUPERCRITICAL_UNROOTED
        return Classification.NOT_SUPERCRITICAL_UNROOTED
    if find_spanning_stable_directions(family, hints, search_norm) is not None:
        return Classification.NOT_SUPERCRITICAL_UNROOTED
    return Classification.UNDECIDED


def _stable_candidates_2d(family: UpdateFamily) -> list[Direction]:
    found = {}
    for kind, lo, hi, stable in _arc_pieces(family):
        if not stable:
            continue
        if kind == "point":
            found.setdefault(lo, 1)
        else:
            found[_between(lo, hi)] = 0
    # smallest vectors first; interior of an arc wins ties against endpoints
    return sorted(found, key=lambda u: (sum(abs(c) for c in u.vec), found[u], u.vec))


def find_spanning_stable_directions(
    family: UpdateFamily,
    hints: Sequence[Direction] = (),
    search_norm: int = DEFAULT_SEARCH_NORM,
) -> list[Direction] | None:
    """Return d linearly independent stable directions, or None if none were found."""
    d = family.d
    usable_hints = [u for u in hints if u.d == d and is_stable(family, u)]
    if d == 1:
        stable = sorted(stable_set_1d(family), key=lambda u: u.vec)
        return [stable[0]] if stable else None
    if d == 2:
        candidates = usable_hints + _stable_candidates_2d(family)
    else:
        candidates = itertools.chain(
            usable_hints,
            (u for u in primitive_directions(d, search_norm) if is_stable(family, u)),
        )
    return _greedy_independent(candidates, d)


# ------------------------------------------------------------- adapted basis


@dataclass(frozen=True)
class AdaptedBasis:
    u: tuple[Direction, ...]
    v: tuple[tuple[Fraction, ...], ...]
    inverse: tuple[tuple[Fraction, ...], ...]

    @property
    def d(self) -> int:
        return len(self.u)

    @property
    def matrix(self) -> list[list[Fraction]]:
        """Columns are the basis vectors v_i."""
        return _linalg.transpose(self.v)

    def check(self) -> None:
        """Assert the defining invariants with exact arithmetic."""
        for i, vi in enumerate(self.v):
            for j, uj in enumerate(self.u):
                p = _linalg.dot(vi, uj.vec)
                if i == j:
                    assert p < 0, (i, p)
                else:
                    assert p == 0, (i, j, p)
        assert _linalg.det(self.v) != 0


def identity_basis(d: int) -> AdaptedBasis:
    """Canonical basis, adapted to the stable directions -e_1, ..., -e_d."""
    return construct_basis([Direction(tuple(-int(i == j) for j in range(d))) for i in range(d)])


def construct_basis(u: Sequence[Direction]) -> AdaptedBasis:
    """Basis with v_i orthogonal to every u_j (j != i) and <v_i, u_i> < 0.

    In the resulting coordinates {x : <x, u_i> < 0} is exactly {x : x_i > 0}.
    """
    u = tuple(u)
    d = len(u)
    if d == 0 or any(ui.d != d for ui in u):
        raise DimensionMismatch("construct_basis needs d directions of dimension d")
    rows = [ui.vec for ui in u]
    if _linalg.rank(rows) < d:
        raise NotLinearlyIndependent(f"directions {[ui.vec for ui in u]} are linearly dependent")
    # column i of U^{-1} is orthogonal to every u_j with j != i
    cols = _linalg.transpose(_linalg.inverse(rows))
    v = []
    for i, col in enumerate(cols):
        vi = _linalg.primitive_scale(col)
        if _linalg.dot(vi, u[i].vec) > 0:
            vi = tuple(-c for c in vi)
        v.append(vi)
    inv = _linalg.inverse(_linalg.transpose(v))
    return AdaptedBasis(u, tuple(v), tuple(tuple(row) for row in inv))


def to_basis(x: Sequence[int], basis: AdaptedBasis | None) -> tuple[Fraction, ...]:
    if basis is None:
        return tuple(Fraction(c) for c in x)
    if len(x) != basis.d:
        raise DimensionMismatch(f"site {tuple(x)} does not match basis dimension {basis.d}")
    return _linalg.matvec(basis.inverse, x)


def interaction_range(family: UpdateFamily, basis: AdaptedBasis | None = None) -> int:
    """Max sup-norm distance between points of X u {0}, over rules X.

    With a basis the distances are measured in basis coordinates and the
    rational maximum is rounded up.
    """
    best = Fraction(0)
    origin = (Fraction(0),) * family.d
    for rule in family.rules:
        pts = [origin] + [to_basis(x, basis) for x in rule]
        for p, q in itertools.combinations(pts, 2):
            best = max(best, max(abs(a - b) for a, b in zip(p, q)))
    return math.ceil(best)
