"""Built-in families, the East threshold formula and the 1D interval walk."""

from __future__ import annotations

from .dynamics import Boundary
from .errors import InvalidBudget, NoContiguousDomain, NotUnrooted
from .family import Classification, UpdateFamily, classify, interaction_range, validate_family
from .lattice import Domain
from .search import PathCertificate


def east1d() -> UpdateFamily:
    return validate_family(1, [[-1]], name="east1d")


def fa1f(d: int = 1) -> UpdateFamily:
    basis = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    rules = [[e] for e in basis] + [[tuple(-c for c in e)] for e in basis]
    return validate_family(d, rules, name=f"fa1f{d}d" if d > 1 else "fa1f")


def east2d() -> UpdateFamily:
    return validate_family(2, [[(-1, 0)]], name="east2d")


def rooted_corner_2d() -> UpdateFamily:
    return validate_family(2, [[(-1, 0)], [(0, -1)]], name="rooted_corner_2d")


BUILTINS = {
    "east1d": east1d,
    "east": east1d,
    "fa1f": lambda: fa1f(1),
    "fa1f1d": lambda: fa1f(1),
    "fa1f2d": lambda: fa1f(2),
    "east2d": east2d,
    "rooted_corner_2d": rooted_corner_2d,
}


def builtin_family(name: str) -> UpdateFamily:
    """Look up a family by name; ``fa1f(d)`` style names are accepted too."""
    key = name.strip().lower()
    if key.startswith("fa1f(") and key.endswith(")"):
        return fa1f(int(key[5:-1]))
    try:
        return BUILTINS[key]()
    except KeyError:
        raise KeyError(f"unknown builtin family {name!r}; known: {sorted(BUILTINS)}") from None


def cdg_threshold(n: int) -> int:
    """Largest N for which East reaches the origin of {-N..N} with n zeros."""
    if n < 1:
        raise InvalidBudget("the East threshold is defined for n >= 1")
    return 2**n - 2


def interval_walk_1d(family: UpdateFamily, domain: Domain) -> PathCertificate:
    """Certificate bringing a zero to the origin with at most r + 1 zeros.

    A block of r zeros is grown in from the left boundary (outside counts as
    zero), then slid right one site at a time: the site right of the block is
    flipped using a rule inside {-r..-1}, then the leftmost zero is restored
    using a rule inside {1..r}. The walk stops as soon as the origin is at 0.
    """
    if family.d != 1 or classify(family) is not Classification.SUPERCRITICAL_UNROOTED:
        raise NotUnrooted(f"{family} is not a supercritical unrooted 1D family")
    if domain.d != 1 or not domain.is_box or not domain.lo[0] <= 0 <= domain.hi[0]:
        raise NoContiguousDomain("the walk needs an interval containing the origin")
    r = interaction_range(family)
    lo = domain.lo[0]
    flips: list[tuple[int]] = []
    left = lo
    right = lo - 1
    # seed, one site at a time
    while right - left + 1 < r:
        right += 1
        flips.append((right,))
        if right == 0:
            return PathCertificate(domain, Boundary.ZERO, r + 1, tuple(flips))
    while right < 0:
        right += 1
        flips.append((right,))
        if right == 0:
            break
        flips.append((left,))
        left += 1
    return PathCertificate(domain, Boundary.ZERO, r + 1, tuple(flips))
