"""Single-site moves of the constrained dynamics and bootstrap closure."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .errors import SiteOutsideDomain
from .family import Site, UpdateFamily
from .lattice import Domain, as_site


class Boundary(enum.Enum):
    """State assumed for every site outside the domain."""

    ZERO = "zero"
    ONE = "one"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value) -> "Boundary":
        if isinstance(value, Boundary):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Configuration:
    """A {0,1} configuration on a domain; bit i set <=> site i is at 0.

    Bits follow ``domain.sites`` order, so ``bits`` is also the canonical
    state key.
    """

    domain: Domain
    bits: int = 0
    zero_count: int = 0
    boundary: Boundary = Boundary.ZERO

    @classmethod
    def all_ones(cls, domain: Domain, boundary=Boundary.ZERO) -> "Configuration":
        return cls(domain, 0, 0, Boundary.parse(boundary))

    @classmethod
    def from_zeros(cls, domain: Domain, zeros: Iterable, boundary=Boundary.ZERO) -> "Configuration":
        bits = 0
        for s in zeros:
            s = as_site(s)
            if s not in domain.index:
                raise SiteOutsideDomain(f"site {s} is not in the domain")
            bits |= 1 << domain.index[s]
        return cls(domain, bits, bits.bit_count(), Boundary.parse(boundary))

    @property
    def zeros(self) -> frozenset[Site]:
        out = []
        b = self.bits
        while b:
            low = b & -b
            out.append(self.domain.sites[low.bit_length() - 1])
            b ^= low
        return frozenset(out)

    def state(self, s) -> int:
        """State of any site of Z^d, applying the boundary convention outside."""
        i = self.domain.index.get(as_site(s))
        if i is None:
            return 0 if self.boundary is Boundary.ZERO else 1
        return 0 if (self.bits >> i) & 1 else 1

    def is_zero(self, s) -> bool:
        return self.state(s) == 0

    def __repr__(self):
        zs = sorted(self.zeros)
        if self.domain.d == 1:
            zs = [z[0] for z in zs]
        return f"Configuration(zeros={zs}, boundary={self.boundary})"


def _site_index(cfg: Configuration, s) -> int:
    s = as_site(s)
    i = cfg.domain.index.get(s)
    if i is None:
        raise SiteOutsideDomain(f"site {s} is not in the domain")
    return i


def legal_flip(cfg: Configuration, s, family: UpdateFamily) -> bool:
    """Whether some rule X has all of s+X at state 0.

    The same test governs 0->1 and 1->0 flips of s.
    """
    s = as_site(s)
    _site_index(cfg, s)
    for rule in family.rules:
        if all(cfg.is_zero(tuple(a + b for a, b in zip(s, x))) for x in rule):
            return True
    return False


def apply_flip(cfg: Configuration, s) -> Configuration:
    """Toggle the state of s. Legality is not checked here."""
    bit = 1 << _site_index(cfg, s)
    delta = -1 if cfg.bits & bit else 1
    return Configuration(cfg.domain, cfg.bits ^ bit, cfg.zero_count + delta, cfg.boundary)


# ------------------------------------------------------------------ bootstrap


@dataclass(frozen=True)
class BootstrapState:
    region: Domain
    infected: frozenset[Site]

    @classmethod
    def of(cls, region: Domain, infected: Iterable = ()) -> "BootstrapState":
        inf = frozenset(as_site(s) for s in infected)
        if not inf <= set(region.sites):
            raise SiteOutsideDomain("infected sites must lie in the region")
        return cls(region, inf)


def bootstrap_step(state: BootstrapState, family: UpdateFamily) -> BootstrapState:
    """One synchronous step; sites outside the region are never infected."""
    old = state.infected
    new = set(old)
    for s in state.region:
        if s in old:
            continue
        for rule in family.rules:
            if all(tuple(a + b for a, b in zip(s, x)) in old for x in rule):
                new.add(s)
                break
    return BootstrapState(state.region, frozenset(new))


def bootstrap_closure(
    state: BootstrapState, family: UpdateFamily
) -> tuple[BootstrapState, int]:
    """Iterate to the fixpoint. Returns the closure and the number of growing steps."""
    steps = 0
    while True:
        nxt = bootstrap_step(state, family)
        if nxt.infected == state.infected:
            return state, steps
        state = nxt
        steps += 1


def infection_times(state: BootstrapState, family: UpdateFamily) -> dict[Site, int]:
    """Step at which each eventually-infected site joins (0 for the seed)."""
    times = {s: 0 for s in state.infected}
    t = 0
    while True:
        nxt = bootstrap_step(state, family)
        if nxt.infected == state.infected:
            return times
        t += 1
        for s in nxt.infected - state.infected:
            times[s] = t
        state = nxt
