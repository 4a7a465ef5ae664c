"""Exact breadth-first computation of V(n, domain) with replayable certificates.

Internally a configuration is an integer over a padded row-major layout of
the domain's bounding box: padding of the interaction radius on every side
lets the set of legal flips of a whole configuration be computed with a few
shifts and ANDs per rule.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .dynamics import Boundary, Configuration, apply_flip, legal_flip
from .errors import DimensionMismatch, ResourceCapExceeded, SiteOutsideDomain
from .family import Site, UpdateFamily
from .lattice import Domain, as_site

CAP_ENV = "KCMREACH_MAX_STATES"
DEFAULT_MAX_STATES = 2**26


def default_max_states() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_MAX_STATES


@dataclass(frozen=True)
class Caps:
    max_states: int = field(default_factory=default_max_states)
    max_depth: int | None = None
    # frontiers smaller than this are expanded in-process even with workers > 1
    parallel_threshold: int = 4096


# ------------------------------------------------------------------ state keys


def encode_state(cfg: Configuration) -> int:
    """Canonical key: one bit per domain site, set when the site is at 0."""
    return cfg.bits


def decode_state(key: int, domain: Domain, boundary=Boundary.ZERO) -> Configuration:
    if key < 0 or key >> len(domain):
        raise ValueError("key has bits outside the domain")
    return Configuration(domain, key, key.bit_count(), Boundary.parse(boundary))


def zero_list(key: int) -> tuple[int, ...]:
    """Sparse form of a key: the ordered indices of zero sites."""
    out = []
    while key:
        low = key & -key
        out.append(low.bit_length() - 1)
        key ^= low
    return tuple(out)


class _Layout:
    def __init__(self, family: UpdateFamily, domain: Domain, boundary: Boundary):
        if family.d != domain.d:
            raise DimensionMismatch("family and domain dimensions differ")
        d = domain.d
        pad = max(max(abs(c) for c in x) for x in family.sites)
        self.domain = domain
        self.boundary = boundary
        self.origin = tuple(l - pad for l in domain.lo)
        dims = [h - l + 1 + 2 * pad for l, h in zip(domain.lo, domain.hi)]
        strides = [1] * d
        for k in range(d - 2, -1, -1):
            strides[k] = strides[k + 1] * dims[k + 1]
        self.strides = strides
        self.pos = [self.position(s) for s in domain.sites]
        self.dom_of_pos = {p: i for i, p in enumerate(self.pos)}
        self.domain_mask = 0
        for p in self.pos:
            self.domain_mask |= 1 << p
        total = 1 << (strides[0] * dims[0])
        self.boundary_mask = (total - 1) & ~self.domain_mask if boundary is Boundary.ZERO else 0
        self.rule_offsets = tuple(
            tuple(sorted(sum(c * st for c, st in zip(x, strides)) for x in rule))
            for rule in family.rules
        )

    def position(self, s: Site) -> int:
        return sum((c - o) * st for c, o, st in zip(s, self.origin, self.strides))

    def bit(self, s) -> int:
        s = as_site(s)
        i = self.domain.index.get(s)
        if i is None:
            raise SiteOutsideDomain(f"site {s} is not in the domain")
        return 1 << self.pos[i]

    def mask_of(self, sites) -> int:
        m = 0
        for s in sites:
            m |= self.bit(s)
        return m

    def to_key(self, z: int) -> int:
        key = 0
        while z:
            low = z & -z
            key |= 1 << self.dom_of_pos[low.bit_length() - 1]
            z ^= low
        return key

    def from_key(self, key: int) -> int:
        return sum(1 << self.pos[i] for i in zero_list(key))

    def site_at(self, p: int) -> Site:
        return self.domain.sites[self.dom_of_pos[p]]

    def context(self, n: int):
        return (self.rule_offsets, self.domain_mask, self.boundary_mask, n)


def _enabled(z: int, rule_offsets, domain_mask: int, boundary_mask: int) -> int:
    ext = z | boundary_mask
    en = 0
    for offs in rule_offsets:
        acc = domain_mask
        for off in offs:
            acc &= (ext >> off) if off >= 0 else (ext << -off)
            if not acc:
                break
        en |= acc
    return en


def _expand(frontier: Sequence[int], ctx) -> list[tuple[int, int, int]]:
    """Successors (child, parent, flipped bit) in a fixed order; first occurrence kept."""
    rule_offsets, domain_mask, boundary_mask, n = ctx
    out = []
    seen = set()
    for z in frontier:
        en = _enabled(z, rule_offsets, domain_mask, boundary_mask)
        if z.bit_count() >= n:
            en &= z
        while en:
            low = en & -en
            en ^= low
            child = z ^ low
            if child not in seen:
                seen.add(child)
                out.append((child, z, low))
    return out


_WORKER_CTX = None


def _worker_init(ctx):
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _worker_expand(chunk):
    return _expand(chunk, _WORKER_CTX)


# ----------------------------------------------------------------- targets


class ZeroAt:
    """Target predicate: the given site is at state 0."""

    def __init__(self, site):
        self.site = as_site(site)

    def __call__(self, cfg: Configuration) -> bool:
        return cfg.is_zero(self.site)

    def compile(self, layout: _Layout) -> Callable[[int], bool]:
        b = layout.bit(self.site)
        return lambda z: bool(z & b)

    def __repr__(self):
        return f"ZeroAt({self.site})"


def _compile_target(target, layout: _Layout) -> Callable[[int], bool] | None:
    if target is None:
        return None
    if hasattr(target, "compile"):
        return target.compile(layout)

    def check(z: int) -> bool:
        key = layout.to_key(z)
        return bool(target(Configuration(layout.domain, key, key.bit_count(), layout.boundary)))

    return check


# ------------------------------------------------------------- certificates


@dataclass(frozen=True)
class PathCertificate:
    domain: Domain
    boundary: Boundary
    n: int
    flips: tuple[Site, ...]
    start: frozenset[Site] = frozenset()

    def to_json(self) -> dict:
        doc = {
            "domain": self.domain.to_json(),
            "boundary": self.boundary.value,
            "n": self.n,
            "flips": [list(s) for s in self.flips],
        }
        if self.start:
            doc["start"] = [list(s) for s in sorted(self.start)]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "PathCertificate":
        return cls(
            Domain.from_json(doc["domain"]),
            Boundary.parse(doc["boundary"]),
            int(doc["n"]),
            tuple(as_site(s) for s in doc["flips"]),
            frozenset(as_site(s) for s in doc.get("start", ())),
        )


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    failed_at: int | None
    reason: str
    peak_zeros: int
    final: Configuration | None

    def __bool__(self):
        return self.ok


def verify_certificate(cert: PathCertificate, family: UpdateFamily) -> CertificateCheck:
    """Replay the flips from ``cert.start`` and report the first illegal step."""
    try:
        cfg = Configuration.from_zeros(cert.domain, cert.start, cert.boundary)
    except SiteOutsideDomain as exc:
        return CertificateCheck(False, None, f"bad start: {exc}", 0, None)
    peak = cfg.zero_count
    if peak > cert.n:
        return CertificateCheck(False, None, f"start has {peak} zeros > {cert.n}", peak, cfg)
    for j, s in enumerate(cert.flips):
        if s not in cert.domain.index:
            return CertificateCheck(False, j, f"site {s} outside the domain", peak, cfg)
        if not legal_flip(cfg, s, family):
            return CertificateCheck(False, j, f"flip of {s} is not legal", peak, cfg)
        cfg = apply_flip(cfg, s)
        peak = max(peak, cfg.zero_count)
        if cfg.zero_count > cert.n:
            return CertificateCheck(
                False, j, f"{cfg.zero_count} zeros exceed the budget {cert.n}", peak, cfg
            )
    return CertificateCheck(True, None, "ok", peak, cfg)


def final_zeros(cert: PathCertificate) -> frozenset[Site]:
    zeros = set(cert.start)
    for s in cert.flips:
        zeros ^= {s}
    return frozenset(zeros)


def reverse_certificate(cert: PathCertificate) -> PathCertificate:
    """The same path walked backwards, starting from where the original ends."""
    return PathCertificate(
        cert.domain, cert.boundary, cert.n, tuple(reversed(cert.flips)), final_zeros(cert)
    )


# -------------------------------------------------------------------- search


@dataclass(frozen=True)
class SearchReport:
    reached_target: bool
    states_visited: int
    max_frontier: int
    depth: int
    v_n_size: int | None = None
    certificate: PathCertificate | None = None
    truncated: bool = False
    # canonical keys of every visited state, only when collect=True
    states: frozenset[int] | None = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "reached_target": self.reached_target,
            "states_visited": self.states_visited,
            "max_frontier": self.max_frontier,
            "depth": self.depth,
            "v_n_size": self.v_n_size,
            "truncated": self.truncated,
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


def _chunks(seq: list, k: int) -> list[list]:
    size = -(-len(seq) // k)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def explore(
    family: UpdateFamily,
    domain: Domain,
    n: int,
    boundary=Boundary.ZERO,
    target=None,
    want_certificate: bool = False,
    caps: Caps | None = None,
    workers: int = 1,
    collect: bool = False,
) -> SearchReport:
    """Breadth-first closure of the legal-move relation from all ones, <= n zeros.

    Without a target, ``v_n_size`` is |V(n, domain)| unless the search was
    truncated. With a target the search stops at the first hit. Results do not
    depend on ``workers``: frontier shards are merged back in order.
    """
    if n < 0:
        raise ValueError("budget must be nonnegative")
    caps = caps or Caps()
    boundary = Boundary.parse(boundary)
    layout = _Layout(family, domain, boundary)
    hit = _compile_target(target, layout)
    ctx = layout.context(n)

    visited = {0}
    parents: dict[int, tuple[int, int]] | None = {} if want_certificate else None
    frontier = [0]
    max_frontier = 1
    depth = 0
    found = 0 if hit is not None and hit(0) else None
    truncated = False
    pool = None
    try:
        while frontier and found is None:
            if caps.max_depth is not None and depth >= caps.max_depth:
                truncated = True
                break
            if workers > 1 and len(frontier) >= caps.parallel_threshold:
                if pool is None:
                    pool = ProcessPoolExecutor(workers, initializer=_worker_init, initargs=(ctx,))
                parts = pool.map(_worker_expand, _chunks(frontier, workers))
                successors = [t for part in parts for t in part]
            else:
                successors = _expand(frontier, ctx)
            nxt = []
            for child, parent, low in successors:
                if child in visited:
                    continue
                if len(visited) >= caps.max_states:
                    truncated = True
                    break
                visited.add(child)
                if parents is not None:
                    parents[child] = (parent, low)
                nxt.append(child)
                if hit is not None and hit(child):
                    found = child
                    break
            if nxt:
                depth += 1
            if truncated:
                break
            frontier = nxt
            max_frontier = max(max_frontier, len(frontier))
    finally:
        if pool is not None:
            pool.shutdown()

    cert = None
    if found is not None and parents is not None:
        flips = []
        z = found
        while z:
            z_prev, low = parents[z]
            flips.append(layout.site_at(low.bit_length() - 1))
            z = z_prev
        cert = PathCertificate(domain, boundary, n, tuple(reversed(flips)))
    complete = not truncated and found is None
    return SearchReport(
        reached_target=found is not None,
        states_visited=len(visited),
        max_frontier=max_frontier,
        depth=depth,
        v_n_size=len(visited) if complete else None,
        certificate=cert,
        truncated=truncated,
        states=frozenset(layout.to_key(z) for z in visited) if collect else None,
    )


def origin_reachable(
    family: UpdateFamily,
    domain: Domain,
    n: int,
    boundary=Boundary.ZERO,
    want_certificate: bool = False,
    caps: Caps | None = None,
    workers: int = 1,
) -> tuple[bool, PathCertificate | None]:
    """Whether some configuration of V(n, domain) has a zero at the origin."""
    origin = (0,) * domain.d
    if origin not in domain.index:
        raise SiteOutsideDomain("the domain does not contain the origin")
    report = explore(family, domain, n, boundary, ZeroAt(origin), want_certificate, caps, workers)
    if report.truncated:
        raise ResourceCapExceeded(
            f"search truncated after {report.states_visited} states", report
        )
    return report.reached_target, report.certificate


def min_zero_budget(
    family: UpdateFamily,
    domain: Domain,
    boundary=Boundary.ZERO,
    n_max: int = 8,
    caps: Caps | None = None,
    workers: int = 1,
) -> int | None:
    for n in range(n_max + 1):
        if origin_reachable(family, domain, n, boundary, caps=caps, workers=workers)[0]:
            return n
    return None
