"""Independent reference implementations used by the tests.

Nothing here imports the search engine: states are plain tuples of 0/1 and
legality is evaluated straight from the definition.
"""

from __future__ import annotations

import itertools


def naive_reachable(rules, sites, n, outside_zero=True):
    """V(n, sites) as a set of zero-sets, by fixed-point iteration.

    Every round re-expands the whole current set (no frontier) until it stops
    growing; moves to configurations with more than n zeros are discarded.
    """
    sites = list(sites)
    pos = {s: i for i, s in enumerate(sites)}

    def state(eta, s):
        i = pos.get(s)
        if i is None:
            return 0 if outside_zero else 1
        return eta[i]

    def legal(eta, s):
        return any(
            all(state(eta, tuple(a + b for a, b in zip(s, x))) == 0 for x in rule)
            for rule in rules
        )

    start = (1,) * len(sites)
    reach = {start}
    while True:
        grown = set(reach)
        for eta in reach:
            for i, s in enumerate(sites):
                if legal(eta, s):
                    nxt = eta[:i] + (1 - eta[i],) + eta[i + 1:]
                    if nxt.count(0) <= n:
                        grown.add(nxt)
        if grown == reach:
            break
        reach = grown
    return {frozenset(s for s, v in zip(sites, eta) if v == 0) for eta in reach}


def full_graph_size(rules, sites, n, outside_zero=True):
    """|V(n, sites)| via boolean relaxation over all 2^|sites| configurations."""
    sites = list(sites)
    L = len(sites)
    pos = {s: i for i, s in enumerate(sites)}
    reach = [False] * (1 << L)
    reach[0] = True  # bit set = zero; 0 is the all-ones configuration

    def zero(mask, s):
        i = pos.get(s)
        if i is None:
            return outside_zero
        return bool(mask >> i & 1)

    changed = True
    while changed:
        changed = False
        for mask in range(1 << L):
            if not reach[mask]:
                continue
            for i, s in enumerate(sites):
                if not any(all(zero(mask, tuple(a + b for a, b in zip(s, x))) for x in r) for r in rules):
                    continue
                nxt = mask ^ (1 << i)
                if bin(nxt).count("1") <= n and not reach[nxt]:
                    reach[nxt] = True
                    changed = True
    return sum(reach)


def brute_range(rules):
    """Sup-norm diameter of X u {0}, over rules X, by listing every pair."""
    best = 0
    for rule in rules:
        pts = [tuple(0 for _ in next(iter(rule)))] + list(rule)
        for p, q in itertools.product(pts, repeat=2):
            best = max(best, max(abs(a - b) for a, b in zip(p, q)))
    return best


def east_path_reachable(N, n):
    """Origin reachability for East on {-N..N} by an explicit DFS over zero-sets."""
    sites = list(range(-N, N + 1))
    seen = set()
    stack = [frozenset()]
    while stack:
        z = stack.pop()
        if 0 in z:
            return True
        if z in seen:
            continue
        seen.add(z)
        for s in sites:
            left = s - 1
            if left < -N or left in z:
                nz = z ^ {s}
                if len(nz) <= n and nz not in seen:
                    stack.append(nz)
    return False
