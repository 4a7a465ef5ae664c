"""Desk-scale verification tasks and their JSON reports."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import _linalg
from .constructions import (
    cdg_threshold,
    east1d,
    east2d,
    fa1f,
    interval_walk_1d,
    rooted_corner_2d,
)
from .errors import ResourceCapExceeded
from .family import (
    AdaptedBasis,
    Classification,
    UpdateFamily,
    classify,
    construct_basis,
    find_spanning_stable_directions,
    interaction_range,
    is_stable,
    primitive_directions,
    stable_arcs_2d,
    to_basis,
    validate_family,
)
from .lattice import BoxSpec, a_n, b_n, in_pn, interval, make_box, make_pn
from .search import Caps, ZeroAt, explore, origin_reachable, verify_certificate

PASS = "pass"
FAIL = "fail"
EXPECTED_FAILURE = "expected-failure"
TRUNCATED = "truncated"


@dataclass
class Case:
    params: dict
    verdict: str
    detail: dict = field(default_factory=dict)
    millis: float = 0.0


@dataclass
class RunReport:
    task: dict
    cases: list[Case] = field(default_factory=list)

    @property
    def truncated(self) -> bool:
        return any(c.verdict == TRUNCATED for c in self.cases)

    @property
    def passed(self) -> bool:
        return all(c.verdict == PASS for c in self.cases)

    @property
    def verdict(self) -> str:
        if self.truncated:
            return TRUNCATED
        if self.passed:
            return PASS
        if all(c.verdict in (PASS, EXPECTED_FAILURE) for c in self.cases):
            return EXPECTED_FAILURE
        return FAIL

    def to_dict(self, include_timing: bool = True) -> dict:
        cases = []
        for c in self.cases:
            row = {"params": c.params, "verdict": c.verdict, "detail": c.detail}
            if include_timing:
                row["millis"] = round(c.millis, 3)
            cases.append(row)
        return {
            "task": self.task,
            "verdict": self.verdict,
            "passed": self.passed,
            "truncated": self.truncated,
            "cases": cases,
        }

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t0) * 1000


def window_geometry(family: UpdateFamily) -> tuple[Classification, AdaptedBasis | None, int]:
    """Classification, adapted basis (None if unrooted) and range used for P_n."""
    cls = classify(family)
    basis = None
    if cls is not Classification.SUPERCRITICAL_UNROOTED:
        dirs = find_spanning_stable_directions(family)
        if dirs is not None:
            basis = construct_basis(dirs)
    return cls, basis, interaction_range(family, basis)


def _as_list(ns) -> list[int]:
    return [ns] if isinstance(ns, int) else list(ns)


def _origin_mask(domain) -> int:
    return 1 << domain.index[(0,) * domain.d]


def verify_theorem_box(
    family: UpdateFamily, ns: int | Iterable[int], caps: Caps | None = None, workers: int = 1
) -> RunReport:
    """Every configuration of V(n, P_n) keeps the origin at 1."""
    cls, basis, r = window_geometry(family)
    unrooted = cls is Classification.SUPERCRITICAL_UNROOTED
    report = RunReport(
        {"kind": "TheoremBox", "family": family.to_json(), "classification": str(cls), "r": r}
    )
    for n in _as_list(ns):
        pn = make_pn(n, r, family.d, basis)
        res, ms = _timed(lambda: explore(family, pn, n, caps=caps, workers=workers, collect=True))
        detail = {"a_n": a_n(n, r), "b_n": b_n(n, r), "sites": len(pn),
                  "states": res.states_visited, "v_n_size": res.v_n_size}
        if res.truncated:
            verdict = TRUNCATED
        else:
            om = _origin_mask(pn)
            bad = sum(1 for k in res.states if k & om)
            detail["origin_zero_states"] = bad
            if bad == 0:
                verdict = PASS
            else:
                verdict = EXPECTED_FAILURE if unrooted else FAIL
        report.cases.append(Case({"n": n}, verdict, detail, ms))
    return report


def verify_lemma_zero_outside(
    family: UpdateFamily, ns: int | Iterable[int], caps: Caps | None = None, workers: int = 1
) -> RunReport:
    """Every non-trivial configuration of V(n, P_n) has a zero outside P_{n-1}."""
    cls, basis, r = window_geometry(family)
    unrooted = cls is Classification.SUPERCRITICAL_UNROOTED
    report = RunReport(
        {"kind": "LemmaZeroOutside", "family": family.to_json(), "classification": str(cls), "r": r}
    )
    for n in _as_list(ns):
        if n < 1:
            raise ValueError("the lemma is stated for n >= 1")
        pn = make_pn(n, r, family.d, basis)
        outer = 0
        for i, s in enumerate(pn.sites):
            if not in_pn(s, n - 1, r, basis):
                outer |= 1 << i
        res, ms = _timed(lambda: explore(family, pn, n, caps=caps, workers=workers, collect=True))
        detail = {"sites": len(pn), "outer_sites": outer.bit_count(),
                  "states": res.states_visited, "v_n_size": res.v_n_size}
        if res.truncated:
            verdict = TRUNCATED
        else:
            bad = sum(1 for k in res.states if k and not k & outer)
            detail["violations"] = bad
            verdict = PASS if bad == 0 else (EXPECTED_FAILURE if unrooted else FAIL)
        report.cases.append(Case({"n": n}, verdict, detail, ms))
    return report


def verify_east_threshold(n_max: int, caps: Caps | None = None, workers: int = 1) -> RunReport:
    """Origin of {-N..N} reachable with n zeros exactly when N <= 2^n - 2."""
    fam = east1d()
    report = RunReport({"kind": "EastThreshold", "n_max": n_max})
    for n in range(1, n_max + 1):
        for N in range(0, cdg_threshold(n) + 2):
            expected = N <= cdg_threshold(n)
            try:
                (got, _), ms = _timed(
                    lambda: origin_reachable(fam, interval(-N, N), n, caps=caps, workers=workers)
                )
            except ResourceCapExceeded:
                report.cases.append(Case({"n": n, "N": N}, TRUNCATED, {"expected": expected}))
                continue
            verdict = PASS if got == expected else FAIL
            report.cases.append(
                Case({"n": n, "N": N}, verdict, {"expected": expected, "reachable": got}, ms)
            )
    return report


def verify_fa1f_mobility(
    N_list: Sequence[int], bfs_limit: int = 8, caps: Caps | None = None, workers: int = 1
) -> RunReport:
    """Two zeros reach the origin of {-N..N} for FA1f, by search and by construction."""
    fam = fa1f(1)
    report = RunReport({"kind": "Fa1fMobility", "N": list(N_list), "bfs_limit": bfs_limit})
    for N in N_list:
        dom = interval(-N, N)
        detail: dict = {}
        ok = True
        t0 = time.perf_counter()
        if N <= bfs_limit:
            try:
                got, _ = origin_reachable(fam, dom, 2, caps=caps, workers=workers)
            except ResourceCapExceeded:
                report.cases.append(Case({"N": N}, TRUNCATED, {}))
                continue
            detail["bfs_reachable"] = got
            ok &= got
        cert = interval_walk_1d(fam, dom)
        check = verify_certificate(cert, fam)
        detail.update(
            certificate_ok=check.ok,
            certificate_flips=len(cert.flips),
            peak_zeros=check.peak_zeros,
            origin_zero=bool(check.final and check.final.is_zero((0,))),
        )
        ok &= check.ok and detail["origin_zero"] and check.peak_zeros <= 2
        ms = (time.perf_counter() - t0) * 1000
        report.cases.append(Case({"N": N}, PASS if ok else FAIL, detail, ms))
    return report


def verify_classification() -> RunReport:
    """Built-in families against their known classes, plus the exact arc cross-check."""
    expected = [
        (east1d(), Classification.NOT_SUPERCRITICAL_UNROOTED),
        (fa1f(1), Classification.SUPERCRITICAL_UNROOTED),
        (fa1f(2), Classification.SUPERCRITICAL_UNROOTED),
        (east2d(), Classification.NOT_SUPERCRITICAL_UNROOTED),
        (rooted_corner_2d(), Classification.NOT_SUPERCRITICAL_UNROOTED),
    ]
    report = RunReport({"kind": "Classification"})
    grid = primitive_directions(2, 8)
    for fam, want in expected:
        got, ms = _timed(lambda: classify(fam))
        detail = {"expected": str(want), "got": str(got)}
        ok = got is want
        if fam.d == 2:
            arcs = stable_arcs_2d(fam)
            mismatches = sum(1 for w in grid if (w in arcs) != is_stable(fam, w))
            detail.update(arcs=str(arcs), arc_mismatches=mismatches)
            ok &= mismatches == 0
        report.cases.append(Case({"family": fam.name}, PASS if ok else FAIL, detail, ms))
    return report


def random_family(rng: random.Random, d: int, n_rules: int = 3, size: int = 2, radius: int = 2):
    rules = []
    for _ in range(n_rules):
        rule = set()
        while len(rule) < size:
            x = tuple(rng.randint(-radius, radius) for _ in range(d))
            if any(x):
                rule.add(x)
        rules.append(sorted(rule))
    return validate_family(d, rules)


def random_spanning_stable(rng: random.Random, d: int, norm: int = 4):
    """A random family together with d random independent stable directions of it."""
    while True:
        fam = random_family(rng, d, n_rules=rng.randint(1, 3), size=rng.randint(1, 3))
        pool = [u for u in primitive_directions(d, norm) if is_stable(fam, u)]
        if len(pool) < d:
            continue
        for _ in range(20):
            pick = rng.sample(pool, d)
            if _linalg.rank([u.vec for u in pick]) == d:
                return fam, pick


def check_basis(basis: AdaptedBasis, rng: random.Random, points: int = 100, box: int = 20) -> list[str]:
    """Exact invariant checks; returns a list of failure descriptions."""
    errors = []
    d = basis.d
    for i, vi in enumerate(basis.v):
        for j, uj in enumerate(basis.u):
            p = _linalg.dot(vi, uj.vec)
            if i == j and not p < 0:
                errors.append(f"<v{i},u{i}> = {p} is not negative")
            if i != j and p != 0:
                errors.append(f"<v{i},u{j}> = {p} is not zero")
    if _linalg.det(basis.v) == 0:
        errors.append("basis is singular")
    for _ in range(points):
        x = tuple(rng.randint(-box, box) for _ in range(d))
        c = to_basis(x, basis)
        for i, ui in enumerate(basis.u):
            if (c[i] > 0) != (_linalg.dot(x, ui.vec) < 0):
                errors.append(f"half-space mismatch at {x}, axis {i}")
    return errors


def verify_basis(trials: int = 200, dims: Sequence[int] = (2, 3), seed: int = 0, points: int = 100) -> RunReport:
    rng = random.Random(seed)
    report = RunReport({"kind": "BasisProperties", "trials": trials, "dims": list(dims), "seed": seed})
    for t in range(trials):
        d = dims[t % len(dims)]
        fam, dirs = random_spanning_stable(rng, d)
        basis, ms = _timed(lambda: construct_basis(dirs))
        errs = check_basis(basis, rng, points)
        report.cases.append(
            Case({"trial": t, "d": d, "u": [u.vec for u in dirs]},
                 PASS if not errs else FAIL, {"errors": errs[:5]}, ms)
        )
    return report


def sweep_rows(family: UpdateFamily, n_values: Iterable[int], N_values=None,
               caps: Caps | None = None, workers: int = 1) -> list[dict]:
    """Reachability of the origin of {-N..N}^d for each (n, N)."""
    rows = []
    name = family.name or "family"
    for n in n_values:
        Ns = N_values if N_values is not None else range(0, max(cdg_threshold(max(n, 1)), 0) + 2)
        for N in Ns:
            dom = make_box(BoxSpec.cube(-N, N, family.d))
            t0 = time.perf_counter()
            res = explore(family, dom, n, target=_origin_target(family.d), caps=caps, workers=workers)
            ms = (time.perf_counter() - t0) * 1000
            rows.append({"family": name, "n": n, "N": N,
                         "reachable": None if res.truncated and not res.reached_target else res.reached_target,
                         "states": res.states_visited, "millis": round(ms, 3)})
    return rows


def _origin_target(d: int) -> ZeroAt:
    return ZeroAt((0,) * d)


__all__ = [
    "RunReport", "Case", "verify_theorem_box", "verify_lemma_zero_outside",
    "verify_east_threshold", "verify_fa1f_mobility", "verify_classification",
    "verify_basis", "sweep_rows", "window_geometry",
]
