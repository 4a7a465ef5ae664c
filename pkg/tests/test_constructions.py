import pytest

from kcmreach.constructions import (
    builtin_family,
    cdg_threshold,
    east1d,
    east2d,
    fa1f,
    interval_walk_1d,
    rooted_corner_2d,
)
from kcmreach.errors import InvalidBudget, NoContiguousDomain, NotUnrooted
from kcmreach.family import interaction_range, validate_family
from kcmreach.lattice import Domain, interval
from kcmreach.search import origin_reachable, verify_certificate


def test_builtin_rules():
    assert east1d().rules == (frozenset({(-1,)}),)
    assert set(fa1f(2).rules) == {frozenset({x}) for x in [(1, 0), (0, 1), (-1, 0), (0, -1)]}
    assert east2d().rules == (frozenset({(-1, 0)}),)
    assert set(rooted_corner_2d().rules) == {frozenset({(-1, 0)}), frozenset({(0, -1)})}
    assert builtin_family("fa1f(3)") == fa1f(3)
    with pytest.raises(KeyError):
        builtin_family("nope")


@pytest.mark.parametrize("n, value", [(1, 0), (2, 2), (4, 14)])
def test_threshold(n, value):
    assert cdg_threshold(n) == value


def test_threshold_needs_positive_n():
    with pytest.raises(InvalidBudget):
        cdg_threshold(0)


def _walk_checks(fam, dom):
    cert = interval_walk_1d(fam, dom)
    check = verify_certificate(cert, fam)
    r = interaction_range(fam)
    assert check.ok, check.reason
    assert check.final.is_zero(0)
    assert check.peak_zeros <= r + 1
    assert len(cert.flips) <= 2 * len(dom) + r
    return cert, check


def test_fa1f_walk():
    cert, check = _walk_checks(fa1f(1), interval(-50, 50))
    assert check.peak_zeros == 2


def test_fa1f_single_site():
    cert, check = _walk_checks(fa1f(1), interval(0, 0))
    assert cert.flips == ((0,),) and check.peak_zeros == 1


def test_wide_family_walk():
    fam = validate_family(1, [[-2, -1], [1, 2]])
    _walk_checks(fam, interval(-20, 20))
    assert origin_reachable(fam, interval(-8, 8), 3)[0]


@pytest.mark.parametrize(
    "rules",
    [[[-1], [1]], [[-2, -1], [1, 2]], [[-3], [1, 2]], [[-1, -2, -3], [3]], [[-2], [-1], [2, 3]]],
)
@pytest.mark.parametrize("lo, hi", [(-15, 15), (-3, 20), (0, 4), (-9, 0)])
def test_walk_invariants(rules, lo, hi):
    fam = validate_family(1, rules)
    _walk_checks(fam, interval(lo, hi))
    r = interaction_range(fam)
    small = interval(max(lo, -6), min(hi, 6))
    assert origin_reachable(fam, small, r + 1)[0]


def test_walk_rejects_rooted():
    with pytest.raises(NotUnrooted):
        interval_walk_1d(east1d(), interval(-3, 3))


def test_walk_rejects_gaps():
    with pytest.raises(NoContiguousDomain):
        interval_walk_1d(fa1f(1), Domain.of([-3, -1, 0, 1]))
    with pytest.raises(NoContiguousDomain):
        interval_walk_1d(fa1f(1), interval(2, 5))
