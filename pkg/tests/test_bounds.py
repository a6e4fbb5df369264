import math
from fractions import Fraction

import pytest

from hatters.bounds import (
    asymptotic_chromatic_bound, bound_report, chromatic_threshold_bound, lll_bound,
    partition_bound, partition_upper,
)
from hatters.graphcore import make_complete, make_cycle, make_empty, make_path


@pytest.mark.parametrize("delta", range(0, 60))
def test_lll_bound_matches_float(delta):
    assert lll_bound(delta) == math.floor(math.e * (delta + 1))


def test_lll_examples():
    assert [lll_bound(0), lll_bound(2), lll_bound(9)] == [2, 8, 27]


@pytest.mark.parametrize("n", range(2, 60))
def test_clique_threshold_is_n(n):
    assert chromatic_threshold_bound(n, n) == n


def test_threshold_examples():
    assert chromatic_threshold_bound(5, 3) == 4
    assert chromatic_threshold_bound(4, 2) == 3
    with pytest.raises(ValueError):
        chromatic_threshold_bound(3, 4)


def test_threshold_grows_with_h():
    for n in range(3, 30):
        vals = [chromatic_threshold_bound(n, h) for h in range(2, n + 1)]
        assert vals == sorted(vals)


def test_partition_bound_monotone_in_k():
    for sizes in ([1, 1, 1], [2, 2], [3, 2], [5, 5, 1], [1] * 6):
        seen = [partition_bound(sizes, k) for k in range(2, 20)]
        first = seen.index(True)
        assert all(seen[first:])
        assert partition_upper(sizes) == first + 1


def test_partition_bound_clique_is_exact():
    # singleton parts: l - l(k-1)/k = l/k < 1 iff k > l
    for l in range(1, 12):
        assert partition_upper([1] * l) == l


def test_partition_large_exponents_use_floats():
    assert partition_bound([5000, 5000], 2) is False
    assert partition_bound([5000, 5000], 10**5) is True
    # exactly 1 - 2**-5000 < 1, but inside the float margin: no claim is made
    assert partition_bound([5000], 2) is False
    assert partition_bound([4000], 2) is True


def test_threshold_large_values_conservative():
    # n large: float branch still returns a k-1 no smaller than the exact one nearby
    assert chromatic_threshold_bound(5000, 2) >= chromatic_threshold_bound(4000, 2)


def test_asymptotic_value():
    assert asymptotic_chromatic_bound(100, 2) == pytest.approx(100 / (2 * math.log(2)))


def test_reports():
    assert bound_report(make_complete(4)).best == 4
    assert bound_report(make_cycle(5)).best == 4
    assert bound_report(make_cycle(4)).best == 3
    rep = bound_report(make_path(2))
    assert rep.best == 2
    names = [e["name"] for e in bound_report(make_cycle(5)).to_json()["bounds"]]
    assert names == ["lll", "order", "partition", "chromatic_threshold", "asymptotic"]
    assert bound_report(make_empty(1)).best == 1


def test_exact_rationals_used_for_small_sizes():
    q = Fraction(2, 3)
    assert partition_bound([3, 3], 3) == (2 - 2 * q ** 3 < 1)
