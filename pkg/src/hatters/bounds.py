"""Closed-form upper bounds on the hat chromatic number.

Every bound here is evaluated so that rounding can only make it larger:
exact rationals where the exponents are moderate, otherwise floats with a
``1e-12`` margin that always errs toward the weaker conclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .graphcore import Graph, chromatic_number

EXACT_EXPONENT_LIMIT = 4000
FLOAT_MARGIN = 1e-12


def _e_bounds(terms: int) -> tuple[Fraction, Fraction]:
    """Rational interval containing Euler's number (Taylor tail bound)."""
    s, f = Fraction(0), 1
    for i in range(terms + 1):
        if i:
            f *= i
        s += Fraction(1, f)
    return s, s + Fraction(2, f * (terms + 1))


def lll_bound(max_degree: int) -> int:
    """``floor(e * (max_degree + 1))``, computed exactly."""
    if max_degree < 0:
        raise ValueError("max degree must be >= 0")
    m = max_degree + 1
    terms = 20
    while True:
        lo, hi = _e_bounds(terms)
        if math.floor(lo * m) == math.floor(hi * m):
            return math.floor(lo * m)
        terms *= 2


def partition_bound(part_sizes: Sequence[int], k: int) -> bool:
    """Does ``l - sum(((k-1)/k)**|V_i|) < 1`` hold?  ``True`` means ``mu <= k-1``.

    ``part_sizes`` must come from a partition into independent sets.
    """
    if k < 2:
        raise ValueError("k >= 2 required")
    sizes = [int(x) for x in part_sizes]
    if any(x < 0 for x in sizes):
        raise ValueError("part sizes must be non-negative")
    if max(sizes, default=0) <= EXACT_EXPONENT_LIMIT:
        q = Fraction(k - 1, k)
        return len(sizes) - sum(q ** x for x in sizes) < 1
    value = len(sizes) - sum(math.exp(x * math.log1p(-1 / k)) for x in sizes)
    return value < 1 - FLOAT_MARGIN


def partition_upper(part_sizes: Sequence[int]) -> int:
    """Smallest ``k - 1`` certified by :func:`partition_bound`."""
    k = 2
    while not partition_bound(part_sizes, k):
        k += 1
    return k - 1


def _threshold_exceeded(n: int, h: int, k: int) -> bool:
    """``k > 1 / (1 - (1 - 1/h)**(h/n))``, i.e. ``((k-1)/k)**n > ((h-1)/h)**h``."""
    if max(n, h) <= EXACT_EXPONENT_LIMIT:
        return Fraction(k - 1, k) ** n > Fraction(h - 1, h) ** h
    return n * math.log1p(-1 / k) > h * math.log1p(-1 / h) + FLOAT_MARGIN


def chromatic_threshold_bound(n: int, h: int) -> int:
    """Bound for a graph of order ``n`` and chromatic number ``h`` (``2 <= h <= n``).

    Returns ``k - 1`` for the smallest integer ``k`` exceeding the threshold.
    Also valid when ``h`` is only an upper bound on the chromatic number,
    since the threshold grows with ``h``.
    """
    if not 2 <= h <= n:
        raise ValueError("need 2 <= h <= n")
    k = 2
    while not _threshold_exceeded(n, h, k):
        k += 1
    return k - 1


def asymptotic_chromatic_bound(n: int, h: int) -> float:
    """``n / (h ln(h/(h-1)))``; holds only for large ``n``, so it is report-only."""
    if h < 2:
        raise ValueError("h >= 2 required")
    return n / (h * math.log(h / (h - 1)))


@dataclass
class BoundEntry:
    name: str
    value: float
    applicable: bool
    note: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "applicable": self.applicable,
                "note": self.note}


@dataclass
class BoundReport:
    n: int
    max_degree: int
    chromatic: int | None
    entries: list[BoundEntry] = field(default_factory=list)

    @property
    def best(self) -> int | None:
        vals = [int(e.value) for e in self.entries if e.applicable]
        return min(vals) if vals else None

    def to_json(self) -> dict:
        return {"n": self.n, "max_degree": self.max_degree, "chromatic": self.chromatic,
                "best": self.best, "bounds": [e.to_json() for e in self.entries]}


def bound_report(g: Graph, budget=None) -> BoundReport:
    """Every bound that applies to ``g``; ``best`` ignores report-only entries."""
    rep = BoundReport(g.n, g.max_degree if g.n else 0, None)
    if g.n == 0:
        return rep
    rep.entries.append(BoundEntry("lll", lll_bound(rep.max_degree), True, "floor(e(D+1))"))
    clique = g.num_edges == g.n * (g.n - 1) // 2
    rep.entries.append(BoundEntry("order", g.n if clique else g.n - 1, True,
                                  "clique" if clique else "not a clique"))
    chi = chromatic_number(g, budget)
    rep.chromatic = chi.value
    sizes = [len(p) for p in chi.partition]
    rep.entries.append(BoundEntry("partition", partition_upper(sizes), True,
                                  f"parts {sorted(sizes, reverse=True)}"))
    h = chi.value if chi.exact else chi.upper
    if h >= 2:
        note = "" if chi.exact else f"chromatic number unknown, using upper bound {h}"
        rep.entries.append(BoundEntry("chromatic_threshold", chromatic_threshold_bound(g.n, h),
                                      True, note))
        rep.entries.append(BoundEntry("asymptotic", asymptotic_chromatic_bound(g.n, h), False,
                                      "large-n only; never used for best"))
    else:
        rep.entries.append(BoundEntry("chromatic_threshold", g.n, False, "needs h >= 2"))
    return rep
