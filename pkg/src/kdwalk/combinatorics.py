"""Problem parameters, overlap-class counting, and the classical collision check.

Vertices of the search graph are pairs (S, y) with S an r-subset of
{1, ..., n} and y outside S.  Relative to a colliding index set K of size
k, every vertex falls into one of 2k+1 overlap classes labelled
(ell, j): ell colliding indices inside S, j = 1 iff y itself collides.
All list indices are 1-based in every public interface.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations


def nearest_r(n: int, k: int) -> int:
    """Subset size r: the integer nearest to n**(k/(k+1)).

    Evaluated in exact integer arithmetic, so rounding never suffers float
    error.  A half-integer would round away from zero, but no tie can
    occur: 2**(k+1) * n**k is even while (2m+1)**(k+1) is odd.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    if k < 2:
        raise ValueError(f"need k >= 2, got k={k}")
    target = n**k
    m = max(int(n ** (k / (k + 1))), 1)
    while m > 1 and m ** (k + 1) > target:
        m -= 1
    while (m + 1) ** (k + 1) <= target:
        m += 1
    # m = floor(n^(k/(k+1))); bump iff the fractional part is >= 1/2
    if 2 ** (k + 1) * target >= (2 * m + 1) ** (k + 1):
        m += 1
    return m


def binomial(n: int, m: int) -> int:
    """C(n, m) as an exact integer; 0 when m > n."""
    if n < 0 or m < 0:
        raise ValueError(f"binomial needs nonnegative arguments, got ({n}, {m})")
    return math.comb(n, m)


@dataclass(frozen=True)
class ProblemParams:
    """Instance frame: list length n, collision multiplicity k, subset size r.

    r defaults to nearest_r(n, k).  m is an upper bound on list values and
    is consumed only by the two-register simulator.  Requires k <= n - r
    (otherwise the overlap-class construction breaks down) and r >= k
    (otherwise no subset can contain a colliding set).
    """

    n: int
    k: int
    r: int | None = None
    m: int | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need n >= 2, got n={self.n}")
        if self.k < 2:
            raise ValueError(f"need k >= 2, got k={self.k}")
        if self.r is None:
            object.__setattr__(self, "r", nearest_r(self.n, self.k))
        if not 1 <= self.r < self.n:
            raise ValueError(f"need 1 <= r < n, got r={self.r}, n={self.n}")
        if self.k > self.n - self.r:
            raise ValueError(
                f"regime violation: k={self.k} exceeds n-r={self.n - self.r}"
            )
        if self.k > self.r:
            raise ValueError(f"no r-subset can hold k={self.k} indices, r={self.r}")
        if self.m is not None and self.m < 1:
            raise ValueError(f"need m >= 1, got m={self.m}")

    @property
    def strict_regime(self) -> bool:
        """True when k < n - r, so every overlap class is nonempty."""
        return self.k < self.n - self.r


def class_basis(k: int) -> list[tuple[int, int]]:
    """Overlap classes in fixed order (0,0),(0,1),...,(k-1,0),(k-1,1),(k,0).

    (k, 1) does not exist: with all k colliding indices inside S, the
    outside element cannot collide.  The marked class (k, 0) sits last.
    """
    out: list[tuple[int, int]] = []
    for ell in range(k):
        out.append((ell, 0))
        out.append((ell, 1))
    out.append((k, 0))
    return out


def class_position(k: int, ell: int, j: int) -> int:
    """Index of class (ell, j) in the class_basis order."""
    _validate_class(k, ell, j)
    return 2 * ell + j


def _validate_class(k: int, ell: int, j: int) -> None:
    if not 0 <= ell <= k:
        raise ValueError(f"class label ell={ell} outside [0, {k}]")
    if j not in (0, 1):
        raise ValueError(f"class label j={j} must be 0 or 1")
    if ell == k and j == 1:
        raise ValueError(f"class ({k}, 1) is empty by construction")


def class_size(params: ProblemParams, idx: tuple[int, int]) -> int:
    """Number of vertices (S, y) in overlap class (ell, j), exact."""
    ell, j = idx
    _validate_class(params.k, ell, j)
    n, k, r = params.n, params.k, params.r
    base = binomial(k, ell) * binomial(n - k, r - ell)
    return base * (n - r - k + ell) if j == 0 else base * (k - ell)


def class_fraction(params: ProblemParams, idx: tuple[int, int]) -> Fraction:
    """class_size / vertex_count as an exact rational.

    Evaluated as a product of O(k) small factors instead of a ratio of
    huge binomials, so it stays cheap and exact at n ~ 10**6.
    """
    ell, j = idx
    _validate_class(params.k, ell, j)
    n, k, r = params.n, params.k, params.r
    num = binomial(k, ell)
    for i in range(ell):
        num *= r - i
    for i in range(k - ell):
        num *= n - r - i
    num *= (n - r - k + ell) if j == 0 else (k - ell)
    den = n - r
    for i in range(k):
        den *= n - i
    return Fraction(num, den)


def vertex_count(params: ProblemParams) -> int:
    """|V| = C(n, r) * (n - r); equals the sum of all class sizes."""
    return binomial(params.n, params.r) * (params.n - params.r)


def classical_k_collision(values, k: int):
    """Indices (1-based, sorted) of k equal values, or None.

    Sort-based: O(n log n) comparisons.  Deterministic choice: the k
    smallest indices of the smallest colliding value.
    """
    if k < 2:
        raise ValueError(f"need k >= 2, got k={k}")
    by_value: dict[int, list[int]] = {}
    for i, v in enumerate(values, start=1):
        by_value.setdefault(v, []).append(i)
    for v in sorted(by_value):
        if len(by_value[v]) >= k:
            return tuple(by_value[v][:k])
    return None


def count_k_collisions(values, k: int) -> int:
    """Number of k-index sets with equal values."""
    counts = Counter(values)
    return sum(math.comb(c, k) for c in counts.values() if c >= k)


@dataclass(frozen=True)
class KDistinctnessInstance:
    """A concrete list plus (optionally) a known colliding index set."""

    values: tuple[int, ...]
    colliding_set: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if self.colliding_set is not None:
            ks = tuple(sorted(self.colliding_set))
            object.__setattr__(self, "colliding_set", ks)
            if len(set(ks)) != len(ks):
                raise ValueError("colliding_set has repeated indices")
            if not all(1 <= i <= len(self.values) for i in ks):
                raise ValueError("colliding_set index out of range")
            vals = {self.values[i - 1] for i in ks}
            if len(vals) != 1:
                raise ValueError("colliding_set values are not all equal")

    @property
    def n(self) -> int:
        return len(self.values)

    def max_value(self) -> int:
        return max(self.values)


def make_instance(values, k: int) -> KDistinctnessInstance:
    """Instance with its k-collision located by the classical checker."""
    return KDistinctnessInstance(tuple(values), classical_k_collision(values, k))


def unique_colliding_set(values, k: int) -> tuple[int, ...]:
    """The single k-collision of the list; error when there is not exactly one."""
    cnt = count_k_collisions(values, k)
    if cnt != 1:
        raise ValueError(f"expected exactly one k-collision, found {cnt}")
    found = classical_k_collision(values, k)
    assert found is not None
    return found


def canonical_instance(n: int, k: int) -> KDistinctnessInstance:
    """Default test list: value 1 at indices 1..k, then 2, 3, ... once each.

    Has the unique colliding set {1, ..., k} and max value n - k + 1.
    """
    values = (1,) * k + tuple(range(2, n - k + 2))
    return KDistinctnessInstance(values, tuple(range(1, k + 1)))


def permuted_instance(instance: KDistinctnessInstance, perm: dict[int, int]) -> KDistinctnessInstance:
    """Relabel positions by the permutation old-index -> new-index."""
    n = instance.n
    new_values = [0] * n
    for i, v in enumerate(instance.values, start=1):
        new_values[perm[i] - 1] = v
    ks = instance.colliding_set
    new_ks = tuple(sorted(perm[i] for i in ks)) if ks is not None else None
    return KDistinctnessInstance(tuple(new_values), new_ks)


def brute_force_k_collision(values, k: int):
    """All-subsets reference checker used to validate the fast one in tests."""
    idx = range(1, len(values) + 1)
    best = None
    for sub in combinations(idx, k):
        vals = {values[i - 1] for i in sub}
        if len(vals) == 1:
            key = (values[sub[0] - 1], sub)
            if best is None or key < best:
                best = key
    return best[1] if best is not None else None
