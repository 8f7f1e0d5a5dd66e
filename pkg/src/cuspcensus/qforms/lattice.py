"""Positive definite integral lattices given by Gram matrices."""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from typing import Optional, Sequence

from gmpy2 import mpq

from .intmat import congruence, det, identity, inverse, is_positive_definite, lll_gram, matmul, transpose

MAX_DIM = 16

Vector = tuple[int, ...]


class NotPositiveDefinite(ValueError):
    pass


class GramLattice:
    """An integral symmetric Gram matrix, q(v) = v^T G v.

    The short-vector cache is filled lazily and only ever grows; callers
    sharing a lattice across threads should warm it first.
    """

    __slots__ = ("gram", "_det", "_short", "_short_bound", "_fingerprint", "_pd", "_lll")

    def __init__(self, gram: Sequence[Sequence[int]]):
        for row in gram:
            for x in row:
                if not isinstance(x, int) and Fraction(x) != int(x):
                    raise ValueError("Gram matrix must be integral")
        g = [[int(x) for x in row] for row in gram]
        d = len(g)
        if d == 0 or any(len(row) != d for row in g):
            raise ValueError("Gram matrix must be square and nonempty")
        if d > MAX_DIM:
            raise ValueError(f"dimension {d} exceeds {MAX_DIM}")
        for i in range(d):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        self.gram = tuple(tuple(row) for row in g)
        self._det = None
        self._short = None
        self._short_bound = -1
        self._fingerprint = None
        self._pd = None
        self._lll = None

    @classmethod
    def identity(cls, d: int) -> "GramLattice":
        return cls([[int(i == j) for j in range(d)] for i in range(d)])

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        if self._det is None:
            self._det = det(self.gram)
        return self._det

    def is_positive_definite(self) -> bool:
        if self._pd is None:
            self._pd = is_positive_definite(self.gram)
        return self._pd

    def require_positive_definite(self) -> None:
        if not self.is_positive_definite():
            raise NotPositiveDefinite("lattice is not positive definite")

    def norm(self, v: Sequence[int]) -> int:
        g = self.gram
        return sum(v[i] * sum(g[i][j] * v[j] for j in range(len(v))) for i in range(len(v)))

    def inner(self, u: Sequence[int], v: Sequence[int]) -> int:
        g = self.gram
        return sum(u[i] * sum(g[i][j] * v[j] for j in range(len(v))) for i in range(len(u)))

    def transform(self, u: Sequence[Sequence[int]]) -> "GramLattice":
        return GramLattice(congruence(self.gram, u))

    def lll(self) -> tuple["GramLattice", list[list[int]]]:
        if self._lll is None:
            self.require_positive_definite()
            g, u = lll_gram(self.gram)
            red = GramLattice(g)
            # a reduced basis is left fixed by LLL
            red._pd = True
            red._det = self._det
            red._lll = (red, identity(red.dim))
            self._lll = (red, u)
        red, u = self._lll
        return red, [list(row) for row in u]

    def short_vectors(self, bound: int) -> list[tuple[Vector, int]]:
        """All v != 0 with q(v) <= bound, one of each pair +-v, by norm then lexicographically."""
        if bound <= self._short_bound:
            return [(v, n) for v, n in self._short if n <= bound]
        vecs = short_vectors(self, bound)
        self._short, self._short_bound = vecs, bound
        return list(vecs)

    @property
    def minimum(self) -> int:
        bound = min(self.gram[i][i] for i in range(self.dim))
        return self.short_vectors(bound)[0][1]

    def fingerprint(self) -> tuple:
        """Isometry invariant: (dim, det, minimum, norm histogram up to twice the minimum)."""
        if self._fingerprint is None:
            red, _ = self.lll()
            m = red.minimum
            hist = Counter(n for _, n in red.short_vectors(2 * m))
            self._fingerprint = (self.dim, self.det, m, tuple(sorted(hist.items())))
        return self._fingerprint

    def __eq__(self, other):
        return isinstance(other, GramLattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"GramLattice({[list(r) for r in self.gram]})"


def _ldl(g) -> tuple[list[list[mpq]], list[mpq]]:
    """q(x) = sum_i diag[i] * (x_i + sum_{j>i} coef[i][j] x_j)^2, exactly."""
    n = len(g)
    a = [[mpq(x) for x in row] for row in g]
    coef = [[mpq(0)] * n for _ in range(n)]
    diag = [mpq(0)] * n
    for i in range(n):
        if a[i][i] <= 0:
            raise NotPositiveDefinite("lattice is not positive definite")
        diag[i] = a[i][i]
        for j in range(i + 1, n):
            coef[i][j] = a[i][j] / a[i][i]
        for j in range(i + 1, n):
            for k in range(j, n):
                a[j][k] -= a[i][j] * a[i][k] / a[i][i]
                a[k][j] = a[j][k]
    return coef, diag


def short_vectors(lattice: GramLattice, bound: int) -> list[tuple[Vector, int]]:
    """Exact Fincke-Pohst enumeration of nonzero vectors up to sign with q(v) <= bound.

    Coordinates are fixed from the last to the first; at each level the
    admissible range is the exact solution set of diag*(x - c)^2 <= budget.
    An integer square root proposes the window; membership is checked exactly.
    """
    lattice.require_positive_definite()
    coef, diag = _ldl(lattice.gram)
    n = lattice.dim
    bound = mpq(bound)
    out: list[tuple[Vector, int]] = []
    x = [0] * n

    def level_range(i, budget):
        center = -sum((coef[i][j] * x[j] for j in range(i + 1, n)), mpq(0))
        r = budget / diag[i]
        # exact: (t - center)^2 <= r
        w = math.isqrt(int(r.numerator // r.denominator)) + 1
        lo = int(math.floor(center)) - w
        hi = int(math.ceil(center)) + w
        while lo <= hi and (lo - center) ** 2 > r:
            lo += 1
        while hi >= lo and (hi - center) ** 2 > r:
            hi -= 1
        return center, lo, hi

    def rec(i, budget, all_zero_above):
        center, lo, hi = level_range(i, budget)
        if all_zero_above:
            lo = max(lo, 0)
        for t in range(lo, hi + 1):
            x[i] = t
            used = diag[i] * (t - center) ** 2
            zero = all_zero_above and t == 0
            if i == 0:
                if not zero:
                    val = budget_total - (budget - used)
                    out.append((tuple(x), int(val)))
            else:
                rec(i - 1, budget - used, zero)
        x[i] = 0

    budget_total = bound
    rec(n - 1, bound, True)
    out.sort(key=lambda item: (item[1], item[0]))
    return out


def _candidate_map(lat: GramLattice, norms: set[int]) -> dict[int, list[Vector]]:
    bound = max(norms)
    by_norm: dict[int, list[Vector]] = {n: [] for n in norms}
    for v, n in lat.short_vectors(bound):
        if n in by_norm:
            by_norm[n].append(v)
            by_norm[n].append(tuple(-c for c in v))
    return by_norm


def isometry_test(l1: GramLattice, l2: GramLattice) -> Optional[list[list[int]]]:
    """Return U with U^T G1 U = G2 if the lattices are isometric, else None.

    Both lattices are LLL-reduced first; the images of the reduced basis of
    L2 are then searched among short vectors of L1, filling the scarcest
    norm first and pruning on inner products with the images already fixed.
    """
    if l1.dim != l2.dim:
        raise ValueError("dimension mismatch")
    l1.require_positive_definite()
    l2.require_positive_definite()
    if l1.det != l2.det:
        return None
    r1, a1 = l1.lll()
    r2, a2 = l2.lll()
    target = r2.gram
    d = l1.dim
    norms = {target[i][i] for i in range(d)}
    cands = _candidate_map(r1, norms)
    if any(len(cands[target[i][i]]) == 0 for i in range(d)):
        return None
    if Counter(n for _, n in r1.short_vectors(max(norms))) != Counter(
        n for _, n in r2.short_vectors(max(norms))
    ):
        return None

    g1 = r1.gram
    order = sorted(range(d), key=lambda i: (len(cands[target[i][i]]), i))
    # precompute G1 v for each candidate so inner products are dot products
    gv = {}
    for lst in cands.values():
        for v in lst:
            if v not in gv:
                gv[v] = tuple(sum(g1[r][c] * v[c] for c in range(d)) for r in range(d))

    chosen: dict[int, Vector] = {}

    def rec(k, pools):
        if k == d:
            return True
        i = order[k]
        for v in pools[k]:
            chosen[i] = v
            gvv = gv[v]
            new_pools = pools[: k + 1]
            ok = True
            for kk in range(k + 1, d):
                j = order[kk]
                want = target[i][j]
                filt = [w for w in pools[kk] if sum(a * b for a, b in zip(gvv, w)) == want]
                if not filt:
                    ok = False
                    break
                new_pools.append(filt)
            if ok and rec(k + 1, new_pools):
                return True
        chosen.pop(i, None)
        return False

    pools = [cands[target[order[k]][order[k]]] for k in range(d)]
    if not rec(0, pools):
        return None
    ur = [[chosen[j][i] for j in range(d)] for i in range(d)]
    u = matmul(matmul(a1, ur), inverse(a2))
    u = [[int(x) for x in row] for row in u]
    assert congruence(l1.gram, u) == [list(r) for r in l2.gram]
    return u


def is_isometric(l1: GramLattice, l2: GramLattice) -> bool:
    if l1.fingerprint() != l2.fingerprint():
        return False
    return isometry_test(l1, l2) is not None


def direct_sum(*lattices: GramLattice) -> GramLattice:
    d = sum(lat.dim for lat in lattices)
    g = [[0] * d for _ in range(d)]
    off = 0
    for lat in lattices:
        for i in range(lat.dim):
            for j in range(lat.dim):
                g[off + i][off + j] = lat.gram[i][j]
        off += lat.dim
    return GramLattice(g)


def root_lattice(name: str) -> GramLattice:
    """Gram matrices of A_n, D_n, E_8 (Cartan matrices)."""
    kind, n = name[0].upper(), int(name[1:])
    if kind == "A":
        g = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    elif kind == "D":
        if n < 3:
            raise ValueError("D_n needs n >= 3")
        g = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
        # branch: node n-1 attaches to node n-3 instead of n-2
        g[n - 1][n - 2] = g[n - 2][n - 1] = 0
        g[n - 1][n - 3] = g[n - 3][n - 1] = -1
    elif kind == "E" and n == 8:
        g = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
        # chain 0-1-2-3-4-5-6 with node 7 attached to node 4
        for i in range(6):
            g[i][i + 1] = g[i + 1][i] = -1
        g[7][4] = g[4][7] = -1
    else:
        raise ValueError(f"unknown root lattice {name!r}")
    return GramLattice(g)


__all__ = [
    "GramLattice",
    "NotPositiveDefinite",
    "direct_sum",
    "is_isometric",
    "isometry_test",
    "root_lattice",
    "short_vectors",
    "transpose",
]
