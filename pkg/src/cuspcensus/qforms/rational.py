"""Rational quadratic forms: diagonalization, signature, Hilbert symbols and
the Hasse-Minkowski isotropy test.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Optional, Sequence, Union

from sympy import factorint

from .intmat import congruence, det

INFINITY = "inf"
Place = Union[int, str]


class DegenerateForm(ValueError):
    pass


def diagonalize(gram: Sequence[Sequence]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Congruence diagonalization: returns (diag, P) with P^T G P = diag(diag).

    Zero entries in ``diag`` mean the form is degenerate.
    """
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    p = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_col(dst, src, f):
        # basis vector dst += f * src (congruence on rows and columns)
        for r in range(n):
            a[r][dst] += f * a[r][src]
        for c in range(n):
            a[dst][c] += f * a[src][c]
        for r in range(n):
            p[r][dst] += f * p[r][src]

    def swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        a[i], a[j] = a[j], a[i]
        for row in p:
            row[i], row[j] = row[j], row[i]

    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                swap(k, j)
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    continue  # row k is zero: degenerate direction
                # a_kk + 2 a_kj + a_jj = 2 a_kj != 0
                add_col(k, j, Fraction(1))
        for j in range(k + 1, n):
            if a[k][j] != 0:
                add_col(j, k, -a[k][j] / a[k][k])
    return [a[i][i] for i in range(n)], p


class RationalForm:
    """Symmetric rational Gram matrix of a nondegenerate quadratic form."""

    def __init__(self, gram: Sequence[Sequence]):
        g = [[Fraction(x) for x in row] for row in gram]
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square and nonempty")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        diag, _ = diagonalize(g)
        if any(x == 0 for x in diag):
            raise DegenerateForm("quadratic form is degenerate")
        self.gram = tuple(tuple(row) for row in g)
        self.diagonal = tuple(diag)
        self.signature = (sum(1 for x in diag if x > 0), sum(1 for x in diag if x < 0))

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> Fraction:
        return Fraction(det(self.gram))

    def value(self, v: Sequence) -> Fraction:
        return Fraction(congruence(self.gram, [[x] for x in v])[0][0])

    def __repr__(self):
        return f"RationalForm({[[str(x) for x in row] for row in self.gram]})"


def signature(q: RationalForm) -> tuple[int, int]:
    return q.signature


# ---------------------------------------------------------------------------
# local invariants


def _square_class_int(x: Fraction) -> int:
    """Squarefree integer in the same rational square class as x != 0."""
    if x == 0:
        raise ValueError("zero has no square class")
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def hilbert_symbol(a, b, p: Place) -> int:
    """Hilbert symbol (a, b)_p for nonzero rationals; p a prime or ``"inf"``."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if p == INFINITY:
        return -1 if a < 0 and b < 0 else 1
    a, b = _square_class_int(a), _square_class_int(b)
    alpha, beta = _valuation(a, p), _valuation(b, p)
    u, v = a // p**alpha, b // p**beta
    if p == 2:
        def eps(t):
            return ((t - 1) // 2) % 2

        def omega(t):
            return ((t * t - 1) // 8) % 2

        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    s = 1
    if alpha * beta * ((p - 1) // 2) % 2:
        s = -s
    if beta % 2:
        s *= _legendre(u, p)
    if alpha % 2:
        s *= _legendre(v, p)
    return s


def is_local_square(x: Fraction, p: Place) -> bool:
    x = Fraction(x)
    if p == INFINITY:
        return x > 0
    n = _square_class_int(x)
    if n % p == 0:
        return False
    if p == 2:
        return n % 8 == 1
    return _legendre(n, p) == 1


def hasse_invariant(diag: Sequence[Fraction], p: Place) -> int:
    s = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            s *= hilbert_symbol(diag[i], diag[j], p)
    return s


def relevant_places(diag: Sequence[Fraction]) -> list[Place]:
    primes = {2}
    for x in diag:
        for part in (x.numerator, x.denominator):
            primes.update(factorint(abs(part)).keys())
    return sorted(primes) + [INFINITY]


def is_locally_isotropic(diag: Sequence[Fraction], p: Place) -> bool:
    n = len(diag)
    if p == INFINITY:
        return any(x > 0 for x in diag) and any(x < 0 for x in diag)
    d = Fraction(1)
    for x in diag:
        d *= x
    if n == 1:
        return False
    if n == 2:
        return is_local_square(-d, p)
    eps = hasse_invariant(diag, p)
    if n == 3:
        return hilbert_symbol(-1, -d, p) == eps
    if n == 4:
        return not is_local_square(d, p) or eps == hilbert_symbol(-1, -1, p)
    return True


def is_isotropic(q: RationalForm) -> bool:
    """Hasse-Minkowski: isotropic over Q iff isotropic at every place.

    Only 2, the primes dividing the diagonal entries, and the real place
    can obstruct; every other place sees a unimodular form of rank >= 3.
    """
    diag = list(q.diagonal)
    if q.dim == 1:
        return False
    if q.dim == 2:
        d = diag[0] * diag[1]
        r = -d
        if r <= 0:
            return False
        num, den = r.numerator, r.denominator
        return isqrt(num) ** 2 == num and isqrt(den) ** 2 == den
    return all(is_locally_isotropic(diag, p) for p in relevant_places(diag))


def find_isotropic_vector(q: RationalForm, height: int) -> Optional[tuple[int, ...]]:
    """Smallest-height integral isotropic vector with coordinates in [-height, height].

    Heights are tried in increasing order.  For each choice of the trailing
    coordinates the leading coordinate is solved from the quadratic
    equation, so the search is one dimension smaller than the form.
    """
    g = q.gram
    n = q.dim
    for i in range(n):
        if g[i][i] == 0:
            return tuple(int(k == i) for k in range(n))
    a = g[0][0]
    for h in range(1, height + 1):
        for tail in _vectors_of_height(n - 1, h):
            # q(t, tail) = a t^2 + 2 t B + C
            bl = sum(g[0][j + 1] * tail[j] for j in range(n - 1))
            c = sum(
                tail[i] * sum(g[i + 1][j + 1] * tail[j] for j in range(n - 1)) for i in range(n - 1)
            )
            disc = bl * bl - a * c
            if disc < 0:
                continue
            root = _rational_sqrt(disc)
            if root is None:
                continue
            for t in ((-bl + root) / a, (-bl - root) / a):
                v = _clear([t] + list(tail))
                if max(abs(x) for x in v) <= height:
                    return v
    return None


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _clear(v) -> tuple[int, ...]:
    from math import gcd, lcm

    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def _vectors_of_height(n: int, h: int):
    """Integer vectors in Z^n with max |coordinate| exactly h, up to sign."""
    from itertools import product

    if n == 0:
        return
    rng = range(-h, h + 1)
    for v in product(rng, repeat=n):
        if max(abs(x) for x in v) != h:
            continue
        first = next(x for x in v if x)
        if first < 0:
            continue
        yield v
