"""Small exact matrix helpers over Z and Q.

Matrices are lists of rows.  Dimensions here never exceed ~17, so plain
Python lists beat anything heavier.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def congruence(g: Sequence[Sequence], u: Sequence[Sequence]) -> Matrix:
    """u^T g u."""
    return matmul(transpose(u), matmul(g, u))


def det(a: Sequence[Sequence]):
    """Exact determinant (Fraction elimination; ints in give an int out)."""
    n = len(a)
    if all(isinstance(x, int) for row in a for x in row):
        return _det_bareiss([list(row) for row in a])
    m = [[Fraction(x) for x in row] for row in a]
    result = Fraction(1)
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            return 0
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            result = -result
        result *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    if result.denominator == 1 and all(isinstance(x, int) for row in a for x in row):
        return int(result)
    return result


def _det_bareiss(m: list[list[int]]) -> int:
    n = len(m)
    sign, prev = 1, 1
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            return 0
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        m[k], m[pivot] = m[pivot], m[k]
        p = m[k][k]
        m[k] = [x / p for x in m[k]]
        for i in range(n):
            if i != k and m[i][k]:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [row[n:] for row in m]


def hermite_rows(gens: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form; returns the nonzero rows (a Z-basis)."""
    rows = [list(r) for r in gens if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    basis = []
    col = 0
    while rows and col < ncols:
        nz = [r for r in rows if r[col] != 0]
        zero = [r for r in rows if r[col] == 0]
        if not nz:
            col += 1
            continue
        # euclid on column entries
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                (rest if r[col] != 0 else zero).append(r)
            nz = [piv] + rest
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        rows = [r for r in zero if any(r)]
        col += 1
    # reduce entries above pivots
    for i, row in enumerate(basis):
        c = next(j for j, x in enumerate(row) if x)
        for k in range(i):
            q = basis[k][c] // row[c]
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], row)]
    return basis


def integer_kernel(a: Sequence[Sequence]) -> list[list[int]]:
    """Z-basis of {x in Z^n : a x = 0} for a rational matrix a (rows)."""
    n = len(a[0])
    # scale rows to integers
    rows = []
    for row in a:
        den = 1
        for x in row:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
        rows.append([int(Fraction(x) * den) for x in row])
    # column operations tracked in u: work on augmented columns [A; I]
    cols = [[rows[i][j] for i in range(len(rows))] + [int(i == j) for i in range(n)] for j in range(n)]
    m = len(rows)
    done = 0
    for i in range(m):
        active = [c for c in cols[done:] if c[i] != 0]
        rest = [c for c in cols[done:] if c[i] == 0]
        if not active:
            continue
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[i]))
            piv = active[0]
            nxt = [piv]
            for c in active[1:]:
                q = c[i] // piv[i]
                c = [x - q * y for x, y in zip(c, piv)]
                (nxt if c[i] != 0 else rest).append(c)
            active = nxt
        cols = cols[:done] + active + rest
        done += 1
    return [c[m:] for c in cols[done:]]


def is_positive_definite(g: Sequence[Sequence]) -> bool:
    """Sylvester's criterion; symmetric elimination without pivoting exposes every leading minor."""
    n = len(g)
    if all(isinstance(x, int) for row in g for x in row):
        m = [list(row) for row in g]
    else:
        den = math.lcm(*(Fraction(x).denominator for row in g for x in row))
        m = [[int(Fraction(x) * den) for x in row] for row in g]
    # Bareiss: after step k, m[k][k] is the (k+1)-th leading minor
    prev = 1
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return True


def lll_gram(g: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> tuple[Matrix, Matrix]:
    """LLL-reduce a positive definite integral Gram matrix.

    Returns ``(reduced_gram, u)`` with ``reduced_gram = u^T g u`` and u
    unimodular (columns are the new basis in old coordinates).

    All arithmetic is in integers: ``d[i]`` are the leading Gram minors and
    ``lam[k][j] = mu[k][j] * d[j+1]``, both updated incrementally, so every
    division below is exact.
    """
    n = len(g)
    G = [list(map(int, row)) for row in g]
    U = identity(n)  # rows of U^T: basis vectors b_i in old coordinates
    if n <= 1:
        return G, transpose(U)
    dn, dd = delta.numerator, delta.denominator
    # d[i + 1] is the i-th leading minor; d[0] = 1
    d = [1] * (n + 1)
    lam = [[0] * n for _ in range(n)]
    d[1] = G[0][0]
    if d[1] <= 0:
        raise ValueError("Gram matrix is not positive definite")
    kmax = 0
    k = 1

    def red(k, l):
        if 2 * abs(lam[k][l]) <= d[l + 1]:
            return
        q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
        _reduce(G, U, k, l, q)
        lam[k][l] -= q * d[l + 1]
        for i in range(l):
            lam[k][i] -= q * lam[l][i]

    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = G[k][j]
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise ValueError("Gram matrix is not positive definite")
                    d[k + 1] = u
        while True:
            red(k, k - 1)
            lk = lam[k][k - 1]
            if dd * d[k + 1] * d[k - 1] < dn * d[k] * d[k] - dd * lk * lk:
                _swap(G, U, k, k - 1)
                for j in range(k - 1):
                    lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
                b = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
                for i in range(k + 1, kmax + 1):
                    t = lam[i][k]
                    lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
                    lam[i][k - 1] = (b * t + lk * lam[i][k]) // d[k + 1]
                d[k] = b
                k = max(1, k - 1)
            else:
                for l in range(k - 2, -1, -1):
                    red(k, l)
                k += 1
                break
    return G, transpose(U)


def _reduce(G, U, k, j, q):
    """b_k <- b_k - q b_j, updating the Gram matrix."""
    n = len(G)
    U[k] = [x - q * y for x, y in zip(U[k], U[j])]
    gkj = G[k][j]
    gjj = G[j][j]
    for t in range(n):
        if t != k:
            G[k][t] -= q * G[j][t]
            G[t][k] = G[k][t]
    G[k][k] += -2 * q * gkj + q * q * gjj


def _swap(G, U, a, b):
    U[a], U[b] = U[b], U[a]
    G[a], G[b] = G[b], G[a]
    for row in G:
        row[a], row[b] = row[b], row[a]
