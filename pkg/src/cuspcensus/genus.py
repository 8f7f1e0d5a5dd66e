"""Kneser p-neighbors and spinor-genus censuses of definite lattices."""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from sympy import isprime, nextprime

from .qforms.intmat import hermite_rows
from .qforms.lattice import GramLattice, isometry_test

DEFAULT_BUDGET = 10**4


class InadmissiblePrime(ValueError):
    pass


@dataclass(frozen=True)
class NeighborStep:
    base: GramLattice
    prime: int
    seed_vector: tuple[int, ...]
    result: GramLattice
    basis: tuple[tuple[int, ...], ...]  # p * (basis of the neighbor) in base coordinates


def default_prime(lattice: GramLattice) -> int:
    """Smallest odd prime not dividing 2 det(L)."""
    p = 3
    while lattice.det % p == 0:
        p = nextprime(p)
    return p


def _check_admissible(lattice: GramLattice, p: int) -> None:
    if lattice.dim < 3:
        raise InadmissiblePrime("neighbor method needs dimension >= 3; route binary forms to class_number")
    if not isprime(p) or p == 2:
        raise InadmissiblePrime(f"{p} is not an odd prime")
    if lattice.det % p == 0:
        raise InadmissiblePrime(f"{p} divides det = {lattice.det}")
    lattice.require_positive_definite()


def isotropic_lines(lattice: GramLattice, p: int) -> Iterator[tuple[int, ...]]:
    """Projective points of the quadric q(v) = 0 over F_p, first nonzero coordinate 1."""
    d = lattice.dim
    for lead in range(d):
        for tail in itertools.product(range(p), repeat=d - lead - 1):
            v = (0,) * lead + (1,) + tail
            if lattice.norm(v) % p == 0:
                yield v


def _lift(lattice: GramLattice, v: tuple[int, ...], p: int) -> tuple[tuple[int, ...], int]:
    """Adjust v mod p so that q(v) = 0 mod p^2; also return an index k with (Gv)_k a unit."""
    g = lattice.gram
    d = lattice.dim
    gv = [sum(g[i][j] * v[j] for j in range(d)) for i in range(d)]
    k = next((i for i in range(d) if gv[i] % p), None)
    if k is None:
        raise InadmissiblePrime("Gv = 0 mod p: p divides the determinant")
    qv = lattice.norm(v)
    # q(v + p t e_k) = q(v) + 2 p t (Gv)_k  (mod p^2)
    t = (-(qv // p) * pow(2 * gv[k], -1, p)) % p
    w = list(v)
    w[k] += p * t
    assert lattice.norm(w) % (p * p) == 0
    return tuple(w), k


def neighbor(lattice: GramLattice, v: tuple[int, ...], p: int) -> NeighborStep:
    """The p-neighbor L_v + Z v/p, where L_v = {x in L : B(x, v) = 0 mod p}."""
    g = lattice.gram
    d = lattice.dim
    w, _ = _lift(lattice, v, p)
    gw = [sum(g[i][j] * w[j] for j in range(d)) for i in range(d)]
    k = next(i for i in range(d) if gw[i] % p)
    inv = pow(gw[k], -1, p)
    gens = []
    for j in range(d):
        row = [0] * d
        if j == k:
            row[k] = p * p
        else:
            row[j] = p
            row[k] = -p * ((gw[j] * inv) % p)
        gens.append(row)
    gens.append(list(w))
    basis = hermite_rows(gens)
    assert len(basis) == d
    p2 = p * p
    gram = []
    for bi in basis:
        gbi = [sum(g[r][c] * bi[c] for c in range(d)) for r in range(d)]
        row = []
        for bj in basis:
            val = sum(x * y for x, y in zip(gbi, bj))
            if val % p2:
                raise ArithmeticError("neighbor Gram matrix is not integral")
            row.append(val // p2)
        gram.append(row)
    result = GramLattice(gram)
    return NeighborStep(lattice, p, w, result, tuple(tuple(b) for b in basis))


def neighbor_steps(
    lattice: GramLattice, p: int, rng: Optional[random.Random] = None
) -> list[NeighborStep]:
    _check_admissible(lattice, p)
    lines = list(isotropic_lines(lattice, p))
    if not lines:
        raise InadmissiblePrime(f"no isotropic line mod {p}")
    if rng is not None:
        rng.shuffle(lines)
    return [neighbor(lattice, v, p) for v in lines]


def p_neighbors(lattice: GramLattice, p: int, rng: Optional[random.Random] = None) -> list[GramLattice]:
    """One p-neighbor per isotropic line mod p, each LLL-reduced."""
    return [step.result.lll()[0] for step in neighbor_steps(lattice, p, rng)]


@dataclass
class SpinorGenusCensus:
    representatives: list[GramLattice]
    edges: list[tuple[int, int]]
    prime_used: int
    exhausted: bool
    lattices_examined: int = 0
    budget: int = DEFAULT_BUDGET

    @property
    def class_count(self) -> int:
        return len(self.representatives)

    def to_json(self) -> dict:
        return {
            "representatives": [[list(r) for r in lat.gram] for lat in self.representatives],
            "class_count": self.class_count,
            "edges": [list(e) for e in self.edges],
            "prime": self.prime_used,
            "exhausted": self.exhausted,
            "lattices_examined": self.lattices_examined,
            "budget": self.budget,
        }


class _ClassIndex:
    """Representatives bucketed by fingerprint; isometry test only within a bucket."""

    def __init__(self):
        self.reps: list[GramLattice] = []
        self.buckets: dict[tuple, list[int]] = {}

    def find(self, lat: GramLattice) -> Optional[int]:
        for idx in self.buckets.get(lat.fingerprint(), ()):
            if lat == self.reps[idx] or isometry_test(self.reps[idx], lat) is not None:
                return idx
        return None

    def add(self, lat: GramLattice) -> int:
        self.reps.append(lat)
        self.buckets.setdefault(lat.fingerprint(), []).append(len(self.reps) - 1)
        return len(self.reps) - 1


def spinor_genus_classes(
    lattice: GramLattice,
    p: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
    rng: Optional[random.Random] = None,
) -> SpinorGenusCensus:
    """Breadth-first closure of the p-neighbor graph modulo isometry.

    ``budget`` caps the number of representatives; hitting it returns the
    partial census with ``exhausted=False``.  ``rng`` shuffles the order in
    which seed lines are visited (the class count must not depend on it).
    """
    if p is None:
        p = default_prime(lattice)
    _check_admissible(lattice, p)
    start = lattice.lll()[0]
    index = _ClassIndex()
    index.add(start)
    edges: set[tuple[int, int]] = set()
    queue = deque([0])
    examined = 1
    while queue:
        i = queue.popleft()
        for nb in p_neighbors(index.reps[i], p, rng):
            examined += 1
            j = index.find(nb)
            if j is None:
                if len(index.reps) >= budget:
                    return SpinorGenusCensus(
                        index.reps, sorted(edges), p, False, examined, budget
                    )
                j = index.add(nb)
                queue.append(j)
            edges.add((min(i, j), max(i, j)))
    return SpinorGenusCensus(index.reps, sorted(edges), p, True, examined, budget)
