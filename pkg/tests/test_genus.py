import itertools
import json
import random

import pytest
from sympy import factorint

from cuspcensus.genus import (
    InadmissiblePrime,
    default_prime,
    isotropic_lines,
    neighbor_steps,
    p_neighbors,
    spinor_genus_classes,
)
from cuspcensus.qforms.intmat import det, hermite_rows
from cuspcensus.qforms.lattice import GramLattice, isometry_test, root_lattice
from cuspcensus.qforms.rational import diagonalize, hasse_invariant

from oracles import congruent, random_unimodular, ternary_reduced_candidates


def diag(*xs):
    return GramLattice([[x if i == j else 0 for j in range(len(xs))] for i, x in enumerate(xs)])


def projective_zeros(gram, p):
    """Brute-force count of projective points on q = 0 over F_p."""
    n = len(gram)
    count = 0
    for v in itertools.product(range(p), repeat=n):
        if any(v) and sum(v[i] * gram[i][j] * v[j] for i in range(n) for j in range(n)) % p == 0:
            count += 1
    return count // (p - 1)


def test_isotropic_line_count_i3():
    i3 = GramLattice.identity(3)
    assert len(list(isotropic_lines(i3, 3))) == projective_zeros(i3.gram, 3) == 4
    assert len(p_neighbors(i3, 3)) == 4


@pytest.mark.parametrize("lat, p", [(GramLattice.identity(4), 5), (diag(1, 1, 7), 3), (root_lattice("A3"), 5)])
def test_isotropic_line_count_matches_brute_force(lat, p):
    assert len(list(isotropic_lines(lat, p))) == projective_zeros(lat.gram, p)


def test_neighbors_of_i3():
    i3 = GramLattice.identity(3)
    for nb in p_neighbors(i3, 3):
        assert nb.det == 1
        assert isometry_test(i3, nb) is not None


def test_reduced_ternary_oracle_det_one():
    cands = ternary_reduced_candidates(1)
    assert cands == [((1, 0, 0), (0, 1, 0), (0, 0, 1))]


@pytest.mark.parametrize("lat, p", [(GramLattice.identity(4), 3), (diag(1, 1, 7), 5), (root_lattice("D4"), 3), (diag(1, 2, 3), 5)])
def test_neighbor_invariants(lat, p):
    for step in neighbor_steps(lat, p):
        assert step.result.det == lat.det
        assert step.result.dim == lat.dim
        # basis rows are p * (neighbor basis) in base coordinates
        assert abs(det([list(b) for b in step.basis])) == p ** lat.dim
        # [L + N : L] = p; with equal covolume also [L : L cap N] = p
        d = lat.dim
        gens = [[p * int(i == j) for j in range(d)] for i in range(d)] + [list(b) for b in step.basis]
        sum_lattice = hermite_rows(gens)  # p * (L + N)
        assert p ** d // abs(det(sum_lattice)) == p
        # the seed vector is isotropic mod p^2
        assert lat.norm(step.seed_vector) % (p * p) == 0


def test_census_small_identities():
    for n in (3, 4, 5):
        census = spinor_genus_classes(GramLattice.identity(n), 3)
        assert census.exhausted and census.class_count == 1


def test_census_i4_from_scrambled_basis():
    rng = random.Random(6)
    u = random_unimodular(4, rng, steps=20)
    scrambled = GramLattice(congruent(GramLattice.identity(4).gram, u))
    census = spinor_genus_classes(scrambled, 3)
    assert census.class_count == 1
    assert census.representatives[0].fingerprint() == GramLattice.identity(4).fingerprint()


def test_binary_rejected():
    with pytest.raises(InadmissiblePrime):
        spinor_genus_classes(GramLattice([[2, 1], [1, 2]]), 5)


@pytest.mark.parametrize("p", [2, 4, 7])
def test_inadmissible_primes(p):
    with pytest.raises(InadmissiblePrime):
        spinor_genus_classes(diag(1, 1, 7), p)


def test_default_prime():
    assert default_prime(GramLattice.identity(3)) == 3
    assert default_prime(diag(1, 1, 15)) == 7
    assert default_prime(root_lattice("A2")) == 5


def local_signature(lat, skip):
    d, _ = diagonalize(lat.gram)
    primes = {2} | set(factorint(abs(lat.det)))
    return lat.dim, lat.det, tuple(hasse_invariant(d, q) for q in sorted(primes) if q != skip)


@pytest.mark.parametrize("lat, p", [(diag(1, 1, 23), 3), (diag(1, 1, 19), 3), (diag(1, 1, 1, 10), 3)])
def test_census_representatives(lat, p):
    census = spinor_genus_classes(lat, p)
    assert census.exhausted and census.class_count > 1
    reps = census.representatives
    for a, b in itertools.combinations(reps, 2):
        assert isometry_test(a, b) is None
    sig = local_signature(lat, p)
    assert all(local_signature(r, p) == sig for r in reps)
    # closure: every neighbor of every representative is already represented
    for r in reps:
        for nb in p_neighbors(r, p):
            assert any(isometry_test(x, nb) is not None for x in reps)
    assert all(0 <= i <= j < len(reps) for i, j in census.edges)


def test_census_order_independent():
    lat = diag(1, 1, 23)
    base = spinor_genus_classes(lat, 3)
    for seed in range(5):
        shuffled = spinor_genus_classes(lat, 3, rng=random.Random(seed))
        assert shuffled.class_count == base.class_count == 4


def test_census_budget_gives_partial():
    census = spinor_genus_classes(diag(1, 1, 23), 3, budget=2)
    assert not census.exhausted
    assert census.class_count == 2
    assert json.loads(json.dumps(census.to_json()))["exhausted"] is False


def test_census_json():
    blob = spinor_genus_classes(GramLattice.identity(3), 3).to_json()
    assert blob == json.loads(json.dumps(blob))
    assert blob["representatives"] == [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]]
    assert blob["prime"] == 3 and blob["exhausted"] is True
