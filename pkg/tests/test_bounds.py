import json
from fractions import Fraction

import mpmath
import pytest
from sympy import primerange

from cuspcensus.bounds import (
    PAPER_DELTA0,
    Verdict,
    brauer_siegel_bound,
    delta0_derivation,
    derive_delta0,
    euler_lower_bound,
    finiteness_enumerate,
    normalized_local_factor,
    one_cusp_certificate,
    prasad_product,
)
from cuspcensus.exactnum import Comparison, RationalInterval
from cuspcensus.qforms.binary import class_number
from cuspcensus.rootdata import LieType, exponent_list


def mp_prasad(exps, dps=80):
    with mpmath.workdps(dps):
        out = mpmath.mpf(1)
        for m in exps:
            out *= mpmath.factorial(m) / (2 * mpmath.pi) ** (m + 1)
        return out


def as_mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def test_empty_product_is_one():
    assert prasad_product([]) == RationalInterval(1, 1)


def test_crossover_b13_b14():
    assert prasad_product(exponent_list("B", 13)).hi < 1
    assert prasad_product(exponent_list("B", 14)).lo > 9


@pytest.mark.parametrize("family, rank", [("B", r) for r in (1, 5, 13, 14, 30)] + [("D", r) for r in (3, 8, 15, 16)])
def test_prasad_encloses_high_precision_value(family, rank):
    exps = exponent_list(family, rank)
    enc = prasad_product(exps, 128)
    with mpmath.workdps(80):
        ref = mp_prasad(exps)
        tol = ref * mpmath.mpf(10) ** -60
        assert as_mpf(enc.lo) <= ref + tol and ref - tol <= as_mpf(enc.hi)
        # 128 bits is about 38 digits; the enclosure must be that tight
        assert (as_mpf(enc.hi) - as_mpf(enc.lo)) / ref < mpmath.mpf(10) ** -30


def test_b_products_increase_past_crossover():
    # the new factor (2r-1)!/(2 pi)^(2r) exceeds 1 from r = 9 on
    prev = prasad_product(exponent_list("B", 9))
    for r in range(10, 40):
        cur = prasad_product(exponent_list("B", r))
        assert cur.lo > prev.hi, r
        prev = cur


def test_local_factor_examples():
    assert euler_lower_bound(2, 1) == Fraction(4, 3)
    assert euler_lower_bound(2, 8) == Fraction(512, 3)
    assert euler_lower_bound(17, 1) == Fraction(289, 18)
    assert normalized_local_factor(2, 8) == Fraction(512, 363)
    assert normalized_local_factor(2, 1) == Fraction(1, 12)
    assert normalized_local_factor(17, 8) == Fraction(17**9, 18 * 121)
    with pytest.raises(ValueError):
        euler_lower_bound(4, 1)


def test_unnormalized_ratio_never_below_one():
    for p in primerange(2, 50):
        for r in range(1, 12):
            assert euler_lower_bound(p, r) > 1


def test_delta0_matches_direct_recomputation():
    expected = Fraction(1)
    for p in primerange(2, 17):
        worst = min(Fraction(p ** (r + 1), (p + 1) * (r + 3) ** 2) for r in range(1, 8))
        if worst < 1:
            expected *= worst
    assert derive_delta0() == expected


def test_delta0_trace_contract():
    der = delta0_derivation()
    assert 0 < der.value <= 1
    assert all(v < 1 for _, _, v in der.factors)
    product = Fraction(1)
    for p, r, v in der.factors:
        assert v == normalized_local_factor(p, r)
        product *= v
    assert product == der.value
    assert all(value > 1 for _, value in der.cutoff_checks)
    blob = der.to_json()
    json.dumps(blob)
    assert blob["meets_paper_value"] == (der.value >= PAPER_DELTA0)


def test_delta0_cutoffs_hold_beyond_the_scan():
    # every (p, r) outside p < 17, r < 8 has normalized factor > 1
    for p in primerange(2, 60):
        for r in range(1, 20):
            if p >= 17 or r >= 8:
                assert normalized_local_factor(p, r) > 1, (p, r)


def test_brauer_siegel_examples():
    one = brauer_siegel_bound(1)
    with mpmath.workdps(100):
        ref = (5 * mpmath.pi / 6) ** 2
        tol = mpmath.mpf(10) ** -90
        assert as_mpf(one.lo) <= ref + tol and ref - tol <= as_mpf(one.hi)
    assert 6 < one.lo and one.hi < 7
    three = brauer_siegel_bound(3)
    assert three.lo <= 3 * one.hi and 3 * one.lo <= three.hi
    assert brauer_siegel_bound(4).hi >= class_number(-4)


def test_enumerate_tiny_x_is_empty():
    res = finiteness_enumerate(Fraction(1, 10**100), PAPER_DELTA0)
    assert len(res) == 0
    assert {t.family for t in res.tails} == {"B", "D"}


def test_enumerate_x_one():
    res = finiteness_enumerate(1, PAPER_DELTA0)
    b_ranks = sorted(t.rank for t in res if t.family == "B")
    assert b_ranks == list(range(1, b_ranks[-1] + 1))
    assert all(r < 15 for r in b_ranks)
    for tail in res.tails:
        assert tail.value.lo > res.threshold
        assert tail.step_ratio.lo > 1
        assert all(t.rank < tail.rank for t in res if t.family == tail.family)
    # membership agrees with a direct evaluation against the threshold
    value = prasad_product(exponent_list("B", 14)) / 8
    assert (LieType("B", 14) in res) == (value.hi <= res.threshold)


def test_enumerate_monotone_in_x():
    xs = [Fraction(1, 10), Fraction(1), Fraction(10)]
    sets = [set(finiteness_enumerate(x, PAPER_DELTA0)) for x in xs]
    assert sets[0] <= sets[1] <= sets[2]


def test_enumerate_rejects_bad_inputs():
    with pytest.raises(ValueError):
        finiteness_enumerate(0, PAPER_DELTA0)
    with pytest.raises(ValueError):
        finiteness_enumerate(1, 2)


@pytest.mark.parametrize("n, verdict", [(30, Verdict.PROVEN), (28, Verdict.NOT_PROVEN), (31, Verdict.PROVEN), (10, Verdict.NOT_PROVEN)])
def test_one_cusp_examples(n, verdict):
    rep = one_cusp_certificate(n)
    assert rep.verdict is verdict
    assert (rep.comparison is Comparison.PROVEN_GREATER) == (verdict is Verdict.PROVEN)


def test_one_cusp_branches():
    assert one_cusp_certificate(30).branch == "even-n"
    assert one_cusp_certificate(33).branch == "odd-n/even-r"
    assert one_cusp_certificate(35).branch == "odd-n/odd-r"
    rep = one_cusp_certificate(31)
    assert rep.branch.endswith("n=31")
    assert rep.discriminant_factor.lo**2 <= 3**31 <= rep.discriminant_factor.hi**2
    # without the discriminant factor n = 31 would not close
    assert (rep.prasad_product * rep.class_number_factor).hi < rep.threshold


def test_one_cusp_report_is_replayable():
    rep = one_cusp_certificate(34)
    assert rep.lhs.contains(rep.prasad_product * rep.discriminant_factor * rep.class_number_factor)
    blob = rep.to_json()
    text = json.dumps(blob)
    assert "e+" not in text and "." not in json.dumps(blob["lhs"])
    assert "Proven" in rep.render_text()


def test_one_cusp_rejects_small_n():
    with pytest.raises(ValueError):
        one_cusp_certificate(3)
