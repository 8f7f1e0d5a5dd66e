"""Volume-formula inequalities: Prasad products, Euler-factor bounds, the
parahoric constant, Brauer-Siegel, finiteness enumeration, and the
one-cusp non-existence certificates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from sympy import isprime, primerange

from .exactnum import (
    DEFAULT_PRECISION_BITS,
    MAX_PRECISION_BITS,
    Comparison,
    PrecisionExhausted,
    RationalInterval,
    factorial,
    fraction_to_json,
    interval_compare,
    interval_pow,
    pi_enclosure,
    sqrt_enclosure,
)
from .rootdata import LieType, center_order_bound, exponent_list, exponents

# a local factor exceeds 1 once the local rank reaches this value (any prime) ...
LOCAL_RANK_CUTOFF = 8
# ... or once the residue characteristic reaches this prime (any rank)
PRIME_CUTOFF = 17

PAPER_DELTA0 = Fraction(3, 200)

ENUMERATION_RANK_CAP = 200


class Verdict(enum.Enum):
    PROVEN = "Proven"
    NOT_PROVEN = "NotProvenByThisBound"


def _working_bits(precision_bits: int, n_ops: int) -> int:
    return precision_bits + 16 + max(n_ops, 1).bit_length()


def _pow_rounded(x: RationalInterval, k: int, bits: int) -> RationalInterval:
    result = RationalInterval.point(1)
    base = x
    while k:
        if k & 1:
            result = (result * base).round_outward(bits)
        k >>= 1
        if k:
            base = (base * base).round_outward(bits)
    return result


def prasad_product(exps: Sequence[int], precision_bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """Enclosure of prod_i m_i! / (2 pi)^(m_i + 1)."""
    exps = list(exps)
    if not exps:
        return RationalInterval.point(1)
    total_power = sum(m + 1 for m in exps)
    bits = _working_bits(precision_bits, total_power)
    numerator = Fraction(1)
    for m in exps:
        numerator *= factorial(m)
    two_pi = 2 * pi_enclosure(bits)
    return (numerator / _pow_rounded(two_pi, total_power, bits)).round_outward(bits)


def _require_prime(p: int) -> None:
    if not isprime(p):
        raise ValueError(f"{p} is not prime")


def euler_lower_bound(p: int, r: int) -> Fraction:
    """Lower bound p^(r+1)/(p+1) for a non-special local Euler factor."""
    _require_prime(p)
    if r < 1:
        raise ValueError("local rank must be positive")
    return Fraction(p ** (r + 1), p + 1)


def normalized_local_factor(p: int, r: int) -> Fraction:
    """Euler lower bound divided by the coarse (r+3)^2 bound on the Xi term."""
    _require_prime(p)
    if r < 1:
        raise ValueError("local rank must be positive")
    return Fraction(p ** (r + 1), (p + 1) * (r + 3) ** 2)


@dataclass(frozen=True)
class Delta0Derivation:
    """Trace of the parahoric constant computation."""

    value: Fraction
    factors: tuple[tuple[int, int, Fraction], ...]
    per_rank_products: tuple[tuple[int, Fraction], ...]
    cutoff_checks: tuple[tuple[str, Fraction], ...]
    reading: str

    @property
    def meets_paper_value(self) -> bool:
        return self.value >= PAPER_DELTA0

    def to_json(self) -> dict:
        return {
            "delta0": fraction_to_json(self.value),
            "factors": [
                {"p": p, "r": r, "value": fraction_to_json(v)} for p, r, v in self.factors
            ],
            "per_rank_products": [
                {"r": r, "value": fraction_to_json(v)} for r, v in self.per_rank_products
            ],
            "cutoff_checks": [
                {"claim": claim, "value": fraction_to_json(v)} for claim, v in self.cutoff_checks
            ],
            "reading": self.reading,
            "paper_value": fraction_to_json(PAPER_DELTA0),
            "meets_paper_value": self.meets_paper_value,
        }


def delta0_derivation() -> Delta0Derivation:
    primes = list(primerange(2, PRIME_CUTOFF))
    ranks = range(1, LOCAL_RANK_CUTOFF)

    factors = []
    for p in primes:
        worst = min(ranks, key=lambda r: normalized_local_factor(p, r))
        value = normalized_local_factor(p, worst)
        if value < 1:
            factors.append((p, worst, value))
    value = Fraction(1)
    for _, _, v in factors:
        value *= v

    per_rank = []
    for r in ranks:
        prod = Fraction(1)
        for p in primes:
            f = normalized_local_factor(p, r)
            if f < 1:
                prod *= f
        per_rank.append((r, prod))

    # the factor grows with p (p^(r+1)/(p+1) increases) and with r once r >= 8
    # (ratio p (r+3)^2/(r+4)^2 >= 2 * 121/144 > 1), so these two values bound
    # every excluded (p, r)
    checks = (
        (f"normalized_local_factor(2, {LOCAL_RANK_CUTOFF}) > 1",
         normalized_local_factor(2, LOCAL_RANK_CUTOFF)),
        (f"normalized_local_factor({PRIME_CUTOFF}, 1) > 1",
         normalized_local_factor(PRIME_CUTOFF, 1)),
        ("rank step ratio 2*(8+3)^2/(8+4)^2 > 1", Fraction(2 * 11**2, 12**2)),
    )
    reading = (
        "filter on p^(r+1)/((p+1)(r+3)^2) < 1 (the unnormalized ratio is never < 1); "
        "one factor per prime at its minimizing rank r < 8, primes p < 17"
    )
    return Delta0Derivation(value, tuple(factors), tuple(per_rank), checks, reading)


def derive_delta0() -> Fraction:
    return delta0_derivation().value


def brauer_siegel_bound(disc: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """Enclosure of (5 pi / 6)^2 * disc."""
    if disc < 1:
        raise ValueError("discriminant magnitude must be >= 1")
    c = 5 * pi_enclosure(precision_bits + 8) / 6
    return c * c * disc


# ---------------------------------------------------------------------------
# finiteness enumeration


@dataclass(frozen=True)
class TailProof:
    family: str
    rank: int
    value: RationalInterval
    step_ratio: RationalInterval
    growth_argument: str

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "tail_rank": self.rank,
            "value_at_tail_rank": self.value.to_json(),
            "step_ratio_at_tail_rank": self.step_ratio.to_json(),
            "growth_argument": self.growth_argument,
        }


@dataclass(frozen=True)
class FinitenessResult:
    x: Fraction
    delta0: Fraction
    threshold: Fraction
    types: tuple[LieType, ...]
    tails: tuple[TailProof, ...]
    precision_bits: int

    def __iter__(self) -> Iterator[LieType]:
        return iter(self.types)

    def __len__(self):
        return len(self.types)

    def __contains__(self, t):
        return t in self.types

    def to_json(self) -> dict:
        return {
            "x": fraction_to_json(self.x),
            "delta0": fraction_to_json(self.delta0),
            "threshold": fraction_to_json(self.threshold),
            "types": [t.label for t in self.types],
            "tails": [t.to_json() for t in self.tails],
            "precision_bits": self.precision_bits,
        }


def _family_value(family: str, rank: int, bits: int) -> RationalInterval:
    n = center_order_bound(LieType(family, rank))
    return prasad_product(exponent_list(family, rank), bits) / (2 * n * n)


def _step_ratio(family: str, rank: int, bits: int) -> RationalInterval:
    """value(rank + 1) / value(rank)."""
    b = _working_bits(bits, 4 * rank)
    two_pi = 2 * pi_enclosure(b)
    if family == "B":
        return factorial(2 * rank + 1) / _pow_rounded(two_pi, 2 * rank + 2, b)
    return factorial(2 * rank - 1) * rank / _pow_rounded(two_pi, 2 * rank + 1, b)


def _growth_certificate(family: str, rank: int, bits: int) -> Optional[str]:
    """Argument that the step ratio is nondecreasing from ``rank`` on, or None."""
    four_pi_sq = interval_pow(2 * pi_enclosure(bits), 2)
    if family == "B":
        # ratio(r+1)/ratio(r) = (2r+2)(2r+3)/(2 pi)^2
        growth = (2 * rank + 2) * (2 * rank + 3)
        claim = f"(2r+2)(2r+3) >= {growth} > {four_pi_sq.hi} >= (2 pi)^2 for r >= {rank}"
    else:
        # ratio(r+1)/ratio(r) = 2(r+1)(2r+1)/(2 pi)^2
        growth = 2 * (rank + 1) * (2 * rank + 1)
        claim = f"2(r+1)(2r+1) >= {growth} > {four_pi_sq.hi} >= (2 pi)^2 for r >= {rank}"
    if growth > four_pi_sq.hi:
        return claim
    return None


def _decide_le(make, threshold, bits, cap=MAX_PRECISION_BITS):
    while True:
        enc = make(bits)
        verdict = interval_compare(enc, threshold)
        if verdict is not Comparison.UNDECIDED:
            return verdict, enc
        if bits >= cap:
            raise PrecisionExhausted(f"cannot compare {enc} with {threshold}")
        bits = min(2 * bits, cap)


def finiteness_enumerate(
    x,
    delta0,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    rank_cap: int = ENUMERATION_RANK_CAP,
) -> FinitenessResult:
    """All types B_r, 1D_r, 2D_r with prasad_product / (2 n^2) <= x / delta0.

    Each family is scanned rank by rank until a rank R is found where the
    value is certified above the threshold, the step to R+1 is certified
    > 1, and the step ratio is certified nondecreasing from R on.  Every
    rank beyond R is then excluded.
    """
    x, delta0 = Fraction(x), Fraction(delta0)
    if x <= 0:
        raise ValueError("x must be positive")
    if not 0 < delta0 <= 1:
        raise ValueError("delta0 must lie in (0, 1]")
    threshold = x / delta0

    found: list[LieType] = []
    tails: list[TailProof] = []
    for family, start in (("B", 1), ("D", 3)):
        for rank in range(start, rank_cap + 1):
            verdict, value = _decide_le(
                lambda b: _family_value(family, rank, b), threshold, precision_bits
            )
            if verdict is Comparison.PROVEN_LESS:
                if family == "D":
                    found.append(LieType("D", rank, True))
                    found.append(LieType("D", rank, False))
                else:
                    found.append(LieType(family, rank))
                continue
            growth = _growth_certificate(family, rank, precision_bits)
            if growth is None:
                continue
            step_verdict, step = _decide_le(
                lambda b: _step_ratio(family, rank, b), 1, precision_bits
            )
            if step_verdict is Comparison.PROVEN_GREATER:
                tails.append(TailProof(family, rank, value, step, growth))
                break
        else:
            raise PrecisionExhausted(
                f"no certified tail for family {family} below rank cap {rank_cap}"
            )
    return FinitenessResult(x, delta0, threshold, tuple(found), tuple(tails), precision_bits)


# ---------------------------------------------------------------------------
# one-cusp certificates


@dataclass(frozen=True)
class BoundReport:
    n: int
    branch: str
    lie_type: str
    rank: int
    exponents: tuple[int, ...]
    prasad_product: RationalInterval
    discriminant_factor: RationalInterval
    class_number_factor: RationalInterval
    lhs: RationalInterval
    delta0_used: Fraction
    threshold: Fraction
    comparison: Comparison
    verdict: Verdict
    precision_bits: int
    assumptions: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "branch": self.branch,
            "h0_type": self.lie_type,
            "rank": self.rank,
            "exponents": list(self.exponents),
            "prasad_product": self.prasad_product.to_json(),
            "discriminant_factor": self.discriminant_factor.to_json(),
            "class_number_factor": self.class_number_factor.to_json(),
            "lhs": self.lhs.to_json(),
            "delta0_used": fraction_to_json(self.delta0_used),
            "threshold": fraction_to_json(self.threshold),
            "comparison": self.comparison.value,
            "verdict": self.verdict.value,
            "precision_bits": self.precision_bits,
            "assumptions": list(self.assumptions),
        }

    def render_text(self) -> str:
        def approx(iv):
            return f"[{_sci(iv.lo)}, {_sci(iv.hi)}]"

        lines = [
            f"one-cusp bound, n = {self.n}: {self.verdict.value}",
            f"  branch: {self.branch} (H0 of type {self.lie_type}, exponents {list(self.exponents)})",
            f"  prasad product   ~ {approx(self.prasad_product)}",
            f"  discriminant     ~ {approx(self.discriminant_factor)}",
            f"  class-number     ~ {approx(self.class_number_factor)}",
            f"  lhs              ~ {approx(self.lhs)}  vs threshold {self.threshold}",
            f"  comparison: {self.comparison.value} at {self.precision_bits} bits",
        ]
        lines += [f"  assumes: {a}" for a in self.assumptions]
        return "\n".join(lines)


def _sci(x: Fraction, digits: int = 6) -> str:
    # display only; the report payload stays exact
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    e = len(str(x.numerator)) - len(str(x.denominator))
    while x >= Fraction(10) ** (e + 1):
        e += 1
    while x < Fraction(10) ** e:
        e -= 1
    mant = x / Fraction(10) ** e
    scaled = mant.numerator * 10 ** (digits - 1) // mant.denominator
    s = str(scaled)
    return f"{sign}{s[0]}.{s[1:]}e{e}"


LOCAL_ASSUMPTION = (
    "every local rank is at least 8, so each normalized local Euler factor exceeds 1"
)


def one_cusp_certificate(n: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
    """Decide whether the volume bound rules out a one-cusped maximal lattice.

    Even n: H0 is of type B_r, r = (n-2)/2, and the bound needs
    prod m_i!/(2pi)^(m_i+1) > 8.  Odd n: H0 is of type D_r, r = (n-1)/2;
    even r needs the product > 4, odd r needs 6/(5 pi^2) times it > 8, with
    the extra factor 3^(31/2) from the discriminant of the splitting field
    when n = 31.
    """
    if n < 4:
        raise ValueError("dimension must be at least 4")
    if n % 2 == 0:
        family, rank = "B", (n - 2) // 2
        branch = "even-n"
        threshold = Fraction(8)
    else:
        family, rank = "D", (n - 1) // 2
        if rank % 2 == 0:
            branch, threshold = "odd-n/even-r", Fraction(4)
        else:
            branch, threshold = "odd-n/odd-r", Fraction(8)
            if n == 31:
                branch = "odd-n/odd-r/n=31"
    exps = exponent_list(family, rank)
    lie_label = f"{family}{rank}"

    def evaluate(bits):
        prod = prasad_product(exps, bits)
        disc = RationalInterval.point(1)
        cls = RationalInterval.point(1)
        if branch.startswith("odd-n/odd-r"):
            pi = pi_enclosure(bits + 8)
            cls = Fraction(6, 5) / (pi * pi)
            if n == 31:
                disc = sqrt_enclosure(3**31, bits + 8)
        return prod, disc, cls, prod * disc * cls

    bits = precision_bits
    while True:
        prod, disc, cls, lhs = evaluate(bits)
        comparison = interval_compare(lhs, threshold)
        if comparison is not Comparison.UNDECIDED:
            break
        if bits >= MAX_PRECISION_BITS:
            raise PrecisionExhausted(f"n = {n}: {lhs} vs {threshold} undecided at {bits} bits")
        bits = min(2 * bits, MAX_PRECISION_BITS)

    assumptions = [LOCAL_ASSUMPTION]
    if branch.startswith("odd-n/odd-r"):
        assumptions.append("h <= (5 pi/6)^2 D for the quadratic splitting field")
    if n == 31:
        assumptions.append("discriminant of the quadratic splitting field is at least 3")
    verdict = Verdict.PROVEN if comparison is Comparison.PROVEN_GREATER else Verdict.NOT_PROVEN
    return BoundReport(
        n=n,
        branch=branch,
        lie_type=lie_label,
        rank=rank,
        exponents=tuple(exps),
        prasad_product=prod,
        discriminant_factor=disc,
        class_number_factor=cls,
        lhs=lhs,
        delta0_used=Fraction(1),
        threshold=threshold,
        comparison=comparison,
        verdict=verdict,
        precision_bits=bits,
        assumptions=tuple(assumptions),
    )


__all__ = [
    "BoundReport",
    "Delta0Derivation",
    "FinitenessResult",
    "TailProof",
    "Verdict",
    "brauer_siegel_bound",
    "delta0_derivation",
    "derive_delta0",
    "euler_lower_bound",
    "exponents",
    "finiteness_enumerate",
    "normalized_local_factor",
    "one_cusp_certificate",
    "prasad_product",
]
