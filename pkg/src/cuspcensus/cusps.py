"""Cusp counts of principal arithmetic lattices in Spin(n, 1).

A rational form q of signature (n, 1) is split as (hyperbolic plane) + q'
with q' positive definite.  The principal-lattice cusp count is the number
of classes in the spinor genus of q' (Gauss class number when q' is
binary), and a maximal lattice containing it has at least
count / (c * galois_bound) cusps with c = c0^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .exactnum import fraction_to_json
from .genus import DEFAULT_BUDGET, SpinorGenusCensus, default_prime, spinor_genus_classes
from .qforms.binary import class_number, form_from_gram
from .qforms.intmat import congruence, integer_kernel, matmul
from .qforms.lattice import GramLattice
from .qforms.rational import RationalForm, find_isotropic_vector, is_isotropic

# order of the norm-one unit group of the relevant Z-order
UNIT_GROUP_BOUND = {"rational": 2, "imaginary_quadratic": 6, "quaternion": 24}

DEFAULT_HEIGHT = 10**3
MAX_HEIGHT = 10**5

EQUALITY_HYPOTHESIS = (
    "count is exact when K_f is maximal and special at every nonarchimedean place "
    "(Iwasawa decomposition); otherwise it is a lower bound"
)


class CocompactError(ValueError):
    """The form is anisotropic over Q, so the lattice has no cusps."""


class SignatureError(ValueError):
    pass


class SearchExhausted(RuntimeError):
    """Isotropic, but no isotropic vector found within the height bound."""


class CensusBudgetExceeded(RuntimeError):
    def __init__(self, census: SpinorGenusCensus):
        super().__init__(
            f"census stopped at {census.class_count} classes (budget {census.budget})"
        )
        self.census = census


@dataclass(frozen=True)
class SplitForm:
    original: RationalForm
    basis_change: tuple[tuple[Fraction, ...], ...]  # columns: e, complement basis, f
    q_prime_rational: tuple[tuple[Fraction, ...], ...]
    q_prime: GramLattice
    scaling: Fraction  # q_prime = scaling * q_prime_rational
    isotropic_vector: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.original.dim - 1

    @property
    def rank(self) -> int:
        return self.q_prime.dim

    def block_form(self) -> list[list[Fraction]]:
        return congruence(self.original.gram, self.basis_change)

    def to_json(self) -> dict:
        return {
            "original": _matrix_json(self.original.gram),
            "basis_change": _matrix_json(self.basis_change),
            "q_prime_rational": _matrix_json(self.q_prime_rational),
            "q_prime": [list(r) for r in self.q_prime.gram],
            "scaling": fraction_to_json(self.scaling),
            "isotropic_vector": list(self.isotropic_vector),
        }


def _matrix_json(m) -> list[list[str]]:
    return [[str(Fraction(x)) for x in row] for row in m]


def hyperbolic_sum(block: Sequence[Sequence]) -> RationalForm:
    """The form [[0,0,1],[0,B,0],[1,0,0]] for a definite block B."""
    k = len(block)
    d = k + 2
    g = [[Fraction(0)] * d for _ in range(d)]
    g[0][d - 1] = g[d - 1][0] = Fraction(1)
    for i in range(k):
        for j in range(k):
            g[i + 1][j + 1] = Fraction(block[i][j])
    return RationalForm(g)


def principal_binary_gram(d: int) -> list[list[Fraction]]:
    """Gram matrix of the principal form of discriminant d (x^2 + xy + ... or x^2 - d/4 y^2)."""
    if d % 4 == 0:
        return [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(-d, 4)]]
    return [[Fraction(1), Fraction(1, 2)], [Fraction(1, 2), Fraction(1 - d, 4)]]


def _primitive_scaling(m) -> Fraction:
    den = 1
    num = 0
    for row in m:
        for x in row:
            x = Fraction(x)
            den = math.lcm(den, x.denominator)
    for row in m:
        for x in row:
            num = math.gcd(num, int(Fraction(x) * den))
    return Fraction(den, num)


def split_hyperbolic(
    q: RationalForm,
    search_height: int = DEFAULT_HEIGHT,
    max_height: int = MAX_HEIGHT,
) -> SplitForm:
    """Split q = (hyperbolic plane) + q' with q' definite and integral after scaling."""
    pos, neg = q.signature
    if neg == 0 or pos == 0:
        raise CocompactError("definite form: no cusps (cocompact case)")
    if neg != 1 or pos < 2:
        raise SignatureError(f"expected signature (n, 1) with n >= 2, got {q.signature}")
    if not is_isotropic(q):
        raise CocompactError("anisotropic form: no cusps (cocompact case)")

    height = search_height
    e = None
    while e is None:
        e = find_isotropic_vector(q, height)
        if e is None:
            if height >= max_height:
                raise SearchExhausted(f"no isotropic vector of height <= {height}")
            height = min(height * 10, max_height)

    g = q.gram
    d = q.dim
    ge = [sum(g[i][j] * e[j] for j in range(d)) for i in range(d)]
    w_index = next(i for i in range(d) if ge[i] != 0)
    b = ge[w_index]
    qw = g[w_index][w_index]
    c = qw / (2 * b)
    f = [(Fraction(int(i == w_index)) - c * e[i]) / b for i in range(d)]
    gf = [sum(g[i][j] * f[j] for j in range(d)) for i in range(d)]

    kernel = integer_kernel([ge, gf])
    assert len(kernel) == d - 2
    k_cols = [list(col) for col in zip(*kernel)]  # d x (d-2), columns = kernel vectors
    qp_rat = congruence(g, k_cols)
    scale = _primitive_scaling(qp_rat)
    qp_int = GramLattice([[int(x * scale) for x in row] for row in qp_rat])
    if not qp_int.is_positive_definite():
        raise SignatureError("complement of the hyperbolic plane is not positive definite")

    # reduce the complement basis; the isometry class is unchanged
    reduced, u = qp_int.lll()
    k_cols = matmul(k_cols, u)
    qp_rat = congruence(g, k_cols)
    basis = [[Fraction(e[i])] + [Fraction(x) for x in k_cols[i]] + [f[i]] for i in range(d)]
    return SplitForm(
        original=q,
        basis_change=tuple(tuple(row) for row in basis),
        q_prime_rational=tuple(tuple(Fraction(x) for x in row) for row in qp_rat),
        q_prime=reduced,
        scaling=scale,
        isotropic_vector=tuple(e),
    )


@dataclass(frozen=True)
class CuspCertificate:
    split: SplitForm
    route: str
    principal_cusps: int
    census: Optional[SpinorGenusCensus] = None
    discriminant: Optional[int] = None
    count_kind: str = EQUALITY_HYPOTHESIS
    maximal_lower_bound: Optional[Fraction] = None
    constants_used: dict = field(default_factory=dict)

    @property
    def maximal_cusps_at_least(self) -> Optional[int]:
        """Integral conclusion from the rational lower bound (a quotient has >= 1 end)."""
        if self.maximal_lower_bound is None:
            return None
        return max(1, math.ceil(self.maximal_lower_bound))

    def to_json(self) -> dict:
        out = {
            "n": self.split.n,
            "split": self.split.to_json(),
            "route": self.route,
            "principal_cusps": self.principal_cusps,
            "count_kind": self.count_kind,
            "discriminant": self.discriminant,
            "census": None if self.census is None else self.census.to_json(),
        }
        if self.maximal_lower_bound is not None:
            consts = dict(self.constants_used)
            consts["galois_bound"] = fraction_to_json(consts["galois_bound"])
            out["maximal_lower_bound"] = fraction_to_json(self.maximal_lower_bound)
            out["maximal_cusps_at_least"] = self.maximal_cusps_at_least
            out["constants_used"] = consts
        return out


def principal_cusp_count(
    s: SplitForm,
    prime: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
) -> CuspCertificate:
    lat = s.q_prime
    if lat.dim == 1:
        # Spin of a one-dimensional form is trivial: one class
        return CuspCertificate(s, "rank-1", 1)
    if lat.dim == 2:
        f = form_from_gram(lat.gram)
        disc = f.discriminant
        return CuspCertificate(s, "binary-class-number", class_number(disc), discriminant=disc)
    census = spinor_genus_classes(lat, prime if prime is not None else default_prime(lat), budget)
    if not census.exhausted:
        raise CensusBudgetExceeded(census)
    return CuspCertificate(s, "spinor-genus-census", census.class_count, census=census)


def default_galois_bound(n: int) -> Fraction:
    """2 h D m^2 with h = D = 1, #T = 0 and trivial Xi; m = 2 for type B, 4 for type D."""
    center = 2 if (n + 1) % 2 == 1 else 4
    return Fraction(2 * center * center)


def maximal_lower_bound(
    cert: CuspCertificate,
    galois_bound=None,
    source: Optional[str] = None,
) -> CuspCertificate:
    c0 = UNIT_GROUP_BOUND["rational"]
    c = c0 * c0
    if galois_bound is None:
        galois_bound = default_galois_bound(cert.split.n)
        source = source or "default 2*h*D*m^2 with h = D = 1, #T = 0, trivial Xi"
    galois_bound = Fraction(galois_bound)
    if galois_bound < 1:
        raise ValueError("galois bound must be >= 1")
    bound = Fraction(cert.principal_cusps) / (c * galois_bound)
    consts = {
        "c0": c0,
        "c": c,
        "galois_bound": galois_bound,
        "galois_bound_source": source or "user supplied",
    }
    return replace(cert, maximal_lower_bound=bound, constants_used=consts)


def cusp_pipeline(
    q: RationalForm,
    prime: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
    search_height: int = DEFAULT_HEIGHT,
    galois_bound=None,
) -> CuspCertificate:
    split = split_hyperbolic(q, search_height)
    cert = principal_cusp_count(split, prime, budget)
    return maximal_lower_bound(cert, galois_bound)
