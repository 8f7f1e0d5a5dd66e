"""Positive definite binary quadratic forms: Gauss reduction and class numbers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt


@dataclass(frozen=True, order=True)
class BinaryForm:
    """The form a x^2 + b x y + c y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return gcd(gcd(self.a, self.b), self.c)

    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.discriminant < 0

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def transform(self, p: int, q: int, r: int, s: int) -> "BinaryForm":
        """f(p x + q y, r x + s y)."""
        a, b, c = self.a, self.b, self.c
        return BinaryForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )

    def __str__(self):
        return f"({self.a}, {self.b}, {self.c})"


def reduce_binary(f: BinaryForm) -> BinaryForm:
    if not f.is_positive_definite():
        raise ValueError(f"{f} is not positive definite")
    a, b, c = f.a, f.b, f.c
    while True:
        # translate b into (-a, a]
        if not -a < b <= a:
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return BinaryForm(a, b, c)


def reduced_forms(d: int, primitive: bool = True) -> list[BinaryForm]:
    """All reduced positive definite forms of discriminant d."""
    _check_discriminant(d)
    forms = []
    amax = isqrt(-d // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            f = BinaryForm(a, b, c)
            if primitive and f.content != 1:
                continue
            forms.append(f)
    return forms


def class_number(d: int) -> int:
    """Number of classes of primitive positive definite forms of discriminant d."""
    return len(reduced_forms(d))


def _check_discriminant(d: int) -> None:
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError(f"{d} is not a negative discriminant (d < 0, d = 0 or 1 mod 4)")


def form_from_gram(gram) -> BinaryForm:
    """Primitive binary form proportional to x^T G x for a 2x2 Gram matrix."""
    g = [[Fraction(x) for x in row] for row in gram]
    if g[0][1] != g[1][0]:
        raise ValueError("Gram matrix must be symmetric")
    coeffs = [g[0][0], 2 * g[0][1], g[1][1]]
    den = 1
    for x in coeffs:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in coeffs]
    content = gcd(gcd(ints[0], ints[1]), ints[2])
    if content == 0:
        raise ValueError("zero form")
    a, b, c = (x // content for x in ints)
    if a < 0:
        a, b, c = -a, -b, -c
    return BinaryForm(a, b, c)
