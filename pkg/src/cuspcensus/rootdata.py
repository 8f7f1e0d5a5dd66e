"""Root-system data for the Lie types entering the volume bounds."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional

FAMILIES = ("A", "B", "D")


@dataclass(frozen=True, order=True)
class LieType:
    family: str
    rank: int
    inner_form: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unsupported Lie family {self.family!r}; only A, B, D are handled")
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.family == "D" and self.rank < 3:
            raise ValueError("type D requires rank >= 3")
        if self.family != "D" and not self.inner_form:
            # the flag only distinguishes 1D from 2D
            object.__setattr__(self, "inner_form", True)

    @property
    def label(self) -> str:
        if self.family == "D":
            return f"{1 if self.inner_form else 2}D{self.rank}"
        return f"{self.family}{self.rank}"

    def __str__(self):
        return self.label

    @classmethod
    def parse(cls, text: str) -> "LieType":
        m = re.fullmatch(r"\s*([12]?)([ABD])_?(\d+)\s*", text)
        if not m:
            raise ValueError(f"cannot parse Lie type {text!r}")
        prefix, family, rank = m.groups()
        if prefix and family != "D":
            raise ValueError(f"inner/outer prefix only applies to type D: {text!r}")
        return cls(family, int(rank), prefix != "2")


def exponent_list(family: str, rank: int) -> list[int]:
    """Exponents m_i of the root system, sorted.

    Accepts D_2 (= A_1 x A_1) so callers working with small quadratic forms
    need no special case; :class:`LieType` itself insists on rank >= 3.
    """
    if family == "A":
        return list(range(1, rank + 1))
    if family == "B":
        return [2 * i - 1 for i in range(1, rank + 1)]
    if family == "D":
        if rank < 2:
            raise ValueError("type D exponents need rank >= 2")
        return sorted([2 * i - 1 for i in range(1, rank)] + [rank - 1])
    raise ValueError(f"unsupported Lie family {family!r}")


def exponents(t: LieType) -> list[int]:
    return exponent_list(t.family, t.rank)


def center_order_bound(t: LieType) -> int:
    if t.family == "A":
        return t.rank + 1
    if t.family == "B":
        return 2
    return 4


def default_s_value(t: LieType) -> Fraction:
    """The s-invariant: zero for inner (split-over-Q) forms, 2r - 1 for 2D_r."""
    if t.family == "D" and not t.inner_form:
        return Fraction(2 * t.rank - 1)
    return Fraction(0)


@dataclass(frozen=True)
class GroupData:
    lie_type: LieType
    exponents: tuple[int, ...]
    center_order_bound: int
    s_value: Optional[Fraction]
    split_field_disc_min: Fraction

    def __post_init__(self):
        t = self.lie_type
        ex = self.exponents
        if len(ex) != t.rank:
            raise ValueError("need exactly one exponent per rank")
        if any(b < a for a, b in zip(ex, ex[1:])):
            raise ValueError("exponents must be nondecreasing")
        repeats = sum(1 for a, b in zip(ex, ex[1:]) if a == b)
        if repeats > 1 or (repeats == 1 and not (t.family == "D" and t.rank % 2 == 0)):
            raise ValueError(f"inadmissible repeated exponent for {t}")
        if t.family == "A":
            if self.center_order_bound != t.rank + 1:
                raise ValueError("type A center bound must be rank + 1")
        elif self.center_order_bound > 4:
            raise ValueError("center bound exceeds 4")
        if not t.inner_form and (self.s_value is None or self.s_value < 5):
            raise ValueError(f"non-split {t} needs s >= 5, got {self.s_value}")

    @property
    def split(self) -> bool:
        return self.lie_type.inner_form

    def to_dict(self) -> dict:
        return {
            "type": self.lie_type.label,
            "exponents": list(self.exponents),
            "center_order_bound": self.center_order_bound,
            "s_value": None if self.s_value is None else str(self.s_value),
            "split_field_disc_min": str(self.split_field_disc_min),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "GroupData":
        s = d.get("s_value")
        return cls(
            lie_type=LieType.parse(d["type"]),
            exponents=tuple(int(m) for m in d["exponents"]),
            center_order_bound=int(d["center_order_bound"]),
            s_value=None if s is None else Fraction(s),
            split_field_disc_min=Fraction(d["split_field_disc_min"]),
        )


@dataclass
class SValueTable:
    """Per-type overrides for the s-invariant."""

    overrides: dict[LieType, Fraction] = field(default_factory=dict)

    def lookup(self, t: LieType) -> Fraction:
        return self.overrides.get(t, default_s_value(t))

    @classmethod
    def parse(cls, text: str) -> "SValueTable":
        """Parse ``TYPE = VALUE`` lines, e.g. ``2D15 = 29``; '#' starts a comment."""
        table = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected TYPE = VALUE")
            table[LieType.parse(key)] = Fraction(value.strip())
        return cls(table)

    @classmethod
    def load(cls, path) -> "SValueTable":
        return cls.parse(Path(path).read_text())


def group_data(t: LieType, s_table: Optional[SValueTable] = None) -> GroupData:
    s_table = s_table or SValueTable()
    return GroupData(
        lie_type=t,
        exponents=tuple(exponents(t)),
        center_order_bound=center_order_bound(t),
        s_value=s_table.lookup(t),
        # the smallest quadratic discriminant in absolute value is 3
        split_field_disc_min=Fraction(1 if t.inner_form else 3),
    )
