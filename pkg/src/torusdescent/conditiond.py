"""Condition (D): the class group G, the constants D_i^{J'}, and the
subgroup intersections that control which Selmer elements descent can kill.

Elements of G are pairs (square class, subset of J).  Each membership
condition pins the square class to at most two explicit values per subset,
so the intersection groups are computed exactly by finite enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Sequence, Tuple

from .arith import SquareClass, square_class
from .surface import MAX_FACTORS, SurfaceSpec


@dataclass(frozen=True)
class GElement:
    """[c][p_{J'}]: a square class times a formal product of factors."""

    c: SquareClass
    poly: FrozenSet[int]

    @staticmethod
    def identity() -> "GElement":
        return GElement(SquareClass.identity(), frozenset())

    @staticmethod
    def make(value, subset: Iterable[int]) -> "GElement":
        return GElement(square_class(value), frozenset(subset))

    def __mul__(self, other: "GElement") -> "GElement":
        return GElement(self.c * other.c, self.poly ^ other.poly)

    def is_identity(self) -> bool:
        return self.c.is_identity() and not self.poly

    def sort_key(self):
        return (abs(self.c.value()), 0 if self.c.sign > 0 else 1, tuple(sorted(self.poly)))

    def __str__(self):
        if not self.poly:
            return f"[{self.c}]"
        prod = "*".join(f"p{i}" for i in sorted(self.poly))
        return f"[{self.c}][{prod}]"


def d_constant(spec: SurfaceSpec, i: int, subset: Iterable[int]) -> Fraction:
    """D_i^{J'} = p_{J'}(-d_i/c_i) for i outside J', d*p_{J'^c}(-d_i/c_i) inside."""
    subset = frozenset(subset)
    root = spec.root(i)
    if i not in subset:
        value = spec.product_value(sorted(subset), root)
    else:
        complement = sorted(set(spec.indices) - subset)
        value = spec.d * spec.product_value(complement, root)
    if value == 0:
        raise ValueError(f"D_{i}^{sorted(subset)} vanished: spec invariant violated")
    return value


def d_constant_dual(spec: SurfaceSpec, i: int, subset: Iterable[int]) -> Fraction:
    """Dual constant: d replaced by -d in the i-in-J' branch."""
    subset = frozenset(subset)
    if i not in subset:
        return d_constant(spec, i, subset)
    return -d_constant(spec, i, subset)


def _target_class(spec: SurfaceSpec, i: int) -> SquareClass:
    """[a * D_i^A]; equals [b*p_B(-d_i/c_i)] when i is in A."""
    return square_class(spec.a * d_constant(spec, i, spec.part_a))


def in_g_i(spec: SurfaceSpec, x: GElement, i: int) -> bool:
    """Membership in G_i: [c*D_i^{J'}] lies in <[a*D_i^A]>."""
    cls = x.c * square_class(d_constant(spec, i, x.poly))
    return cls.is_identity() or cls == _target_class(spec, i)


def in_g_i_dual(spec: SurfaceSpec, x: GElement, i: int) -> bool:
    """Membership in G^i: [c*Dhat_i^{J'}] lies in <[a*D_i^A]>."""
    cls = x.c * square_class(d_constant_dual(spec, i, x.poly))
    return cls.is_identity() or cls == _target_class(spec, i)


def _subsets(indices: Sequence[int]) -> List[FrozenSet[int]]:
    out = [frozenset()]
    for i in indices:
        out += [s | {i} for s in out]
    return sorted(out, key=lambda s: (len(s), tuple(sorted(s))))


def _compute_intersection(spec: SurfaceSpec, dual: bool) -> List[GElement]:
    if len(spec.factors) > MAX_FACTORS:
        raise ValueError(f"|J| > {MAX_FACTORS} not supported")
    constant = d_constant_dual if dual else d_constant
    members: List[GElement] = []
    for subset in _subsets(spec.indices):
        candidates = None
        for i in spec.indices:
            d_val = square_class(constant(spec, i, subset))
            allowed = {d_val, _target_class(spec, i) * d_val}
            candidates = allowed if candidates is None else candidates & allowed
            if not candidates:
                break
        for c in candidates or ():
            members.append(GElement(c, subset))
    members.sort(key=GElement.sort_key)
    _verify_closure(members)
    return members


def _verify_closure(members: List[GElement]) -> None:
    table = set(members)
    for x in members:
        for y in members:
            if x * y not in table:
                raise AssertionError(
                    f"subgroup closure failed: {x} * {y} not in enumeration"
                )


def compute_g_d(spec: SurfaceSpec) -> List[GElement]:
    """G_D = intersection of the G_i, with a verified-subgroup certificate."""
    return _compute_intersection(spec, dual=False)


def compute_g_d_dual(spec: SurfaceSpec) -> List[GElement]:
    """G^D = intersection of the G^i."""
    return _compute_intersection(spec, dual=True)


def span_of(generators: Sequence[GElement]) -> List[GElement]:
    out = {GElement.identity()}
    for g in generators:
        out |= {g * x for x in out}
    return sorted(out, key=GElement.sort_key)


def expected_g_d_generators(spec: SurfaceSpec) -> List[GElement]:
    return [
        GElement.make(spec.a, spec.part_a),
        GElement.make(spec.d, spec.indices),
    ]


def expected_g_d_dual_generators(spec: SurfaceSpec) -> List[GElement]:
    return [GElement.make(-spec.d, spec.indices)]


@dataclass(frozen=True)
class ConditionDReport:
    holds: bool
    g_d: Tuple[GElement, ...]
    g_d_dual: Tuple[GElement, ...]
    witnesses: Tuple[GElement, ...]  # elements breaking either equality

    def __str__(self):
        status = "holds" if self.holds else "FAILS"
        lines = [f"Condition (D) {status}"]
        lines.append("  G_D  = {" + ", ".join(str(g) for g in self.g_d) + "}")
        lines.append("  G^D  = {" + ", ".join(str(g) for g in self.g_d_dual) + "}")
        if self.witnesses:
            lines.append(
                "  violating elements: " + ", ".join(str(g) for g in self.witnesses)
            )
        return "\n".join(lines)


def check_condition_d(spec: SurfaceSpec) -> ConditionDReport:
    """Compare G_D, G^D against their target subgroups."""
    g_d = compute_g_d(spec)
    g_d_dual = compute_g_d_dual(spec)
    target = span_of(expected_g_d_generators(spec))
    target_dual = span_of(expected_g_d_dual_generators(spec))
    for g in target:
        if g not in g_d:
            raise AssertionError(f"generator {g} missing from G_D (bug)")
    for g in target_dual:
        if g not in g_d_dual:
            raise AssertionError(f"generator {g} missing from G^D (bug)")
    witnesses = [g for g in g_d if g not in target]
    witnesses += [g for g in g_d_dual if g not in target_dual]
    holds = not witnesses
    return ConditionDReport(
        holds=holds,
        g_d=tuple(g_d),
        g_d_dual=tuple(g_d_dual),
        witnesses=tuple(sorted(set(witnesses), key=GElement.sort_key)),
    )
