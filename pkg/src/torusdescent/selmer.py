"""Selmer and dual Selmer groups of norm-one tori over rings of S-integers,
and the relative (dual) Selmer groups of admissible fibers.

Everything is F2 linear algebra over explicit square-class lattices: the
ambient group is generated by -1, the finite primes of S (and the formal
factor symbols in the relative case), and the local conditions at each
place become Hilbert-pairing rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from . import gf2
from .arith import (
    REAL,
    Place,
    Rational,
    SquareClass,
    hilbert_symbol,
    is_local_square,
    local_basis,
    local_class_from_mask,
    square_class,
    valuation,
)
from .conditiond import GElement
from .surface import AdmissiblePoint, PartialAdelicPoint, SurfaceSpec


# ---------------------------------------------------------------------------
# Torus data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusData:
    """The torus x^2 - d*y^2 = 1 over the S-integers.

    d is stored square-free; S must contain the real place, 2, and every
    prime in the support of d (so the class group obstruction vanishes and
    the lattice of S-units mod squares computes the cohomology).
    """

    d: int
    places: Tuple[Place, ...]

    @property
    def finite_primes(self) -> Tuple[int, ...]:
        return tuple(v.p for v in self.places if v.is_finite)


def torus_data(d: Union[Rational, SquareClass], places: Iterable[Place]) -> TorusData:
    cls = d if isinstance(d, SquareClass) else square_class(d)
    places = tuple(sorted(set(places)))
    primes = {v.p for v in places if v.is_finite}
    if REAL not in places:
        raise ValueError("S must contain the real place")
    if 2 not in primes:
        raise ValueError("S must contain 2")
    missing = [p for p in cls.support if p not in primes]
    if missing:
        raise ValueError(f"S must contain the ramified primes {missing}")
    return TorusData(d=cls.value(), places=places)


# ---------------------------------------------------------------------------
# Ambient lattices
# ---------------------------------------------------------------------------


class SquareClassLattice:
    """Z_S^* / (Z_S^*)^2 with basis -1 followed by the finite primes of S."""

    def __init__(self, places: Sequence[Place]):
        self.places = tuple(sorted(set(places)))
        self.generators: List[int] = [-1] + [v.p for v in self.places if v.is_finite]

    @property
    def ncols(self) -> int:
        return len(self.generators)

    def generator_value(self, k: int) -> Fraction:
        return Fraction(self.generators[k])

    def encode(self, cls: SquareClass) -> int:
        mask = 0 if cls.sign > 0 else 1
        for p in cls.support:
            try:
                mask |= 1 << self.generators.index(p)
            except ValueError:
                raise ValueError(f"{p} is outside the lattice support") from None
        return mask

    def decode(self, mask: int) -> SquareClass:
        cls = SquareClass.identity()
        for k in range(self.ncols):
            if (mask >> k) & 1:
                cls = cls * square_class(self.generators[k])
        return cls


class GLattice:
    """The relative lattice: S-unit classes plus one formal symbol per factor."""

    def __init__(self, spec: SurfaceSpec, places: Sequence[Place]):
        self.spec = spec
        self.places = tuple(sorted(set(places)))
        self.unit_part = SquareClassLattice(self.places)
        self.factor_indices = tuple(spec.indices)

    @property
    def ncols(self) -> int:
        return self.unit_part.ncols + len(self.factor_indices)

    def generator_value(self, k: int, t0: Rational) -> Fraction:
        """Evaluation of the k-th generator at the base value t0."""
        n_units = self.unit_part.ncols
        if k < n_units:
            return self.unit_part.generator_value(k)
        i = self.factor_indices[k - n_units]
        return self.spec.factor_value(i, t0)

    def factor_bit(self, i: int) -> int:
        return self.unit_part.ncols + self.factor_indices.index(i)

    def encode(self, x: GElement) -> int:
        mask = self.unit_part.encode(x.c)
        for i in x.poly:
            mask |= 1 << self.factor_bit(i)
        return mask

    def decode(self, mask: int) -> GElement:
        n_units = self.unit_part.ncols
        cls = self.unit_part.decode(mask & ((1 << n_units) - 1))
        poly = frozenset(
            i
            for k, i in enumerate(self.factor_indices)
            if (mask >> (n_units + k)) & 1
        )
        return GElement(cls, poly)


Lattice = Union[SquareClassLattice, GLattice]


@dataclass
class SelmerSubspace:
    """An F2 subspace of a square-class lattice with a membership test."""

    lattice: Lattice
    space: gf2.Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    def contains(self, x) -> bool:
        if isinstance(x, int):
            return self.space.contains(x)
        try:
            return self.space.contains(self.lattice.encode(x))
        except ValueError:
            return False

    def contains_subspace(self, other: "SelmerSubspace") -> bool:
        return self.space.contains_subspace(other.space)

    def elements(self) -> List:
        return [self.lattice.decode(mask) for mask in self.space.elements()]

    def basis_elements(self) -> List:
        return [self.lattice.decode(mask) for mask in self.space.basis]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SelmerSubspace):
            return NotImplemented
        return self.space == other.space

    def __hash__(self):
        return hash(self.space)


# ---------------------------------------------------------------------------
# Local condition rows
# ---------------------------------------------------------------------------


def _ramified_complement_reps(gen: Rational, v: Place) -> List[Fraction]:
    """Representatives of a basis of the orthogonal complement of <[gen]_v>."""
    basis = local_basis(v)
    pair_row = 0
    for j, g in enumerate(basis):
        pair_row |= hilbert_symbol(g, gen, v) << j
    masks = gf2.kernel_basis([pair_row], len(basis))
    return [local_class_from_mask(m, v) for m in masks]


def selmer_group(torus: TorusData) -> SelmerSubspace:
    """Classes of I_S pairing trivially with d at every place of S."""
    lattice = SquareClassLattice(torus.places)
    rows = []
    for v in torus.places:
        row = 0
        for k in range(lattice.ncols):
            row |= hilbert_symbol(lattice.generator_value(k), torus.d, v) << k
        rows.append(row)
    kernel = gf2.kernel_basis(rows, lattice.ncols)
    return SelmerSubspace(lattice, gf2.Subspace(lattice.ncols, kernel))


def dual_selmer_group(torus: TorusData) -> SelmerSubspace:
    """Classes of I_S locally lying in <[d]_v> at every place of S."""
    lattice = SquareClassLattice(torus.places)
    rows = []
    for v in torus.places:
        for w in _ramified_complement_reps(torus.d, v):
            row = 0
            for k in range(lattice.ncols):
                row |= hilbert_symbol(lattice.generator_value(k), w, v) << k
            rows.append(row)
    kernel = gf2.kernel_basis(rows, lattice.ncols)
    return SelmerSubspace(lattice, gf2.Subspace(lattice.ncols, kernel))


def split_places(torus: TorusData, base: Sequence[Place]) -> List[Place]:
    return [v for v in sorted(base) if is_local_square(torus.d, v)]


def dimension_identity(
    torus: TorusData, base: Sequence[Place]
) -> Tuple[int, int, int]:
    """(dim Sel, dim dual Sel, #split base places); asserts the dimension gap.

    Every place of S outside the designated base set must be non-split for
    the torus (in the pipeline those are exactly the ramified places), else
    the identity does not apply and a ValueError is raised.
    """
    base = set(base)
    if not base <= set(torus.places):
        raise ValueError("base places must lie inside S")
    for v in torus.places:
        if v not in base and is_local_square(torus.d, v):
            raise ValueError(
                f"place {v} outside the base set is split; identity not applicable"
            )
    n_split = len(split_places(torus, sorted(base)))
    dim_sel = selmer_group(torus).dim
    dim_dual = dual_selmer_group(torus).dim
    if dim_sel - dim_dual != n_split:
        raise AssertionError(
            f"dimension identity failed: {dim_sel} - {dim_dual} != {n_split}"
        )
    return dim_sel, dim_dual, n_split


# ---------------------------------------------------------------------------
# Evaluation maps and relative Selmer groups
# ---------------------------------------------------------------------------


def ev(spec: SurfaceSpec, t0: Rational, x: GElement) -> SquareClass:
    """[c][p_{J'}] evaluated at t0: the square class of c * p_{J'}(t0)."""
    value = Fraction(x.c.value()) * spec.product_value(sorted(x.poly), t0)
    if value == 0:
        raise ValueError(f"evaluation at {t0} hit a root of the factors")
    return square_class(value)


def t0_place_split(
    spec: SurfaceSpec, p_t: PartialAdelicPoint
) -> Tuple[List[Place], List[Place]]:
    """Split T into T0 (S0 places and places with val_v(d p_J(t_v)) = 1) and the rest."""
    t0_places: List[Place] = []
    rest: List[Place] = []
    for v in p_t.places:
        if v in spec.s0:
            t0_places.append(v)
            continue
        t_v = p_t.entries[v].t
        value = spec.d * spec.product_value(spec.indices, t_v)
        if valuation(value, v.p) == 1:
            t0_places.append(v)
        else:
            rest.append(v)
    return t0_places, rest


@dataclass(frozen=True)
class RelativeFiber:
    """Shared data for the relative Selmer computations at one admissible point."""

    spec: SurfaceSpec
    t0: Fraction
    torus_value: Fraction  # -d * p_J(t0)
    ramified: Tuple[Place, ...]  # T0 together with the witness places u_i
    unit_kind: Tuple[Place, ...]  # T minus T0: unit-class local conditions
    witnesses: Tuple[Tuple[int, Place], ...]


def relative_fiber(
    spec: SurfaceSpec, p_t: PartialAdelicPoint, adm: AdmissiblePoint
) -> RelativeFiber:
    if set(p_t.places) != set(adm.places):
        raise ValueError("partial adelic point and admissible point disagree on T")
    t0_places, rest = t0_place_split(spec, p_t)
    u_places = [u for _, u in adm.witnesses]
    if len(set(u_places)) != len(u_places):
        raise ValueError("witness places must be pairwise distinct")
    if set(u_places) & set(adm.places):
        raise ValueError("witness places must avoid T")
    torus_value = -spec.d * spec.product_value(spec.indices, adm.t0)
    return RelativeFiber(
        spec=spec,
        t0=Fraction(adm.t0),
        torus_value=torus_value,
        ramified=tuple(sorted(set(t0_places) | set(u_places))),
        unit_kind=tuple(sorted(rest)),
        witnesses=tuple(adm.witnesses),
    )


def _relative_rows(fiber: RelativeFiber, lattice: GLattice, dual: bool) -> List[int]:
    rows: List[int] = []
    t0 = fiber.t0
    for v in fiber.ramified:
        if dual:
            # membership in <[-d p_J(t0)]_v>: pair against its complement
            for w in _ramified_complement_reps(fiber.torus_value, v):
                row = 0
                for k in range(lattice.ncols):
                    row |= hilbert_symbol(lattice.generator_value(k, t0), w, v) << k
                rows.append(row)
        else:
            # membership in the complement: pair against the generator itself
            row = 0
            for k in range(lattice.ncols):
                row |= (
                    hilbert_symbol(lattice.generator_value(k, t0), fiber.torus_value, v)
                    << k
                )
            rows.append(row)
    for v in fiber.unit_kind:
        row = 0
        for k in range(lattice.ncols):
            row |= (valuation(lattice.generator_value(k, t0), v.p) & 1) << k
        rows.append(row)
    return rows


def relative_selmer(
    spec: SurfaceSpec, p_t: PartialAdelicPoint, adm: AdmissiblePoint
) -> SelmerSubspace:
    """Pullback of the fiber torus Selmer group under evaluation at t0."""
    fiber = relative_fiber(spec, p_t, adm)
    lattice = GLattice(spec, adm.places)
    rows = _relative_rows(fiber, lattice, dual=False)
    kernel = gf2.kernel_basis(rows, lattice.ncols)
    return SelmerSubspace(lattice, gf2.Subspace(lattice.ncols, kernel))


def relative_dual_selmer(
    spec: SurfaceSpec, p_t: PartialAdelicPoint, adm: AdmissiblePoint
) -> SelmerSubspace:
    """Pullback of the fiber torus dual Selmer group under evaluation at t0."""
    fiber = relative_fiber(spec, p_t, adm)
    lattice = GLattice(spec, adm.places)
    rows = _relative_rows(fiber, lattice, dual=True)
    kernel = gf2.kernel_basis(rows, lattice.ncols)
    return SelmerSubspace(lattice, gf2.Subspace(lattice.ncols, kernel))


def fiber_torus(
    spec: SurfaceSpec, p_t: PartialAdelicPoint, adm: AdmissiblePoint
) -> TorusData:
    """The norm-one torus of the fiber at the admissible point, over T0(t0).

    The square-free part of -d*p_J(t0) is read off from valuations at the
    working places (T and the witness places); the leftover cofactor must be
    a perfect square, so no large number is ever factored.
    """
    fiber = relative_fiber(spec, p_t, adm)
    sign = 1 if fiber.torus_value > 0 else -1
    support = []
    residual = abs(fiber.torus_value)
    finite = sorted(
        v for v in set(fiber.ramified) | set(fiber.unit_kind) if v.is_finite
    )
    for v in finite:
        val = valuation(fiber.torus_value, v.p)
        residual /= Fraction(v.p) ** val
        if val & 1:
            support.append(v.p)
    cofactor = residual.numerator * residual.denominator
    if math.isqrt(cofactor) ** 2 != cofactor:
        raise ValueError("fiber torus support escapes the working place set")
    d_t = SquareClass(sign, tuple(sorted(support)))
    places = set(fiber.ramified) | {REAL, Place.finite(2)}
    return torus_data(d_t, places)
