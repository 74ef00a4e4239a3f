"""The fibered surface a*p_A(t)x^2 + b*p_B(t)y^2 = 1 as validated data.

Holds the surface specification (place set, coefficients, linear factors,
partition), derived place sets, fibers, local points, and the line-oriented
spec-file format.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .arith import (
    REAL,
    Place,
    Rational,
    factorize,
    is_prime,
    parse_place,
    valuation,
)

MAX_FACTORS = 16  # 2^|J| subset enumeration cap


class SpecValidationError(Exception):
    """Invalid surface specification; carries the list of violations."""

    def __init__(self, violations: Sequence[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class DegenerateFiberError(Exception):
    """Fiber over a root of p_J."""


def _is_s0_integral(x: Fraction, s0_primes: Iterable[int]) -> bool:
    den = x.denominator
    for p in s0_primes:
        while den % p == 0:
            den //= p
    return den == 1


@dataclass(frozen=True)
class SurfaceSpec:
    """Validated surface data; construct through validate_spec."""

    s0: Tuple[Place, ...]
    a: Fraction
    b: Fraction
    factors: Tuple[Tuple[int, Tuple[Fraction, Fraction]], ...]  # (i, (c_i, d_i))
    part_a: frozenset

    @property
    def d(self) -> Fraction:
        return self.a * self.b

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.factors)

    @property
    def part_b(self) -> frozenset:
        return frozenset(self.indices) - self.part_a

    @property
    def s0_finite_primes(self) -> Tuple[int, ...]:
        return tuple(v.p for v in self.s0 if v.is_finite)

    def coeffs(self, i: int) -> Tuple[Fraction, Fraction]:
        for j, cd in self.factors:
            if j == i:
                return cd
        raise KeyError(i)

    def root(self, i: int) -> Fraction:
        """The root -d_i/c_i of p_i."""
        c, d = self.coeffs(i)
        return -d / c

    def factor_value(self, i: int, t: Rational) -> Fraction:
        c, d = self.coeffs(i)
        return c * Fraction(t) + d

    def product_value(self, subset: Iterable[int], t: Rational) -> Fraction:
        value = Fraction(1)
        for i in subset:
            value *= self.factor_value(i, t)
        return value

    def is_s0_integer(self, x: Rational) -> bool:
        return _is_s0_integral(Fraction(x), self.s0_finite_primes)


def spec_violations(
    s0: Sequence[Place],
    a: Rational,
    b: Rational,
    factors: Mapping[int, Tuple[Rational, Rational]],
    part_a: Iterable[int],
) -> List[str]:
    """All violated invariants of a raw specification (empty list = valid)."""
    problems: List[str] = []
    a, b = Fraction(a), Fraction(b)
    if REAL not in s0:
        problems.append("S0 must contain the real place")
    if len(set(s0)) != len(s0):
        problems.append("S0 has repeated places")
    s0_primes = [v.p for v in s0 if v.is_finite]
    if a == 0 or b == 0:
        problems.append("a and b must be nonzero")
    for name, x in (("a", a), ("b", b)):
        if x and not _is_s0_integral(x, s0_primes):
            problems.append(f"{name} = {x} is not an S0-integer")
    if not factors:
        problems.append("the factor set J must be non-empty")
    if len(factors) > MAX_FACTORS:
        problems.append(f"more than {MAX_FACTORS} factors is not supported")
    part_a = set(part_a)
    if not part_a <= set(factors):
        problems.append("partA contains unknown factor indices")
    items = sorted(factors.items())
    for i, (c, d) in items:
        c, d = Fraction(c), Fraction(d)
        if c == 0:
            problems.append(f"factor {i}: leading coefficient c must be nonzero")
            continue
        for name, x in ((f"c_{i}", c), (f"d_{i}", d)):
            if x and not _is_s0_integral(x, s0_primes):
                problems.append(f"{name} = {x} is not an S0-integer")
        # coprimality as S0-integers: no prime outside S0 divides both
        if d == 0:
            bad = sorted(
                q for q in factorize(c.numerator)
                if q not in s0_primes and valuation(c, q) > 0
            )
            if bad:
                problems.append(f"factor {i}: d = 0 and c has primes {bad} outside S0")
        else:
            common = set(factorize(c.numerator)) & set(factorize(d.numerator))
            bad = sorted(q for q in common if q not in s0_primes
                         and valuation(c, q) > 0 and valuation(d, q) > 0)
            if bad:
                problems.append(f"factor {i}: c,d share primes {bad} outside S0")
    for idx, (i, (ci, di)) in enumerate(items):
        for j, (cj, dj) in items[idx + 1 :]:
            if Fraction(ci) * Fraction(dj) - Fraction(cj) * Fraction(di) == 0:
                problems.append(f"factors {i},{j} are proportional")
    return problems


def validate_spec(
    s0: Sequence[Place],
    a: Rational,
    b: Rational,
    factors: Mapping[int, Tuple[Rational, Rational]],
    part_a: Iterable[int],
) -> SurfaceSpec:
    problems = spec_violations(s0, a, b, factors, part_a)
    if problems:
        raise SpecValidationError(problems)
    return SurfaceSpec(
        s0=tuple(sorted(s0)),
        a=Fraction(a),
        b=Fraction(b),
        factors=tuple(
            (i, (Fraction(c), Fraction(d))) for i, (c, d) in sorted(factors.items())
        ),
        part_a=frozenset(part_a),
    )


def make_spec(
    s0_primes: Sequence[int],
    a: Rational,
    b: Rational,
    factors: Mapping[int, Tuple[Rational, Rational]],
    part_a: Iterable[int],
) -> SurfaceSpec:
    """Convenience constructor: S0 = {real} + the given finite primes."""
    places = [REAL] + [Place.finite(p) for p in s0_primes]
    return validate_spec(places, a, b, factors, part_a)


# ---------------------------------------------------------------------------
# Derived place sets
# ---------------------------------------------------------------------------


def compute_s_bad(spec: SurfaceSpec) -> Tuple[Place, ...]:
    """Finite places outside S0 of bad reduction for the fibration.

    Primes dividing a cross-resultant c_i*d_j - c_j*d_i, a leading
    coefficient c_i, or d = ab; the prime 2; and primes p with
    p_J(t) = 0 mod p for every residue t (only possible for p <= |J|).
    Leading-coefficient primes are included so that the constants
    a*p_A(-d_i/c_i) are v-units at every place outside S0 and S_bad.
    """
    s0_primes = set(spec.s0_finite_primes)
    bad = set()
    if 2 not in s0_primes:
        bad.add(2)
    values = [spec.d]
    items = list(spec.factors)
    for idx, (i, (ci, di)) in enumerate(items):
        values.append(ci)
        for j, (cj, dj) in items[idx + 1 :]:
            values.append(ci * dj - cj * di)
    for x in values:
        for q in factorize(Fraction(x).numerator):
            if valuation(x, q) > 0 and q not in s0_primes:
                bad.add(q)
    # residue-covering primes: every t mod p is a root of p_J
    for p in range(2, len(spec.factors) + 1):
        if p in s0_primes or p in bad or not is_prime(p):
            continue
        if all(
            any(_vanishes_mod(spec, i, t, p) for i in spec.indices) for t in range(p)
        ):
            bad.add(p)
    return tuple(Place.finite(q) for q in sorted(bad))


def _vanishes_mod(spec: SurfaceSpec, i: int, t: int, p: int) -> bool:
    value = spec.factor_value(i, t)
    return value == 0 or valuation(value, p) > 0


def compute_s(spec: SurfaceSpec, s_d: Sequence[Place] = ()) -> Tuple[Place, ...]:
    """S = S0 union S_bad union S_D, canonically ordered."""
    all_places = set(spec.s0) | set(compute_s_bad(spec)) | set(s_d)
    return tuple(sorted(all_places))


# ---------------------------------------------------------------------------
# Fibers and points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberSpec:
    """The fiber above t: the conic aA*x^2 + bB*y^2 = 1."""

    t: Fraction
    aA: Fraction
    bB: Fraction
    torus_d: Fraction  # -d * p_J(t); the fiber is a torsor under x^2 - torus_d*y^2 = 1

    @property
    def is_smooth(self) -> bool:
        return self.torus_d != 0


def fiber(spec: SurfaceSpec, t: Rational) -> FiberSpec:
    t = Fraction(t)
    p_j = spec.product_value(spec.indices, t)
    if p_j == 0:
        raise DegenerateFiberError(f"p_J({t}) = 0")
    aA = spec.a * spec.product_value(sorted(spec.part_a), t)
    bB = spec.b * spec.product_value(sorted(spec.part_b), t)
    return FiberSpec(t=t, aA=aA, bB=bB, torus_d=-spec.d * p_j)


def evaluate_point(spec: SurfaceSpec, x: Rational, y: Rational, t: Rational) -> Fraction:
    """Residual a*p_A(t)x^2 + b*p_B(t)y^2 - 1; zero iff on the surface."""
    t = Fraction(t)
    aA = spec.a * spec.product_value(sorted(spec.part_a), t)
    bB = spec.b * spec.product_value(sorted(spec.part_b), t)
    return aA * Fraction(x) ** 2 + bB * Fraction(y) ** 2 - 1


# ---------------------------------------------------------------------------
# Partial adelic points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalPoint:
    """A local point stored as exact rationals with a v-adic precision claim."""

    x: Fraction
    y: Fraction
    t: Fraction
    precision: int

    @staticmethod
    def make(x: Rational, y: Rational, t: Rational, precision: int) -> "LocalPoint":
        return LocalPoint(Fraction(x), Fraction(y), Fraction(t), precision)


@dataclass
class PartialAdelicPoint:
    """Local points indexed by an ordered finite set of places T.

    At finite v outside S0 the coordinates are v-integral and satisfy the
    surface equation to the stated precision; at finite v in S0 only the
    v-adic residual bound is required; at the real place the fiber above
    t_v must be soluble over R.
    """

    spec: SurfaceSpec
    entries: Dict[Place, LocalPoint] = field(default_factory=dict)

    @property
    def places(self) -> Tuple[Place, ...]:
        return tuple(sorted(self.entries))

    def entry(self, v: Place) -> LocalPoint:
        return self.entries[v]

    def with_entry(self, v: Place, point: LocalPoint) -> "PartialAdelicPoint":
        new = dict(self.entries)
        new[v] = point
        return PartialAdelicPoint(self.spec, new)

    def validate(self) -> List[str]:
        problems = []
        for v, pt in sorted(self.entries.items()):
            residual = evaluate_point(self.spec, pt.x, pt.y, pt.t)
            torus = -self.spec.d * self.spec.product_value(self.spec.indices, pt.t)
            if torus == 0:
                problems.append(f"{v}: d*p_J(t_v) = 0")
                continue
            if v.is_real:
                aA = self.spec.a * self.spec.product_value(sorted(self.spec.part_a), pt.t)
                bB = self.spec.b * self.spec.product_value(sorted(self.spec.part_b), pt.t)
                if aA <= 0 and bB <= 0:
                    problems.append(f"real: fiber at t = {pt.t} has no real points")
                continue
            if residual != 0 and valuation(residual, v.p) < pt.precision:
                problems.append(
                    f"{v}: residual {residual} below stated precision {pt.precision}"
                )
            if v not in self.spec.s0:
                for name, coord in (("x", pt.x), ("y", pt.y), ("t", pt.t)):
                    if coord != 0 and valuation(coord, v.p) < 0:
                        problems.append(f"{v}: coordinate {name} is not v-integral")
        return problems


@dataclass(frozen=True)
class AdmissiblePoint:
    """A base value with prime uniformizer places for each factor."""

    t0: Fraction
    witnesses: Tuple[Tuple[int, Place], ...]  # (factor index, place u_i)
    places: Tuple[Place, ...]  # the ambient T

    def witness(self, i: int) -> Place:
        for j, u in self.witnesses:
            if j == i:
                return u
        raise KeyError(i)


# ---------------------------------------------------------------------------
# Spec file format
# ---------------------------------------------------------------------------


def parse_spec_text(text: str) -> SurfaceSpec:
    """Parse the line-oriented key-value spec format.

    Keys: s0, a, b, factor <i> <c> <d>, partA; integers in decimal;
    '#' starts a comment.
    """
    s0: List[Place] = []
    a: Optional[int] = None
    b: Optional[int] = None
    factors: Dict[int, Tuple[int, int]] = {}
    part_a: List[int] = []
    seen_part_a = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]
        try:
            if key == "s0":
                s0 = [parse_place(tok) for tok in tokens[1:]]
            elif key == "a":
                a = int(tokens[1])
            elif key == "b":
                b = int(tokens[1])
            elif key == "factor":
                i = int(tokens[1])
                if i in factors:
                    raise ValueError(f"duplicate factor index {i}")
                factors[i] = (int(tokens[2]), int(tokens[3]))
            elif key == "partA":
                part_a = [int(tok) for tok in tokens[1:]]
                seen_part_a = True
            else:
                raise ValueError(f"unknown key {key!r}")
        except (IndexError, ValueError) as exc:
            raise SpecValidationError([f"line {lineno}: {exc}"]) from exc
    missing = [
        name
        for name, ok in (("s0", bool(s0)), ("a", a is not None), ("b", b is not None),
                         ("factor", bool(factors)), ("partA", seen_part_a))
        if not ok
    ]
    if missing:
        raise SpecValidationError([f"missing keys: {', '.join(missing)}"])
    return validate_spec(s0, a, b, factors, part_a)


def serialize_spec(spec: SurfaceSpec) -> str:
    """Canonical bit-exact serialization; round-trips through parse_spec_text."""
    for x in (spec.a, spec.b, *(c for _, (c, d) in spec.factors),
              *(d for _, (c, d) in spec.factors)):
        if Fraction(x).denominator != 1:
            raise ValueError("spec file format carries integers only")
    lines = ["s0 " + " ".join(str(v) for v in sorted(spec.s0))]
    lines.append(f"a {spec.a}")
    lines.append(f"b {spec.b}")
    for i, (c, d) in spec.factors:
        lines.append(f"factor {i} {c} {d}")
    lines.append("partA" + "".join(f" {i}" for i in sorted(spec.part_a)))
    return "\n".join(lines) + "\n"


def spec_hash(spec: SurfaceSpec) -> str:
    return hashlib.sha256(serialize_spec(spec).encode()).hexdigest()


def load_spec(path: str) -> SurfaceSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec_text(fh.read())


# ---------------------------------------------------------------------------
# Point file format
# ---------------------------------------------------------------------------


def parse_point_file(text: str, spec: SurfaceSpec) -> PartialAdelicPoint:
    """Rows: <place> <x> <y> <t> <precision>, rationals as p/q."""
    entries: Dict[Place, LocalPoint] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 5:
            raise SpecValidationError([f"point line {lineno}: expected 5 fields"])
        try:
            v = parse_place(tokens[0])
            x, y, t = (Fraction(tok) for tok in tokens[1:4])
            precision = int(tokens[4])
        except ValueError as exc:
            raise SpecValidationError([f"point line {lineno}: {exc}"]) from exc
        if precision < 1:
            raise SpecValidationError([f"point line {lineno}: precision must be >= 1"])
        if v in entries:
            raise SpecValidationError([f"point line {lineno}: duplicate place {v}"])
        entries[v] = LocalPoint(x, y, t, precision)
    return PartialAdelicPoint(spec, entries)


def serialize_point(point: PartialAdelicPoint) -> str:
    lines = []
    for v in point.places:
        pt = point.entries[v]
        lines.append(f"{v} {pt.x} {pt.y} {pt.t} {pt.precision}")
    return "\n".join(lines) + "\n"
