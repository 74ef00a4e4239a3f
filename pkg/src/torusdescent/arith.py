"""Exact local and global arithmetic over Q.

Valuations, square classes, Legendre/Jacobi symbols, Hilbert symbols at
every place, Hensel lifting and deterministic prime streams.  Everything
is computed with exact integer/Fraction arithmetic; nothing here touches
floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

Rational = Fraction | int


class FactorizationError(Exception):
    """Raised when an integer resists the desk-scale factoring stack."""


# ---------------------------------------------------------------------------
# Primality and factorization
# ---------------------------------------------------------------------------

# Deterministic Miller-Rabin bases, valid for n < 3.317e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3_317_044_064_679_887_385_961_981

_SMALL_PRIME_BOUND = 1000
_SMALL_PRIMES: List[int] = []
for _n in range(2, _SMALL_PRIME_BOUND):
    if all(_n % _p for _p in _SMALL_PRIMES if _p * _p <= _n):
        _SMALL_PRIMES.append(_n)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; rejects inputs beyond the proven range."""
    if n >= _MR_LIMIT:
        raise ValueError(f"{n} exceeds the deterministic Miller-Rabin range")
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:12]:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent's cycle-finding rho; returns a nontrivial factor of odd composite n."""
    if n % 2 == 0:
        return 2
    for c in range(1, 40):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise FactorizationError(f"Pollard rho failed on {n}")


def factorize(n: int) -> Dict[int, int]:
    """Prime factorization of |n| as {prime: exponent}; n must be nonzero."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    factors: Dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        g = _pollard_rho(m)
        if g in (1, m):
            raise FactorizationError(f"could not split {m}")
        stack.append(g)
        stack.append(m // g)
    return dict(sorted(factors.items()))


def prime_stream(start: int, avoid: Sequence[int] = ()) -> Iterator[int]:
    """Ascending primes strictly greater than start, skipping `avoid`."""
    skip = set(avoid)
    n = max(start, 1)
    while True:
        n += 1
        if n > 2 and n % 2 == 0:
            continue
        if n in skip:
            continue
        if is_prime(n):
            yield n


def crt(congruences: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    """Solve x = r (mod m) for pairwise coprime moduli; returns (x, M)."""
    x, modulus = 0, 1
    for r, m in congruences:
        inv = pow(modulus % m, -1, m)
        x = x + modulus * ((r - x) * inv % m)
        modulus *= m
        x %= modulus
    return x, modulus


# ---------------------------------------------------------------------------
# Places
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Place:
    """A place of Q: a finite prime or the real place (p is None)."""

    p: Optional[int]

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @staticmethod
    def real() -> "Place":
        return Place(None)

    @staticmethod
    def finite(p: int) -> "Place":
        return Place(p)

    @property
    def is_real(self) -> bool:
        return self.p is None

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    def sort_key(self) -> Tuple[int, int]:
        return (0, 0) if self.p is None else (1, self.p)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return "real" if self.p is None else str(self.p)

    def __repr__(self):
        return f"Place({self})"


REAL = Place.real()


def parse_place(token: str) -> Place:
    if token in ("real", "oo", "inf"):
        return REAL
    return Place.finite(int(token))


# ---------------------------------------------------------------------------
# Valuations and square classes
# ---------------------------------------------------------------------------


def valuation(x: Rational, p: int | Place) -> int:
    """p-adic valuation of a nonzero rational."""
    if isinstance(p, Place):
        if p.is_real:
            raise ValueError("valuation undefined at the real place")
        p = p.p  # type: ignore[assignment]
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of 0 is undefined")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x: Rational, p: int) -> Fraction:
    """x / p^val(x), a p-adic unit."""
    return Fraction(x) / Fraction(p) ** valuation(x, p)


def mod_prime_power(x: Rational, p: int, k: int) -> int:
    """Residue of a p-integral rational mod p^k."""
    x = Fraction(x)
    m = p**k
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, m) % m


@dataclass(frozen=True)
class SquareClass:
    """An element of Q*/(Q*)^2: sign together with square-free prime support."""

    sign: int
    support: Tuple[int, ...]

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if list(self.support) != sorted(set(self.support)):
            raise ValueError("support must be strictly increasing")

    @staticmethod
    def identity() -> "SquareClass":
        return SquareClass(1, ())

    def is_identity(self) -> bool:
        return self.sign == 1 and not self.support

    def value(self) -> int:
        v = self.sign
        for p in self.support:
            v *= p
        return v

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        support = tuple(sorted(set(self.support) ^ set(other.support)))
        return SquareClass(self.sign * other.sign, support)

    def __str__(self):
        return str(self.value())


def square_class(x: Rational) -> SquareClass:
    """Image of a nonzero rational in Q*/(Q*)^2."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("0 has no square class")
    sign = 1 if x > 0 else -1
    support = []
    for n in (x.numerator, x.denominator):
        for p, e in factorize(n).items():
            if e % 2:
                support.append(p)
    return SquareClass(sign, tuple(sorted(support)))


# ---------------------------------------------------------------------------
# Quadratic residue symbols
# ---------------------------------------------------------------------------


def legendre(a: int | Rational, p: int) -> int:
    """Legendre symbol (a|p) in {+1, -1, 0} via Euler's criterion; p an odd prime."""
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    a = Fraction(a)
    num = a.numerator % p
    den = a.denominator % p
    if den == 0:
        raise ValueError(f"{a} has a pole at {p}")
    if num == 0:
        return 0
    r = pow(num * pow(den, -1, p) % p, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd positive n, by quadratic-reciprocity recursion."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ---------------------------------------------------------------------------
# Local square classes
# ---------------------------------------------------------------------------


def is_local_square(x: Rational, v: Place) -> bool:
    """True iff x is a square in the completion at v."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("0 is not in the multiplicative group")
    if v.is_real:
        return x > 0
    p = v.p
    val = valuation(x, p)
    if val % 2:
        return False
    u = unit_part(x, p)
    if p == 2:
        return mod_prime_power(u, 2, 3) == 1
    return legendre(u, p) == 1


def local_basis(v: Place) -> Tuple[int, ...]:
    """Generators of Q_v*/(Q_v*)^2 matching local_square_class coordinates."""
    if v.is_real:
        return (-1,)
    p = v.p
    if p == 2:
        return (-1, 5, 2)
    for u in range(2, p):
        if legendre(u, p) == -1:
            return (u, p)
    raise AssertionError("no quadratic non-residue found")


@dataclass(frozen=True)
class LocalSquareClass:
    """Coordinates of a nonzero rational in Q_v*/(Q_v*)^2 over F2.

    Coordinates are taken against local_basis(v): 1 bit at the real place
    (sign), 2 bits at odd p (non-residue unit, uniformizer), 3 bits at 2
    (-1, 5, 2).
    """

    place: Place
    coordinates: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    def is_trivial(self) -> bool:
        return not any(self.coordinates)

    def __mul__(self, other: "LocalSquareClass") -> "LocalSquareClass":
        if self.place != other.place:
            raise ValueError("mismatched places")
        coords = tuple(a ^ b for a, b in zip(self.coordinates, other.coordinates))
        return LocalSquareClass(self.place, coords)

    def mask(self) -> int:
        m = 0
        for i, c in enumerate(self.coordinates):
            m |= c << i
        return m


def local_square_class(x: Rational, v: Place) -> LocalSquareClass:
    x = Fraction(x)
    if x == 0:
        raise ValueError("0 has no square class")
    if v.is_real:
        return LocalSquareClass(v, (0 if x > 0 else 1,))
    p = v.p
    val = valuation(x, p) & 1
    u = unit_part(x, p)
    if p == 2:
        u8 = mod_prime_power(u, 2, 3)
        e_minus = 1 if u8 in (3, 7) else 0  # coefficient of -1
        e_five = 1 if u8 in (3, 5) else 0  # coefficient of 5
        return LocalSquareClass(v, (e_minus, e_five, val))
    qr = 0 if legendre(u, p) == 1 else 1
    return LocalSquareClass(v, (qr, val))


def local_class_from_mask(mask: int, v: Place) -> Fraction:
    """Rational representative of a local class given by a basis bitmask."""
    value = Fraction(1)
    for i, g in enumerate(local_basis(v)):
        if (mask >> i) & 1:
            value *= g
    return value


# ---------------------------------------------------------------------------
# Hilbert symbol
# ---------------------------------------------------------------------------


def hilbert_symbol(a: Rational, b: Rational, v: Place) -> int:
    """Additive Hilbert symbol <a,b>_v in F2.

    0 iff z^2 = a x^2 + b y^2 has a nontrivial solution over the completion
    at v.  Closed-form local formulas; the mod-p^k solubility oracle in the
    test suite is the arbiter.
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if v.is_real:
        return 1 if (a < 0 and b < 0) else 0
    p = v.p
    alpha, beta = valuation(a, p), valuation(b, p)
    u, w = unit_part(a, p), unit_part(b, p)
    if p == 2:
        eps_u = (mod_prime_power(u, 2, 2) - 1) // 2 & 1  # (u-1)/2 mod 2
        eps_w = (mod_prime_power(w, 2, 2) - 1) // 2 & 1
        omega_u = (mod_prime_power(u, 2, 3) ** 2 - 1) // 8 & 1  # (u^2-1)/8 mod 2
        omega_w = (mod_prime_power(w, 2, 3) ** 2 - 1) // 8 & 1
        return (eps_u * eps_w + alpha * omega_w + beta * omega_u) & 1
    eps_p = ((p - 1) // 2) & 1
    chi_u = 0 if legendre(u, p) == 1 else 1
    chi_w = 0 if legendre(w, p) == 1 else 1
    return (alpha * beta * eps_p + beta * chi_u + alpha * chi_w) & 1


def hilbert_relevant_places(a: Rational, b: Rational) -> List[Place]:
    """Places where <a,b>_v can be nonzero: real plus primes dividing 2ab."""
    primes = {2}
    for x in (Fraction(a), Fraction(b)):
        primes.update(factorize(x.numerator))
        primes.update(factorize(x.denominator))
    return [REAL] + [Place.finite(p) for p in sorted(primes)]


# ---------------------------------------------------------------------------
# Hensel lifting
# ---------------------------------------------------------------------------

Poly = Mapping[Tuple[int, ...], Rational]


def poly_eval(poly: Poly, point: Sequence[Rational]) -> Fraction:
    total = Fraction(0)
    for exps, coeff in poly.items():
        term = Fraction(coeff)
        for x, e in zip(point, exps):
            term *= Fraction(x) ** e
        total += term
    return total


def poly_derivative(poly: Poly, var: int) -> Dict[Tuple[int, ...], Fraction]:
    out: Dict[Tuple[int, ...], Fraction] = {}
    for exps, coeff in poly.items():
        e = exps[var]
        if e == 0:
            continue
        new = tuple(x - 1 if i == var else x for i, x in enumerate(exps))
        out[new] = out.get(new, Fraction(0)) + e * Fraction(coeff)
    return out


@dataclass(frozen=True)
class HenselResult:
    """Outcome of a bounded residue search with smooth-point certification.

    status 'witness': witness solves the system mod p^precision and the
    partial derivative in smooth_var satisfies the strong Hensel condition
    val(f) > 2*val(df/dx_j) there, so the witness lifts to Z_p (at odd p
    for the conics in scope the derivative is simply a unit).  status
    'none': a complete residue analysis at the stated precision excluded
    all solutions.  status 'inconclusive': solutions mod p^precision exist
    (or the node budget ran out) but none could be certified.
    """

    status: str  # 'witness' | 'none' | 'inconclusive'
    p: int
    precision: int
    witness: Optional[Tuple[int, ...]] = None
    smooth_var: Optional[int] = None
    detail: str = ""


def _poly_eval_mod(poly: Poly, point: Sequence[int], p: int, k: int) -> int:
    m = p**k
    total = 0
    for exps, coeff in poly.items():
        c = mod_prime_power(coeff, p, k)
        for x, e in zip(point, exps):
            c = c * pow(x % m, e, m) % m
        total = (total + c) % m
    return total


def hensel_solve(
    poly: Poly, p: int, precision: int, node_limit: int = 100_000
) -> HenselResult:
    """Search residues mod p^precision for a certified-liftable zero of poly.

    poly is one polynomial in <= 2 variables with p-integral coefficients.
    Solutions are explored level by level; a node with a unit partial
    derivative is Newton-lifted to full precision and returned with the
    derivative index as its non-degeneracy certificate.
    """
    nvars = len(next(iter(poly.keys())))
    if nvars not in (1, 2):
        raise ValueError("hensel_solve handles 1 or 2 variables")
    for coeff in poly.values():
        if Fraction(coeff) != 0 and valuation(coeff, p) < 0:
            raise ValueError("coefficients must be p-integral")
    if p**nvars > node_limit:
        return HenselResult(
            "inconclusive", p, precision, detail="residue space exceeds node budget"
        )
    derivs = [poly_derivative(poly, j) for j in range(nvars)]

    def certificate_var(point: Sequence[int]) -> Optional[int]:
        """Strong Hensel condition val(f) > 2*val(df/dx_j) at the exact point."""
        fval = poly_eval(poly, point)
        vf = None if fval == 0 else valuation(fval, p)
        for j in range(nvars):
            dval = poly_eval(derivs[j], point)
            if dval == 0:
                continue
            if vf is None or vf > 2 * valuation(dval, p):
                return j
        return None

    def newton_lift(point: Tuple[int, ...], var: int) -> Tuple[int, ...]:
        modulus = p**precision
        pt = [x % modulus for x in point]
        while True:
            fval = poly_eval(poly, pt)
            if fval == 0 or valuation(fval, p) >= precision:
                return tuple(pt)
            dval = poly_eval(derivs[var], pt)
            delta = -fval / dval  # p-integral: val(f) > 2 val(f') >= val(f')
            pt[var] = (pt[var] + mod_prime_power(delta, p, precision)) % modulus

    # level-1 frontier
    frontier = [
        pt
        for pt in itertools.product(range(p), repeat=nvars)
        if _poly_eval_mod(poly, pt, p, 1) == 0
    ]
    level = 1
    nodes = len(frontier)
    while True:
        for pt in frontier:
            var = certificate_var(pt)
            if var is not None:
                witness = newton_lift(tuple(pt), var)
                return HenselResult("witness", p, precision, witness, var)
        if not frontier:
            return HenselResult(
                "none", p, precision, detail=f"all residues excluded at level {level}"
            )
        if level >= precision:
            return HenselResult(
                "inconclusive",
                p,
                precision,
                detail="singular solutions remain at stated precision",
            )
        # branch every surviving node one level deeper
        new_frontier = []
        step = p**level
        for pt in frontier:
            for delta in itertools.product(range(p), repeat=nvars):
                cand = tuple(x + step * t for x, t in zip(pt, delta))
                if _poly_eval_mod(poly, cand, p, level + 1) == 0:
                    new_frontier.append(cand)
            nodes += p**nvars
            if nodes > node_limit:
                return HenselResult(
                    "inconclusive", p, precision, detail="node budget exhausted"
                )
        frontier = new_frontier
        level += 1
