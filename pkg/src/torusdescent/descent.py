"""The descent loop: hypothesis verification, suitable partial adelic
points, admissible fiber search, and dual-Selmer reduction by place
enlargement.

The two conjectural inputs are replaced by bounded searches that report
exhaustion as a first-class outcome: simultaneous-prime values of the
factors are found by scanning an arithmetic progression, and the character
conditions normally supplied by Chebotarev are found by scanning primes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from . import gf2
from .arith import (
    _MR_LIMIT,
    REAL,
    Place,
    Rational,
    crt,
    hensel_solve,
    hilbert_symbol,
    is_local_square,
    is_prime,
    legendre,
    local_class_from_mask,
    local_square_class,
    prime_stream,
    square_class,
    valuation,
)
from .brauer import generator_left, invariant, obstruction_sum
from .conditiond import (
    ConditionDReport,
    GElement,
    check_condition_d,
    d_constant,
    d_constant_dual,
    in_g_i,
    in_g_i_dual,
    span_of,
)
from .points import (
    good_place_solubility,
    local_solubility,
    solve_global,
    verify_integral_point,
)
from .selmer import (
    GLattice,
    SelmerSubspace,
    dimension_identity,
    fiber_torus,
    relative_dual_selmer,
    relative_selmer,
)
from .surface import (
    AdmissiblePoint,
    LocalPoint,
    PartialAdelicPoint,
    SurfaceSpec,
    compute_s_bad,
    fiber,
    spec_hash,
)

# Interpretation choices recorded in every report (see the module notes).
READINGS = {
    "delta_normalization": "integral cross-resultants c_i*d_j - c_j*d_i; "
    "S_bad additionally contains the supports of the leading coefficients c_i",
    "suitability_condition_4": "-d*p_J(t_v) is required to be a nonzero square "
    "at some place of S0",
}


class DescentError(Exception):
    pass


class SearchExhausted(DescentError):
    def __init__(self, stage: str, bound: int, detail: str = ""):
        super().__init__(f"{stage}: search exhausted at bound {bound} {detail}")
        self.stage = stage
        self.bound = bound
        self.detail = detail


class DescentAnomaly(DescentError):
    """An invariant the method guarantees failed; indicates a bug or bad input."""


@dataclass
class DescentBounds:
    admissible_candidates: int = 50_000
    prime_scan: int = 50_000
    height: int = 1_000
    max_steps: int = 24
    solve_each_fiber: bool = True

    def as_dict(self) -> Dict[str, int]:
        return {
            "admissible_candidates": self.admissible_candidates,
            "prime_scan": self.prime_scan,
            "height": self.height,
            "max_steps": self.max_steps,
            "solve_each_fiber": int(self.solve_each_fiber),
        }


def _q(x: Rational) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# Hypothesis verification
# ---------------------------------------------------------------------------


@dataclass
class HypothesisReport:
    condition_d: ConditionDReport
    failures: List[str]  # names of failed hypotheses
    input_problems: List[str]  # malformed or insufficient point data
    split_place: Optional[Place]
    brauer_sums: Dict[int, int]
    details: List[str]

    @property
    def passed(self) -> bool:
        return not self.failures and not self.input_problems

    def as_dict(self) -> Dict:
        return {
            "condition_d_holds": self.condition_d.holds,
            "failures": list(self.failures),
            "input_problems": list(self.input_problems),
            "split_place": str(self.split_place) if self.split_place else None,
            "brauer_sums": {str(i): s for i, s in sorted(self.brauer_sums.items())},
            "details": list(self.details),
        }


def required_places(spec: SurfaceSpec) -> Tuple[Place, ...]:
    """Places an input adelic point must supply: S0 and the bad places."""
    return tuple(sorted(set(spec.s0) | set(compute_s_bad(spec))))


def check_hypotheses(spec: SurfaceSpec, point: PartialAdelicPoint) -> HypothesisReport:
    """Verdict for each hypothesis of the main descent theorem.

    Places absent from the point are certified internally: at a finite place
    of good reduction one may pick t_v with p_J(t_v) a unit, where the fiber
    is a smooth conic with unit coefficients, giving an integral point whose
    Brauer invariants vanish.  The supplied places are checked directly.
    """
    failures: List[str] = []
    details: List[str] = []
    input_problems = list(point.validate())
    missing = [v for v in required_places(spec) if v not in point.entries]
    if missing:
        input_problems.append(
            "point lacks required places: " + ", ".join(str(v) for v in missing)
        )
    cond_d = check_condition_d(spec)
    if not cond_d.holds:
        failures.append("condition_D")
        details.append(str(cond_d))
    if input_problems:
        return HypothesisReport(cond_d, failures, input_problems, None, {}, details)

    # (2) valuation bounds at the supplied places outside S0
    for v in point.places:
        if v.is_real or v in spec.s0:
            continue
        value = spec.d * spec.product_value(spec.indices, point.entries[v].t)
        val = valuation(value, v.p)
        if val > 1:
            failures.append("valuation_bound")
            details.append(f"val_{v}(d*p_J(t_v)) = {val} > 1")
        if v.p == 2 and val != 1:
            failures.append("valuation_at_2")
            details.append(f"val_2(d*p_J(t_2)) = {val} != 1 with 2 outside S0")

    # (3) a split place in S0
    split_place = None
    for v in spec.s0:
        if v in point.entries:
            value = -spec.d * spec.product_value(spec.indices, point.entries[v].t)
            if value != 0 and is_local_square(value, v):
                split_place = v
                break
    if split_place is None:
        failures.append("split_place")
        details.append("-d*p_J(t_v) is a nonzero square at no supplied place of S0")

    # (4) vertical Brauer sums over the supplied places
    brauer_sums: Dict[int, int] = {}
    for i in spec.indices:
        try:
            total = obstruction_sum(spec, point, i, required=required_places(spec))
        except ValueError as exc:
            input_problems.append(str(exc))
            continue
        brauer_sums[i] = total
        if total:
            failures.append(f"brauer_sum_{i}")
            details.append(f"sum of invariants of generator {i} is 1")

    return HypothesisReport(
        cond_d, sorted(set(failures)), input_problems, split_place, brauer_sums, details
    )


# ---------------------------------------------------------------------------
# Suitable partial adelic points
# ---------------------------------------------------------------------------


def suitability_violations(
    spec: SurfaceSpec, p_t: PartialAdelicPoint, s_d: Sequence[Place]
) -> List[str]:
    problems = list(p_t.validate())
    for v in p_t.places:
        t_v = p_t.entries[v].t
        value = spec.d * spec.product_value(spec.indices, t_v)
        if value == 0:
            problems.append(f"(1) d*p_J(t_v) = 0 at {v}")
            continue
        if v.is_real or v in spec.s0:
            continue
        val = valuation(value, v.p)
        if val > 1:
            problems.append(f"(2) val_{v}(d*p_J(t_v)) = {val} > 1")
        if v.p == 2 and val != 1:
            problems.append(f"(3) val_2(d*p_J(t_2)) = {val} != 1")
    if problems:
        return problems
    if not any(
        v in p_t.entries
        and is_local_square(
            -spec.d * spec.product_value(spec.indices, p_t.entries[v].t), v
        )
        for v in spec.s0
    ):
        problems.append("(4) no place of S0 with -d*p_J(t_v) a nonzero square")
    for i in spec.indices:
        total = 0
        for v in p_t.places:
            total ^= invariant(spec, i, p_t.entries[v].t, v)
        if total:
            problems.append(f"(5) invariant sum of generator {i} is 1")
    for v in s_d:
        if v not in p_t.entries:
            problems.append(f"(6) missing local point at the witness place {v}")
    return problems


def build_suitable(
    spec: SurfaceSpec, point: PartialAdelicPoint
) -> PartialAdelicPoint:
    """Restrict the input point to T = S0 + S_bad and verify suitability."""
    t_places = set(spec.s0) | set(compute_s_bad(spec))
    entries = {v: pt for v, pt in point.entries.items() if v in t_places}
    p_t = PartialAdelicPoint(spec, entries)
    problems = suitability_violations(spec, p_t, ())
    if problems:
        raise DescentAnomaly("suitability failed: " + "; ".join(problems))
    return p_t


# ---------------------------------------------------------------------------
# Admissible fiber search: the simultaneous-prime-values surrogate
# ---------------------------------------------------------------------------


def _approximation_data(
    spec: SurfaceSpec, p_t: PartialAdelicPoint
) -> Tuple[int, int, int]:
    """CRT data (tau0, M, D) so that t0 = (tau0 + M*n)/D approximates every t_v."""
    congruences = []
    denominator = 1
    s0_primes = set(spec.s0_finite_primes)
    for v in p_t.places:
        if v.is_real:
            continue
        t_v = p_t.entries[v].t
        p = v.p
        m_v = max(
            max(0, valuation(spec.factor_value(i, t_v), p)) for i in spec.indices
        )
        e_v = max(0, -valuation(t_v, p)) if t_v != 0 else 0
        if e_v and p not in s0_primes:
            raise DescentAnomaly(f"non-integral t_v at {v} outside S0")
        k_v = m_v + 3 + (3 if p == 2 else 0)
        denominator *= p**e_v
        congruences.append((v, k_v, e_v))
    entries = []
    for v, k_v, e_v in congruences:
        modulus = v.p ** (k_v + e_v)
        target = p_t.entries[v].t * denominator
        entries.append((int(target) % modulus if target.denominator == 1 else
                        target.numerator * pow(target.denominator, -1, modulus) % modulus,
                        modulus))
    tau0, M = crt(entries) if entries else (0, 1)
    return tau0, M, denominator


def _real_chamber(
    spec: SurfaceSpec, t_real: Fraction
) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    """Open interval of t with the same factor sign pattern as t_real."""
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for i in spec.indices:
        c, _ = spec.coeffs(i)
        root = spec.root(i)
        if c * spec.factor_value(i, t_real) > 0:  # t_real right of the root
            lo = root if lo is None else max(lo, root)
        else:
            hi = root if hi is None else min(hi, root)
    return lo, hi


def _strip_leftover(
    value: Fraction, primes: Sequence[int]
) -> Tuple[Dict[int, int], int]:
    """Valuations at the given primes and the signed leftover integer."""
    vals = {}
    residual = value
    for q in primes:
        e = valuation(value, q)
        vals[q] = e
        residual /= Fraction(q) ** e
    if residual.denominator != 1:
        raise DescentAnomaly(f"denominator of {value} escapes the working primes")
    return vals, residual.numerator


@dataclass
class AdmissibleSearch:
    point: AdmissiblePoint
    candidates_checked: int
    reciprocity_sums: Dict[int, int]


def find_admissible(
    spec: SurfaceSpec,
    p_t: PartialAdelicPoint,
    bounds: DescentBounds,
    reject: Iterable[Fraction] = (),
) -> AdmissibleSearch:
    """Scan the approximation progression for t0 with prime factor values.

    t0 matches every local t_v to square-class depth, each p_i(t0) is a
    T-unit times a single new prime u_i (its uniformizer place), and the
    fiber above t0 is verified everywhere locally soluble, with the
    reciprocity certificate at each u_i.  Exhaustion of the scan is the
    explicit conditionality of the whole pipeline.
    """
    if REAL not in p_t.entries:
        raise DescentAnomaly("partial adelic point lacks a real component")
    reject = set(Fraction(t) for t in reject)
    tau0, modulus, denominator = _approximation_data(spec, p_t)
    lo, hi = _real_chamber(spec, p_t.entries[REAL].t)
    t_primes = [v.p for v in p_t.places if v.is_finite]
    step = Fraction(modulus, denominator)
    base = Fraction(tau0, denominator)
    n_lo = None if lo is None else (lo - base) / step
    n_hi = None if hi is None else (hi - base) / step
    checked = 0
    for k in itertools.count():
        candidates = [k] if k == 0 else [k, -k]
        alive = False
        for n in candidates:
            if n_lo is not None and Fraction(n) <= n_lo:
                continue
            if n_hi is not None and Fraction(n) >= n_hi:
                continue
            alive = True
            checked += 1
            if checked > bounds.admissible_candidates:
                raise SearchExhausted("admissible_point", bounds.admissible_candidates)
            result = _try_admissible(spec, p_t, Fraction(tau0 + modulus * n, denominator),
                                      t_primes, reject)
            if result is not None:
                return AdmissibleSearch(result[0], checked, result[1])
        if not alive and k > 0:
            raise SearchExhausted(
                "admissible_point",
                checked,
                "the real chamber contains no further progression values",
            )


def _try_admissible(
    spec: SurfaceSpec,
    p_t: PartialAdelicPoint,
    t0: Fraction,
    t_primes: Sequence[int],
    reject: Set[Fraction],
) -> Optional[Tuple[AdmissiblePoint, Dict[int, int]]]:
    if t0 in reject or spec.product_value(spec.indices, t0) == 0:
        return None
    witnesses = []
    for i in spec.indices:
        value = spec.factor_value(i, t0)
        _, leftover = _strip_leftover(value, t_primes)
        leftover = abs(leftover)
        if leftover == 1 or leftover >= _MR_LIMIT or not is_prime(leftover):
            return None
        witnesses.append((i, Place.finite(leftover)))
    u_places = [u for _, u in witnesses]
    if len(set(u_places)) != len(u_places):
        return None
    # square-class approximation check (guaranteed by the modulus; exact)
    for v in p_t.places:
        for i in spec.indices:
            new = local_square_class(spec.factor_value(i, t0), v)
            old = local_square_class(spec.factor_value(i, p_t.entries[v].t), v)
            if new != old:
                raise DescentAnomaly(f"approximation lost [p_{i}(t)]_{v}")
    # local solubility of the fiber everywhere
    fib = fiber(spec, t0)
    if fib.aA <= 0 and fib.bB <= 0:
        return None
    for v in p_t.places:
        if v.is_real:
            continue
        model = "rational" if v in spec.s0 else "integral"
        if local_solubility(fib.aA, fib.bB, v, model).status != "soluble":
            return None
    # reciprocity certificate at each witness place
    sums: Dict[int, int] = {}
    for i, u in witnesses:
        left = generator_left(spec, i)
        direct = hilbert_symbol(left, spec.factor_value(i, t0), u)
        indirect = 0
        for v in p_t.places:
            indirect ^= hilbert_symbol(left, spec.factor_value(i, t0), v)
        if direct != indirect:
            raise DescentAnomaly(f"reciprocity certificate mismatch at u_{i} = {u}")
        if direct != 0:
            return None
        sums[i] = direct
        # the certificate makes a*D_i^A a square at u_i; the good-place
        # criterion then certifies an integral point on the fiber there
        if good_place_solubility(spec, u, t0).status != "soluble":
            raise DescentAnomaly(f"fiber insoluble at the witness place {u}")
    adm = AdmissiblePoint(t0=t0, witnesses=tuple(witnesses), places=p_t.places)
    return adm, sums


# ---------------------------------------------------------------------------
# Descent state
# ---------------------------------------------------------------------------


@dataclass
class DescentState:
    spec: SurfaceSpec
    p_t: PartialAdelicPoint
    s_d: Tuple[Place, ...]
    adm: AdmissiblePoint
    sel: SelmerSubspace  # relative Selmer group R
    dual: SelmerSubspace  # relative dual Selmer group R-hat
    trace: List[Dict] = field(default_factory=list)

    @property
    def neg_gen(self) -> GElement:
        return GElement.make(-self.spec.d, self.spec.indices)

    def terminal(self) -> bool:
        return self.dual.dim == 1 and self.dual.contains(self.neg_gen)


def _make_state(
    spec: SurfaceSpec,
    p_t: PartialAdelicPoint,
    s_d: Tuple[Place, ...],
    bounds: DescentBounds,
    trace: List[Dict],
    reject: Iterable[Fraction] = (),
) -> DescentState:
    search = find_admissible(spec, p_t, bounds, reject)
    adm = search.point
    sel = relative_selmer(spec, p_t, adm)
    dual = relative_dual_selmer(spec, p_t, adm)
    neg_gen = GElement.make(-spec.d, spec.indices)
    if not dual.contains(neg_gen):
        raise DescentAnomaly("[-d][p_J] escaped the relative dual Selmer group")
    for gen in (GElement.make(spec.a, spec.part_a), GElement.make(spec.d, spec.indices)):
        if not sel.contains(gen):
            raise DescentAnomaly(f"{gen} escaped the relative Selmer group")
    torus = fiber_torus(spec, p_t, adm)
    dim_sel, dim_dual, n_split = dimension_identity(torus, spec.s0)
    if sel.dim - dual.dim != n_split:
        raise DescentAnomaly(
            f"relative dimension gap {sel.dim}-{dual.dim} != split count {n_split}"
        )
    if n_split < 1:
        raise DescentAnomaly("no split place: suitability (4) violated upstream")
    trace.append(
        {
            "step": "admissible_point",
            "t0": _q(adm.t0),
            "witnesses": {str(i): str(u) for i, u in adm.witnesses},
            "candidates_checked": search.candidates_checked,
            "dim_selmer": sel.dim,
            "dim_dual_selmer": dual.dim,
            "split_places": n_split,
        }
    )
    return DescentState(spec, p_t, s_d, adm, sel, dual, trace)


# ---------------------------------------------------------------------------
# Prime scans: the Chebotarev surrogate
# ---------------------------------------------------------------------------


def _scan_prime(
    conditions: Sequence[Tuple[Fraction, int]],
    avoid: Set[int],
    bound: int,
    stage: str,
) -> int:
    """Least odd prime with the prescribed Legendre values for each rational."""
    skip = set(avoid) | {2}
    for value, _ in conditions:
        skip.update(square_class(value).support)
    count = 0
    for w in prime_stream(2, sorted(skip)):
        count += 1
        if count > bound:
            raise SearchExhausted(stage, bound)
        if all(legendre(value, w) == sign for value, sign in conditions):
            return w


def _uniformizer_t(spec: SurfaceSpec, i: int, w: int) -> int:
    """Integer t_w with val_w(p_i(t_w)) exactly 1."""
    c, d = spec.coeffs(i)
    cw = c.numerator * pow(c.denominator, -1, w * w) % (w * w)
    dw = d.numerator * pow(d.denominator, -1, w * w) % (w * w)
    root = (-dw * pow(cw, -1, w)) % w
    for shift in range(w):
        t_w = root + w * shift
        value = spec.factor_value(i, t_w)
        if value != 0 and valuation(value, w) == 1:
            return t_w
    raise DescentAnomaly(f"no uniformizer value for p_{i} at {w}")


def _local_point_above(
    spec: SurfaceSpec, w: Place, t_w: int, i: int, precision: int = 8
) -> LocalPoint:
    """Integral local point on the fiber above t_w, where p_i degenerates.

    The non-degenerate coefficient is a unit square at w by construction, so
    an axis point (x, 0) or (0, y) exists; solving the one-variable equation
    keeps the residue search linear in w.
    """
    fib = fiber(spec, t_w)
    if i in spec.part_a:
        poly = {(2,): fib.bB, (0,): Fraction(-1)}
        axis = 1
    else:
        poly = {(2,): fib.aA, (0,): Fraction(-1)}
        axis = 0
    result = hensel_solve(poly, w.p, precision, node_limit=2_000_000)
    if result.status != "witness":
        raise DescentAnomaly(f"fiber above t = {t_w} not certifiably soluble at {w}")
    root = Fraction(result.witness[0])
    if axis == 0:
        return LocalPoint.make(root, 0, t_w, precision)
    return LocalPoint.make(0, root, t_w, precision)


# ---------------------------------------------------------------------------
# The reduction step
# ---------------------------------------------------------------------------


def _pick_elements(state: DescentState) -> Tuple[GElement, GElement]:
    spec = state.spec
    neg_gen = state.neg_gen
    x0 = None
    for g in sorted(state.dual.elements(), key=GElement.sort_key):
        if not g.is_identity() and g != neg_gen:
            x0 = g
            break
    span = span_of(
        [GElement.make(spec.a, spec.part_a), GElement.make(spec.d, spec.indices)]
    )
    x1 = None
    for g in sorted(state.sel.elements(), key=GElement.sort_key):
        if g not in span:
            x1 = g
            break
    if x0 is None or x1 is None:
        raise DescentAnomaly("reduction invoked without reducible elements")
    return x0, x1


def _normalize(state: DescentState, x0: GElement, x1: GElement, i: int):
    """Multiply by the always-present generators so that i avoids both subsets."""
    spec = state.spec
    if i in x0.poly:
        x0 = x0 * GElement.make(-spec.d, spec.indices)
    if i in x1.poly:
        x1 = x1 * GElement.make(spec.d, spec.indices)
    return x0, x1


def _add_sd_witness(
    state: DescentState, x: GElement, dual: bool, bounds: DescentBounds
) -> DescentState:
    """Insert an on-demand witness place killing x from the relative group.

    x lies in G^{i_x} (dual side; resp. G_{i_x}) but not in G^D (resp. G_D),
    so some other index carries a violated membership; a prime where the
    violated constant is a non-square while a*D^A is a square forces the
    Selmer condition that excludes x.
    """
    spec = state.spec
    membership = in_g_i_dual if dual else in_g_i
    constant = d_constant_dual if dual else d_constant
    i_prime = None
    for i in spec.indices:
        if not membership(spec, x, i):
            i_prime = i
            break
    if i_prime is None:
        raise DescentAnomaly(
            "element lies in every membership subgroup: Condition (D) "
            "verification should have caught this"
        )
    char_value = Fraction(x.c.value()) * constant(spec, i_prime, x.poly)
    target = spec.a * d_constant(spec, i_prime, spec.part_a)
    avoid = {v.p for v in state.p_t.places if v.is_finite}
    avoid.update(u.p for _, u in state.adm.witnesses)
    w = _scan_prime(
        [(target, 1), (char_value, -1)], avoid, bounds.prime_scan, "sd_witness_prime"
    )
    place = Place.finite(w)
    t_w = _uniformizer_t(spec, i_prime, w)
    point = _local_point_above(spec, place, t_w, i_prime)
    new_pt = state.p_t.with_entry(place, point)
    problems = suitability_violations(spec, new_pt, state.s_d + (place,))
    if problems:
        raise DescentAnomaly("witness insertion broke suitability: " + "; ".join(problems))
    state.trace.append(
        {
            "step": "sd_witness",
            "side": "dual" if dual else "selmer",
            "element": str(x),
            "index": i_prime,
            "place": w,
            "t_w": t_w,
        }
    )
    new_state = _make_state(
        spec, new_pt, state.s_d + (place,), bounds, state.trace
    )
    group = new_state.dual if dual else new_state.sel
    if group.contains(x):
        raise DescentAnomaly(f"witness place {w} failed to kill {x}")
    return new_state


def _chebotarev_step(
    state: DescentState,
    x0: GElement,
    x1: GElement,
    i_x: int,
    bounds: DescentBounds,
) -> DescentState:
    spec = state.spec
    if i_x in x0.poly or i_x in x1.poly:
        raise DescentAnomaly("elements must be normalized away from the index")
    a_val = spec.a * d_constant(spec, i_x, spec.part_a)
    c0_val = Fraction(x0.c.value()) * d_constant(spec, i_x, x0.poly)
    c1_val = Fraction(x1.c.value()) * d_constant(spec, i_x, x1.poly)
    avoid = {v.p for v in state.p_t.places if v.is_finite}
    avoid.update(u.p for _, u in state.adm.witnesses)
    w = _scan_prime(
        [(a_val, 1), (c0_val, -1), (c1_val, -1)],
        avoid,
        bounds.prime_scan,
        "chebotarev_prime",
    )
    place = Place.finite(w)
    t_w = _uniformizer_t(spec, i_x, w)
    point = _local_point_above(spec, place, t_w, i_x)
    new_pt = state.p_t.with_entry(place, point)
    problems = suitability_violations(spec, new_pt, state.s_d)
    if problems:
        raise DescentAnomaly("extension broke suitability: " + "; ".join(problems))

    old_adm, old_sel, old_dual = state.adm, state.sel, state.dual
    old_lattice: GLattice = old_sel.lattice  # type: ignore[assignment]
    new_state = _make_state(spec, new_pt, state.s_d, bounds, state.trace)
    new_lattice: GLattice = new_state.sel.lattice  # type: ignore[assignment]
    t1 = new_state.adm.t0

    # the subgroups avoiding the distinguished factor index
    bit_old = 1 << old_lattice.factor_bit(i_x)
    bit_new = 1 << new_lattice.factor_bit(i_x)
    sel0_old = old_sel.space.intersect_hyperplane(bit_old)
    dual0_old = old_dual.space.intersect_hyperplane(bit_old)
    dual0_new = new_state.dual.space.intersect_hyperplane(bit_new)

    def loc_image(space: gf2.Subspace, lattice: GLattice) -> gf2.Subspace:
        images = []
        for mask in space.basis:
            g = lattice.decode(mask)
            value = Fraction(g.c.value()) * spec.product_value(sorted(g.poly), t1)
            images.append(local_square_class(value, place).mask())
        dim = len(local_square_class(1, place).coordinates)
        return gf2.Subspace(dim, images)

    p_lower_0 = loc_image(sel0_old, old_lattice)
    p_upper_0 = loc_image(dual0_old, old_lattice)
    p_upper_1 = loc_image(dual0_new, new_lattice)
    if p_lower_0.dim == 0 or p_upper_0.dim == 0:
        raise DescentAnomaly("localization images at w vanished; wrong prime choice")
    if p_upper_1.dim != 0:
        raise DescentAnomaly("image of the reduced dual group at w is nonzero")
    for m1 in p_lower_0.basis:
        for m2 in p_upper_1.basis:
            v1 = local_class_from_mask(m1, place)
            v2 = local_class_from_mask(m2, place)
            if hilbert_symbol(v1, v2, place) != 0:
                raise DescentAnomaly("orthogonality of localization images failed")

    # comparison checks between the two admissible points
    for i, u0 in old_adm.witnesses:
        if i == i_x:
            continue
        u1 = new_state.adm.witness(i)
        for j in spec.indices:
            if j == i:
                continue
            s0 = hilbert_symbol(
                spec.factor_value(i, old_adm.t0), spec.factor_value(j, old_adm.t0), u0
            )
            s1 = hilbert_symbol(
                spec.factor_value(i, t1), spec.factor_value(j, t1), u1
            )
            if s0 ^ s1:
                raise DescentAnomaly(
                    f"comparison identity failed at u_{i} for factors ({i},{j})"
                )

    # persistence: reduced dual elements with trivial localization live in the
    # old group, and the distinguished element is gone
    for mask in dual0_new.basis:
        g = new_lattice.decode(mask)
        if not old_dual.contains(g):
            raise DescentAnomaly(f"persistence failed for {g}")
    if new_state.dual.contains(x0):
        raise DescentAnomaly(f"{x0} survived the reduction")
    if not new_state.dual.contains(state.neg_gen):
        raise DescentAnomaly("[-d][p_J] lost during reduction")
    if new_state.dual.dim >= old_dual.dim:
        raise DescentAnomaly(
            f"dual Selmer dimension failed to decrease: {old_dual.dim} -> "
            f"{new_state.dual.dim}"
        )
    state.trace.append(
        {
            "step": "reduce_dual_selmer",
            "x0": str(x0),
            "x1": str(x1),
            "i_x": i_x,
            "w": w,
            "t_w": t_w,
            "dim_before": old_dual.dim,
            "dim_after": new_state.dual.dim,
        }
    )
    return new_state


def reduce_dual_selmer(state: DescentState, bounds: DescentBounds) -> DescentState:
    """One reduction: extend T by a new place and strictly shrink the dual group.

    When the Selmer-side element lies in the membership subgroup at the
    chosen index (or the dual-side character would be trivial at every
    usable index), an on-demand witness place is inserted first and the
    step retries with the shrunken groups.
    """
    if state.dual.dim < 2:
        raise DescentAnomaly("reduction requires dual dimension at least 2")
    for _ in range(bounds.max_steps):
        x0, x1 = _pick_elements(state)
        usable = []
        for i in state.spec.indices:
            if in_g_i(state.spec, x1, i):
                continue
            x0n, x1n = _normalize(state, x0, x1, i)
            if not in_g_i_dual(state.spec, x0n, i):
                usable.append((i in x0.poly or i in x1.poly, i, x0n, x1n))
        if usable:
            usable.sort()
            _, i_x, x0n, x1n = usable[0]
            return _chebotarev_step(state, x0n, x1n, i_x, bounds)
        # dual-side trigger: x0 sits in G^i at every index usable for x1;
        # kill it with a witness place and retry
        state = _add_sd_witness(state, x0, dual=True, bounds=bounds)
        if state.terminal() or state.dual.dim < 2:
            return state
    raise SearchExhausted("sd_retries", bounds.max_steps)


# ---------------------------------------------------------------------------
# Certificates and the full pipeline
# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    outcome: str  # point_found | dual_selmer_minimized | search_exhausted | hypothesis_failed
    data: Dict
    trace: List[Dict]
    spec_sha: str
    readings: Dict[str, str]
    bounds: Dict[str, int]

    def as_dict(self) -> Dict:
        return {
            "outcome": self.outcome,
            "data": self.data,
            "trace": self.trace,
            "spec_hash": self.spec_sha,
            "readings": self.readings,
            "bounds": self.bounds,
        }

    @staticmethod
    def from_dict(payload: Dict) -> "Certificate":
        return Certificate(
            outcome=payload["outcome"],
            data=payload["data"],
            trace=payload["trace"],
            spec_sha=payload["spec_hash"],
            readings=payload["readings"],
            bounds=payload["bounds"],
        )


def _certificate(spec, bounds, outcome, data, trace) -> Certificate:
    return Certificate(
        outcome=outcome,
        data=data,
        trace=trace,
        spec_sha=spec_hash(spec),
        readings=dict(READINGS),
        bounds=bounds.as_dict(),
    )


def _try_fiber_point(
    spec: SurfaceSpec, t0: Fraction, bounds: DescentBounds
) -> Optional[Tuple[Fraction, Fraction]]:
    fib = fiber(spec, t0)
    return solve_global(fib.aA, fib.bB, spec.s0_finite_primes, bounds.height)


def descend(
    spec: SurfaceSpec,
    point: PartialAdelicPoint,
    bounds: Optional[DescentBounds] = None,
) -> Certificate:
    """Run the full pipeline and emit a certificate.

    Loops dual-Selmer reductions until the group is generated by [-d][p_J];
    the fiber at the final admissible point then satisfies the integral
    Hasse principle, and the bounded global search either finds a verified
    point or reports the minimized group with the search bound.
    """
    bounds = bounds or DescentBounds()
    trace: List[Dict] = []
    report = check_hypotheses(spec, point)
    trace.append({"step": "hypotheses", **report.as_dict()})
    if report.input_problems:
        raise DescentError("invalid input point: " + "; ".join(report.input_problems))
    if not report.passed:
        return _certificate(
            spec, bounds, "hypothesis_failed",
            {"failures": report.failures, "details": report.details}, trace,
        )
    try:
        p_t = build_suitable(spec, point)
        state = _make_state(spec, p_t, (), bounds, trace)
        steps = 0
        while True:
            if bounds.solve_each_fiber or state.terminal():
                found = _try_fiber_point(spec, state.adm.t0, bounds)
                if found is not None:
                    x, y = found
                    if not verify_integral_point(spec, x, y, state.adm.t0):
                        raise DescentAnomaly("found point failed re-verification")
                    trace.append(
                        {"step": "point", "x": _q(x), "y": _q(y), "t": _q(state.adm.t0)}
                    )
                    return _certificate(
                        spec, bounds, "point_found",
                        {
                            "x": _q(x), "y": _q(y), "t": _q(state.adm.t0),
                            "reverified": True,
                        },
                        trace,
                    )
            if state.terminal():
                fib = fiber(spec, state.adm.t0)
                return _certificate(
                    spec, bounds, "dual_selmer_minimized",
                    {
                        "t": _q(state.adm.t0),
                        "aA": _q(fib.aA),
                        "bB": _q(fib.bB),
                        "torus_d": _q(fib.torus_d),
                        "dual_generator": str(state.neg_gen),
                        "height_bound": bounds.height,
                        "note": "fiber satisfies the integral Hasse principle; "
                        "no point within the height bound",
                    },
                    trace,
                )
            if state.dual.dim < 2:
                raise DescentAnomaly(
                    "dual Selmer group of dimension 1 with unexpected generator"
                )
            steps += 1
            if steps > bounds.max_steps:
                raise SearchExhausted("descent_loop", bounds.max_steps)
            state = reduce_dual_selmer(state, bounds)
    except SearchExhausted as exc:
        trace.append({"step": "exhausted", "stage": exc.stage, "bound": exc.bound})
        return _certificate(
            spec, bounds, "search_exhausted",
            {"stage": exc.stage, "bound": exc.bound, "detail": exc.detail}, trace,
        )
