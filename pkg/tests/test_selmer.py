import random

import pytest

from torusdescent.arith import (
    REAL,
    Place,
    SquareClass,
    is_local_square,
    square_class,
)
from torusdescent.conditiond import GElement
from torusdescent.selmer import (
    SquareClassLattice,
    dimension_identity,
    dual_selmer_group,
    ev,
    selmer_group,
    split_places,
    torus_data,
)
from torusdescent.surface import make_spec

from oracles import dual_selmer_by_enumeration, selmer_by_enumeration


def places_of(*primes):
    return [REAL] + [Place.finite(p) for p in primes]


def test_torus_data_validation():
    torus = torus_data(-4, places_of(2))
    assert torus.d == -1  # square-free representative
    with pytest.raises(ValueError, match="real"):
        torus_data(-1, [Place.finite(2)])
    with pytest.raises(ValueError, match="contain 2"):
        torus_data(-1, [REAL, Place.finite(3)])
    with pytest.raises(ValueError, match="ramified"):
        torus_data(5, places_of(2))


def test_selmer_minus_one():
    torus = torus_data(-1, places_of(2))
    sel = selmer_group(torus)
    dual = dual_selmer_group(torus)
    assert sel.dim == 1 and sel.contains(square_class(2))
    assert dual.dim == 1 and dual.contains(square_class(-1))


def test_selmer_square_discriminant():
    torus = torus_data(1, places_of(2, 5))
    assert selmer_group(torus).dim == 3  # everything
    assert dual_selmer_group(torus).dim == 0  # only the trivial class


def test_dimension_identity_examples():
    torus = torus_data(-1, places_of(2))
    assert dimension_identity(torus, places_of(2)) == (1, 1, 0)
    torus = torus_data(17, places_of(2, 17))
    assert dimension_identity(torus, places_of(2)) == (3, 1, 2)
    torus = torus_data(1, places_of(2))
    assert dimension_identity(torus, places_of(2)) == (2, 0, 2)


def test_dimension_identity_rejects_split_outside_base():
    # 17 is a square at 13; with 13 in S but not in the base set the
    # identity does not apply
    torus = torus_data(17, places_of(2, 13, 17))
    with pytest.raises(ValueError, match="split"):
        dimension_identity(torus, places_of(2))


def _random_torus(rng):
    d = 1
    for p in (2, 3, 5, 7, 11):
        if rng.random() < 0.3:
            d *= p
    if rng.random() < 0.5:
        d = -d
    primes = set(square_class(d).support) | {2}
    for p in (3, 5, 7, 11, 13):
        if len(primes) >= 5:
            break
        if p not in primes and rng.random() < 0.3:
            primes.add(p)
    if len(primes) > 5:
        return None
    return torus_data(d, places_of(*sorted(primes)))


def test_selmer_matches_enumeration_random():
    rng = random.Random(17)
    checked = 0
    while checked < 60:
        torus = _random_torus(rng)
        if torus is None:
            continue
        sel = selmer_group(torus)
        assert set(sel.elements()) == selmer_by_enumeration(torus.d, torus.places)
        dual = dual_selmer_group(torus)
        assert set(dual.elements()) == dual_selmer_by_enumeration(
            torus.d, torus.places
        )
        checked += 1


def test_dimension_identity_random():
    rng = random.Random(23)
    checked = 0
    while checked < 60:
        torus = _random_torus(rng)
        if torus is None:
            continue
        base = [
            v
            for v in torus.places
            if is_local_square(torus.d, v) or rng.random() < 0.5
        ]
        if REAL not in base:
            base.append(REAL)
        dim_sel, dim_dual, n_split = dimension_identity(torus, base)
        assert dim_sel - dim_dual == n_split
        assert n_split == len(split_places(torus, base))
        checked += 1


def test_lattice_encode_decode():
    lattice = SquareClassLattice(places_of(2, 7))
    for value in (1, -1, 2, 7, -14):
        cls = square_class(value)
        assert lattice.decode(lattice.encode(cls)) == cls
    with pytest.raises(ValueError, match="outside"):
        lattice.encode(square_class(3))


def test_ev_examples():
    spec = make_spec([], 2, 3, {1: (1, 0), 2: (1, 1)}, [1])
    assert ev(spec, 2, GElement.identity()) == SquareClass.identity()
    assert ev(spec, 2, GElement.make(1, {1})) == square_class(2)
    x = GElement.make(3, {1})
    y = GElement.make(-1, {2})
    assert ev(spec, 5, x * y) == ev(spec, 5, x) * ev(spec, 5, y)
    with pytest.raises(ValueError):
        ev(spec, 0, GElement.make(1, {1}))
