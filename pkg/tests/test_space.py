from fractions import Fraction

import numpy as np
import pytest

from measuredyn.space import INF, SpaceError, as_fraction, build_space, describe, fatten, two_point


@pytest.mark.parametrize("raw, want", [
    (0.1, Fraction(1, 10)), ("3/4", Fraction(3, 4)), ({"num": 1, "den": 3}, Fraction(1, 3)),
    (2, Fraction(2)), (Fraction(5, 7), Fraction(5, 7)),
])
def test_as_fraction_is_exact(raw, want):
    assert as_fraction(raw) == want


@pytest.mark.parametrize("raw", [True, float("nan"), [1], None])
def test_as_fraction_rejects(raw):
    with pytest.raises((SpaceError, ValueError)):
        as_fraction(raw)


def test_interval_grid_and_membership():
    sp = build_space({"kind": "interval", "lo": -1, "hi": 1, "q": 8})
    assert len(sp) == 9
    assert sp.point({"num": -1, "den": 2}) == Fraction(-1, 2)
    assert sp.point("3/4") == Fraction(3, 4)
    assert sp.distance(Fraction(-1), Fraction(1)) == 2
    with pytest.raises(SpaceError, match="not a grid point"):
        sp.point(Fraction(1, 3))


def test_circle_wraps():
    sp = build_space({"kind": "circle", "q": 8})
    assert sp.distance(Fraction(0), Fraction(7, 8)) == Fraction(1, 8)
    assert sp.diameter == Fraction(1, 2)
    assert sp.point(Fraction(9, 8)) == Fraction(1, 8)


def test_compactified_integers():
    sp = build_space({"kind": "zinf", "N": 3})
    assert sp.points[-1] == INF
    assert sp.distance(0, INF) == pytest.approx(1.0)
    assert sp.distance(1, -1) == pytest.approx(1.0)
    assert sp.distance(3, INF) < sp.distance(2, INF) < sp.distance(1, INF)
    assert sp.point("inf") == INF


def test_product_uses_max_metric():
    a = build_space({"kind": "interval", "q": 4})
    sp = build_space({"kind": "product", "factors": [describe(a), describe(a)]})
    x, y = (Fraction(0), Fraction(1, 4)), (Fraction(1, 2), Fraction(1, 4))
    assert sp.distance(x, y) == Fraction(1, 2)
    assert sp.point([0, "1/4"]) == x


def test_vectorized_distances_match_scalar():
    for desc in ({"kind": "interval", "q": 6}, {"kind": "circle", "q": 6}, {"kind": "zinf", "N": 2}):
        sp = build_space(desc)
        n = len(sp)
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        D = sp.dist_idx(i, j)
        for a in range(n):
            for b in range(n):
                assert D[a, b] == pytest.approx(float(sp.distance(sp.points[a], sp.points[b])))


@pytest.mark.parametrize("desc", [{"kind": "interval", "q": 5}, {"kind": "circle", "q": 7}, {"kind": "zinf", "N": 3},
                                  {"kind": "finite", "points": ["a", "b", "c"]}])
def test_metric_axioms_exhaustive(desc):
    sp = build_space(desc)
    P = sp.points
    for x in P:
        assert sp.distance(x, x) == 0
        for y in P:
            assert sp.distance(x, y) == pytest.approx(sp.distance(y, x))
            if x != y:
                assert sp.distance(x, y) > 0
            for z in P:
                assert sp.distance(x, z) <= sp.distance(x, y) + sp.distance(y, z) + 1e-12


def test_fatten_is_strict():
    sp = build_space({"kind": "interval", "q": 4})
    assert fatten(sp, [Fraction(0)], Fraction(1, 4)) == {Fraction(0)}
    assert fatten(sp, [Fraction(0)], Fraction(1, 2)) == {Fraction(0), Fraction(1, 4)}


def test_two_point_is_discrete():
    sp = two_point()
    assert sp.distance("a", "b") == 1


@pytest.mark.parametrize("desc", [{"kind": "bogus"}, {"kind": "zinf", "N": 0}, {"kind": "product", "factors": []}])
def test_bad_descriptors(desc):
    with pytest.raises(SpaceError):
        build_space(desc)
