from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from measuredyn.measure import dirac, prohorov_fast, pushforward
from measuredyn.space import INF, build_space
from measuredyn.systems import (
    MapSpec,
    SystemError_,
    build_system,
    build_zoo,
    fig1_map,
    fm_map,
    identity,
    induced,
    induced_uniform_distance,
    orbit,
    orbit_table,
    pl_value,
    preimage_witness,
    quadratic_inverse,
    uniform_distance,
)

F = Fraction


def test_fig1_orbit_of_minus_half():
    assert orbit(build_zoo("fig1", q=8), F(-1, 2), 5) == [F(-1, 2), 1, -1, 0, 0, 0]


def test_fig1_laps():
    nodes = fig1_map(8).params["nodes"]
    for x in (F(-1), F(-3, 4), F(-1, 2)):
        assert pl_value(nodes, x) == 2 * x + 2
    for x in (F(-1, 2), F(-1, 4), F(0)):
        assert pl_value(nodes, x) == -2 * x
    for x in (F(0), F(1, 4), F(1)):
        assert pl_value(nodes, x) == -x


def test_fig1_coarse_grid_not_surjective():
    # The slope-2 laps skip odd grid points, so 3/4 has no grid preimage.
    f = fig1_map(8)
    assert not f.surjective
    with pytest.raises(SystemError_, match="not surjective"):
        preimage_witness(f, F(3, 4))


def test_fig1_refined_grid_has_coarse_preimages():
    f = fig1_map(16)
    for y in fig1_map(8).space.points:
        x = preimage_witness(f, y)
        assert f(x) == y


def test_swap_table_and_orbit_table():
    swap = build_zoo("swap2")
    assert swap.map_at(0)("a") == "b"
    tab = orbit_table(swap, 3)
    assert tab[:, 0].tolist() == [0, 1, 0, 1]


def test_zshift_absorbs_at_infinity():
    z = build_zoo("zshift", N=3)
    assert orbit(z, -3, 7)[-1] == INF
    assert z.map_at(0)(INF) == INF


def test_quadratic_inverse():
    assert quadratic_inverse(F(1, 2), F(1, 2), F(3, 8)) == F(1, 2)


def test_circle_word_system_alternates_words_and_inverses():
    c = build_zoo("circle_wm", q=64)
    assert not c.eventually_periodic
    sp = c.space
    for n in (0, 2, 4):
        g, ginv = c.map_at(n), c.map_at(n + 1)
        for x in sp.points[::5]:
            assert sp.distance(ginv(g(x)), x) <= F(2, 64)


def test_induced_system_pushes_forward():
    fig = build_zoo("fig1", q=8)
    ind = induced(fig)
    mu = dirac(fig.space, F(-1, 2))
    assert ind.map_at(0)(mu) == pushforward(fig.map_at(0), mu) == dirac(fig.space, 1)
    assert ind.base is fig


def test_periodic_and_listed_phases():
    sp = build_space({"kind": "finite", "points": ["a", "b", "c"]})
    sys_ = build_system({"generator": "listed", "prefix": [{"kind": "identity"}],
                         "tail": {"kind": "table", "table": {"a": "b", "b": "c", "c": "a"}}}, sp)
    assert sys_.preperiod == 1 and sys_.period == 1
    assert orbit(sys_, "a", 3) == ["a", "a", "b", "c"]
    per = build_system({"generator": "periodic", "maps": [{"kind": "identity"},
                        {"kind": "table", "table": {"a": "b", "b": "a", "c": "c"}}]}, sp)
    assert [per.phase(n) for n in range(5)] == [0, 1, 0, 1, 0]


def test_bad_records():
    sp = build_space({"kind": "interval", "q": 4})
    with pytest.raises(SystemError_):
        build_system({"map": {"kind": "mystery"}}, sp)
    with pytest.raises(SystemError_):
        build_system({"zoo": "nothing"})
    with pytest.raises(SystemError_):
        build_zoo("swap2").map_at(-1)


def test_fm_maps_approach_identity_at_both_levels():
    sp = build_space({"kind": "interval", "q": 48})
    idm = identity(sp)
    ms = [dirac(sp, x) for x in sp.points[::7]]
    d = [uniform_distance(fm_map(sp, m), idm) for m in (1, 2, 4)]
    assert d[0] > d[1] > d[2]
    for m in (1, 2, 4):
        assert induced_uniform_distance(fm_map(sp, m), idm, ms) <= uniform_distance(fm_map(sp, m), idm)


def test_fm_schedule_is_not_eventually_periodic():
    s = build_zoo("fm_schedule", q=16, depth=2)
    assert not s.eventually_periodic
    assert s.map_at(10**6).name == "identity" or s.map_at(10**6)(F(1, 2)) == F(1, 2)


@given(st.integers(0, 16))
def test_tables_agree_with_evaluation(i):
    f = fig1_map(16)
    x = f.space.points[i]
    assert f.space.points[int(f.table[i])] == f(x)


def test_map_on_other_space_rejected():
    a, b = build_space({"kind": "interval", "q": 4}), build_space({"kind": "interval", "q": 4})
    with pytest.raises(SystemError_):
        build_system({"generator": "periodic", "maps": []}, a)
    from measuredyn.systems import periodic
    with pytest.raises(SystemError_):
        periodic([identity(a), identity(b)])


def test_prohorov_contracts_under_identity():
    sp = build_space({"kind": "interval", "q": 4})
    mu, nu = dirac(sp, F(0)), dirac(sp, F(1, 4))
    idm = identity(sp)
    assert prohorov_fast(pushforward(idm, mu), pushforward(idm, nu)) == F(1, 4)
    assert np.array_equal(idm.table, np.arange(5))
