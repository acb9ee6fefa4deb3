import csv
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from measuredyn.entropy import (
    ESTIMATE_LABEL,
    EXACT_CAP,
    TimeSequence,
    entropy_estimate,
    induced_entropy_growth,
    separated_set,
)
from measuredyn.systems import build_zoo

F = Fraction
FIG64 = build_zoo("fig1", q=64)


def test_time_sequences():
    A = TimeSequence.integers(3)
    assert A.prefix(5) == (1, 2, 3, 4, 5) and A.a(4) == 4
    B = TimeSequence((2, 5, 9))
    assert B.a(2) == 5
    with pytest.raises(ValueError):
        B.prefix(4)
    for bad in ((), (0, 1), (3, 3)):
        with pytest.raises(ValueError):
            TimeSequence(bad)


def test_separated_set_witness_is_separated():
    card, pts = separated_set(FIG64, FIG64.space.points, 3, F(1, 8))
    assert card == len(pts)
    sp = FIG64.space
    f = FIG64.map_at(0)
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            a, b, seen = x, y, []
            for _ in range(3):
                a, b = f(a), f(b)
                seen.append(sp.distance(a, b))
            assert max(seen) > F(1, 8)


@given(st.integers(0, 2**16), st.integers(1, 4), st.sampled_from([F(1, 4), F(1, 8), F(1, 16)]))
def test_greedy_never_beats_exact(seed, n, eps):
    sample = random.Random(seed).sample(FIG64.space.points, 20)
    g, _ = separated_set(FIG64, sample, n, eps)
    e, _ = separated_set(FIG64, sample, n, eps, mode="exact")
    assert g <= e


def test_exact_mode_is_capped():
    fig = build_zoo("fig1", q=128)
    with pytest.raises(ValueError, match="capped"):
        separated_set(fig, fig.space.points, 2, F(1, 8), mode="exact")
    assert EXACT_CAP == 64


def test_finite_permutations_have_zero_entropy():
    ident = build_zoo("identity", space={"kind": "interval", "q": 64})
    assert entropy_estimate(ident, None, [F(1, 100), F(1, 10)], range(1, 9)).estimate == 0.0
    swap = build_zoo("swap2")
    assert entropy_estimate(swap, None, [F(1, 2), F(1, 10)], range(1, 9)).estimate == 0.0


def test_table_is_monotone_lower_bounds():
    est = entropy_estimate(FIG64, None, [F(1, 4), F(1, 8)], range(1, 7))
    assert est.label == ESTIMATE_LABEL
    for eps in (F(1, 4), F(1, 8)):
        s = [est.s(eps, n) for n in range(1, 7)]
        assert s == sorted(s)
    assert all(est.s(F(1, 4), n) <= est.s(F(1, 8), n) for n in range(1, 7))
    assert est.estimate > 0


def test_fig1_moderate_grid_estimate_is_positive_and_bounded():
    est = entropy_estimate(build_zoo("fig1", q=512), None, [F(1, 16), F(1, 32)], range(1, 9))
    assert 0.1 < est.estimate < math.log(3)


def test_csv_export(tmp_path):
    est = entropy_estimate(FIG64, None, [F(1, 8)], range(1, 4))
    path = tmp_path / "curve.csv"
    est.write_csv(path)
    rows = list(csv.DictReader(open(path)))
    assert [r["n"] for r in rows] == ["1", "2", "3"]
    assert set(rows[0]) == {"eps", "n", "a_n", "s_n", "method", "rate"}
    assert float(rows[0]["rate"]) == pytest.approx(math.log(int(rows[0]["s_n"])))


def test_explicit_observation_times():
    A = TimeSequence((1, 3, 5))
    est = entropy_estimate(FIG64, A, [F(1, 8)], [1, 2, 3])
    assert [r["a_n"] for r in est.rows] == [1, 3, 5]


@pytest.mark.parametrize("name, qs", [("swap2", [2, 4, 8]), ("fig1", [1, 2, 3])])
def test_dirac_embedding_inequality(name, qs):
    sys_ = build_zoo(name, q=4) if name == "fig1" else build_zoo(name)
    g = induced_entropy_growth(sys_, qs, None, F(1, 4), 3)
    assert g["embedding_holds"] and g["monotone"]
    for r in g["rows"]:
        assert r["s_base"] <= r["s_dirac"] <= r["s_induced"]


def test_induced_growth_respects_state_cap():
    g = induced_entropy_growth(build_zoo("fig1", q=8), [1, 2, 50], None, F(1, 4), 2, state_cap=1000)
    assert "exceed the cap" in g["note"]
    assert [r["q"] for r in g["rows"]] == [1, 2]
