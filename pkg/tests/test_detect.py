import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from measuredyn.detect import (
    Chain,
    PropertyVerdict,
    TimeSet,
    as_model,
    chain_closure,
    constructive_measure_chain,
    decide_chain_transitive,
    decide_mixing,
    decide_shadowing,
    decide_transitive,
    decide_weak_mixing_order,
    find_chain,
    hitting_times,
    interpolation_steps,
    markov_exact,
    pair_stats,
    sample_ball,
    sensitivity_times,
    settle_time,
    time_patterns,
    two_point_pseudo_orbit,
    unshadowed,
    verify_arc_order_obstruction,
    verify_ball_separation,
    verify_shift_convergence,
    verify_two_point_nonshadowing,
)
from measuredyn.measure import dirac, mix, prohorov_fast
from measuredyn.space import build_space
from measuredyn.systems import autonomous, build_zoo, induced, table_map

F = Fraction
H = F(1, 2)
SWAP = build_zoo("swap2")


# result types ------------------------------------------------------------


def test_failing_verdict_needs_witness():
    with pytest.raises(ValueError):
        PropertyVerdict("fails")
    with pytest.raises(ValueError):
        PropertyVerdict("maybe")


def test_timeset_statistics():
    t = TimeSet(10, (2, 4, 6, 8, 10))
    assert t.max_gap == 2 and t.density == H
    assert not t.cofinite_at_horizon
    assert TimeSet(6, (1, 3)).issubset(TimeSet(6, (1, 2, 3)))


# recurrence --------------------------------------------------------------


def test_swap_hitting_times_alternate():
    assert hitting_times(SWAP, {"a"}, {"b"}, 6).members == (1, 3, 5)
    assert hitting_times(SWAP, {"a"}, {"a"}, 6).members == (2, 4, 6)


def test_swap_transitive_not_mixing():
    assert decide_transitive(SWAP).holds
    m = decide_mixing(SWAP)
    assert m.fails and m.witness["cycle_length"] == 2
    assert decide_weak_mixing_order(SWAP, 2).fails
    assert len(time_patterns(as_model(SWAP))) == 2


def test_fig1_cells_transitive_not_mixing():
    fig = build_zoo("fig1", q=16)
    assert decide_transitive(fig, cells=True).holds
    assert decide_mixing(fig, cells=True).fails
    assert markov_exact(as_model(fig, cells=True))


def test_schedule_is_undecided_for_mixing():
    s = build_zoo("fm_schedule", q=16, depth=2)
    assert decide_mixing(s, horizon=20).status == "unknown"


@st.composite
def table_systems(draw):
    n = draw(st.integers(2, 3))
    pts = [f"s{i}" for i in range(n)]
    sp = build_space({"kind": "finite", "points": pts})
    img = draw(st.lists(st.sampled_from(pts), min_size=n, max_size=n))
    return autonomous(table_map(sp, dict(zip(pts, img))))


@given(table_systems(), st.integers(1, 3))
def test_measure_grid_transitivity_implies_base(sys_, q):
    if decide_transitive(induced(sys_), q=q).holds:
        assert decide_transitive(sys_).holds


# chains --------------------------------------------------------------------


def test_trapping_regions():
    ex34, ex35 = build_zoo("ex34", q=16), build_zoo("ex35", q=16)
    assert max(chain_closure(ex34, F(0), F(3, 10))) == F(1, 4)
    assert max(chain_closure(ex35, H, F(1, 4))) == F(7, 16)
    assert find_chain(ex34, F(0), F(11, 16), F(3, 10)) is None
    assert decide_chain_transitive(ex34, F(3, 10)).fails


def test_find_chain_validates():
    fig = build_zoo("fig1", q=8)
    c = find_chain(fig, F(-1, 2), F(0), F(1, 4))
    assert isinstance(c, Chain) and c.valid
    assert c.states[0] == F(-1, 2) and c.states[-1] == 0
    assert c.revalidate(fig, fig.space.distance)


def test_induced_swap_chain_transitive():
    assert decide_chain_transitive(induced(SWAP), F(1, 4), q=8).holds


@pytest.mark.parametrize("eps", [H, F(1, 4)])
def test_constructive_chains_on_swap(eps):
    sp = SWAP.space
    N = interpolation_steps(eps)
    assert N == int(2 / eps)
    for k in range(N, N + 7):
        c = constructive_measure_chain(induced(SWAP), dirac(sp, "a"), dirac(sp, "b"), eps, k)
        assert c.valid and c.length == k
        assert all(h <= eps / 2 for h in c.hop_slacks[:N])
        assert all(h == 0 for h in c.hop_slacks[N:])
        assert c.states[-1] == dirac(sp, "b")


def test_constructive_chain_needs_enough_steps():
    with pytest.raises(ValueError):
        constructive_measure_chain(induced(SWAP), dirac(SWAP.space, "a"), dirac(SWAP.space, "b"), H, 2)


# shadowing -----------------------------------------------------------------


def test_two_point_pseudo_orbit():
    delta = F(1, 10)
    c = two_point_pseudo_orbit(delta)
    assert all(h <= delta / 2 for h in c.hop_slacks)
    assert settle_time(delta) == 12
    v = verify_two_point_nonshadowing(delta)
    assert v.holds
    assert v.witness["closest_alpha"] == F(3, 4) and v.witness["distance"] == F(1, 4)


def test_induced_swap_not_shadowing_with_rechecked_witness():
    v = decide_shadowing(induced(SWAP), F(1, 10), F(6, 25), q=20)
    assert v.fails
    assert unshadowed(induced(SWAP), v.witness["pseudo_orbit"], F(1, 10), F(6, 25), q=20)


def test_base_swap_shadows():
    assert decide_shadowing(SWAP, H, H).holds


IDENTITY8 = build_zoo("identity", space={"kind": "interval", "q": 8})


@pytest.mark.parametrize("sys_, delta, eps", [(SWAP, H, H), (IDENTITY8, F(1, 16), F(1, 16))])
def test_shadowing_holds_means_pseudo_orbits_are_shadowed(sys_, delta, eps):
    assert decide_shadowing(sys_, delta, eps).holds
    sp = sys_.space
    rng = random.Random(3)
    for _ in range(50):
        x = rng.choice(sp.points)
        prefix = [x]
        for n in range(rng.randint(1, 8)):
            y = sys_.map_at(n)(prefix[-1])
            prefix.append(rng.choice([z for z in sp.points if sp.distance(y, z) < delta]))
        assert not unshadowed(sys_, prefix, delta, eps)


def test_identity_fails_shadowing_when_hops_reach_the_grid():
    v = decide_shadowing(IDENTITY8, F(1, 4), F(1, 4))
    assert v.fails and unshadowed(IDENTITY8, v.witness["pseudo_orbit"], F(1, 4), F(1, 4))


# sensitivity and pairs ----------------------------------------------------


FIG16 = build_zoo("fig1", q=16)


@given(st.integers(0, 16), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**16))
def test_measure_sensitivity_inside_point_sensitivity(i, e, gap, seed):
    sp = FIG16.space
    x = sp.points[i]
    eps, delta = F(e, 16), F(e + gap, 16)
    cands, _ = sample_ball(sp, x, eps, 8, 6, random.Random(seed))
    cands = [nu for nu in cands if nu != dirac(sp, x)]
    if not cands:
        return
    meas = sensitivity_times(induced(FIG16), dirac(sp, x), eps, delta, 30, cands)
    try:
        pts = set(sensitivity_times(FIG16, x, eps, delta / 2, 30).members)
    except ValueError:
        pts = set()
    assert set(meas.members) <= pts


def test_sensitivity_empty_ball_is_an_error():
    with pytest.raises(ValueError, match="ball empty"):
        sensitivity_times(SWAP, "a", H, F(3, 4), 5)


def test_identity_is_not_sensitive():
    sys_ = build_zoo("identity", space={"kind": "interval", "q": 8})
    assert sensitivity_times(sys_, F(1, 2), F(1, 4), F(1, 2), 20).members == ()


@given(st.integers(-5, 5), st.integers(-5, 5), st.sampled_from([F(1, 10), F(1, 3), F(9, 10)]))
def test_pair_density_lower_below_upper(x, y, t):
    ps = pair_stats(build_zoo("zshift", N=5), x, y, 30, [t])
    assert ps.lower[t] <= ps.upper[t]
    assert ps.min_distance <= ps.tail_min <= ps.tail_max <= ps.max_distance


def test_shift_pair_is_not_li_yorke():
    ps = pair_stats(build_zoo("zshift", N=5), -5, 5, 40, [F(1, 10)])
    assert not ps.li_yorke_candidate(F(1, 10), H)
    assert ps.tail_max == 0


def test_fig1_pair_separates_fully():
    fig = build_zoo("fig1", q=256)
    assert pair_stats(fig, F(-1, 2), F(0), 10).max_distance == 1


# desk-scale claims -------------------------------------------------------


def test_sample_ball_respects_radius():
    sp = FIG16.space
    out, _ = sample_ball(sp, F(0), F(1, 4), 10, 20, random.Random(0))
    assert all(prohorov_fast(nu, dirac(sp, F(0))) < F(1, 4) for nu in out)


def test_ball_separation_small_sample():
    v = verify_ball_separation(sample_size=20)
    assert v.holds


def test_ball_separation_rejects_bad_radii():
    with pytest.raises(ValueError):
        verify_ball_separation(eps0=0.3, eps=0.25, sample_size=2)


def test_shift_convergence():
    assert verify_shift_convergence(10).holds
    sp = build_space({"kind": "zinf", "N": 4})
    m = mix([(H, dirac(sp, -4)), (H, dirac(sp, 0))])
    assert verify_shift_convergence(4, measures=[m]).holds


def test_arc_order_is_reported_as_undecided():
    v = verify_arc_order_obstruction(q=32, horizon=20)
    assert v.status == "unknown"
