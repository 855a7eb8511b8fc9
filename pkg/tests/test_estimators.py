import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egoclique.cliques import census, profile_sample
from egoclique.designs import UnsupportedDesignError, approximate_draw_probs, uis, wis
from egoclique.estimators import (BH, CC, CDS_GHT, CDS_HT, HT_JOINT, Estimate, PoolCapacityError,
                                  build_clique_pool, estimate_cc, estimate_cds, estimate_cds_generalized,
                                  estimate_distribution, estimate_var_bh, estimate_var_bh_cc, estimate_var_ht)
from egoclique.graph import Graph, sample_from_draws

from conftest import ATTR8_CATS, ATTR8_EDGES, TRI_K4_EDGES, G6_EDGES, G6_SEX, dense


def sample_of(g, ids, design, labeled=True):
    s = sample_from_draws(g, dense(g, *ids), design, labeled)
    return s, profile_sample(s, g.category_count)


def test_cds_single_bridge_ego(g6):
    s, prof = sample_of(g6, [3], uis(6, 1))
    assert estimate_cds(s, prof, 3).value == pytest.approx(2.0, abs=1e-12)
    assert estimate_cds(s, prof, 2).value == pytest.approx(3.0, abs=1e-12)


def test_cds_unlabeled_matches_labeled(g6):
    a, pa = sample_of(g6, [3, 5], uis(6, 2))
    b, pb = sample_of(g6, [3, 5], uis(6, 2), labeled=False)
    for t in (2, 3):
        assert estimate_cds(a, pa, t).value == estimate_cds(b, pb, t).value


def test_cds_ght_reduces_for_equal_weights(g6):
    s, prof = sample_of(g6, [3], uis(6, 1))
    e = estimate_cds_generalized(s, prof, 3, weights=[1.0], N=6)
    assert e.value == pytest.approx(2.0, abs=1e-12)
    assert e.estimator == CDS_GHT


@given(st.lists(st.floats(0.1, 50), min_size=4, max_size=4), st.floats(1e-3, 1e3))
@settings(max_examples=40, deadline=None)
def test_cds_ght_weight_scale_invariant(w, c):
    g = Graph.from_edges(G6_EDGES)
    s, prof = sample_of(g, [1, 3, 4, 6], uis(6, 4))
    a = estimate_cds_generalized(s, prof, 3, weights=w, N=6)
    b = estimate_cds_generalized(s, prof, 3, weights=[x * c for x in w], N=6)
    assert a.value == pytest.approx(b.value, rel=1e-12)
    assert a.variance == pytest.approx(b.variance, rel=1e-9, abs=1e-12)


def test_cds_refuses_proportional_weights(g6):
    d = wis(g6.degrees().astype(float), 2, proportional=True)
    s, prof = sample_of(g6, [3, 5], d)
    with pytest.raises(ValueError, match="generalized"):
        estimate_cds(s, prof, 3)
    out = estimate_distribution(s, prof, design=approximate_draw_probs(d, dense(g6, 3, 5)))
    assert all(e.estimator == CDS_GHT for e in out.values())


def test_cc_two_egos(g6):
    s, prof = sample_of(g6, [1, 4], uis(6, 2))
    pool = build_clique_pool(s, prof)
    assert estimate_cc(pool, 3).value == pytest.approx(2.5, abs=1e-12)
    assert estimate_cc(pool, 2).value == pytest.approx(1 / 0.6, abs=1e-12)


def test_cc_deduplicates_shared_clique(g6):
    s, prof = sample_of(g6, [1, 2], uis(6, 2))
    pool = build_clique_pool(s, prof)
    assert len(pool) == 1
    assert estimate_cc(pool, 3).value == pytest.approx(1.25, abs=1e-12)


def test_pool_counts_shared_clique_once():
    g = Graph.from_edges(TRI_K4_EDGES)
    s, prof = sample_of(g, [1, 6, 9], uis(g.N, 3))
    pool = build_clique_pool(s, prof)
    got = {tuple(int(g.node_ids[m]) for m in c.members) for c in pool.cliques.values()}
    assert got == {(1, 2, 5), (6, 7, 8, 9)}


def test_pool_capacity():
    g = Graph.from_edges(TRI_K4_EDGES)
    s, prof = sample_of(g, [1, 6, 4], uis(g.N, 3))
    with pytest.raises(PoolCapacityError):
        build_clique_pool(s, prof, max_cliques=2)


def test_cc_needs_labels(g6):
    s, prof = sample_of(g6, [1, 4], uis(6, 2), labeled=False)
    with pytest.raises(ValueError, match="labeled"):
        build_clique_pool(s, prof)


@pytest.mark.parametrize("edges,attrs", [(G6_EDGES, G6_SEX), (ATTR8_EDGES, ATTR8_CATS), (TRI_K4_EDGES, None)])
def test_census_design_is_exact(edges, attrs):
    g = Graph.from_edges(edges, attributes=attrs)
    truth = census(g)
    s = sample_from_draws(g, range(g.N), uis(g.N, g.N))
    prof = profile_sample(s, g.category_count)
    for name in ("cds", "cc"):
        est = estimate_distribution(s, prof, name)
        assert {t: e.value for t, e in est.items()} == pytest.approx(truth.order_counts, abs=1e-12)
        if name == "cds":
            assert all(e.variance == pytest.approx(0, abs=1e-9) for e in est.values())
        if attrs:
            comp = estimate_distribution(s, prof, name, compositions=True)
            assert {u: e.value for u, e in comp.items()} == pytest.approx(truth.composition_counts, abs=1e-12)


@given(st.sets(st.integers(1, 8), min_size=1, max_size=8), st.sampled_from(["cds", "cc"]))
@settings(max_examples=60, deadline=None)
def test_compositions_sum_to_order(egos, name):
    g = Graph.from_edges(ATTR8_EDGES, attributes=ATTR8_CATS)
    s, prof = sample_of(g, sorted(egos), uis(8, len(egos)))
    by_order = estimate_distribution(s, prof, name, variance=False)
    by_comp = estimate_distribution(s, prof, name, compositions=True, variance=False)
    tot = {}
    for u, e in by_comp.items():
        tot[sum(u)] = tot.get(sum(u), 0.0) + e.value
    assert tot == pytest.approx({i: e.value for i, e in by_order.items()}, abs=1e-9)


def test_variance_methods(g6):
    s, prof = sample_of(g6, [1, 4, 5], uis(6, 3))
    e = estimate_cds(s, prof, 3)
    assert e.variance_method == HT_JOINT and e.estimator == CDS_HT
    d = wis(g6.degrees().astype(float), 3)
    s2, prof2 = sample_of(g6, [1, 4, 5], d)
    e2 = estimate_cds(s2, prof2, 3)
    assert e2.variance_method == BH
    with pytest.raises(UnsupportedDesignError):
        estimate_var_ht(s2, prof2, 3)


def test_bh_needs_two_egos(g6):
    s, prof = sample_of(g6, [3], uis(6, 1))
    with pytest.raises(ValueError, match="two"):
        estimate_var_bh(s, prof, 3, 2.0)


def test_bh_cc_undefined_for_one_clique(g6):
    s, prof = sample_of(g6, [1, 2], uis(6, 2))
    pool = build_clique_pool(s, prof)
    assert estimate_var_bh_cc(pool, 3, 1.25) is None
    e = estimate_cc(pool, 3)
    assert e.variance is None and e.estimator == CC


def test_ht_variance_floor_is_flagged(g6):
    # a zero-spread sample: the raw form lands a rounding error below zero
    s, prof = sample_of(g6, [1, 2, 3], uis(6, 3))
    raw = estimate_var_ht(s, prof, 3)
    e = estimate_cds(s, prof, 3)
    assert raw < 0 and abs(raw) < 1e-12
    assert e.variance == 0.0 and e.variance_floored
    assert not estimate_cds(s, prof, 2).variance_floored
    with pytest.raises(ValueError):
        Estimate(3, 1.0, -1.0, CDS_HT, HT_JOINT)


def test_record_fields(g6):
    s, prof = sample_of(g6, [1, 4], uis(6, 2))
    rec = estimate_cds(s, prof, 3).to_record(n=s.n, seed=7)
    assert rec["n"] == 2 and rec["n_prime"] == 2 and rec["N"] == 6 and rec["seed"] == 7


def test_wis_wr_cc_uses_summed_draw_probs(g6):
    w = g6.degrees().astype(float)
    d = wis(w, 1)
    s, prof = sample_of(g6, [1], d)
    pool = build_clique_pool(s, prof)
    p = w / w.sum()
    pi = p[dense(g6, 1, 2, 3)].sum()
    assert estimate_cc(pool, 3).value == pytest.approx(1 / pi, abs=1e-12)
    assert np.isclose(pi, 7 / 14)


def test_ght_uses_hansen_hurwitz_inclusion_when_available(g6):
    from egoclique.designs import node_inclusion_prob
    d = wis(g6.degrees().astype(float) * 7, 5, proportional=True)
    draws = dense(g6, 3, 3, 1, 5, 3)
    s = sample_from_draws(g6, draws, d)
    prof = profile_sample(s)
    ap = approximate_draw_probs(d, draws)
    w = [node_inclusion_prob(ap, e.ego_id) for e in s.egonets]
    got = estimate_distribution(s, prof, design=ap)
    for t, e in got.items():
        assert e.value == pytest.approx(estimate_cds_generalized(s, prof, t, weights=w, N=6).value, rel=1e-12)
    # before approximation the raw weights are used
    raw = estimate_cds_generalized(s, prof, 3, design=d, variance=False).value
    assert raw == pytest.approx(estimate_cds_generalized(s, prof, 3, weights=[3, 2, 2], N=6).value)


def test_degree_sum_linearity(g6_pendant):
    from egoclique.designs import node_inclusion_prob, joint_inclusion_prob
    d = uis(7, 3)
    s, prof = sample_of(g6_pendant, [1, 3, 7], d)
    dj = np.array([p.degree(3) for p in prof], dtype=float)
    p = node_inclusion_prob(d, 0)
    D_hat = float(np.sum(dj / p))
    assert estimate_cds(s, prof, 3).value == pytest.approx(D_hat / 3, abs=1e-12)
    # plain double sum of the unbiased variance form for D, then divide by i^2
    pjk = joint_inclusion_prob(d, 0, 1)
    var_D = sum((1 / p**2 - 1 / p) * x**2 for x in dj)
    var_D += sum((1 / p**2 - 1 / pjk) * dj[a] * dj[b] for a in range(3) for b in range(3) if a != b)
    assert estimate_var_ht(s, prof, 3) == pytest.approx(var_D / 9, abs=1e-12)
