import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from helpers import absorb_third_sender
from scipy.spatial import HalfspaceIntersection

from pbclab.coding import channel_output
from pbclab.mac import (
    CqMac,
    MacCodeSpec,
    boundary_crossing,
    collision_region,
    convex_hull_union,
    derandomize_cq_mac,
    hull_contains,
    mac_bound_terms,
    mac_divergence_identities,
    mac_error_exponent,
    mac_one_shot_bound,
    mi_region,
    nonempty_subsets,
    renyi2_region,
    simulate_mac,
)
from pbclab.operators import DensityOperator
from pbclab.p2p import P2PCodeSpec, error_exponent_lower, simulate_p2p
from pbclab.states import basis_state, random_channel, random_density, random_pure_state

seeds = st.integers(0, 2**32 - 1)


def _two_sender(rng):
    th = random_pure_state(4, rng, dims=(2, 2))
    ga = random_pure_state(4, rng, dims=(2, 2))
    ch = random_channel(4, 2, rng, in_dims=(2, 2))
    return th, ga, ch


def _omega(rng, k=2):
    res = [random_density(4, rng, dims=(2, 2)) for _ in range(k)]
    ch = random_channel(2**k, 2, rng, in_dims=(2,) * k)
    m, dims = channel_output(res, ch)
    return DensityOperator(m, tuple(dims))


def test_nonempty_subsets():
    assert len(nonempty_subsets(3)) == 7
    assert nonempty_subsets(2) == [(0,), (1,), (0, 1)]


def test_single_sender_reduces_to_point_to_point():
    rng = np.random.default_rng(61)
    th = random_density(4, rng, dims=(2, 2))
    ch = random_channel(2, 2, rng)
    for m in (2, 3):
        mac = simulate_mac(MacCodeSpec((th,), ch, (m,)))
        p2p = simulate_p2p(P2PCodeSpec(th, ch, m))
        assert mac.exact_error == pytest.approx(p2p.exact_error, abs=1e-12)
        assert mac.bound == pytest.approx(p2p.bound, abs=1e-12)


def test_three_sender_bound_reduces_when_third_size_is_one():
    rng = np.random.default_rng(62)
    res = [random_density(4, rng, dims=(2, 2)) for _ in range(3)]
    ch = random_channel(8, 2, rng, in_dims=(2, 2, 2))
    spec3 = MacCodeSpec(tuple(res), ch, (2, 3, 1))
    terms = mac_bound_terms(spec3)
    assert len(terms) == 7
    # Use one fixed test for both forms.
    t_op = simulate_mac(spec3).test
    spec3 = MacCodeSpec(tuple(res), ch, (2, 3, 1), test=t_op)
    spec2 = MacCodeSpec(tuple(res[:2]), absorb_third_sender(ch, res[2].matrix), (2, 3), test=t_op)
    assert mac_one_shot_bound(spec3) == pytest.approx(mac_one_shot_bound(spec2), abs=1e-12)


def test_bound_counts_every_subset():
    rng = np.random.default_rng(63)
    th, ga, ch = _two_sender(rng)
    spec = MacCodeSpec((th, ga), ch, (2, 3))
    terms = mac_bound_terms(spec)
    omega, _ = channel_output([th, ga], ch)
    t_op = simulate_mac(spec).test
    miss = 1 - np.real(np.trace(t_op @ omega))
    expect = 2 * miss + 4 * (1 * terms[(0,)] + 2 * terms[(1,)] + 2 * terms[(0, 1)])
    assert mac_one_shot_bound(spec) == pytest.approx(expect, abs=1e-12)


@settings(max_examples=8, deadline=None)
@given(seed=seeds, c=st.sampled_from([0.5, 1.0, 2.0]))
def test_simultaneous_decoder_below_bound(seed, c):
    rng = np.random.default_rng(seed)
    th, ga, ch = _two_sender(rng)
    perf = simulate_mac(MacCodeSpec((th, ga), ch, (2, 2), c=c))
    assert perf.exact_error <= perf.bound + 1e-9
    assert perf.message_spread < 1e-9


def _orthogonal_cq():
    outs = {(x, y): basis_state(4, 2 * x + y).matrix for x in range(2) for y in range(2)}
    return CqMac([0.5, 0.5], [0.5, 0.5], outs)


def test_orthogonal_cq_mac_collision_formula():
    # Success for a codeword pair repeated k times among the L M pairs is 1/k.
    cq = _orthogonal_cq()
    res = derandomize_cq_mac(cq, 2, 2, tests="support")
    expect = 0.0
    for xs in itertools.product(range(2), repeat=2):
        for ys in itertools.product(range(2), repeat=2):
            pairs = [(x, y) for x in xs for y in ys]
            err = np.mean([1 - 1 / pairs.count(p) for p in pairs])
            expect += err / 16
    assert res.ensemble_average == pytest.approx(expect, abs=1e-12)
    assert res.avg_error == pytest.approx(0, abs=1e-12)
    assert res.exhaustive and res.searched == 16


@settings(max_examples=10, deadline=None)
@given(seed=seeds)
def test_derandomized_codebook_beats_average(seed):
    rng = np.random.default_rng(seed)
    outs = {(x, y): random_density(2, rng, rank=1).matrix for x in range(2) for y in range(2)}
    cq = CqMac(rng.dirichlet([2, 2]), rng.dirichlet([2, 2]), outs)
    for kind in ("composite", "support"):
        res = derandomize_cq_mac(cq, 2, 2, tests=kind)
        assert res.avg_error <= res.ensemble_average + 1e-9


def test_derandomize_samples_when_over_budget():
    res = derandomize_cq_mac(_orthogonal_cq(), 2, 2, search_budget=5, tests="support", seed=3)
    assert not res.exhaustive and res.searched == 5
    again = derandomize_cq_mac(_orthogonal_cq(), 2, 2, search_budget=5, tests="support", seed=3)
    assert again.record() == res.record()


def test_cq_mac_validation():
    with pytest.raises(ValueError, match="missing"):
        CqMac([1.0], [0.5, 0.5], {(0, 0): np.eye(2) / 2})
    with pytest.raises(ValueError):
        CqMac([0.7], [1.0], {(0, 0): np.eye(2) / 2})


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_region_bounds_below_mutual_information(seed):
    rng = np.random.default_rng(seed)
    omega = _omega(rng)
    mi = mi_region(omega, 2)
    for region in (renyi2_region(omega, 2), collision_region(omega, 2)):
        for c in region.constraints:
            assert c.bound <= mi.bound(c.subset) + 1e-9


def test_single_sender_regions_agree():
    rng = np.random.default_rng(64)
    omega = _omega(rng, k=1)
    assert renyi2_region(omega, 1).bound((0,)) == pytest.approx(collision_region(omega, 1).bound((0,)), abs=1e-10)


def test_renyi2_labels_record_alternate_pairing():
    rng = np.random.default_rng(65)
    region = renyi2_region(_omega(rng), 2)
    assert "[alternate labeling: R2]" in region.constraints[0].label
    assert "alternate" not in region.constraints[2].label


def test_mi_region_conjecture_note():
    rng = np.random.default_rng(66)
    assert "conjectured" in mi_region(_omega(rng, k=3), 3).note
    assert mi_region(_omega(rng, k=2), 2).note == ""


def test_vertices_match_halfspace_intersection():
    rng = np.random.default_rng(67)
    region = mi_region(_omega(rng), 2)
    a, b, c = region.bound((0,)), region.bound((1,)), region.bound((0, 1))
    halfspaces = np.array([[-1, 0, 0], [0, -1, 0], [1, 0, -a], [0, 1, -b], [1, 1, -c]], dtype=float)
    interior = np.array([min(a, c) / 4, min(b, c) / 4])
    ref = HalfspaceIntersection(halfspaces, interior).intersections
    ref = np.unique(np.round(ref, 10), axis=0)
    got = np.unique(np.round(region.vertices_2d(), 10), axis=0)
    np.testing.assert_allclose(got, ref, atol=1e-9)


def test_hull_contains_every_region():
    rng = np.random.default_rng(68)
    omega = _omega(rng)
    regions = [renyi2_region(omega, 2), collision_region(omega, 2), mi_region(omega, 2)]
    hull = convex_hull_union(regions)
    for r in regions:
        for v in r.vertices_2d():
            assert hull_contains(hull, v)
    assert not hull_contains(hull, hull.max(axis=0) + 1.0)


def test_divergence_identities_and_crossing():
    rng = np.random.default_rng(69)
    th, ga, ch = _two_sender(rng)
    chk = mac_divergence_identities(th, ga, ch, 0.3, 0.2)
    assert max(chk.residuals) <= 1e-9
    bc = boundary_crossing(th, ga, ch, (1.0, 0.5))
    assert bc.gap <= 1e-4


def test_mac_exponent_single_sender_matches_p2p():
    rng = np.random.default_rng(70)
    th = random_density(4, rng, dims=(2, 2))
    ch = random_channel(2, 2, rng)
    m, dims = channel_output([th], ch)
    e = mac_error_exponent(DensityOperator(m, tuple(dims)), [0.2])
    p = error_exponent_lower(th, ch, rate=0.2, iid=True)
    assert e.value == pytest.approx(p.value, abs=1e-10)
    assert e.label == "conditional exponent"


def test_mac_exponent_is_min_over_subsets():
    rng = np.random.default_rng(71)
    e = mac_error_exponent(_omega(rng), [0.1, 0.1])
    assert set(e.terms) == {(1,), (2,), (1, 2)}
    assert e.value == min(e.terms.values())
