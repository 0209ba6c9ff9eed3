"""Lattices: exact integer arithmetic, tiling, enumeration, decay sums."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import stratwave as sw
from stratwave.sampling import column_decay_certificate, sampling_from_json, sampling_to_json

lat_int = st.integers(-50, 50)


def lattices():
    return [
        sw.preset_sampling_set(sw.abelian(1), 1.0),
        sw.preset_sampling_set(sw.abelian(2), 0.5),
        sw.preset_sampling_set(sw.heisenberg(1), 1.0),
        sw.preset_sampling_set(sw.heisenberg(1), 0.5),
    ]


@pytest.mark.parametrize("gs", lattices(), ids=lambda gs: f"{gs.group.kind}{gs.group.dim}b{gs.beta}")
class TestLatticeArithmetic:
    @settings(max_examples=50, deadline=None)
    @given(data=st.data())
    def test_lat_mul_matches_group_law(self, gs, data):
        dim = gs.group.dim
        a = tuple(data.draw(st.lists(lat_int, min_size=dim, max_size=dim)))
        b = tuple(data.draw(st.lists(lat_int, min_size=dim, max_size=dim)))
        left = gs.decode(gs.lat_mul(a, b))
        right = sw.multiply(gs.group, gs.decode(a), gs.decode(b))
        assert np.max(np.abs(left - right)) <= 1e-9

    @settings(max_examples=30, deadline=None)
    @given(data=st.data())
    def test_lat_inv(self, gs, data):
        dim = gs.group.dim
        a = tuple(data.draw(st.lists(lat_int, min_size=dim, max_size=dim)))
        assert gs.lat_mul(a, gs.lat_inv(a)) == (0,) * dim
        assert np.allclose(gs.decode(gs.lat_inv(a)),
                           sw.inverse(gs.group, gs.decode(a)), atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(data=st.data(), j=st.integers(0, 6))
    def test_lat_dilate_matches_group_dilation(self, gs, data, j):
        dim = gs.group.dim
        a = tuple(data.draw(st.lists(lat_int, min_size=dim, max_size=dim)))
        left = gs.decode(gs.lat_dilate(a, j))
        right = sw.dilate(gs.group, 2.0**j, gs.decode(a))
        assert np.max(np.abs(left - right)) <= 1e-9 * max(1.0, np.max(np.abs(right)))

    @settings(max_examples=30, deadline=None)
    @given(data=st.data())
    def test_encode_decode_roundtrip(self, gs, data):
        dim = gs.group.dim
        a = tuple(data.draw(st.lists(lat_int, min_size=dim, max_size=dim)))
        assert gs.encode(gs.decode(a)) == a

    def test_negative_dilation_rejected(self, gs):
        with pytest.raises(ValueError):
            gs.lat_dilate((0,) * gs.group.dim, -1)


def test_encode_off_lattice_raises():
    gs = sw.preset_sampling_set(sw.abelian(1), 1.0)
    with pytest.raises(ValueError):
        gs.encode(np.array([0.5]))


def test_enumerate_indices_counts():
    # [DERIVED] (beta Z) n [0, 1) at beta = 0.5 has 2 points; after a
    # dilation by 2^{-1} the spacing halves so the count doubles
    gs = sw.preset_sampling_set(sw.abelian(1), 0.5)
    assert len(sw.enumerate_indices(gs, 0, [(0.0, 1.0)])) == 2
    assert len(sw.enumerate_indices(gs, 1, [(0.0, 1.0)])) == 4
    assert sw.enumerate_indices(gs, 0, [(0.0, 0.0)]) == []


def test_enumerate_indices_heisenberg_count():
    # [DERIVED] at beta = 1 the decoded spacings are (1, 1, 1/2), so the
    # unit cube holds 1 * 1 * 2 points at scale 0
    gs = sw.preset_sampling_set(sw.heisenberg(1), 1.0)
    idx = sw.enumerate_indices(gs, 0, [(0.0, 1.0)] * 3)
    assert len(idx) == 2


def test_enumeration_is_lexicographic():
    gs = sw.preset_sampling_set(sw.abelian(2), 1.0)
    idx = sw.enumerate_indices(gs, 0, [(0.0, 2.0)] * 2)
    gammas = [i.gamma for i in idx]
    assert gammas == sorted(gammas)


@pytest.mark.parametrize("gs", lattices(), ids=lambda gs: f"{gs.group.kind}{gs.group.dim}b{gs.beta}")
def test_tiling_exact(gs):
    box = [(-1.5, 1.5)] * gs.group.dim
    rep = sw.verify_tiling(gs, box, grid_res=6)
    assert rep.max_overlap_fraction == 0.0
    assert rep.uncovered_fraction == 0.0


def test_tiling_detects_bad_tile():
    gs = sw.preset_sampling_set(sw.abelian(1), 1.0)
    too_wide = ((0.0, 2.0),)
    rep = sw.verify_tiling(gs, [(-1.5, 1.5)], grid_res=8, tile=too_wide)
    assert rep.max_overlap_fraction > 0.0
    too_narrow = ((0.0, 0.5),)
    rep = sw.verify_tiling(gs, [(-1.5, 1.5)], grid_res=8, tile=too_narrow)
    assert rep.uncovered_fraction > 0.0


def test_decay_certificate_abelian_oracle():
    # [DERIVED] at eta = j = 0, x = 0, n = 2 on (Z, +):
    # sum_gamma (1 + |gamma|)^{-2} = 1 + 2 (pi^2/6 - 1) = pi^2/3 - 1
    gs = sw.preset_sampling_set(sw.abelian(1), 1.0)
    oracle = np.pi**2 / 3.0 - 1.0
    value, details = column_decay_certificate(gs, 0, 0, 2, np.zeros(1),
                                              return_details=True)
    # the shell sum truncates with a ~1/cut_distance tail that the integral
    # estimate recovers, so only the total tracks the oracle closely
    assert details["partial_sum"] <= oracle
    assert oracle - details["partial_sum"] <= 2e-3
    assert value == pytest.approx(oracle, rel=2e-3)


def test_decay_certificate_uniformity():
    # the certified value must stay bounded uniformly over (eta, j, x);
    # a large decay exponent keeps the shell sums short, since the central
    # direction of the rescaled lattice only separates like sqrt(radius)
    gs = sw.preset_sampling_set(sw.heisenberg(1), 1.0)
    n = 16  # > Q = 4
    values = []
    for eta, j in [(0, 0), (0, 1), (1, 2), (2, 2)]:
        for x in (np.zeros(3), np.array([0.3, -0.2, 0.1])):
            values.append(column_decay_certificate(gs, eta, j, n, x,
                                                   rel_tail=1e-8, max_shells=60))
    assert all(np.isfinite(values))
    assert max(values) <= 50.0 * min(values) + 50.0


def test_decay_certificate_divergence_warning():
    gs = sw.preset_sampling_set(sw.abelian(1), 1.0)
    with pytest.warns(UserWarning, match="diverge"):
        column_decay_certificate(gs, 0, 0, 1, np.zeros(1), max_shells=5)


def test_decay_certificate_domain():
    gs = sw.preset_sampling_set(sw.abelian(1), 1.0)
    with pytest.raises(ValueError):
        column_decay_certificate(gs, 3, 1, 4, np.zeros(1))


def test_sampling_json_roundtrip():
    for gs in lattices():
        gs2 = sampling_from_json(sampling_to_json(gs))
        assert gs2.beta == gs.beta
        assert gs2.tile == gs.tile
        assert gs2.group.kind == gs.group.kind
