from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lindecomp.actions import FlatSpace, LeftMul, RightMul, commute_check, flatten
from lindecomp.algebra import AlgMatrix, algebra_from_name
from lindecomp.attacks import ATTACKS, PublicData
from lindecomp.errors import ParameterRejection
from lindecomp.protocols import (
    CATALOG,
    TAGS,
    ProtocolInstance,
    commuting_subgroup_sampler,
    hkks_direct,
    make_params,
    simulate,
)


def test_ten_schemes_in_stable_order():
    assert TAGS == (
        "ko_lee",
        "wang_cao",
        "hurley",
        "stickel",
        "alvarez",
        "shpilrain_ushakov",
        "romanczuk",
        "mahalanobis1",
        "mahalanobis2",
        "hkks",
    )


@pytest.mark.parametrize("tag", TAGS)
def test_same_seed_same_transcript(tag):
    a = simulate(ProtocolInstance(tag, {}, (4, 2)))
    b = simulate(ProtocolInstance(tag, {}, (4, 2)))
    assert json.dumps(a.to_json(emit_private=True)) == json.dumps(b.to_json(emit_private=True))
    c = simulate(ProtocolInstance(tag, {}, (4, 3)))
    assert not np.array_equal(a.honest_key, c.honest_key) or a.to_json() != c.to_json()


@pytest.mark.parametrize("tag", TAGS)
def test_public_view_is_well_formed(tag):
    tr = simulate(ProtocolInstance(tag, {}, 1))
    assert tr.public_view.protocol_tag == tag
    assert tr.public_view.check()
    assert tr.honest_key.shape == (tr.key_space.d,)


# -- public / private separation --------------------------------------------


def _private_arrays(private):
    for value in private.values():
        if isinstance(value, AlgMatrix):
            yield value.flat()
        elif isinstance(value, np.ndarray):
            yield value.reshape(-1)


@pytest.mark.parametrize("tag", TAGS)
def test_public_json_has_no_private_fields(tag):
    tr = simulate(ProtocolInstance(tag, {}, 7))
    doc = tr.public_view.to_json()
    assert set(doc) == {"protocol", "space", "U", "W", "observed", "params"}
    text = json.dumps(doc)
    for name in tr.private_view:
        assert name not in doc["observed"]
        assert name not in doc["params"]
    # no private matrix or vector is published verbatim
    public_vectors = [np.asarray(v).reshape(-1).tolist() for v in doc["observed"].values()]
    for arr in _private_arrays(tr.private_view):
        assert arr.tolist() not in public_vectors
    assert "private" not in text


@pytest.mark.parametrize("tag", TAGS)
def test_attack_on_json_round_trip(tag):
    tr = simulate(ProtocolInstance(tag, {}, 8))
    pub = PublicData.from_json(json.loads(json.dumps(tr.public_view.to_json())))
    assert np.array_equal(ATTACKS[tag](pub).key, tr.honest_key)


def test_transcript_json_private_flag():
    tr = simulate(ProtocolInstance("stickel", {}, 2))
    assert "private" not in tr.to_json()
    assert set(tr.to_json(emit_private=True)["private"]) == {"k", "l", "r", "s"}


# -- scheme examples --------------------------------------------------------


def test_stickel_smallest_exponents():
    tr = simulate(ProtocolInstance("stickel", dict(k=1, r=1, l=1, s=1), 3))
    g, f = tr.public_view.U[0].matrix, tr.public_view.U[1].matrix
    assert g @ f != f @ g
    assert np.array_equal(tr.honest_key, flatten(g @ g @ f @ f))


def test_alvarez_unit_exponents():
    tr = simulate(ProtocolInstance("alvarez", dict(k1=1, k2=1, l1=1, l2=1), 3))
    M1, M2 = tr.public_view.U[0].matrix, tr.public_view.U[1].matrix
    n, m = tr.public_view.params["n"], tr.public_view.params["m"]
    full = M1 @ M1 @ M2 @ M2
    assert np.array_equal(tr.honest_key, full.block(slice(0, n), slice(n, n + m)).flat())


def test_hkks_unit_exponents():
    tr = simulate(ProtocolInstance("hkks", dict(m=1, k=1), 3))
    space = tr.public_view.space
    g = AlgMatrix(space.algebra, tr.public_view.observed["g"].reshape(2, 2, 3))
    H = tr.private_view["H"]
    assert np.array_equal(tr.honest_key, flatten(H @ g @ H.inverse() @ g))
    assert np.array_equal(tr.honest_key, flatten(hkks_direct(g, H, H.inverse(), 2)))


@pytest.mark.parametrize("seed", range(3))
def test_wang_cao_key_form(seed):
    tr = simulate(ProtocolInstance("wang_cao", {}, seed))
    pv = tr.private_view
    x = tr.public_view.U[0].matrix
    space = tr.public_view.space
    g = AlgMatrix(space.algebra, tr.public_view.observed["g"].reshape(space.rows, space.cols, space.r))
    e = pv["s"] + pv["t"]
    assert np.array_equal(tr.honest_key, flatten(x**e @ g @ x.inverse() ** e))


@pytest.mark.parametrize("seed", range(3))
def test_romanczuk_key_form(seed):
    tr = simulate(ProtocolInstance("romanczuk", {}, seed))
    C, D = tr.public_view.U[0].matrix, tr.public_view.U[1].matrix
    alg, n = C.algebra, C.n

    def poly(coeffs):
        out = AlgMatrix.zeros(alg, n)
        for key, c in coeffs.items():
            i, j = (int(t) for t in key.split(","))
            out = out + (C**i @ D**j).scale(c)
        return out

    g = AlgMatrix(alg, tr.public_view.observed["g"].reshape(1, n, 1))
    P, Q = poly(tr.private_view["P"]), poly(tr.private_view["Q"])
    assert np.array_equal(tr.honest_key, flatten(g @ Q @ P))
    assert P @ Q == Q @ P


def test_mahalanobis_keys():
    tr = simulate(ProtocolInstance("mahalanobis1", {}, 1))
    pv = tr.private_view
    space = tr.public_view.space
    g = AlgMatrix(space.algebra, tr.public_view.observed["g"].reshape(3, 3, 1))
    phi, psi = pv["phi"], pv["psi"]
    assert np.array_equal(tr.honest_key, flatten(phi @ psi @ g @ psi.inverse() @ phi.inverse()))

    tr = simulate(ProtocolInstance("mahalanobis2", {}, 1))
    pv = tr.private_view
    phi = pv["phi"]
    g_phi = AlgMatrix(space.algebra, tr.public_view.observed["g_phi"].reshape(3, 3, 1))
    g = phi.inverse() @ g_phi @ phi
    assert np.array_equal(tr.honest_key, flatten(pv["xi"] @ g @ pv["xi"].inverse()))


def test_ko_lee_with_group_algebra_entries():
    tr = simulate(ProtocolInstance("ko_lee", {"algebra": "symmetric:3", "n": 2}, 0))
    assert tr.public_view.space.d == 24
    assert np.array_equal(ATTACKS["ko_lee"](tr.public_view).key, tr.honest_key)


def test_hkks_large_platform_shape():
    tr = simulate(ProtocolInstance("hkks", {"large": True, "m": 2, "k": 3}, 0))
    space = tr.public_view.space
    assert (space.n, space.r, space.d) == (3, 60, 540)


# -- samplers and parameters ------------------------------------------------


@pytest.mark.parametrize("style", ["polynomial_in_matrix", "center_scalars", "block_diagonal_split"])
@pytest.mark.parametrize("p", [5, 7])
def test_sampler_families_commute(style, p):
    space = FlatSpace(algebra_from_name(p, "trivial"), 4)
    U, W = commuting_subgroup_sampler(space, style, 3, np.random.default_rng(p))
    for u in U:
        for w in W:
            assert u @ w == w @ u
    assert commute_check([LeftMul(u, space) for u in U], [LeftMul(w, space) for w in W])
    # left multiplications commute with right ones regardless of the family
    assert commute_check([LeftMul(u, space) for u in U], [RightMul(u, space) for u in U])


def test_center_scalars_are_scalar():
    space = FlatSpace(algebra_from_name(5, "trivial"), 3)
    U, _ = commuting_subgroup_sampler(space, "center_scalars", 2, np.random.default_rng(0))
    for u in U:
        d = u.data[:, :, 0]
        assert np.array_equal(d, d[0, 0] * np.eye(3, dtype=np.int64))


def test_block_diagonal_split_f5():
    space = FlatSpace(algebra_from_name(5, "trivial"), 4)
    U, W = commuting_subgroup_sampler(space, "block_diagonal_split", 2, np.random.default_rng(1))
    for u in U:
        assert not u.data[:2, 2:].any() and not u.data[2:, :2].any()
        assert np.array_equal(u.data[2:, 2:, 0], np.eye(2, dtype=np.int64))
    for w in W:
        assert np.array_equal(w.data[:2, :2, 0], np.eye(2, dtype=np.int64))
    assert commute_check([LeftMul(u) for u in U], [LeftMul(w) for w in W])


def test_unknown_sampler_style():
    space = FlatSpace(algebra_from_name(5, "trivial"), 2)
    with pytest.raises(ValueError):
        commuting_subgroup_sampler(space, "bogus", 1, np.random.default_rng(0))


def test_make_params():
    P = make_params("stickel", {"k": "4", "n": 2})
    assert (P.k, P.n) == (4, 2)
    assert make_params("hkks", {"large": "true"}).large is True
    with pytest.raises(ValueError):
        make_params("stickel", {"bogus": 1})
    with pytest.raises(ValueError):
        ProtocolInstance("nope")
    assert set(CATALOG) == set(TAGS)


def test_impossible_parameters_are_rejected():
    with pytest.raises(ParameterRejection):
        simulate(ProtocolInstance("stickel", {"k": 100000}, 0))


@given(st.sampled_from(TAGS), st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_honest_parties_agree_and_attack_recovers(tag, seed):
    tr = simulate(ProtocolInstance(tag, {}, seed))
    assert np.array_equal(ATTACKS[tag](tr.public_view).key, tr.honest_key)
