from fractions import Fraction

import pytest

from qtwist import chain as ch
from qtwist.report import RationalSampler
from qtwist.tensor import E12, E21, P12, SIGMA_Z, kron

F = Fraction


def trig_spec(N=3):
    return ch.ChainSpec(N, "trig", {"q": 3, "a": 1, "b": F(-1, 2)}, F(2))


def rat_spec(N=3):
    return ch.ChainSpec(N, "rat", {"q": 2, "eta": 1, "xi": F(1, 3)}, F(5))


def yang_spec(N=3):
    return ch.ChainSpec(N, "yang", {"eta": 1, "xi": 1}, F(2))


SPECS = [trig_spec, rat_spec, yang_spec]


def test_site_embedding_orders_legs():
    sz1 = ch.site_embed(SIGMA_Z, 1, 2)
    assert sz1.to_fractions() == [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]


def test_periodic_bond_wraps():
    wrap = ch.bond_embed(P12, 3, 3)  # bond (3, 1)
    assert wrap == ch.embed_local(P12, (2, 0), 3)
    shift = ch.shift_operator(3)
    total = ch.bond_embed(P12, 1, 3) + ch.bond_embed(P12, 2, 3) + wrap
    assert (shift @ total - total @ shift).is_zero()
    assert not (shift @ wrap - wrap @ shift).is_zero()


def test_apply_local_matches_embedding():
    M = ch.bond_embed(kron(E12, E21), 2, 4)
    op = kron(SIGMA_Z, E12)
    assert ch.apply_local(op, (0, 2), M, 4) == ch.embed_local(op, (0, 2), 4) @ M


@pytest.mark.parametrize("make", SPECS)
@pytest.mark.parametrize("N", [2, 3, 5])
def test_transfer_matrices_commute(make, N):
    spec = make(N)
    chk = ch.verify_transfer_commute(spec, F(7, 3), F(-4, 5))
    assert chk.ok, chk.detail


@pytest.mark.parametrize("make", SPECS)
def test_hamiltonian_commutes_with_transfer(make):
    chk = ch.verify_h_commutes_t(make(4), F(3, 7))
    assert chk.ok, chk.detail


@pytest.mark.parametrize("make", SPECS)
def test_hamiltonian_routes_agree(make):
    spec = make(3)
    chk = ch.compare_hamiltonians(spec)
    assert chk.ok, chk.detail
    chk = ch.verify_literal_route(spec)
    assert chk.ok, chk.detail


@pytest.mark.parametrize("make", SPECS)
def test_uncorrected_coefficients_fail(make):
    chk = ch.compare_hamiltonians(make(3), uncorrected=True)
    assert not chk.ok


def test_constant_per_site_stable():
    cs = [ch.compare_hamiltonians(trig_spec(N)).data["c"] / N for N in (2, 3, 4)]
    assert cs[0] == cs[1] == cs[2] == F(-5, 6)


@pytest.mark.parametrize("make", SPECS)
def test_hamiltonian_symmetries(make):
    spec = make(4)
    H = ch.hamiltonian_from_transfer(spec)
    assert ch.verify_translation(H, 4).ok
    assert ch.verify_charge_triangular(H, 4).ok


@pytest.mark.parametrize("make", SPECS)
def test_isospectral(make):
    chk = ch.verify_isospectral(make(4))
    assert chk.ok, chk.detail
    assert chk.data["exact"]


def test_undeformed_is_diagonalizable():
    for make in SPECS:
        rep = ch.jordan_report(make(4).undeformed())
        assert rep.squarefree


def test_deformed_draw_has_jordan_block():
    rep = ch.jordan_report(ch.ChainSpec(3, "yang", {"eta": 1, "xi": 1}, F(2)))
    assert not rep.squarefree
    assert rep.multiplicities[F(3, 2)] == (4, 2)


def test_singular_points_rejected():
    with pytest.raises(ch.SingularPoint):
        ch.ChainSpec(3, "trig", {"q": 1, "a": 1, "b": 1}, F(2))
    with pytest.raises(ch.SingularPoint):
        ch.ChainSpec(3, "rat", {"q": 0, "eta": 1, "xi": 1}, F(2))
    spec = ch.ChainSpec(3, "trig", {"q": 2, "a": 1, "b": 1}, F(0))
    with pytest.raises(ch.SingularPoint, match="q\\^-1\\*z1 - q\\*z2"):
        ch.r_matrix_at(spec, F(0))


def test_site_count_bounds():
    with pytest.raises(ValueError):
        trig_spec(1)
    with pytest.raises(ValueError):
        trig_spec(ch.MAX_SITES + 1)


def test_random_spec_is_reproducible():
    a = ch.random_spec("rat", 3, RationalSampler(11))
    b = ch.random_spec("rat", 3, RationalSampler(11))
    assert a == b
