from fractions import Fraction

import pytest

from qtwist import rmatrix as rm
from qtwist.exactalg import VARS
from qtwist.tensor import P12


def test_twist_of_trivial_r_matrix_matches_closed_form():
    chk = rm.verify_twist()
    assert chk.ok, chk.detail


@pytest.mark.parametrize("family", rm.FAMILIES)
def test_regularity_at_equal_arguments(family):
    chk = rm.verify_rzz(family)
    assert chk.ok, chk.detail


@pytest.mark.parametrize("family", rm.FAMILIES)
def test_ybe_sampled(family):
    chk = rm.verify_YBE(family, "sampled", trials=20, seed=1)
    assert chk.ok, chk.detail


def test_ybe_symbolic_trig():
    chk = rm.verify_YBE("trig", "symbolic")
    assert chk.ok, chk.detail


def test_ybe_symbolic_undeformed_trig():
    chk = rm.verify_YBE("trig", "symbolic", params={"a": 0, "b": 0})
    assert chk.ok, chk.detail


def test_ybe_detects_corrupted_entry():
    def corrupted(fam, s1, s2):
        m = rm.build_RF(fam, s1, s2).copy()
        m.rows[0][3] = m.rows[0][3] + 1
        return m

    chk = rm.verify_YBE("trig", "sampled", trials=5, seed=3, builder=corrupted)
    assert not chk.ok


def test_ybe_rejects_sigma_z_variant_of_yangian_matrix():
    chk = rm.verify_YBE("yang", "sampled", trials=5, seed=0, builder=rm.sigma_z_yang_variant)
    assert not chk.ok


def test_yang_is_q_to_one_limit_of_rat():
    u1, u2 = VARS.vars("u1", "u2")
    fam = rm.RFamily("rat", {"q": 1, "eta": 2, "xi": Fraction(1, 3)})
    yang = rm.RFamily("yang", {"eta": 2, "xi": Fraction(1, 3)})
    assert rm.build_RF(fam, u1, u2) == rm.build_RF(yang, u1, u2)


def test_yang_rejects_deformed_q():
    with pytest.raises(ValueError):
        rm.RFamily("yang", {"q": 2})


def test_float_parameters_rejected():
    with pytest.raises(TypeError):
        rm.RFamily("trig", {"q": 0.5})


def test_regularity_numeric():
    fam = rm.RFamily("trig", {"q": 3, "a": 1, "b": -2})
    assert rm.build_RF(fam, Fraction(5, 2), Fraction(5, 2)) == P12


def test_normalization_factor():
    lam, ok = rm.normalization_factor()
    q = VARS.var("q")
    assert ok
    assert lam == (q ** 2 + 1) / (q + 1)


def test_cocycle_symbolic():
    chk = rm.verify_cocycle_rep()
    assert chk.ok, chk.detail


def test_cocycle_sampled():
    chk = rm.verify_cocycle_sampled(10, seed=0)
    assert chk.ok, chk.detail


def test_cocycle_fails_without_normalization():
    # the unscaled universal element does not reproduce the closed-form twist
    q, a, b, z2 = VARS.vars("q", "a", "b", "z2")
    lam, _ = rm.normalization_factor()
    F = rm.build_F_trig(z2, a, b, q)
    assert rm.universal_twist_two_legs(a / lam, b / lam, z2, q) == F
    assert not rm.universal_twist_two_legs(a, b, z2, q) == F


@pytest.mark.parametrize("kind", rm.CLASSICAL_KINDS)
def test_cybe(kind):
    chk = rm.verify_CYBE(kind)
    assert chk.ok, chk.detail


def test_cybe_negative_control():
    def broken(i, j):
        z = VARS.var(f"z{i}"), VARS.var(f"z{j}")
        return rm.build_classical("ab", *z) + rm.kron(rm.SIGMA_Z, rm.SIGMA_PLUS)

    assert rm.cybe_residual(broken).first_nonzero() is not None


def test_gauge_exactly_one_direction():
    fwd, bwd = rm.gauge_conjugations()
    assert fwd and not bwd
    chk = rm.verify_gauge_equiv()
    assert chk.ok and "r_ab to r~_ab" in chk.detail


def test_gauge_trivial_at_b_zero():
    chk = rm.verify_gauge_equiv(b=0)
    assert chk.ok and chk.data["forward"] and chk.data["backward"]
