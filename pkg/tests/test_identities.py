import pytest

from qtwist.identities import (
    CATALOGUES, EXACT_IDS, UnknownIdentity, _Ctx, _params, _product, build_sides,
    verify_identity,
)
from qtwist.ncseries import q_power


def runs():
    for ident in CATALOGUES["all"]:
        if ident in EXACT_IDS:
            for n in range(1, 6):
                yield ident, n
        else:
            yield ident, None


@pytest.mark.parametrize("ident,n", list(runs()))
def test_catalogue_entry_holds(ident, n):
    res = verify_identity(ident, order=6, n=n)
    assert res.ok, res.detail


@pytest.mark.parametrize("ident", ["Q12", "Q12W"])
def test_symbolic_exponent_form(ident):
    res = verify_identity(ident, order=6)
    assert res.ok, res.detail


def test_unknown_identity():
    with pytest.raises(UnknownIdentity):
        verify_identity("Q99")


def test_integer_exponent_required():
    with pytest.raises(ValueError):
        build_sides("Q13")


def test_numeric_binding_still_passes():
    from fractions import Fraction
    res = verify_identity("Q1", order=4, bindings={"q": Fraction(3), "p": Fraction(1, 2)})
    assert res.ok, res.detail


def test_exchange_with_vu_coefficient_fails():
    # putting (q-1) on vu instead of uv breaks the exponential exchange law at degree 2
    c = _Ctx("q-plane", 6, _params(None))
    u, v = c.g("u"), c.g("v")
    q = c.P["q"]
    lhs = c.qexp(v) * c.qexp(u)
    ok, word = lhs.equals(c.qexp(u + v + (v * u) * (q - 1)))
    assert not ok
    assert len(word) == 2
    assert lhs == c.qexp(u + v + (u * v) * (q - 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_three_variable_factorization_with_shifted_exponent_fails(n):
    c = _Ctx("q-space", n + 2, _params(None))
    u, v, w = c.g("u"), c.g("v"), c.g("w")
    q = c.P["q"]
    tail = 1 - v / q - u / q ** (n + 1)
    lhs = q_power(u + v / q + w / q, q ** n, q, c.order) * tail
    bad = _product(
        [1 - v / q ** (n + 1) - u / q]
        + [1 - v / q ** (n + 2) - u / q ** k - w / q ** k for k in range(2, n + 2)],
        c.one())
    assert not lhs == bad
