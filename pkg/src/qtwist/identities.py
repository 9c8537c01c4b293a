"""Catalogue of q-power / q-exponential identities over q-commuting variables.

Every entry builds both sides as :class:`NCSeries` and compares them
coefficient-wise.  Formal exponents enter through ``p = q^a``, ``r = q^b``,
``s = q^c``; the Yangian entries use the exponents ``alpha, beta, gamma``
directly.  Entries marked exact are finite polynomials and are compared without
truncation loss, at integer exponent ``n``.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import VARS, RatFunc
from .ncseries import (
    PRESENTATIONS, NCSeries, apply_substitution, ordinary_power, q_exp, q_power,
    scale_variable, series_inverse,
)

CATALOGUES = {
    "q-core": ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7", "Q9", "Q10", "Q11"),
    "proof-steps": ("Q12", "Q12W", "Q13", "Q15", "Q15W"),
    "rational": ("R1", "R2", "R3", "SUBQ", "SUBF"),
    "yangian": ("Y1", "Y2", "Y3"),
}
CATALOGUES["all"] = tuple(i for k in ("q-core", "proof-steps", "rational", "yangian")
                          for i in CATALOGUES[k])

# identities that are polynomial and checked at an integer exponent n
EXACT_IDS = frozenset({"Q12", "Q12W", "Q13", "Q15", "Q15W"})
PARAMETERS = ("q", "p", "r", "s", "eta", "alpha", "beta", "gamma")


class UnknownIdentity(KeyError):
    pass


@dataclass
class IdentityResult:
    id: str
    ok: bool
    detail: str
    sides: list = field(default_factory=list, repr=False)


def _params(bindings):
    """Parameter symbols, with numeric bindings substituted where given."""
    out = {name: VARS.var(name) for name in PARAMETERS}
    for name, v in (bindings or {}).items():
        if name not in out:
            raise KeyError(f"unknown identity parameter {name!r}")
        out[name] = v if isinstance(v, RatFunc) else VARS.const(Fraction(v))
    return out


class _Ctx:
    def __init__(self, pres_name, order, P):
        self.pres = PRESENTATIONS[pres_name]
        self.order = order
        self.P = P

    def g(self, name):
        return NCSeries.gen(self.pres, self.order, name)

    def one(self):
        return NCSeries.one(self.pres, self.order)

    def qpow(self, arg, expo):
        return q_power(arg, expo, self.P["q"], self.order)

    def qexp(self, arg):
        return q_exp(arg, self.P["q"], self.order)


def _qbar_number(qbar_power, qbar):
    return (qbar_power - 1) / (qbar - 1)


# each builder returns a list of (label, lhs, rhs)

def _q1(c):
    u = c.g("u")
    p, r = c.P["p"], c.P["r"]
    return [("Q1", c.qpow(u, p) * c.qpow(u / p, r), c.qpow(u, p * r))]


def _q2(c):
    u, v = c.g("u"), c.g("v")
    p = c.P["p"]
    return [("Q2", c.qpow(u, p) * c.qpow(v, p), c.qpow(u + v - (u * v) / p, p))]


def _q3(c):
    u, v = c.g("u"), c.g("v")
    p = c.P["p"]
    return [("Q3", c.qpow(v, p) * c.qpow(u, p), c.qpow(u + v - u * v, p))]


def _q4(c):
    u = c.g("u")
    p, q = c.P["p"], c.P["q"]
    F = c.qpow(u, p)
    return [("Q4", (1 - u) * F, (1 - u / p) * scale_variable(F, "u", q))]


def _q5(c):
    u = c.g("u")
    p, q = c.P["p"], c.P["q"]
    lhs = c.qpow(u, p) * c.qexp(u / (p * (1 - q)))
    return [("Q5", lhs, c.qexp(u / (1 - q)))]


def _q6(c):
    u, v = c.g("u"), c.g("v")
    return [("Q6", c.qexp(u) * c.qexp(v), c.qexp(u + v))]


def _q7(c):
    u, v = c.g("u"), c.g("v")
    q = c.P["q"]
    return [("Q7", c.qexp(v) * c.qexp(u), c.qexp(u + v + (u * v) * (q - 1)))]


def _q9(c):
    u, v = c.g("u"), c.g("v")
    p, r = c.P["p"], c.P["r"]
    lhs = c.qpow(v / r + u, p) * c.qpow(v + u / p, r)
    return [("Q9", lhs, c.qpow(u + v, p * r))]


def _q10(c):
    u, v, w = c.g("u"), c.g("v"), c.g("w")
    p, q = c.P["p"], c.P["q"]
    arg = w * series_inverse(1 - v / p - u / q)
    return [("Q10", c.qpow(arg, p) * c.qpow(u + v, p), c.qpow(u + v + w, p))]


def _q11(c):
    u, v, w = c.g("u"), c.g("v"), c.g("w")
    p, q = c.P["p"], c.P["q"]
    arg = series_inverse(1 - v / q - u / p) * w
    return [("Q11", c.qpow(u + v, p) * c.qpow(arg, p), c.qpow(u + v + w, p))]


def _q12(c):
    u, v = c.g("u"), c.g("v")
    p, r, q = c.P["p"], c.P["r"], c.P["q"]
    lhs = (1 - v * p - u) * (1 - v * r - u / q)
    rhs = (1 - v * r - u) * (1 - v * p - u / q)
    return [("Q12", lhs, rhs)]


def _q12w(c):
    u, v, w = c.g("u"), c.g("v"), c.g("w")
    p, r, q = c.P["p"], c.P["r"], c.P["q"]
    lhs = (1 - v * p - u * r - w) * (1 - v * (p * q) - u * (r / q))
    rhs = (1 - v * p - u * r) * (1 - v * (p * q) - u * (r / q) - w)
    return [("Q12W", lhs, rhs)]


def _product(factors, one):
    out = one
    for f in factors:
        out = out * f
    return out


def _q13(c, n):
    u = c.g("u")
    q = c.P["q"]
    rhs = _product([1 - u / q ** i for i in range(1, n + 1)], c.one())
    return [(f"Q13[n={n}]", c.qpow(u, q ** n), rhs)]


def _q15(c, n):
    u, v = c.g("u"), c.g("v")
    q = c.P["q"]
    lhs = c.qpow(u + v, q ** n)
    naive = _product([1 - (u + v) / q ** i for i in range(1, n + 1)], c.one())
    reordered = _product(
        [1 - v / q ** (n + 1 - j) - u / q ** j for j in range(1, n + 1)], c.one())
    return [(f"Q15[n={n}] naive product", lhs, naive),
            (f"Q15[n={n}] reordered product", lhs, reordered)]


def _q15w(c, n):
    u, v, w = c.g("u"), c.g("v"), c.g("w")
    q = c.P["q"]
    tail = 1 - v / q - u / q ** (n + 1)
    lhs = c.qpow(u + v / q + w / q, q ** n) * tail
    first = _product(
        [1 - v / q ** (n + 2 - j) - u / q ** j - w / q ** (j + 1) for j in range(1, n + 1)]
        + [tail], c.one())
    second = _product(
        [1 - v / q ** (n + 1) - u / q]
        + [1 - v / q ** (n + 2 - k) - u / q ** k - w / q ** k for k in range(2, n + 2)],
        c.one())
    return [(f"Q15W[n={n}] first factorization", lhs, first),
            (f"Q15W[n={n}] second factorization", lhs, second)]


def _rational_numbers(c):
    P = c.P
    q, p, r, s = P["q"], P["p"], P["r"], P["s"]
    qb = 1 / q
    # (c + shift)_{1/q} with (1/q)^c = 1/s
    return {
        "c": _qbar_number(1 / s, qb),
        "c+b": _qbar_number(1 / (s * r), qb),
        "c-a": _qbar_number(p / s, qb),
        "c+a-1": _qbar_number(q / (s * p), qb),
        "c-a+1": _qbar_number(p / (s * q), qb),
    }


def _r1(c):
    x, y = c.g("x"), c.g("y")
    p, r, eta = c.P["p"], c.P["r"], c.P["eta"]
    N = _rational_numbers(c)
    lhs = c.qpow(x + y * (eta * N["c"]), p * r)
    rhs = c.qpow(x + y * (eta * N["c+b"]), p) * c.qpow(x / p + y * (eta * N["c-a"] / p), r)
    return [("R1", lhs, rhs)]


def _r2(c):
    x, y, z = c.g("x"), c.g("y"), c.g("z")
    p, q, eta = c.P["p"], c.P["q"], c.P["eta"]
    N = _rational_numbers(c)
    base = x + y * (eta * N["c"])
    inner = series_inverse(1 - x / q - y * (eta * N["c+a-1"] / q))
    return [("R2", c.qpow(z * inner, p) * c.qpow(base, p), c.qpow(base + z, p))]


def _r3(c):
    x, y, z = c.g("x"), c.g("y"), c.g("z")
    p, eta = c.P["p"], c.P["eta"]
    N = _rational_numbers(c)
    base = x + y * (eta * N["c"])
    inner = series_inverse(1 - x / p - y * (eta * N["c-a+1"] / p))
    return [("R3", c.qpow(base, p) * c.qpow(inner * z, p), c.qpow(base + z, p))]


def _y_ctx_power(c, arg, expo):
    return ordinary_power(arg, expo, c.order)


def _y1(c):
    x, y = c.g("x"), c.g("y")
    al, be, ga, eta = c.P["alpha"], c.P["beta"], c.P["gamma"], c.P["eta"]
    lhs = _y_ctx_power(c, x + y * (eta * ga), al + be)
    rhs = _y_ctx_power(c, x + y * (eta * (ga + be)), al) * \
        _y_ctx_power(c, x + y * (eta * (ga - al)), be)
    return [("Y1", lhs, rhs)]


def _y2(c):
    x, y, z = c.g("x"), c.g("y"), c.g("z")
    al, ga, eta = c.P["alpha"], c.P["gamma"], c.P["eta"]
    base = x + y * (eta * ga)
    inner = series_inverse(1 - x - y * (eta * (ga + al - 1)))
    lhs = _y_ctx_power(c, z * inner, al) * _y_ctx_power(c, base, al)
    return [("Y2", lhs, _y_ctx_power(c, base + z, al))]


def _y3(c):
    x, y, z = c.g("x"), c.g("y"), c.g("z")
    al, ga, eta = c.P["alpha"], c.P["gamma"], c.P["eta"]
    base = x + y * (eta * ga)
    inner = series_inverse(1 - x - y * (eta * (ga - al + 1)))
    lhs = _y_ctx_power(c, base, al) * _y_ctx_power(c, inner * z, al)
    return [("Y3", lhs, _y_ctx_power(c, base + z, al))]


_BUILDERS = {
    "Q1": ("u", _q1), "Q2": ("q-plane", _q2), "Q3": ("q-plane", _q3), "Q4": ("u", _q4),
    "Q5": ("u", _q5), "Q6": ("q-plane", _q6), "Q7": ("q-plane", _q7),
    "Q9": ("q-plane", _q9), "Q10": ("q-space", _q10), "Q11": ("q-space", _q11),
    "Q12": ("q-plane", _q12), "Q12W": ("q-space", _q12w),
    "Q13": ("u", _q13), "Q15": ("q-plane", _q15), "Q15W": ("q-space", _q15w),
    "R1": ("rational", _r1), "R2": ("rational", _r2), "R3": ("rational", _r3),
    "Y1": ("yangian", _y1), "Y2": ("yangian", _y2), "Y3": ("yangian", _y3),
}

# exact polynomial degree of each proof-step identity as a function of n
_EXACT_DEGREE = {"Q12": lambda n: 2, "Q12W": lambda n: 2, "Q13": lambda n: n + 1,
                 "Q15": lambda n: n + 1, "Q15W": lambda n: n + 2}


def build_sides(identity, order=6, bindings=None, n=None):
    """Return ``[(label, lhs, rhs), ...]`` for a series identity."""
    if identity not in _BUILDERS:
        raise UnknownIdentity(identity)
    pres_name, builder = _BUILDERS[identity]
    P = _params(bindings)
    if identity in EXACT_IDS:
        if identity in ("Q12", "Q12W"):
            if n is not None:
                # integer exponents a = n, b = n + 1
                P["p"] = P["q"] ** n
                P["r"] = P["q"] ** (n + 1)
            return builder(_Ctx(pres_name, _EXACT_DEGREE[identity](n or 1), P))
        if n is None:
            raise ValueError(f"{identity} needs an integer exponent n")
        return builder(_Ctx(pres_name, _EXACT_DEGREE[identity](n), P), n)
    return builder(_Ctx(pres_name, order, P))


def substitution_checks(identity):
    """The SUBQ / SUBF change-of-variables checks as a :class:`SubstitutionReport`.

    The presentations carry symbolic q and eta, so these checks are always symbolic.
    """
    P = _params(None)
    q, eta = P["q"], P["eta"]
    if identity == "SUBQ":
        src, tgt = PRESENTATIONS["q-space"], PRESENTATIONS["rational"]
        g = {n: NCSeries.gen(src, 2, n) for n in src.generators}
        images = {"x": g["u"] + g["v"] * (eta / (1 / q - 1)), "y": g["v"], "z": g["w"]}
    elif identity == "SUBF":
        src, tgt = PRESENTATIONS["e-vars"], PRESENTATIONS["f-vars"]
        g = {n: NCSeries.gen(src, 2, n) for n in src.generators}
        images = {"f1": g["e1"] + g["e0"] * (eta / (q ** -2 - 1)), "f0": g["e0"]}
    else:
        raise UnknownIdentity(identity)
    return apply_substitution(src, tgt, images)


def _word_label(series, word):
    return series.pres.word_str(word)


def verify_identity(identity, order=6, bindings=None, n=None):
    """Verify one catalogue entry; returns an :class:`IdentityResult`."""
    if identity in ("SUBQ", "SUBF"):
        rep = substitution_checks(identity)
        if rep.ok:
            return IdentityResult(identity, True,
                                  f"{len(rep.relations)} induced relation(s) vanish; det={rep.determinant}")
        bad = "; ".join(f"{lab}: residual {res}" for lab, res in rep.failures())
        return IdentityResult(identity, False, bad)
    sides = build_sides(identity, order, bindings, n)
    details = []
    ok = True
    for label, lhs, rhs in sides:
        good, word = lhs.equals(rhs)
        if good:
            details.append(f"{label}: equal through degree {min(lhs.order, rhs.order)}")
        else:
            ok = False
            zero = VARS.const(0)
            diff = lhs.coeffs.get(word, zero) - rhs.coeffs.get(word, zero)
            details.append(f"{label}: mismatch at {_word_label(lhs, word)} (difference {diff})")
    return IdentityResult(identity, ok, "; ".join(details), sides)

