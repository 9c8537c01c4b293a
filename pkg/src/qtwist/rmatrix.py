"""Twisted trigonometric and rational R-matrices, their checks, and the classical r-matrices.

Scalars may be ``RatFunc`` (symbolic) or ``Fraction`` (sampled points); every
builder works with either because it only uses field operations.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import VARS, RatFunc, reduce_univariate, substitute
from .ncseries import q_power_coefficients
from .report import RationalSampler, make_check
from .tensor import (
    E11, E21, E22, ID2, P12, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, TensorMatrix, embed,
    flip, index_states, inverse, kron,
)

FAMILIES = ("trig", "rat", "yang")
FAMILY_PARAMS = {"trig": ("q", "a", "b"), "rat": ("q", "eta", "xi"), "yang": ("eta", "xi")}
SPECTRAL = {"trig": "z", "rat": "u", "yang": "u"}
CLASSICAL_KINDS = ("dj", "ab", "ab_tilde", "bd", "st")


def scalar(x):
    """Coerce to an exact scalar: RatFunc stays, numbers and "p/q" strings become Fraction."""
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return Fraction(x)


def _rows(entries):
    return TensorMatrix.from_rows([[e if e else 0 for e in r] for r in entries])


def state_label(idx, legs):
    return "|" + "".join(str(s) for s in index_states(idx, legs)) + ">"


def position_label(pos, legs):
    i, j = pos
    return f"({state_label(i, legs)},{state_label(j, legs)})"


# -- quantum families ----------------------------------------------------------------

@dataclass
class RFamily:
    tag: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in FAMILIES:
            raise ValueError(f"unknown family {self.tag!r}; expected one of {FAMILIES}")
        names = FAMILY_PARAMS[self.tag]
        unknown = set(self.params) - set(names) - {"q"}
        if unknown:
            raise ValueError(f"unknown parameters for {self.tag}: {sorted(unknown)}")
        if self.tag == "yang" and "q" in self.params and scalar(self.params["q"]) != 1:
            raise ValueError("the yang family requires q = 1")
        bound = {}
        for n in names:
            bound[n] = scalar(self.params[n]) if n in self.params else VARS.var(n)
        self.params = bound

    @classmethod
    def symbolic(cls, tag):
        return cls(tag)

    @property
    def is_symbolic(self):
        return any(isinstance(v, RatFunc) and not v.is_const() for v in self.params.values())

    def matrix(self, s1, s2):
        return build_RF(self, s1, s2)


def build_R0_trig(z1, z2, q):
    z1, z2, q = scalar(z1), scalar(z2), scalar(q)
    qb = 1 / q
    den = qb * z1 - q * z2
    diag = (z1 - z2) / den
    return _rows([
        [1, 0, 0, 0],
        [0, diag, (qb - q) * z2 / den, 0],
        [0, (qb - q) * z1 / den, diag, 0],
        [0, 0, 0, 1],
    ])


def build_F_trig(zA, a, b, q):
    """``1 + ((a zA + b) e11 - (q^-1 a zA + q b) e22) (x) e21``."""
    zA, a, b, q = scalar(zA), scalar(a), scalar(b), scalar(q)
    left = E11.scale(a * zA + b) - E22.scale(a * zA / q + q * b)
    return TensorMatrix.identity(2) + kron(left, E21)


def twist(R, z1, z2, a, b, q):
    """``F21 R F12^-1`` with F12 carrying ``z2`` and F21 the leg-swapped F at ``z1``."""
    if R.legs != 2:
        raise ValueError("twist expects a two-leg R-matrix")
    F12 = build_F_trig(z2, a, b, q)
    F21 = flip(build_F_trig(z1, a, b, q))
    return F21 @ R @ inverse(F12)


def _rf_trig(p, z1, z2):
    q, a, b = p["q"], p["a"], p["b"]
    qb = 1 / q
    den = qb * z1 - q * z2
    f = (z1 - z2) / den
    x = a * z2 + b
    y = qb * a * z1 + q * b
    off2 = (qb - q) * z2 / den
    off1 = (qb - q) * z1 / den
    return _rows([
        [1, 0, 0, 0],
        [-x * f, f, off2, 0],
        [y * f, off1, f, 0],
        [x * y * f, -y * f, x * f, 1],
    ])


def build_R0_rat(u1, u2, q, eta):
    u1, u2, q, eta = scalar(u1), scalar(u2), scalar(q), scalar(eta)
    qb = 1 / q
    den = qb * u1 - q * u2 - q * eta
    f = (u1 - u2) / den
    return _rows([
        [1, 0, 0, 0],
        [0, f, ((qb - q) * u2 - q * eta) / den, 0],
        [0, ((qb - q) * u1 - q * eta) / den, f, 0],
        [0, 0, 0, 1],
    ])


def _rf_rat(p, u1, u2, q=None):
    q = p["q"] if q is None else q
    eta, xi = p["eta"], p["xi"]
    qb = 1 / q
    den = qb * u1 - q * u2 - q * eta
    f = (u1 - u2) / den
    w = qb * u1 - q * eta
    return _rows([
        [1, 0, 0, 0],
        [-xi * u2 * f, f, ((qb - q) * u2 - q * eta) / den, 0],
        [xi * w * f, ((qb - q) * u1 - q * eta) / den, f, 0],
        [xi * xi * u2 * w * f, -xi * w * f, xi * u2 * f, 1],
    ])


def build_RF(family, s1, s2):
    """Closed-form twisted R-matrix of ``family`` at spectral parameters ``(s1, s2)``.

    The yang family is the q -> 1 substitution of the rat family: built with a
    symbolic q and substituted when anything is symbolic, otherwise built at q = 1.
    """
    s1, s2 = scalar(s1), scalar(s2)
    p = family.params
    if family.tag == "trig":
        return _rf_trig(p, s1, s2)
    if family.tag == "rat":
        return _rf_rat(p, s1, s2)
    symbolic = any(isinstance(v, RatFunc) for v in (s1, s2, p["eta"], p["xi"]))
    if not symbolic:
        return _rf_rat(p, s1, s2, q=Fraction(1))
    m = _rf_rat({k: (v if isinstance(v, RatFunc) else VARS.const(v)) for k, v in p.items()},
                s1 if isinstance(s1, RatFunc) else VARS.const(s1),
                s2 if isinstance(s2, RatFunc) else VARS.const(s2), q=VARS.var("q"))
    return m.map(lambda x: substitute(x, {"q": 1}) if isinstance(x, RatFunc) else x)


def sigma_z_yang_variant(family, s1, s2):
    """The q = 1 matrix with a ``sigma^z (x) sigma^z`` final term, kept as a negative control."""
    u1, u2 = scalar(s1), scalar(s2)
    eta, xi = family.params["eta"], family.params["xi"]
    f = (u1 - u2) / (u1 - u2 - eta)
    body = (TensorMatrix.identity(2) - P12.scale(eta / (u1 - u2))
            - kron(SIGMA_Z, SIGMA_MINUS).scale(xi * u2)
            + kron(SIGMA_MINUS, SIGMA_Z).scale(xi * (u1 - eta))
            + kron(SIGMA_Z, SIGMA_Z).scale(xi * xi * u2 * (u1 - eta)))
    return body.scale(f)


def matrix_to_json(m):
    """Entries as expression strings, row-major."""
    return [[str(x) if x else "0" for x in r] for r in m.rows]


# -- Yang-Baxter ---------------------------------------------------------------------

def ybe_residual(builder, s1, s2, s3):
    """``R12 R13 R23 - R23 R13 R12`` on three legs."""
    R12 = embed(builder(s1, s2), (0, 1), 3)
    R13 = embed(builder(s1, s3), (0, 2), 3)
    R23 = embed(builder(s2, s3), (1, 2), 3)
    return R12 @ R13 @ R23 - R23 @ R13 @ R12


def _avoid_for(tag):
    # q^2 = 1 collapses the trigonometric and rat families
    return {"q": (Fraction(1), Fraction(-1))} if tag in ("trig", "rat") else {}


def verify_YBE(family="trig", mode="sampled", trials=20, seed=0, builder=None, params=None,
               check_id=None):
    """Yang-Baxter check for a family tag.

    ``builder(family, s1, s2)`` overrides the closed form (negative controls).
    ``params`` fixes some family parameters; the rest are symbolic or sampled.
    """
    builder = builder or build_RF
    names = FAMILY_PARAMS[family]
    sym = SPECTRAL[family]
    check_id = check_id or f"ybe-{family}-{mode}"
    fixed = {k: scalar(v) for k, v in (params or {}).items()}
    if mode == "symbolic":
        fam = RFamily(family, fixed)
        s = [VARS.var(f"{sym}{i}") for i in (1, 2, 3)]
        res = ybe_residual(lambda x, y: builder(fam, x, y), *s)
        hit = res.first_nonzero()
        if hit is None:
            return make_check(check_id, True, "R12 R13 R23 = R23 R13 R12 identically")
        return make_check(check_id, False,
                          f"residual nonzero at {position_label(hit[0], 3)}: {hit[1]}",
                          position=hit[0])
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    sampler = RationalSampler(seed)
    free = [n for n in names if n not in fixed] + [f"{sym}1", f"{sym}2", f"{sym}3"]
    done = 0
    rejected = 0
    while done < trials:
        if rejected > 100:
            return make_check(check_id, False, f"gave up after {rejected} singular samples")
        b = sampler.draw(free, _avoid_for(family))
        b.update(fixed)
        try:
            fam = RFamily(family, {n: b[n] for n in names})
            res = ybe_residual(lambda x, y: builder(fam, x, y),
                               b[f"{sym}1"], b[f"{sym}2"], b[f"{sym}3"])
        except ZeroDivisionError:
            rejected += 1
            continue
        hit = res.first_nonzero()
        if hit is not None:
            point = ", ".join(f"{k}={v}" for k, v in b.items())
            return make_check(check_id, False,
                              f"trial {done}: residual {hit[1]} at {position_label(hit[0], 3)} ({point})",
                              position=hit[0], point=b)
        done += 1
    return make_check(check_id, True,
                      f"{trials} seeded points, zero residual ({rejected} singular draws resampled)")


def verify_rzz(family, check_id=None):
    """``R^F(s, s) = P12`` symbolically."""
    fam = RFamily(family)
    s = VARS.var(SPECTRAL[family])
    ok, pos = build_RF(fam, s, s).equals(P12)
    check_id = check_id or f"rzz-{family}"
    if ok:
        return make_check(check_id, True, f"R^F({s},{s}) = P12")
    return make_check(check_id, False, f"differs from P12 at {position_label(pos, 2)}")


def verify_twist(check_id="twist-trig"):
    """``F21 R0 F12^-1`` against the closed form, symbolic in q, a, b, z1, z2."""
    q, a, b, z1, z2 = VARS.vars("q", "a", "b", "z1", "z2")
    lhs = twist(build_R0_trig(z1, z2, q), z1, z2, a, b, q)
    rhs = build_RF(RFamily("trig"), z1, z2)
    ok, pos = lhs.equals(rhs)
    if ok:
        return make_check(check_id, True, "twist of R0 equals the closed form in all 16 entries")
    return make_check(check_id, False,
                      f"entry {position_label(pos, 2)}: {lhs[pos]} vs {rhs[pos]}")


# -- cocycle in the triple evaluation representation ---------------------------------

def _q_diag(q, sign, legs, on):
    """Diagonal ``q^{sign * sum of sigma^z over legs in on}``."""
    vals = []
    for idx in range(1 << legs):
        st = index_states(idx, legs)
        h = sum(1 if st[k] == 1 else -1 for k in on)
        vals.append(q ** (sign * h))
    m = TensorMatrix.zeros(legs)
    for i, v in enumerate(vals):
        m.rows[i][i] = v
    return m


def _op(legs, factors):
    """Tensor product of one-leg operators given as a list (identity where None)."""
    out = factors[0] if factors[0] is not None else ID2
    for f in factors[1:]:
        out = kron(out, f if f is not None else ID2)
    return out


def _q_power_series(X, legs, h_legs, q):
    """``sum_k C_k(h) X^k``: the q^2-power series with ``exponent_param = q^{-h}``,
    where ``h`` is the total sigma^z on ``h_legs`` (diagonal, commuting with ``X``).
    """
    powers = [TensorMatrix.identity(legs)]
    while True:
        nxt = powers[-1] @ X
        if nxt.is_zero():
            break
        powers.append(nxt)
        if len(powers) > 8:
            raise ArithmeticError("twist argument is not nilpotent")
    order = len(powers) - 1
    qq = q if isinstance(q, RatFunc) else VARS.const(q)
    cache = {}
    out = TensorMatrix.zeros(legs)
    for idx in range(1 << legs):
        st = index_states(idx, legs)
        h = sum(1 if st[k] == 1 else -1 for k in h_legs)
        if h not in cache:
            cache[h] = q_power_coefficients(qq ** (-h), qq ** 2, order)
        coeffs = cache[h]
        row = out.rows[idx]
        for k, P in enumerate(powers):
            c = coeffs[k]
            if not c:
                continue
            for j, x in enumerate(P.rows[idx]):
                if x:
                    row[j] = row[j] + c * x if row[j] else c * x
    return out


def _universal_core(q, a, b):
    # the argument (1 + q^2)(a e_{delta-alpha} + b q^{-h} (x) q^{-h} e_{-alpha}) up to legs
    return (1 + q * q) * a, (1 + q * q) * b


def universal_twist_two_legs(a, b, z2, q):
    """The universal q-power twist evaluated on two legs (leg 2 carries ``z2``)."""
    q, a, b, z2 = scalar(q), scalar(a), scalar(b), scalar(z2)
    ca, cb = _universal_core(q, a, b)
    qm = _q_diag(q, -1, 1, (0,))
    X = kron(ID2, E21).scale(ca * z2) + kron(qm, (_q_diag(q, -1, 1, (0,)) @ E21)).scale(cb)
    return _q_power_series(X, 2, (0,), q)


def coproduct_twists(a, b, z2, z3, q):
    """``(Delta (x) id) F`` and ``(id (x) Delta) F`` on three legs (z1 never enters)."""
    q, a, b, z2, z3 = scalar(q), scalar(a), scalar(b), scalar(z2), scalar(z3)
    ca, cb = _universal_core(q, a, b)
    qm = _q_diag(q, -1, 1, (0,))
    qp = _q_diag(q, 1, 1, (0,))
    qmE = qm @ E21
    # first two legs carry Delta(h); leg 3 carries the nilpotent factor
    X_left = (_op(3, [None, None, E21]).scale(ca * z3)
              + _op(3, [qm, qm, qmE]).scale(cb))
    left = _q_power_series(X_left, 3, (0, 1), q)
    # leg 1 carries h; legs 2, 3 carry Delta(e_{delta-alpha}) and Delta(q^{-h} e_{-alpha})
    X_right = (_op(3, [None, E21, None]).scale(ca * z2) + _op(3, [None, qp, E21]).scale(ca * z3)
               + _op(3, [qm, qmE, None]).scale(cb) + _op(3, [qm, qm, qmE]).scale(cb))
    right = _q_power_series(X_right, 3, (0,), q)
    return left, right


def normalization_factor(q=None):
    """Fit ``lam`` with universal F(a, b) = closed-form F(lam a, lam b); returns ``(lam, ok)``."""
    q = VARS.var("q") if q is None else scalar(q)
    a, b, z2 = VARS.vars("a", "b", "z2")
    U = universal_twist_two_legs(a, b, z2, q)
    lam = U.rows[1][0] / (a * z2 + b)
    ok, _ = U.equals(build_F_trig(z2, a * lam, b * lam, q))
    return reduce_univariate(lam), ok


def verify_cocycle_rep(z2=None, z3=None, a=None, b=None, q=None, check_id="cocycle"):
    """``F12 (Delta (x) id)F = F23 (id (x) Delta)F`` with the closed-form F as the two-leg image.

    The universal element is evaluated with ``(a, b)`` divided by the fitted
    normalization factor, so its two-leg image is exactly ``build_F_trig``.
    Omitted arguments are symbolic.
    """
    q = VARS.var("q") if q is None else scalar(q)
    a = VARS.var("a") if a is None else scalar(a)
    b = VARS.var("b") if b is None else scalar(b)
    z2 = VARS.var("z2") if z2 is None else scalar(z2)
    z3 = VARS.var("z3") if z3 is None else scalar(z3)
    lam, fitted = normalization_factor(q)
    au, bu = a / lam, b / lam
    F12 = embed(universal_twist_two_legs(au, bu, z2, q), (0, 1), 3)
    F23 = embed(universal_twist_two_legs(au, bu, z3, q), (1, 2), 3)
    closed_ok = F12.equals(embed(build_F_trig(z2, a, b, q), (0, 1), 3))[0]
    left, right = coproduct_twists(au, bu, z2, z3, q)
    ok, pos = (F12 @ left).equals(F23 @ right)
    detail = f"normalization factor {lam} (fitted: {fitted}); two-leg image equals closed-form F: {closed_ok}"
    if ok and closed_ok and fitted:
        return make_check(check_id, True, "cocycle holds; " + detail, lam=str(lam))
    where = f"mismatch at {position_label(pos, 3)}; " if not ok else ""
    return make_check(check_id, False, where + detail, lam=str(lam))


def verify_cocycle_sampled(points=10, seed=0, check_id="cocycle-sampled"):
    sampler = RationalSampler(seed)
    done = rejected = 0
    while done < points:
        b = sampler.draw(("q", "a", "b", "z2", "z3"), {"q": (Fraction(1), Fraction(-1))})
        try:
            c = verify_cocycle_rep(**b)
        except ZeroDivisionError:
            rejected += 1
            if rejected > 100:
                return make_check(check_id, False, "too many singular draws")
            continue
        if not c.ok:
            return make_check(check_id, False, f"point {b}: {c.detail}")
        done += 1
    return make_check(check_id, True, f"{points} seeded points pass")


# -- classical r-matrices --------------------------------------------------------------

T12 = (kron(SIGMA_MINUS, SIGMA_PLUS) + kron(SIGMA_PLUS, SIGMA_MINUS)
       + kron(SIGMA_Z, SIGMA_Z).scale(Fraction(1, 2)))


def r_dj(z1, z2):
    z1, z2 = scalar(z1), scalar(z2)
    return (T12.scale((z1 + z2) / (z1 - z2)) - kron(SIGMA_PLUS, SIGMA_MINUS)
            + kron(SIGMA_MINUS, SIGMA_PLUS)).scale(Fraction(1, 2))


def _a_term(z1, z2, a):
    return (kron(SIGMA_MINUS, SIGMA_Z).scale(a * z1) - kron(SIGMA_Z, SIGMA_MINUS).scale(a * z2))


def build_classical(kind, z1=None, z2=None, a=None, b=None, xi=None):
    """Classical r-matrix of the given kind; omitted parameters are symbolic.

    For ``st`` the spectral parameters ``z1, z2`` play the role of ``u1, u2``.
    """
    if kind not in CLASSICAL_KINDS:
        raise ValueError(f"unknown classical kind {kind!r}; expected one of {CLASSICAL_KINDS}")
    sym = "u" if kind == "st" else "z"
    z1 = VARS.var(f"{sym}1") if z1 is None else scalar(z1)
    z2 = VARS.var(f"{sym}2") if z2 is None else scalar(z2)
    a = VARS.var("a") if a is None else scalar(a)
    b = VARS.var("b") if b is None else scalar(b)
    xi = VARS.var("xi") if xi is None else scalar(xi)
    if kind == "dj":
        return r_dj(z1, z2)
    if kind == "ab":
        return (r_dj(z1, z2) + _a_term(z1, z2, a)
                + (kron(SIGMA_MINUS, SIGMA_Z) - kron(SIGMA_Z, SIGMA_MINUS)).scale(b))
    if kind == "ab_tilde":
        return (r_dj(z1, z2) + _a_term(z1, z2, a)
                + kron(SIGMA_MINUS, SIGMA_MINUS).scale(4 * a * b * (z1 - z2)))
    if kind == "bd":
        return r_dj(z1, z2) + kron(SIGMA_MINUS, SIGMA_MINUS).scale(z1 - z2)
    return T12.scale(1 / (z1 - z2)) + _a_term(z1, z2, xi)


def cybe_residual(builder):
    r12 = embed(builder(1, 2), (0, 1), 3)
    r13 = embed(builder(1, 3), (0, 2), 3)
    r23 = embed(builder(2, 3), (1, 2), 3)
    return r12.commutator(r13) + r12.commutator(r23) + r13.commutator(r23)


def verify_CYBE(kind, check_id=None, **params):
    """Classical YBE, symbolic in the spectral parameters and in any parameter not given."""
    sym = "u" if kind == "st" else "z"
    zs = {i: VARS.var(f"{sym}{i}") for i in (1, 2, 3)}
    res = cybe_residual(lambda i, j: build_classical(kind, zs[i], zs[j], **params))
    hit = res.first_nonzero()
    check_id = check_id or f"cybe-{kind}"
    if hit is None:
        return make_check(check_id, True, "[r12,r13]+[r12,r23]+[r13,r23] = 0 identically")
    return make_check(check_id, False, f"residual {hit[1]} at {position_label(hit[0], 3)}")


def gauge_conjugations(z1=None, z2=None, a=None, b=None):
    """Return ``(forward_ok, backward_ok)``.

    forward: ``G r_ab G^-1 = r~_ab``; backward: ``G r~_ab G^-1 = r_ab``,
    with ``G = g (x) g`` and ``g = 1 + 2b sigma^-``.
    """
    b_ = VARS.var("b") if b is None else scalar(b)
    g = ID2 + SIGMA_MINUS.scale(2 * b_)
    ginv = ID2 - SIGMA_MINUS.scale(2 * b_)
    G, Ginv = kron(g, g), kron(ginv, ginv)
    kw = dict(z1=z1, z2=z2, a=a, b=b)
    r = build_classical("ab", **kw)
    rt = build_classical("ab_tilde", **kw)
    forward = (G @ r @ Ginv).equals(rt)[0]
    backward = (G @ rt @ Ginv).equals(r)[0]
    return forward, backward


def verify_gauge_equiv(check_id="gauge", **params):
    fwd, bwd = gauge_conjugations(**params)
    names = []
    if fwd:
        names.append("Ad(g)(x)Ad(g) maps r_ab to r~_ab")
    if bwd:
        names.append("Ad(g)(x)Ad(g) maps r~_ab to r_ab")
    trivial = "b" in params and not scalar(params["b"])
    ok = fwd != bwd or (trivial and fwd)
    if trivial and fwd and bwd:
        detail = "b = 0: the gauge is the identity and r_ab = r~_ab"
    elif not names:
        detail = "neither direction holds"
    elif ok:
        detail = "exactly one direction: " + names[0]
    else:
        detail = "both directions hold: " + "; ".join(names)
    return make_check(check_id, ok, detail, forward=fwd, backward=bwd)
