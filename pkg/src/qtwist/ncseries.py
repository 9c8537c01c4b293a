"""Quadratic rewrite algebras and truncated power series over them.

A :class:`Presentation` orders its generators ``g0 < g1 < ...`` and carries one
rewrite rule per out-of-order adjacent pair ``g_j g_i`` (``j > i``), mapping it
to a combination of normal-ordered degree-2 words.  :class:`NCSeries` stores
normal-ordered words (ascending index tuples) with :class:`RatFunc`
coefficients, truncated at a total degree.
"""

from fractions import Fraction

from .exactalg import VARS, RatFunc, StructuralError

ONE = VARS.const(1)


class NonInvertible(ArithmeticError):
    """Series or substitution without an inverse."""


class DomainError(ValueError):
    """Argument outside the domain of a series function (e.g. nonzero constant term)."""


class SingularParameter(ZeroDivisionError):
    """A q-factorial vanishes for the given parameter value."""


def _rf(x, vt=VARS):
    if isinstance(x, RatFunc):
        return x
    return vt.const(x)


class Presentation:
    """Generators plus quadratic exchange rules ``hi*lo -> sum c * (a, b)``.

    ``rules`` maps ``(hi, lo)`` generator names to a list of
    ``(coefficient, (a, b))`` pairs with ``a <= b`` in generator order.
    """

    def __init__(self, name, generators, rules, vt=VARS):
        self.name = name
        self.generators = tuple(generators)
        self.vt = vt
        self._index = {g: i for i, g in enumerate(self.generators)}
        self.rules = {}
        for (hi, lo), rhs in rules.items():
            j, i = self._index[hi], self._index[lo]
            if j <= i:
                raise StructuralError(f"rule {hi}{lo} is not an out-of-order pair")
            terms = []
            for c, (a, b) in rhs:
                ia, ib = self._index[a], self._index[b]
                if ia > ib:
                    raise StructuralError(f"rule {hi}{lo} has non-normal right-hand word {a}{b}")
                terms.append((_rf(c, vt), (ia, ib)))
            self.rules[(j, i)] = tuple(terms)
        self._memo = {"leftmost": {}, "rightmost": {}}

    def __repr__(self):
        return f"Presentation({self.name}: {' < '.join(self.generators)})"

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise StructuralError(f"{name!r} is not a generator of {self.name}") from None

    def word(self, *names):
        return tuple(self.index(n) for n in names)

    def word_str(self, word):
        if not word:
            return "1"
        out, i = [], 0
        while i < len(word):
            j = i
            while j < len(word) and word[j] == word[i]:
                j += 1
            g = self.generators[word[i]]
            out.append(g if j - i == 1 else f"{g}^{j - i}")
            i = j
        return "*".join(out)

    def normal_order(self, word, strategy="leftmost"):
        """Rewrite ``word`` into normal-ordered words: ``{word: coefficient}``.

        ``strategy`` picks which out-of-order adjacent pair is rewritten first
        (``leftmost`` or ``rightmost``).  Both must agree on a PBW presentation.
        """
        word = tuple(word)
        memo = self._memo[strategy]
        hit = memo.get(word)
        if hit is not None:
            return hit
        n = len(word)
        positions = range(n - 1) if strategy == "leftmost" else range(n - 2, -1, -1)
        k = next((i for i in positions if word[i] > word[i + 1]), None)
        if k is None:
            result = {word: ONE}
        else:
            rule = self.rules.get((word[k], word[k + 1]))
            if rule is None:
                raise StructuralError(
                    f"no rule for {self.generators[word[k]]}{self.generators[word[k + 1]]}")
            acc = {}
            for c, pair in rule:
                sub = self.normal_order(word[:k] + pair + word[k + 2:], strategy)
                for w, cw in sub.items():
                    acc.setdefault(w, []).append(c if cw is ONE else c * cw)
            result = {}
            for w, lst in acc.items():
                v = RatFunc.sum(lst) if len(lst) > 1 else lst[0]
                if v:
                    result[w] = v
        memo[word] = result
        return result

    def product(self, w1, w2):
        return self.normal_order(w1 + w2)


class NCSeries:
    """Truncated power series in normal-ordered words of a presentation."""

    __slots__ = ("pres", "order", "coeffs")

    def __init__(self, pres, order, coeffs=None):
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        self.pres = pres
        self.order = order
        self.coeffs = {} if coeffs is None else coeffs

    # -- constructors ----------------------------------------------------------
    @classmethod
    def const(cls, pres, order, value):
        value = _rf(value, pres.vt)
        return cls(pres, order, {(): value} if value else {})

    @classmethod
    def one(cls, pres, order):
        return cls.const(pres, order, 1)

    @classmethod
    def gen(cls, pres, order, name):
        if order < 1:
            return cls(pres, order)
        return cls(pres, order, {(pres.index(name),): ONE})

    @classmethod
    def from_words(cls, pres, order, terms):
        """Build from ``{word tuple or name string: coefficient}``; words are normal-ordered."""
        out = cls(pres, order)
        for w, c in terms.items():
            if isinstance(w, str):
                w = pres.word(*w.split("*")) if w else ()
            piece = cls(pres, order, {})
            if len(w) <= order:
                piece.coeffs = {k: v * _rf(c, pres.vt) for k, v in pres.normal_order(w).items()}
            out = out + piece
        return out

    # -- helpers ---------------------------------------------------------------------
    def _check(self, other):
        if other.pres is not self.pres:
            raise StructuralError(f"presentation mismatch: {self.pres.name} vs {other.pres.name}")

    def _lift(self, other):
        if isinstance(other, NCSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, RatFunc)):
            return NCSeries.const(self.pres, self.order, other)
        return NotImplemented

    def constant_term(self):
        return self.coeffs.get((), self.pres.vt.const(0))

    def truncate(self, order):
        return NCSeries(self.pres, order,
                        {w: c for w, c in self.coeffs.items() if len(w) <= order})

    def homogeneous(self, degree):
        return {w: c for w, c in self.coeffs.items() if len(w) == degree}

    # -- arithmetic --------------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        order = min(self.order, other.order)
        out = {w: c for w, c in self.coeffs.items() if len(w) <= order}
        for w, c in other.coeffs.items():
            if len(w) > order:
                continue
            cur = out.get(w)
            v = c if cur is None else cur + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return NCSeries(self.pres, order, out)

    __radd__ = __add__

    def __neg__(self):
        return NCSeries(self.pres, self.order, {w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def scalar_mul(self, c):
        c = _rf(c, self.pres.vt)
        if not c:
            return NCSeries(self.pres, self.order)
        return NCSeries(self.pres, self.order, {w: v * c for w, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFunc)):
            return self.scalar_mul(other)
        if not isinstance(other, NCSeries):
            return NotImplemented
        self._check(other)
        order = min(self.order, other.order)
        pres = self.pres
        acc = {}
        right = [(w, len(w), c) for w, c in other.coeffs.items() if len(w) <= order]
        for w1, c1 in self.coeffs.items():
            l1 = len(w1)
            if l1 > order:
                continue
            room = order - l1
            for w2, l2, c2 in right:
                if l2 > room:
                    continue
                c12 = c1 * c2
                for w, c in pres.product(w1, w2).items():
                    acc.setdefault(w, []).append(c12 if c is ONE else c12 * c)
        out = {}
        for w, lst in acc.items():
            v = RatFunc.sum(lst) if len(lst) > 1 else lst[0]
            if v:
                out[w] = v
        return NCSeries(pres, order, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RatFunc)):
            return self.scalar_mul(other)
        return NotImplemented

    def __truediv__(self, c):
        return self.scalar_mul(1 / _rf(c, self.pres.vt))

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("series powers must be nonnegative integers")
        result = NCSeries.one(self.pres, self.order)
        for _ in range(n):
            result = result * self
        return result

    def equals(self, other):
        """Coefficient-wise comparison; returns ``(ok, first mismatching word or None)``."""
        self._check(other)
        order = min(self.order, other.order)
        words = {w for w in self.coeffs if len(w) <= order}
        words.update(w for w in other.coeffs if len(w) <= order)
        zero = self.pres.vt.const(0)
        for w in sorted(words, key=lambda w: (len(w), w)):
            if not self.coeffs.get(w, zero) == other.coeffs.get(w, zero):
                return False, w
        return True, None

    def __eq__(self, other):
        if not isinstance(other, NCSeries):
            return NotImplemented
        return self.equals(other)[0]

    __hash__ = None

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for w in sorted(self.coeffs, key=lambda w: (len(w), w)):
            c = self.coeffs[w]
            ws = self.pres.word_str(w)
            parts.append(f"({c})" if not w else f"({c})*{ws}")
        return " + ".join(parts) + f" + O({self.order + 1})"

    __repr__ = __str__


def series_arith(a, b, op):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scalar_mul":
        return a.scalar_mul(b)
    raise ValueError(f"unknown series op {op!r}")


def series_inverse(a):
    """Two-sided inverse by degree-by-degree recursion on homogeneous parts."""
    c0 = a.constant_term()
    if not c0:
        raise NonInvertible("series with zero constant term is not invertible")
    inv0 = 1 / c0
    pres, order = a.pres, a.order
    parts = [NCSeries(pres, order, a.homogeneous(d)) for d in range(order + 1)]
    inv = [NCSeries.const(pres, order, inv0)]
    for d in range(1, order + 1):
        acc = NCSeries(pres, order)
        for j in range(1, d + 1):
            if parts[j].coeffs and inv[d - j].coeffs:
                acc = acc + parts[j] * inv[d - j]
        inv.append(acc.scalar_mul(-inv0))
    out = NCSeries(pres, order)
    for piece in inv:
        out = out + piece
    return out


def scale_variable(a, gen, factor):
    """Substitute ``gen -> factor * gen``: multiply by factor**(occurrences of gen)."""
    i = a.pres.index(gen)
    factor = _rf(factor, a.pres.vt)
    cache = {}
    out = {}
    for w, c in a.coeffs.items():
        k = w.count(i)
        if k:
            f = cache.get(k)
            if f is None:
                f = cache[k] = factor ** k
            c = c * f
        if c:
            out[w] = c
    return NCSeries(a.pres, a.order, out)


def restrict(a, zero_gens):
    """Set the given generators to zero (drop every word that contains one)."""
    idx = {a.pres.index(g) for g in zero_gens}
    return NCSeries(a.pres, a.order,
                    {w: c for w, c in a.coeffs.items() if not idx.intersection(w)})


def qnumber(base_power, base):
    """``(x)_q = (q^x - 1)/(q - 1)`` given ``base_power = q^x``; reduces to ``x`` at q = 1."""
    return (_rf(base_power) - 1) / (_rf(base) - 1)


def qfactorial(k, base):
    base = _rf(base)
    if base.is_const() and base.const_value() == 1:
        out = 1
        for i in range(1, k + 1):
            out *= i
        return base.vt.const(out)
    out = base.vt.const(1)
    for i in range(1, k + 1):
        out = out * qnumber(base ** i, base)
    return out


def q_power_coefficients(exponent_param, base, order):
    """Coefficients ``C_k = (-a)_q (-a+1)_q ... (-a+k-1)_q / (k)_q!`` with ``exponent_param = q^a``."""
    p = _rf(exponent_param)
    base = _rf(base)
    coeffs = [base.vt.const(1)]
    for k in range(1, order + 1):
        factor = qnumber(base ** (k - 1) / p, base) / qnumber(base ** k, base)
        coeffs.append(coeffs[-1] * factor)
    return coeffs


def _check_arg(arg):
    if arg.constant_term():
        raise DomainError("argument must have zero constant term")


def _series_from_powers(arg, coeffs, order):
    result = NCSeries.const(arg.pres, order, coeffs[0])
    power = NCSeries.one(arg.pres, order)
    for k in range(1, order + 1):
        power = power * arg
        if not power.coeffs:
            break
        if coeffs[k]:
            result = result + power.scalar_mul(coeffs[k])
    return result


def q_power(arg, exponent_param, base=None, order=None):
    """The q-binomial series ``(1 - arg)^{(a)}_q = sum_k C_k arg^k`` with ``exponent_param = q^a``."""
    _check_arg(arg)
    base = VARS.var("q") if base is None else base
    order = arg.order if order is None else min(order, arg.order)
    arg = arg.truncate(order)
    return _series_from_powers(arg, q_power_coefficients(exponent_param, base, order), order)


def q_exp(arg, base=None, order=None):
    """``exp_q(arg) = sum_k arg^k / (k)_q!``."""
    _check_arg(arg)
    base = _rf(VARS.var("q") if base is None else base)
    order = arg.order if order is None else min(order, arg.order)
    coeffs = []
    for k in range(order + 1):
        f = qfactorial(k, base)
        if not f:
            raise SingularParameter(f"({k})_q! vanishes for q = {base}")
        coeffs.append(1 / f)
    return _series_from_powers(arg.truncate(order), coeffs, order)


def ordinary_power(arg, exponent, order=None):
    """``(1 - arg)^alpha = sum_k (-alpha)(-alpha+1)...(-alpha+k-1)/k! * arg^k``."""
    _check_arg(arg)
    exponent = _rf(exponent)
    order = arg.order if order is None else min(order, arg.order)
    coeffs = [exponent.vt.const(1)]
    for k in range(1, order + 1):
        coeffs.append(coeffs[-1] * (k - 1 - exponent) / k)
    return _series_from_powers(arg.truncate(order), coeffs, order)


def _det(rows):
    """Determinant of a small square matrix of RatFunc by cofactor expansion."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        if not rows[0][j]:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else VARS.const(0)


class SubstitutionReport:
    """Outcome of :func:`apply_substitution`: one entry per target relation."""

    def __init__(self, relations, determinant):
        self.relations = relations  # list of (label, residual NCSeries)
        self.determinant = determinant

    @property
    def ok(self):
        return all(not res.coeffs for _, res in self.relations)

    def failures(self):
        return [(label, res) for label, res in self.relations if res.coeffs]

    def __str__(self):
        lines = [f"det = {self.determinant}"]
        for label, res in self.relations:
            lines.append(f"{label}: {'0' if not res.coeffs else res}")
        return "\n".join(lines)


def apply_substitution(source, target, images):
    """Check that ``images`` (target generator -> degree-1 series over ``source``)
    satisfy every exchange rule of ``target`` inside ``source``.
    """
    if set(images) != set(target.generators):
        raise StructuralError("images must cover every target generator")
    lin = {}
    for g, img in images.items():
        if img.pres is not source:
            raise StructuralError("images must live in the source presentation")
        if any(len(w) != 1 for w in img.coeffs):
            raise StructuralError(f"image of {g} is not homogeneous of degree 1")
        lin[g] = img
    if len(source.generators) != len(target.generators):
        raise NonInvertible("substitution between algebras with different generator counts")
    zero = source.vt.const(0)
    mat = [[lin[g].coeffs.get((i,), zero) for i in range(len(source.generators))]
           for g in target.generators]
    det = _det(mat)
    if not det:
        raise NonInvertible("linear substitution is singular")
    relations = []
    for (j, i), rhs in target.rules.items():
        hi, lo = target.generators[j], target.generators[i]
        res = lin[hi] * lin[lo]
        label = f"{hi}{lo} = " + " + ".join(
            f"({c})*{target.generators[a]}{target.generators[b]}" for c, (a, b) in rhs)
        for c, (a, b) in rhs:
            res = res - (lin[target.generators[a]] * lin[target.generators[b]]).scalar_mul(c)
        relations.append((label, res))
    return SubstitutionReport(relations, det)


# -- the presentations used by the identity catalogue -------------------------------

def _presentations():
    q, eta = VARS.vars("q", "eta")
    qbar = 1 / q
    single = Presentation("u", ["u"], {})
    uv = Presentation("q-plane", ["u", "v"], {("v", "u"): [(q, ("u", "v"))]})
    uvw = Presentation("q-space", ["u", "v", "w"], {
        ("v", "u"): [(q, ("u", "v"))],
        ("w", "v"): [(qbar, ("v", "w"))],
        ("w", "u"): [(q, ("u", "w"))],
    })
    rational = Presentation("rational", ["x", "y", "z"], {
        ("y", "x"): [(q, ("x", "y")), (q * eta, ("y", "y"))],
        ("z", "x"): [(q, ("x", "z")), (q * eta * (1 + qbar), ("y", "z"))],
        ("z", "y"): [(qbar, ("y", "z"))],
    })
    yangian = Presentation("yangian", ["x", "y", "z"], {
        ("y", "x"): [(1, ("x", "y")), (eta, ("y", "y"))],
        ("z", "x"): [(1, ("x", "z")), (2 * eta, ("y", "z"))],
        ("z", "y"): [(1, ("y", "z"))],
    })
    # e1 = e_{delta-alpha}, e0 = q^{-h} e_{-alpha}: e0 e1 = q^2 e1 e0
    evars = Presentation("e-vars", ["e1", "e0"], {("e0", "e1"): [(q ** 2, ("e1", "e0"))]})
    fvars = Presentation("f-vars", ["f0", "f1"], {
        ("f1", "f0"): [(q ** -2, ("f0", "f1")), (-eta, ("f0", "f0"))],
    })
    return {p.name: p for p in (single, uv, uvw, rational, yangian, evars, fvars)}


PRESENTATIONS = _presentations()
