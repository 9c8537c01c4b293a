"""Exact coefficient arithmetic.

Sparse multivariate polynomials over the rationals (:class:`MPoly`) and
rational functions (:class:`RatFunc`) whose equality is decided by
cross-multiplication.  Rationals are :class:`fractions.Fraction`; integral
coefficients are kept as plain ``int`` for speed.

Monomials are packed into a single Python integer, ``BITS`` bits per
variable, so monomial multiplication is integer addition.  The field's top bit
is a guard bit used by the divisibility test, which caps every individual
exponent at ``2**(BITS - 1) - 1``.

Rational functions keep their denominator as ``dconst * prod(f**m)`` over a
dictionary of primitive integer polynomial factors.  Sums use the lcm of the
factor multisets, and factors are cancelled against the numerator by exact
trial division, so expressions stay small without any multivariate gcd.
"""

from fractions import Fraction
from math import gcd

from . import kernels

BITS = 16
FIELD = (1 << BITS) - 1
MAX_EXPONENT = (1 << (BITS - 1)) - 1


class StructuralError(ValueError):
    """Operands live in different variable tables, or a shape precondition fails."""


class SingularSubstitution(ZeroDivisionError):
    """A denominator vanishes identically under a substitution or evaluation."""


class VarTable:
    """Ordered, immutable table of commuting parameter names."""

    __slots__ = ("names", "_index", "guard")

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        self.guard = sum(1 << (BITS * i + BITS - 1) for i in range(len(names)))

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return self is other or (isinstance(other, VarTable) and self.names == other.names)

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarTable({', '.join(self.names)})"

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise StructuralError(f"unknown variable {name!r} for {self!r}") from None

    def unit(self, name):
        return 1 << (BITS * self.index(name))

    def pack(self, exps):
        if len(exps) != len(self.names):
            raise StructuralError("exponent vector length does not match the variable table")
        e = 0
        for i, k in enumerate(exps):
            if not 0 <= k <= MAX_EXPONENT:
                raise OverflowError(f"exponent {k} out of range")
            e |= k << (BITS * i)
        return e

    def unpack(self, e):
        return tuple((e >> (BITS * i)) & FIELD for i in range(len(self.names)))

    def poly(self, name):
        return MPoly(self, {self.unit(name): 1})

    def var(self, name):
        return RatFunc.from_poly(self.poly(name))

    def const(self, value):
        return RatFunc.from_poly(MPoly.const(self, value))

    def vars(self, *names):
        return tuple(self.var(n) for n in names)


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _fields_min(keys, nv):
    """Per-variable minimum exponent over a collection of packed monomials."""
    keys = list(keys)
    present = 0
    for e in keys:
        present |= e
    out = 0
    for i in range(nv):
        shift = BITS * i
        if (present >> shift) & FIELD:
            m = min((e >> shift) & FIELD for e in keys)
            if m:
                out |= m << shift
    return out


class MPoly:
    """Sparse multivariate polynomial with rational coefficients.

    ``terms`` maps packed exponent -> nonzero coefficient.  Instances are
    treated as immutable.
    """

    __slots__ = ("vt", "terms", "_hash")

    def __init__(self, vt, terms=None):
        self.vt = vt
        self.terms = {} if terms is None else terms
        self._hash = None

    @classmethod
    def const(cls, vt, value):
        value = _norm_coeff(Fraction(value) if isinstance(value, (float, str)) else value)
        return cls(vt, {0: value} if value else {})

    @classmethod
    def from_exponents(cls, vt, mapping):
        """Build from ``{exponent tuple: coefficient}``."""
        terms = {}
        for exps, c in mapping.items():
            c = _norm_coeff(c)
            if c:
                k = vt.pack(exps)
                terms[k] = terms.get(k, 0) + c
        return cls(vt, {k: c for k, c in terms.items() if c})

    # -- predicates ---------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def const_value(self):
        if not self.is_const():
            raise StructuralError("polynomial is not constant")
        return Fraction(self.terms.get(0, 0))

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.vt != self.vt:
                raise StructuralError("variable table mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.const(self.vt, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(self.terms) < len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        kernels.poly_scale_add(out, b, 1, 0)
        return MPoly(self.vt, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vt, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        kernels.poly_scale_add(out, other.terms, -1, 0)
        return MPoly(self.vt, out)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _norm_coeff(other)
            if not other:
                return MPoly(self.vt)
            return MPoly(self.vt, {e: _norm_coeff(c * other) for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MPoly(self.vt, kernels.poly_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        if len(self.terms) == 1:
            (e, c), = self.terms.items()
            if any(k * n > MAX_EXPONENT for k in self.vt.unpack(e)):
                raise OverflowError("exponent overflow")
            return MPoly(self.vt, {e * n: c ** n})
        result = MPoly.const(self.vt, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(self.vt, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        if other.vt != self.vt:
            raise StructuralError("variable table mismatch")
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- structure ----------------------------------------------------------
    def degree(self, name):
        shift = BITS * self.vt.index(name)
        return max(((e >> shift) & FIELD for e in self.terms), default=-1 if not self.terms else 0)

    def total_degree(self):
        return max((sum(self.vt.unpack(e)) for e in self.terms), default=-1)

    def variables(self):
        present = 0
        for e in self.terms:
            present |= e
        return tuple(n for i, n in enumerate(self.vt.names) if (present >> (BITS * i)) & FIELD)

    def int_content(self):
        """gcd of the coefficients for an integer-coefficient polynomial."""
        return gcd(*self.terms.values()) if self.terms else 0

    def derivative(self, name):
        i = self.vt.index(name)
        shift = BITS * i
        unit = 1 << shift
        out = {}
        for e, c in self.terms.items():
            k = (e >> shift) & FIELD
            if k:
                out[e - unit] = c * k
        return MPoly(self.vt, out)

    def evaluate(self, values):
        """Evaluate at exact numbers; ``values`` maps every occurring name to a number."""
        names = self.variables()
        missing = [n for n in names if n not in values]
        if missing:
            raise StructuralError(f"unbound variables {missing}")
        slots = [(BITS * self.vt.index(n), values[n]) for n in names]
        cache = {}
        total = 0
        for e, c in self.terms.items():
            v = c
            for shift, x in slots:
                k = (e >> shift) & FIELD
                if k:
                    key = (shift, k)
                    p = cache.get(key)
                    if p is None:
                        p = cache[key] = x ** k
                    v = v * p
            total += v
        return _norm_coeff(total) if isinstance(total, Fraction) else total

    def grlex_items(self):
        """Terms sorted by graded-lexicographic order, highest first."""
        def key(item):
            ex = self.vt.unpack(item[0])
            return (sum(ex), ex)
        return sorted(self.terms.items(), key=key, reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.grlex_items():
            ex = self.vt.unpack(e)
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.vt.names, ex) if k
            )
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f"{sign}{body}"
        return s

    def __repr__(self):
        return f"MPoly({self})"


def poly_arithmetic(a, b, op):
    """Dispatch ``add``, ``mul`` or ``neg`` (unary on ``a``)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown polynomial op {op!r}")


# -- rational functions -------------------------------------------------------


def _clear_denominators(poly):
    """Return ``(int_poly, L)`` with ``int_poly == L * poly`` and integer coefficients."""
    L = 1
    for c in poly.terms.values():
        if isinstance(c, Fraction):
            d = c.denominator
            L = L * d // gcd(L, d)
    if L == 1:
        return poly, 1
    return MPoly(poly.vt, {e: _norm_coeff(c * L) for e, c in poly.terms.items()}), L


def _split_denominator(poly):
    """Split a nonzero integer polynomial into ``(signed_const, {factor: mult})``.

    Single variables become their own factors; the remaining part is made
    primitive with a positive lex-leading coefficient.
    """
    vt = poly.vt
    factors = {}
    mono = _fields_min(poly.terms, len(vt))
    terms = poly.terms
    if mono:
        for i in range(len(vt)):
            k = (mono >> (BITS * i)) & FIELD
            if k:
                factors[MPoly(vt, {1 << (BITS * i): 1})] = k
        terms = {e - mono: c for e, c in terms.items()}
    g = gcd(*terms.values())
    sign = -1 if terms[max(terms)] < 0 else 1
    g *= sign
    if len(terms) == 1 and 0 in terms:
        return terms[0], factors
    if g != 1:
        terms = {e: c // g for e, c in terms.items()}
    factors[MPoly(vt, terms)] = 1
    return g, factors


def _is_var_factor(f):
    if len(f.terms) != 1:
        return False
    (e, c), = f.terms.items()
    return c == 1 and e & (e - 1) == 0 and e != 0


def _try_divide(num_terms, f, guard):
    """Exact quotient ``num / f`` as a term dict, or ``None`` if not divisible.

    ``f`` is a primitive integer polynomial, so by Gauss's lemma an exact
    quotient of an integer polynomial has integer coefficients.  The division
    algorithm by a single polynomial leaves zero remainder iff ``f`` divides,
    and any term pushed to the remainder is final, so the first failure aborts.
    """
    if _is_var_factor(f):
        (u, _), = f.terms.items()
        field = FIELD * u
        for e in num_terms:
            if not e & field:
                return None
        return {e - u: c for e, c in num_terms.items()}
    lf = max(f.terms)
    cf = f.terms[lf]
    p = dict(num_terms)
    q = {}
    fterms = f.terms
    scale_add = kernels.poly_scale_add
    while p:
        lp = max(p)
        if ((lp | guard) - lf) & guard != guard:
            return None
        c = p[lp]
        if c % cf:
            return None
        t = c // cf
        d = lp - lf
        q[d] = t
        scale_add(p, fterms, -t, d)
        if lp in p:  # leading term must cancel exactly
            return None
    return q


def _factor_product(vt, factors):
    out = MPoly(vt, {0: 1})
    for f, m in factors.items():
        for _ in range(m):
            out = out * f
    return out


class RatFunc:
    """Exact rational function ``num / (dconst * prod(f**m))``.

    The numerator has integer coefficients; the denominator is kept factored.
    The representation is not fully reduced; equality is by cross-multiplication
    over the lcm of the two denominators.
    """

    __slots__ = ("num", "dconst", "dfac")

    def __init__(self, num, den=1):
        if isinstance(num, RatFunc):
            value = num / den if not (isinstance(den, int) and den == 1) else num
            self.num, self.dconst, self.dfac = value.num, value.dconst, value.dfac
            return
        if not isinstance(num, MPoly):
            if isinstance(den, MPoly):
                num = MPoly.const(den.vt, num)
            else:
                raise StructuralError("RatFunc needs at least one MPoly operand")
        vt = num.vt
        if not isinstance(den, MPoly):
            den = MPoly.const(vt, den)
        elif den.vt != vt:
            raise StructuralError("variable table mismatch")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        n_int, ln = _clear_denominators(num)
        d_int, ld = _clear_denominators(den)
        c, factors = _split_denominator(d_int)
        if c < 0:
            n_int, c = -n_int, -c
        value = RatFunc._make(n_int * ld, c * ln, factors, cancel=True)
        self.num, self.dconst, self.dfac = value.num, value.dconst, value.dfac

    @classmethod
    def _raw(cls, num, dconst, dfac):
        obj = object.__new__(cls)
        obj.num = num
        obj.dconst = dconst
        obj.dfac = dfac
        return obj

    @classmethod
    def _make(cls, num, dconst, dfac, cancel=True):
        if not num.terms:
            return cls._raw(num, 1, {})
        if dfac and cancel:
            terms = num.terms
            guard = num.vt.guard
            kept = {}
            for f, m in dfac.items():
                while m:
                    q = _try_divide(terms, f, guard)
                    if q is None:
                        break
                    terms = q
                    m -= 1
                if m:
                    kept[f] = m
            if terms is not num.terms:
                num = MPoly(num.vt, terms)
            dfac = kept
        if dconst != 1:
            g = gcd(num.int_content(), dconst)
            if g != 1:
                num = MPoly(num.vt, {e: c // g for e, c in num.terms.items()})
                dconst //= g
        return cls._raw(num, dconst, dfac)

    @classmethod
    def from_poly(cls, poly):
        n, L = _clear_denominators(poly)
        return cls._raw(n, L, {})._reduce_const()

    def _reduce_const(self):
        if self.dconst != 1 and self.num.terms:
            g = gcd(self.num.int_content(), self.dconst)
            if g != 1:
                return RatFunc._raw(
                    MPoly(self.num.vt, {e: c // g for e, c in self.num.terms.items()}),
                    self.dconst // g, self.dfac)
        return self

    @property
    def vt(self):
        return self.num.vt

    @property
    def den(self):
        """Expanded denominator polynomial."""
        return _factor_product(self.vt, self.dfac) * self.dconst

    # -- predicates ---------------------------------------------------------
    def is_zero(self):
        return not self.num.terms

    def is_const(self):
        return not self.dfac and self.num.is_const()

    def const_value(self):
        if not self.is_const():
            raise StructuralError(f"{self} is not constant")
        return Fraction(self.num.terms.get(0, 0), self.dconst)

    def __bool__(self):
        return bool(self.num.terms)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.num.vt != self.num.vt:
                raise StructuralError("variable table mismatch")
            return other
        if isinstance(other, int):
            return RatFunc._raw(MPoly(self.vt, {0: other} if other else {}), 1, {})
        if isinstance(other, Fraction):
            return RatFunc._raw(
                MPoly(self.vt, {0: other.numerator} if other else {}), other.denominator, {})
        if isinstance(other, MPoly):
            return RatFunc.from_poly(self._check_vt(other))
        return NotImplemented

    def _check_vt(self, poly):
        if poly.vt != self.vt:
            raise StructuralError("variable table mismatch")
        return poly

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        return RatFunc.sum((self, other))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.dconst, self.dfac)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num.terms or not other.num.terms:
            return RatFunc._raw(MPoly(self.vt), 1, {})
        guard = self.vt.guard
        a_terms, b_terms = self.num.terms, other.num.terms
        dfac = {}
        # cancel each side's factors against the other side's numerator
        for src, target in ((other.dfac, "a"), (self.dfac, "b")):
            for f, m in src.items():
                while m:
                    cur = a_terms if target == "a" else b_terms
                    if len(cur) == 1 and 0 in cur:
                        break
                    q = _try_divide(cur, f, guard)
                    if q is None:
                        break
                    if target == "a":
                        a_terms = q
                    else:
                        b_terms = q
                    m -= 1
                if m:
                    dfac[f] = dfac.get(f, 0) + m
        num = MPoly(self.vt, kernels.poly_mul(a_terms, b_terms))
        dconst = self.dconst * other.dconst
        if dconst != 1:
            g = gcd(num.int_content(), dconst)
            if g != 1:
                num = MPoly(self.vt, {e: c // g for e, c in num.terms.items()})
                dconst //= g
        return RatFunc._raw(num, dconst, dfac)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num.terms:
            raise ZeroDivisionError("division by the zero rational function")
        c, factors = _split_denominator(self.num)
        num = _factor_product(self.vt, self.dfac) * self.dconst
        if c < 0:
            num, c = -num, -c
        return RatFunc._make(num, c, factors, cancel=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ValueError("only integer powers")
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_const():
            return self._coerce(self.const_value() ** n)
        num = self.num ** n
        dfac = {f: m * n for f, m in self.dfac.items()}
        return RatFunc._raw(num, self.dconst ** n, dfac)

    @staticmethod
    def sum(items):
        """Sum of rational functions over the lcm of their denominators."""
        items = [x for x in items if x.num.terms]
        if not items:
            raise ValueError("RatFunc.sum needs at least one nonzero term; use a typed zero")
        if len(items) == 1:
            return items[0]
        vt = items[0].vt
        lcm_fac = {}
        L = 1
        for x in items:
            if x.num.vt != vt:
                raise StructuralError("variable table mismatch")
            for f, m in x.dfac.items():
                if lcm_fac.get(f, 0) < m:
                    lcm_fac[f] = m
            d = x.dconst
            if d != 1:
                L = L * d // gcd(L, d)
        acc = {}
        pow_cache = {}
        for x in items:
            cof = None
            for f, m in lcm_fac.items():
                k = m - x.dfac.get(f, 0)
                if k:
                    key = (f, k)
                    p = pow_cache.get(key)
                    if p is None:
                        p = pow_cache[key] = f ** k
                    cof = p if cof is None else cof * p
            terms = x.num.terms if cof is None else kernels.poly_mul(x.num.terms, cof.terms)
            kernels.poly_scale_add(acc, terms, L // x.dconst, 0)
        return RatFunc._make(MPoly(vt, acc), L, lcm_fac, cancel=True)

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ratfunc_equal(self, other)

    __hash__ = None

    # -- calculus and substitution -------------------------------------------
    def derivative(self, name):
        return derivative(self, name)

    def subs(self, bindings):
        return substitute(self, bindings)

    def evaluate(self, values):
        """Evaluate at exact numbers to a :class:`Fraction`."""
        den = Fraction(self.dconst)
        for f, m in self.dfac.items():
            v = f.evaluate(values)
            if not v:
                raise SingularSubstitution(f"denominator factor ({f}) vanishes at {values}")
            den *= Fraction(v) ** m
        return Fraction(self.num.evaluate(values)) / den

    def variables(self):
        names = set(self.num.variables())
        for f in self.dfac:
            names.update(f.variables())
        return tuple(n for n in self.vt.names if n in names)

    # -- printing -------------------------------------------------------------
    def __str__(self):
        if not self.dfac and self.dconst == 1:
            return str(self.num)
        num = str(self.num)
        if len(self.num.terms) > 1:
            num = f"({num})"
        parts = []
        if self.dconst != 1:
            parts.append(str(self.dconst))
        for f in sorted(self.dfac, key=str):
            m = self.dfac[f]
            s = str(f)
            if len(f.terms) > 1:
                s = f"({s})"
            parts.append(s if m == 1 else f"{s}^{m}")
        den = "*".join(parts)
        if len(parts) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RatFunc({self})"


def ratfunc_arithmetic(a, b, op):
    """Dispatch ``add``, ``mul``, ``div`` or ``neg`` (unary on ``a``)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    raise ValueError(f"unknown rational-function op {op!r}")


def ratfunc_equal(a, b):
    """Decide ``a == b`` by cross-multiplying over the lcm of the denominators."""
    if a.num.vt != b.num.vt:
        raise StructuralError("variable table mismatch")
    if a.dconst == b.dconst and a.dfac == b.dfac:
        return a.num == b.num
    if not b.num.terms:
        return not a.num.terms
    if not a.num.terms:
        return False
    lcm_fac = dict(a.dfac)
    for f, m in b.dfac.items():
        if lcm_fac.get(f, 0) < m:
            lcm_fac[f] = m
    vt = a.vt
    sides = []
    for x in (a, b):
        cof = MPoly(vt, {0: 1})
        for f, m in lcm_fac.items():
            k = m - x.dfac.get(f, 0)
            if k:
                cof = cof * f ** k
        sides.append(x.num * cof * (a.dconst * b.dconst // x.dconst))
    return sides[0] == sides[1]


def substitute(f, bindings):
    """Compose ``f`` with ``bindings`` (name -> RatFunc or number)."""
    if not bindings:
        return f
    vt = f.vt
    for name in bindings:
        vt.index(name)
    if all(isinstance(v, (int, Fraction)) for v in bindings.values()) and set(
            f.variables()) <= set(bindings):
        return vt.const(f.evaluate(bindings))
    binds = {}
    for name, v in bindings.items():
        if isinstance(v, RatFunc):
            if v.vt != vt:
                raise StructuralError("variable table mismatch in binding")
            binds[name] = v
        else:
            binds[name] = vt.const(v)

    def sub_poly(p):
        names = [n for n in p.variables() if n in binds]
        if not names:
            return RatFunc.from_poly(p)
        slots = [(BITS * vt.index(n), binds[n]) for n in names]
        cache = {}
        grouped = {}
        for e, c in p.terms.items():
            rest = e
            key = []
            for shift, _ in slots:
                k = (e >> shift) & FIELD
                key.append(k)
                rest -= k << shift
            grouped.setdefault(tuple(key), {})[rest] = c
        terms = []
        for key, rest_terms in grouped.items():
            val = RatFunc.from_poly(MPoly(vt, rest_terms))
            for (shift, x), k in zip(slots, key):
                if k:
                    pw = cache.get((shift, k))
                    if pw is None:
                        pw = cache[(shift, k)] = x ** k
                    val = val * pw
            terms.append(val)
        terms = [t for t in terms if t]
        return RatFunc.sum(terms) if terms else vt.const(0)

    num = sub_poly(f.num)
    den = vt.const(f.dconst)
    for fac, m in f.dfac.items():
        v = sub_poly(fac)
        if v.is_zero():
            raise SingularSubstitution(f"denominator factor ({fac}) vanishes under {bindings}")
        den = den * v ** m
    return num / den


def derivative(f, name):
    """Exact partial derivative of a rational function (quotient rule)."""
    vt = f.vt
    vt.index(name)
    if not f.dfac:
        return RatFunc._make(f.num.derivative(name), f.dconst, {}, cancel=False)
    # d(N/(c*prod g^m)) = [N' * prod g - N * sum m g' prod_{h != g} h] / (c * prod g^(m+1))
    facs = list(f.dfac.items())
    live = [(g, m) for g, m in facs if name in g.variables()]
    if not live:
        return RatFunc._make(f.num.derivative(name), f.dconst, dict(f.dfac), cancel=True)
    prod_all = MPoly(vt, {0: 1})
    for g, _ in live:
        prod_all = prod_all * g
    num = f.num.derivative(name) * prod_all
    for i, (g, m) in enumerate(live):
        others = MPoly(vt, {0: 1})
        for j, (h, _) in enumerate(live):
            if j != i:
                others = others * h
        num = num - f.num * g.derivative(name) * others * m
    dfac = dict(f.dfac)
    for g, m in live:
        dfac[g] = m + 1
    return RatFunc._make(num, f.dconst, dfac, cancel=True)


# -- univariate helpers ---------------------------------------------------------


def _univariate_var(*polys):
    names = set()
    for p in polys:
        names.update(p.variables())
    if len(names) > 1:
        raise StructuralError(f"expected univariate input, got variables {sorted(names)}")
    return names.pop() if names else None


def to_dense(poly, name=None):
    """Coefficient list (lowest degree first) of a univariate polynomial."""
    if name is None:
        name = _univariate_var(poly)
    if name is None:
        return [Fraction(poly.terms.get(0, 0))] if poly.terms else []
    shift = BITS * poly.vt.index(name)
    deg = poly.degree(name)
    out = [Fraction(0)] * (deg + 1)
    for e, c in poly.terms.items():
        if e & ~(FIELD << shift):
            raise StructuralError("polynomial is not univariate in " + name)
        out[e >> shift] = Fraction(c)
    return out


def from_dense(vt, name, coeffs):
    shift = BITS * vt.index(name)
    return MPoly(vt, {i << shift: _norm_coeff(Fraction(c)) for i, c in enumerate(coeffs) if c})


def _trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def dense_divmod(a, b):
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lb = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        t = a[i + len(b) - 1] / lb
        q[i] = t
        if t:
            for j, c in enumerate(b):
                a[i + j] -= t * c
    return _trim(q), _trim(a[: len(b) - 1])


def dense_gcd(a, b):
    a, b = _trim([Fraction(x) for x in a]), _trim([Fraction(x) for x in b])
    while b:
        a, b = b, dense_divmod(a, b)[1]
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def dense_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def dense_derivative(a):
    return [a[i] * i for i in range(1, len(a))]


def dense_eval(a, x):
    v = Fraction(0)
    for c in reversed(a):
        v = v * x + c
    return v


def univar_gcd(a, b):
    """Monic gcd of two univariate polynomials (Euclidean algorithm over Q)."""
    if a.vt != b.vt:
        raise StructuralError("variable table mismatch")
    name = _univariate_var(a, b)
    if name is None:
        return MPoly.const(a.vt, 1 if (a.terms or b.terms) else 0)
    return from_dense(a.vt, name, dense_gcd(to_dense(a, name), to_dense(b, name)))


def reduce_univariate(f):
    """Cancel the full numerator/denominator gcd of a univariate rational function."""
    num, den = f.num, f.den
    name = _univariate_var(num, den)
    if name is None:
        return f
    g = to_dense(univar_gcd(num, den), name)
    n, _ = dense_divmod(to_dense(num, name), g)
    d, _ = dense_divmod(to_dense(den, name), g)
    return RatFunc(from_dense(f.vt, name, n), from_dense(f.vt, name, d))


# -- the shared parameter table --------------------------------------------------

VARS = VarTable((
    "q", "p", "r", "s", "eta", "xi", "a", "b",
    "z", "z1", "z2", "z3", "u", "u1", "u2", "u3",
    "alpha", "beta", "gamma",
))


def var(name):
    """Symbol from the shared parameter table."""
    return VARS.var(name)


def const(value):
    return VARS.const(value)
