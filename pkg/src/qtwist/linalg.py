"""Exact rational matrices for chain operators, and their spectral invariants.

An :class:`OperatorMatrix` stores an integer numpy object array and one positive
common denominator, which keeps products in Python ints instead of Fractions.
"""

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactalg import VarTable, dense_derivative, dense_divmod, dense_gcd, from_dense
from .kernels import charpoly_mod

XVARS = VarTable(("x",))


def _lcm(a, b):
    return a * b // math.gcd(a, b)


class OperatorMatrix:
    __slots__ = ("num", "den")

    def __init__(self, num, den=1, normalize=True):
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.num = num
        self.den = int(den)
        if normalize:
            self._normalize()

    def _normalize(self):
        if self.den == 1:
            return
        g = self.den
        for x in self.num.flat:
            if x:
                g = math.gcd(g, x)
                if g == 1:
                    return
        if g > 1:
            self.num = self.num // g
            self.den //= g

    # -- constructors -------------------------------------------------------------
    @classmethod
    def zeros(cls, n):
        m = np.empty((n, n), dtype=object)
        m[:] = 0
        return cls(m, 1, False)

    @classmethod
    def identity(cls, n):
        m = np.empty((n, n), dtype=object)
        m[:] = 0
        for i in range(n):
            m[i, i] = 1
        return cls(m, 1, False)

    @classmethod
    def from_rows(cls, rows):
        """From a nested list of ints / Fractions."""
        rows = [[Fraction(x) for x in r] for r in rows]
        den = 1
        for r in rows:
            for x in r:
                den = _lcm(den, x.denominator)
        n = len(rows)
        m = np.empty((n, len(rows[0]) if rows else 0), dtype=object)
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                m[i, j] = x.numerator * (den // x.denominator)
        return cls(m, den)

    @property
    def n(self):
        return self.num.shape[0]

    @property
    def shape(self):
        return self.num.shape

    def entry(self, i, j):
        return Fraction(int(self.num[i, j]), self.den)

    def to_fractions(self):
        return [[Fraction(int(x), self.den) for x in r] for r in self.num]

    def to_float(self):
        return np.array([[int(x) for x in r] for r in self.num], dtype=float) / self.den

    def copy(self):
        return OperatorMatrix(self.num.copy(), self.den, False)

    # -- arithmetic -----------------------------------------------------------------
    def _aligned(self, other):
        d = _lcm(self.den, other.den)
        return self.num * (d // self.den), other.num * (d // other.den), d

    def __add__(self, other):
        a, b, d = self._aligned(other)
        return OperatorMatrix(a + b, d)

    def __sub__(self, other):
        a, b, d = self._aligned(other)
        return OperatorMatrix(a - b, d)

    def __neg__(self):
        return OperatorMatrix(-self.num, self.den, False)

    def scale(self, c):
        c = Fraction(c)
        return OperatorMatrix(self.num * c.numerator, self.den * c.denominator)

    def __matmul__(self, other):
        return OperatorMatrix(self.num.dot(other.num), self.den * other.den)

    def commutator(self, other):
        return self @ other - other @ self

    def transpose(self):
        return OperatorMatrix(self.num.T.copy(), self.den, False)

    def is_zero(self):
        return not any(x for x in self.num.flat)

    def scalar_value(self):
        """``c`` if the matrix is ``c * I`` exactly, else ``None``."""
        n = self.n
        c = self.num[0, 0]
        for i in range(n):
            for j in range(n):
                x = self.num[i, j]
                if (i == j and x != c) or (i != j and x):
                    return None
        return Fraction(int(c), self.den)

    def max_offending(self, scalar=None):
        """Position and value of the entry deviating most from ``scalar * I``."""
        best, where = Fraction(0), None
        for i in range(self.n):
            for j in range(self.n):
                v = self.entry(i, j) - (scalar if (i == j and scalar is not None) else 0)
                if abs(v) > abs(best):
                    best, where = v, (i, j)
        return where, best

    def __eq__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        return self.den == other.den and bool(np.all(self.num == other.num))

    __hash__ = None

    def inverse(self):
        """Exact inverse by Gauss-Jordan over the rationals."""
        n = self.n
        a = [[Fraction(int(x)) for x in r] + [Fraction(int(i == j)) for j in range(n)]
             for i, r in enumerate(self.num)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("operator matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            inv = 1 / a[col][col]
            a[col] = [x * inv for x in a[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        # (M/d)^-1 = d * M^-1
        return OperatorMatrix.from_rows([r[n:] for r in a]).scale(self.den)


def kron(a, b):
    return OperatorMatrix(np.kron(a.num, b.num), a.den * b.den)


# -- primes and CRT ---------------------------------------------------------------------

def _is_prime(n):
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):  # deterministic for n < 3.4e14
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_below(limit=1 << 31):
    n = limit - 1
    while n > 2:
        if _is_prime(n):
            yield n
        n -= 1


def coefficient_bound(num):
    """Bound on |coefficients| of the charpoly of an integer matrix (Hadamard per minor)."""
    n = num.shape[0]
    row_sq = max((sum(int(x) * int(x) for x in r) for r in num), default=0)
    R = math.isqrt(row_sq) + 1
    return max(math.comb(n, k) * R ** k for k in range(n + 1))


def charpoly_int(num):
    """Charpoly of an integer matrix, lowest degree first, by multi-modular Hessenberg + CRT."""
    n = num.shape[0]
    if n == 0:
        return [1]
    bound = coefficient_bound(num)
    rows = [[int(x) for x in r] for r in num]
    residues, modulus = None, 1
    for p in primes_below():
        cp = charpoly_mod([[x % p for x in r] for r in rows], p)
        if residues is None:
            residues = list(cp)
        else:
            inv = pow(modulus % p, -1, p)
            residues = [r + modulus * (((x - r) * inv) % p) for r, x in zip(residues, cp)]
        modulus *= p
        if modulus > 2 * bound:
            break
    half = modulus // 2
    return [r - modulus if r > half else r for r in residues]


def charpoly_rational(rows):
    """Fallback: Hessenberg reduction over Fractions, lowest degree first."""
    H = [[Fraction(x) for x in r] for r in rows]
    n = len(H)
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if H[i][m - 1]), None)
        if piv is None:
            continue
        if piv != m:
            H[piv], H[m] = H[m], H[piv]
            for row in H:
                row[piv], row[m] = row[m], row[piv]
        for i in range(m + 1, n):
            t = H[i][m - 1] / H[m][m - 1]
            if not t:
                continue
            for j in range(m - 1, n):
                H[i][j] -= t * H[m][j]
            for row in H:
                row[m] += t * row[i]
    polys = [[Fraction(1)]]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        cur = [Fraction(0)] * (m + 1)
        h = H[m - 1][m - 1]
        for k, c in enumerate(prev):
            cur[k + 1] += c
            cur[k] -= h * c
        t = Fraction(1)
        for i in range(1, m):
            t *= H[m - i][m - i - 1]
            coef = t * H[m - i - 1][m - 1]
            for k, c in enumerate(polys[m - i - 1]):
                cur[k] -= coef * c
        polys.append(cur)
    return polys[n]


def charpoly(A):
    """Exact characteristic polynomial of ``A`` as Fractions, lowest degree first (monic)."""
    n, d = A.n, A.den
    c = charpoly_int(A.num)
    # chi_A(x) = d^-n chi_M(d x)
    return [Fraction(ck, d ** (n - k)) for k, ck in enumerate(c)]


def poly_to_mpoly(coeffs):
    return from_dense(XVARS, "x", coeffs)


# -- minimal polynomial -------------------------------------------------------------------

def _sparse_rows(num):
    return [[(j, int(x)) for j, x in enumerate(r) if x] for r in num]


def _matvec(rows, v):
    return [sum(c * v[j] for j, c in r) for r in rows]


def _vector_minpoly(rows, v):
    """Minimal polynomial (monic, Fractions, lowest first) of ``v`` under the integer matrix."""
    basis = []  # (pivot, vec, poly) in reduced form
    k = 0
    cur = list(v)
    while True:
        vec = [Fraction(x) for x in cur]
        poly = [Fraction(0)] * k + [Fraction(1)]
        for piv, bvec, bpoly in basis:
            c = vec[piv]
            if c:
                vec = [x - c * y for x, y in zip(vec, bvec)]
                poly = [x - c * (bpoly[i] if i < len(bpoly) else 0) for i, x in enumerate(poly)]
        piv = next((i for i, x in enumerate(vec) if x), None)
        if piv is None:
            return poly
        inv = 1 / vec[piv]
        vec = [x * inv for x in vec]
        poly = [x * inv for x in poly]
        # keep the basis fully reduced on pivots
        new_basis = []
        for p2, bvec, bpoly in basis:
            c = bvec[piv]
            if c:
                bvec = [x - c * y for x, y in zip(bvec, vec)]
                bpoly = [(bpoly[i] if i < len(bpoly) else 0) - c * poly[i] for i in range(len(poly))]
            new_basis.append((p2, bvec, bpoly))
        basis = new_basis + [(piv, vec, poly)]
        cur = _matvec(rows, cur)
        k += 1


def _poly_lcm(a, b):
    g = dense_gcd(a, b)
    q, _ = dense_divmod(_mul(a, b), g)
    lead = q[-1]
    return [c / lead for c in q]


def _mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _annihilates(rows, poly, i, n):
    """Does ``poly(M)`` kill basis vector ``e_i``?  Integer Horner."""
    den = 1
    for c in poly:
        den = _lcm(den, c.denominator)
    ints = [int(c * den) for c in poly]
    w = [0] * n
    for c in reversed(ints):
        w = _matvec(rows, w)
        if c:
            w[i] += c
    return not any(w)


def minimal_polynomial_int(num, seed=0):
    """Minimal polynomial of an integer matrix: Krylov from a seeded random vector,
    then lcm with the Krylov polynomials of any standard basis vector it fails to kill.
    """
    n = num.shape[0]
    rows = _sparse_rows(num)
    rng = random.Random(seed)
    v = [rng.randint(-9, 9) for _ in range(n)]
    m = _vector_minpoly(rows, v)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if len(m) - 1 == n:
                return m
            if not _annihilates(rows, m, i, n):
                e = [0] * n
                e[i] = 1
                m = _poly_lcm(m, _vector_minpoly(rows, e))
                changed = True
    return m


def minimal_polynomial(A, seed=0):
    """Monic minimal polynomial of ``A`` (Fractions, lowest first)."""
    m = minimal_polynomial_int(A.num, seed)
    d = A.den
    k = len(m) - 1
    # m_A(x) = d^-k m_M(d x)
    return [c * Fraction(d) ** i / Fraction(d) ** k for i, c in enumerate(m)]


def is_squarefree(poly):
    g = dense_gcd(poly, dense_derivative(poly))
    return len(g) <= 1


# -- rank, roots, multiplicities ----------------------------------------------------------

def rank_int(rows):
    """Exact rank of an integer matrix by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in r] for r in rows]
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    rank, prev = 0, 1
    for col in range(n_cols):
        piv = next((r for r in range(rank, n_rows) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, n_rows):
            f = a[r][col]
            a[r] = [(p * x - f * y) // prev for x, y in zip(a[r], a[rank])]
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def _int_poly_eval(c, x):
    v = 0
    for a in reversed(c):
        v = v * x + a
    return v


def _deflate(c, root):
    """Synthetic division of an integer polynomial (lowest first) by ``x - root``."""
    out = [0] * (len(c) - 1)
    acc = 0
    for k in range(len(c) - 1, 0, -1):
        acc = acc * root + c[k]
        out[k - 1] = acc
    return out


def rational_eigenvalues(A, float_eigs=None):
    """``{eigenvalue: algebraic multiplicity}`` for every rational eigenvalue of ``A``.

    ``d * A`` has a monic integer charpoly, so its rational roots are integers;
    candidates come from rounding the float spectrum and are confirmed exactly.
    """
    c = charpoly_int(A.num)
    d = A.den
    if float_eigs is None:
        float_eigs = np.linalg.eigvals(A.to_float()) if A.n else []
    cands = set()
    for lam in float_eigs:
        mu = complex(lam).real * d
        if abs(complex(lam).imag) * d < 0.5:
            r = round(mu)
            cands.update((r - 1, r, r + 1))
    out = {}
    for mu in sorted(cands):
        mult = 0
        while len(c) > 1 and _int_poly_eval(c, mu) == 0:
            c = _deflate(c, mu)
            mult += 1
        if mult:
            out[Fraction(mu, d)] = mult
    return out


def geometric_multiplicity(A, lam):
    lam = Fraction(lam)
    n = A.n
    # rank(d*A - d*lam I) scaled to integers
    scale = lam.denominator
    M = A.num * scale
    shift = lam.numerator * A.den
    rows = [[int(M[i, j]) - (shift if i == j else 0) for j in range(n)] for i in range(n)]
    return n - rank_int(rows)


def _sorted_complex(values):
    return sorted((complex(x) for x in values), key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def spectrum_float_dense(A):
    """Sorted eigenvalues of the float image from a dense eigensolver."""
    ev = np.linalg.eigvals(A.to_float()) if A.n else np.array([])
    return _sorted_complex(ev)


def block_triangular(A, grades):
    """True if ``A`` has no entries above (or none below) the grade-diagonal blocks."""
    up = down = False
    for i in range(A.n):
        for j in range(A.n):
            if A.num[i, j] and grades[i] != grades[j]:
                if grades[i] > grades[j]:
                    up = True
                else:
                    down = True
                if up and down:
                    return False
    return True


def spectrum_float(A, grades=None):
    """Sorted float eigenvalues.

    With a grading under which ``A`` is exactly block-triangular, eigenvalues are
    taken from the diagonal blocks; this avoids the eps^(1/k) error a dense
    solver makes on k x k Jordan blocks that couple different grades.
    """
    if grades is None or not block_triangular(A, grades):
        return spectrum_float_dense(A)
    F = A.to_float()
    out = []
    for g in sorted(set(grades)):
        idx = [i for i, x in enumerate(grades) if x == g]
        block = F[np.ix_(idx, idx)]
        if np.array_equal(block, block.T):
            out.extend(np.linalg.eigvalsh(block))
        else:
            out.extend(np.linalg.eigvals(block))
    return _sorted_complex(out)


def check_against_exact(float_eigs, exact, tol=1e-9):
    """Each rational eigenvalue of multiplicity m has m float eigenvalues within ``tol``.

    Returns the worst matched deviation, or ``inf`` when a match is missing.
    """
    pool = list(float_eigs)
    worst = 0.0
    for lam, mult in exact.items():
        for _ in range(mult):
            if not pool:
                return float("inf")
            j = min(range(len(pool)), key=lambda k: abs(pool[k] - float(lam)))
            worst = max(worst, abs(pool[j] - float(lam)))
            pool.pop(j)
    return worst


@dataclass
class SpectrumReport:
    charpoly: list
    minpoly: list
    squarefree: bool
    eigenvalues: list
    multiplicities: dict = field(default_factory=dict)  # eigenvalue -> (algebraic, geometric)

    @property
    def diagonalizable(self):
        return self.squarefree

    @property
    def jordan_eigenvalues(self):
        return sorted(l for l, (alg, geo) in self.multiplicities.items() if geo < alg)

    def as_dict(self):
        from .report import fmt_rational
        return {
            "charpoly": [fmt_rational(c) for c in self.charpoly],
            "minpoly": [fmt_rational(c) for c in self.minpoly],
            "squarefree": self.squarefree,
            "eigenvalues": [[round(z.real, 12), round(z.imag, 12)] for z in self.eigenvalues],
            "multiplicities": {fmt_rational(k): list(v) for k, v in sorted(self.multiplicities.items())},
        }


def spectrum_report(A, seed=0, grades=None):
    cp = charpoly(A)
    mp = minimal_polynomial(A, seed)
    ev = spectrum_float(A, grades)
    mults = {lam: (alg, geometric_multiplicity(A, lam))
             for lam, alg in rational_eigenvalues(A, ev).items()}
    return SpectrumReport(cp, mp, is_squarefree(mp), ev, mults)
