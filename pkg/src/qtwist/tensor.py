"""Dense square matrices on tensor products of two-dimensional legs.

Entries are any exact scalars supporting ``+ - * /`` (``RatFunc`` for symbolic
work, ``Fraction`` for sampled checks); structural zeros are the int ``0``.
Basis order is lexicographic in leg states with leg 1 most significant:
``|11>, |12>, |21>, |22>`` for two legs.
"""

from fractions import Fraction
from itertools import product


class SingularMatrix(ZeroDivisionError):
    pass


def _is_zero(x):
    return not x


class TensorMatrix:
    __slots__ = ("legs", "rows")

    def __init__(self, legs, rows):
        dim = 1 << legs
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise ValueError(f"expected a {dim}x{dim} matrix for {legs} legs")
        self.legs = legs
        self.rows = rows

    @property
    def dim(self):
        return 1 << self.legs

    @classmethod
    def zeros(cls, legs):
        dim = 1 << legs
        return cls(legs, [[0] * dim for _ in range(dim)])

    @classmethod
    def identity(cls, legs):
        m = cls.zeros(legs)
        for i in range(m.dim):
            m.rows[i][i] = 1
        return m

    @classmethod
    def from_rows(cls, rows):
        dim = len(rows)
        legs = dim.bit_length() - 1
        if 1 << legs != dim:
            raise ValueError("dimension must be a power of two")
        return cls(legs, [list(r) for r in rows])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def map(self, fn):
        return TensorMatrix(self.legs, [[fn(x) if x else 0 for x in r] for r in self.rows])

    def copy(self):
        return TensorMatrix(self.legs, [list(r) for r in self.rows])

    # -- arithmetic -------------------------------------------------------------
    def _same(self, other):
        if not isinstance(other, TensorMatrix) or other.legs != self.legs:
            raise ValueError("tensor matrices must have the same number of legs")

    def __add__(self, other):
        self._same(other)
        return TensorMatrix(self.legs, [
            [_add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._same(other)
        return TensorMatrix(self.legs, [
            [_add(a, -b if b else 0) for a, b in zip(ra, rb)]
            for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, c):
        if not c:
            return TensorMatrix.zeros(self.legs)
        return self.map(lambda x: x * c)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._same(other)
        dim = self.dim
        cols = [[(k, other.rows[k][j]) for k in range(dim) if other.rows[k][j]]
                for j in range(dim)]
        out = []
        for r in self.rows:
            nz = {k: x for k, x in enumerate(r) if x}
            row = []
            for col in cols:
                terms = [nz[k] * y for k, y in col if k in nz]
                row.append(_sum(terms))
            out.append(row)
        return TensorMatrix(self.legs, out)

    def commutator(self, other):
        return self @ other - other @ self

    def transpose(self):
        return TensorMatrix(self.legs, [list(c) for c in zip(*self.rows)])

    def is_zero(self):
        return all(not x for r in self.rows for x in r)

    def first_nonzero(self):
        for i, r in enumerate(self.rows):
            for j, x in enumerate(r):
                if x:
                    return (i, j), x
        return None

    def equals(self, other):
        """Exact entrywise comparison: ``(ok, (i, j) of first mismatch or None)``."""
        self._same(other)
        for i, (ra, rb) in enumerate(zip(self.rows, other.rows)):
            for j, (a, b) in enumerate(zip(ra, rb)):
                if not _eq(a, b):
                    return False, (i, j)
        return True, None

    def __eq__(self, other):
        if not isinstance(other, TensorMatrix):
            return NotImplemented
        return self.legs == other.legs and self.equals(other)[0]

    __hash__ = None

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)


def _add(a, b):
    if not a:
        return b if b else 0
    if not b:
        return a
    v = a + b
    return v if v else 0


def _sum(terms):
    if not terms:
        return 0
    if len(terms) == 1:
        return terms[0]
    first = terms[0]
    if hasattr(type(first), "sum") and all(type(t) is type(first) for t in terms):
        v = type(first).sum(terms)
    else:
        v = 0
        for t in terms:
            v = v + t
    return v if v else 0


def _eq(a, b):
    if not a:
        return not b
    if not b:
        return False
    return a == b


def state_index(states):
    """Basis index of a product state given leg states in ``{1, 2}``."""
    idx = 0
    for s in states:
        idx = (idx << 1) | (s - 1)
    return idx


def index_states(idx, legs):
    return tuple(((idx >> (legs - 1 - k)) & 1) + 1 for k in range(legs))


def kron(a, b):
    out = TensorMatrix.zeros(a.legs + b.legs)
    db = b.dim
    for i, ra in enumerate(a.rows):
        for j, x in enumerate(ra):
            if not x:
                continue
            for k, rb in enumerate(b.rows):
                row = out.rows[i * db + k]
                for l, y in enumerate(rb):
                    if y:
                        row[j * db + l] = x * y
    return out


def embed(op, positions, legs):
    """Place an operator acting on ``len(positions)`` legs onto ``positions`` (0-based)
    of a ``legs``-leg space, identity elsewhere.  ``positions[0]`` is the op's first leg.
    """
    k = op.legs
    if len(positions) != k or len(set(positions)) != k:
        raise ValueError("positions must list each operator leg once")
    if any(not 0 <= p < legs for p in positions):
        raise IndexError("leg position out of range")
    out = TensorMatrix.zeros(legs)
    shifts = [legs - 1 - p for p in positions]
    mask = 0
    for s in shifts:
        mask |= 1 << s
    for col in range(1 << legs):
        b = 0
        for s in shifts:
            b = (b << 1) | ((col >> s) & 1)
        base = col & ~mask
        for a in range(1 << k):
            x = op.rows[a][b]
            if not x:
                continue
            row = base
            for t, s in enumerate(shifts):
                row |= ((a >> (k - 1 - t)) & 1) << s
            out.rows[row][col] = x
    return out


def leg_permute(m, perm):
    """Relabel legs: leg ``i`` of the input becomes leg ``perm[i]`` of the output."""
    legs = m.legs
    if sorted(perm) != list(range(legs)):
        raise ValueError("perm must be a permutation of the legs")

    def remap(idx):
        states = index_states(idx, legs)
        new = [0] * legs
        for i, s in enumerate(states):
            new[perm[i]] = s
        return state_index(new)

    table = [remap(i) for i in range(m.dim)]
    out = TensorMatrix.zeros(legs)
    for i, r in enumerate(m.rows):
        for j, x in enumerate(r):
            if x:
                out.rows[table[i]][table[j]] = x
    return out


def flip(m):
    """Swap the two legs of a two-leg operator (``X_12 -> X_21``)."""
    return leg_permute(m, [1, 0])


def inverse(m):
    """Exact inverse by Gauss-Jordan elimination."""
    n = m.dim
    a = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(m.rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col] if not isinstance(a[col][col], int) else Fraction(1, a[col][col])
        a[col] = [x * inv if x else 0 for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [_add(x, -(f * y)) if y else x for x, y in zip(a[r], a[col])]
    return TensorMatrix(m.legs, [[x if x else 0 for x in r[n:]] for r in a])


inverse4 = inverse


def tensor_ops(op, *args):
    """Dispatch ``kron``, ``leg_permute``, ``matmul``, ``inverse4`` or ``scalar_mul``."""
    if op == "kron":
        return kron(*args)
    if op == "leg_permute":
        return leg_permute(*args)
    if op == "matmul":
        return args[0] @ args[1]
    if op == "inverse4":
        return inverse(*args)
    if op == "scalar_mul":
        return args[0].scale(args[1])
    raise ValueError(f"unknown tensor op {op!r}")


# -- 2x2 building blocks -------------------------------------------------------------

def unit(i, j):
    """Matrix unit ``e_ij`` (1-based)."""
    m = TensorMatrix.zeros(1)
    m.rows[i - 1][j - 1] = 1
    return m


E11, E12, E21, E22 = unit(1, 1), unit(1, 2), unit(2, 1), unit(2, 2)
SIGMA_PLUS, SIGMA_MINUS = E12, E21
SIGMA_Z = TensorMatrix(1, [[1, 0], [0, -1]])
ID2 = TensorMatrix.identity(1)


def diag(values):
    n = len(values)
    legs = n.bit_length() - 1
    m = TensorMatrix.zeros(legs)
    for i, v in enumerate(values):
        m.rows[i][i] = v if v else 0
    return m


def permutation(legs=2):
    """``P_12`` on two legs."""
    m = TensorMatrix.zeros(2)
    for s1, s2 in product((1, 2), repeat=2):
        m.rows[state_index((s2, s1))][state_index((s1, s2))] = 1
    return m


P12 = permutation()
