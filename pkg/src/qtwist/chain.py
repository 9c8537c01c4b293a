"""Periodic spin-1/2 chains built from the twisted R-matrices.

Sites are numbered 1..N with site 1 the most significant tensor leg; state 1 is
spin up.  Transfer matrices carry the auxiliary space as an extra leading leg.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactalg import VARS, RatFunc, SingularSubstitution
from .linalg import (
    OperatorMatrix, charpoly, check_against_exact, rational_eigenvalues, spectrum_float,
    spectrum_float_dense, spectrum_report,
)
from .report import RationalSampler, fmt_rational, make_check
from .rmatrix import FAMILY_PARAMS, SPECTRAL, RFamily, build_RF, scalar
from .tensor import P12, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, TensorMatrix, kron

MAX_EXACT_SITES = 8
MAX_SITES = 10


class SingularPoint(ZeroDivisionError):
    pass


@dataclass
class ChainSpec:
    N: int
    family: str
    params: dict
    s2: Fraction

    def __post_init__(self):
        if not 2 <= self.N <= MAX_SITES:
            raise ValueError(f"sites must be in 2..{MAX_SITES}, got {self.N}")
        names = FAMILY_PARAMS[self.family]
        missing = [n for n in names if n not in self.params]
        if missing:
            raise ValueError(f"missing parameters for {self.family}: {missing}")
        self.params = {n: scalar(self.params[n]) for n in names}
        self.s2 = scalar(self.s2)
        if self.family in ("trig", "rat") and self.params["q"] == 0:
            raise SingularPoint("q = 0")
        if self.family == "trig" and self.params["q"] ** 2 == 1:
            raise SingularPoint("q^2 = 1 degenerates the trigonometric R-matrix (prefactor 1/q - q = 0)")

    @property
    def q(self):
        return self.params.get("q", Fraction(1))

    def rfamily(self):
        return RFamily(self.family, self.params)

    def undeformed(self):
        p = dict(self.params)
        if self.family == "trig":
            p["a"] = p["b"] = Fraction(0)
        else:
            p["xi"] = Fraction(0)
        return ChainSpec(self.N, self.family, p, self.s2)

    def with_sites(self, N):
        return ChainSpec(N, self.family, dict(self.params), self.s2)

    def binding(self):
        out = dict(self.params)
        out["z2" if self.family == "trig" else "u2"] = self.s2
        return out


# -- embeddings ---------------------------------------------------------------------

def _int_scaled(rows):
    fr = [[Fraction(x) if x else Fraction(0) for x in r] for r in rows]
    den = math.lcm(1, *(x.denominator for r in fr for x in r))
    return [[int(x * den) for x in r] for r in fr], den


def _sparse_embed(op_rows, positions, legs):
    """Sparse rows ``{row: [(col, value)]}`` of a local operator placed on ``positions``."""
    k = len(positions)
    shifts = [legs - 1 - p for p in positions]
    mask = 0
    for s in shifts:
        mask |= 1 << s
    out = {}
    for col in range(1 << legs):
        b = 0
        for s in shifts:
            b = (b << 1) | ((col >> s) & 1)
        base = col & ~mask
        for a in range(1 << k):
            x = op_rows[a][b]
            if not x:
                continue
            row = base
            for t, s in enumerate(shifts):
                row |= ((a >> (k - 1 - t)) & 1) << s
            out.setdefault(row, []).append((col, x))
    return out


def embed_local(op, positions, legs):
    """Dense :class:`OperatorMatrix` of ``op`` (TensorMatrix or rows) on 0-based ``positions``."""
    rows = op.rows if isinstance(op, TensorMatrix) else op
    ints, den = _int_scaled(rows)
    dim = 1 << legs
    m = np.empty((dim, dim), dtype=object)
    m[:] = 0
    for r, entries in _sparse_embed(ints, positions, legs).items():
        for c, x in entries:
            m[r, c] = x
    return OperatorMatrix(m, den)


def site_embed(op, k, N):
    """``I (x) ... (x) op (x) ... (x) I`` with ``op`` at site ``k`` (1-based)."""
    if not 1 <= k <= N:
        raise IndexError(f"site {k} outside 1..{N}")
    return embed_local(op, (k - 1,), N)


def bond_embed(op, k, N):
    """Two-site operator on sites ``(k, k+1)`` with periodic wrap ``N+1 = 1``."""
    if not 1 <= k <= N:
        raise IndexError(f"bond {k} outside 1..{N}")
    return embed_local(op, (k - 1, k % N), N)


def apply_local(op, positions, M, legs):
    """``embed(op) @ M`` without forming the embedded operator densely."""
    rows = op.rows if isinstance(op, TensorMatrix) else op
    ints, den = _int_scaled(rows)
    sparse = _sparse_embed(ints, positions, legs)
    out = np.empty(M.num.shape, dtype=object)
    out[:] = 0
    for r, entries in sparse.items():
        acc = None
        for c, x in entries:
            term = M.num[c] * x
            acc = term if acc is None else acc + term
        out[r] = acc
    return OperatorMatrix(out, M.den * den)


def shift_operator(N):
    """Cyclic translation ``|s1 s2 ... sN> -> |sN s1 ... s(N-1)>``."""
    dim = 1 << N
    m = np.empty((dim, dim), dtype=object)
    m[:] = 0
    for idx in range(dim):
        new = (idx >> 1) | ((idx & 1) << (N - 1))
        m[new, idx] = 1
    return OperatorMatrix(m, 1, False)


# -- transfer matrices --------------------------------------------------------------

def _denominator(spec, z):
    """The R-matrix denominator at ``(z, s2)`` with a readable name."""
    q, s2 = spec.q, spec.s2
    if spec.family == "trig":
        return "q^-1*z1 - q*z2", z / q - q * s2
    eta = spec.params["eta"]
    if spec.family == "rat":
        return "q^-1*u1 - q*u2 - q*eta", z / q - q * s2 - q * eta
    return "u1 - u2 - eta", z - s2 - eta


def r_matrix_at(spec, z):
    name, value = _denominator(spec, z)
    if not value:
        raise SingularPoint(f"denominator {name} vanishes at spectral parameter {fmt_rational(z)}")
    return build_RF(spec.rfamily(), z, spec.s2)


def monodromy_trace(spec, factors):
    """``Tr_0 X_{0N} ... X_{01}`` for a list of two-leg factors ``[X_01, ..., X_0N]``."""
    N = spec.N
    legs = N + 1
    T = embed_local(factors[0], (0, 1), legs)
    for k in range(2, N + 1):
        T = apply_local(factors[k - 1], (0, k), T, legs)
    D = 1 << N
    return OperatorMatrix(T.num[:D, :D] + T.num[D:, D:], T.den)


def transfer_matrix(spec, z):
    """``t(z) = Tr_0 R_{0N}(z, s2) ... R_{01}(z, s2)`` at a rational ``z``."""
    R = r_matrix_at(spec, scalar(z))
    return monodromy_trace(spec, [R] * spec.N)


def verify_transfer_commute(spec, z1, z2, check_id="commute"):
    t1 = transfer_matrix(spec, z1)
    t2 = transfer_matrix(spec, z2)
    c = t1.commutator(t2)
    if c.is_zero():
        return make_check(check_id, True, f"[t({fmt_rational(scalar(z1))}),t({fmt_rational(scalar(z2))})] = 0 "
                          f"at N={spec.N}")
    where, val = c.max_offending()
    return make_check(check_id, False, f"commutator entry {where} = {val}")


# -- Hamiltonians ---------------------------------------------------------------------

def prefactor(spec, uncorrected=False):
    """Normalization turning ``P R'`` into a unit-hopping density.

    For the rat family this is the R-matrix denominator at ``u1 = u2``,
    ``(1/q - q) u2 - q eta``; ``uncorrected=True`` gives the ``- eta/q`` variant.
    """
    q = spec.q
    if spec.family == "trig":
        return (1 / q - q) * spec.s2
    eta = spec.params["eta"]
    return (1 / q - q) * spec.s2 - (eta / q if uncorrected else q * eta)


def r_derivative_at(spec):
    """``d/dz R^F(z, s2)`` at ``z = s2``, differentiated symbolically then evaluated."""
    name = SPECTRAL[spec.family]
    fam = RFamily(spec.family, {k: VARS.const(v) for k, v in spec.params.items()})
    R = build_RF(fam, VARS.var(name), VARS.const(spec.s2))
    point = {name: spec.s2}
    out = []
    for r in R.rows:
        row = []
        for x in r:
            if isinstance(x, RatFunc):
                try:
                    row.append(x.derivative(name).evaluate(point))
                except SingularSubstitution as exc:
                    raise SingularPoint(str(exc)) from exc
            else:
                row.append(Fraction(0))
        out.append(row)
    return TensorMatrix.from_rows(out)


def hamiltonian_density(spec, uncorrected=False):
    """``prefactor * P R'(s2)`` as a two-site matrix."""
    return (P12 @ r_derivative_at(spec)).scale(prefactor(spec, uncorrected))


def hamiltonian_from_transfer(spec, uncorrected=False):
    """Sum over bonds of the local density (leg 1 at site k, leg 2 at site k+1)."""
    h = hamiltonian_density(spec, uncorrected)
    H = None
    for k in range(1, spec.N + 1):
        term = bond_embed(h, k, spec.N)
        H = term if H is None else H + term
    return H


def hamiltonian_literal(spec):
    """``prefactor * t'(s2) t(s2)^-1`` via the product rule over the monodromy factors."""
    R = r_matrix_at(spec, spec.s2)
    dR = r_derivative_at(spec)
    tp = None
    for k in range(spec.N):
        factors = [dR if i == k else R for i in range(spec.N)]
        term = monodromy_trace(spec, factors)
        tp = term if tp is None else tp + term
    t = monodromy_trace(spec, [R] * spec.N)
    return (tp @ t.inverse()).scale(prefactor(spec))


def closed_coefficients(spec, uncorrected=False):
    """``(Delta, C, D)`` of the closed-form Hamiltonian.

    With hopping written as ``s+ s- + s- s+`` the transfer-matrix density carries
    ``(q + 1/q)/4`` on ``sz sz``, and the rat-family C has ``- q xi eta / 2``.
    ``uncorrected=True`` gives the ``(q + 1/q)/2`` and ``- xi eta / (2q)`` variants,
    kept as negative controls.
    """
    q = spec.q
    p = spec.params
    delta = (q + 1 / q) / (2 if uncorrected else 4)
    if spec.family == "trig":
        a, b, z2 = p["a"], p["b"], spec.s2
        C = (q - 1) / 2 * (b - a * z2 / q)
        D = (a * z2 + b) * (a * z2 / q + q * b)
    elif spec.family == "rat":
        eta, xi, u2 = p["eta"], p["xi"], spec.s2
        C = xi * (1 / q - 1) / 2 * u2 - (xi * eta / (2 * q) if uncorrected else q * xi * eta / 2)
        D = xi * xi * u2 * (u2 / q - q * eta)
    else:
        eta, xi, u2 = p["eta"], p["xi"], spec.s2
        C = -xi * eta / 2
        D = xi * xi * u2 * (u2 - eta)
    return Fraction(delta), Fraction(C), Fraction(D)


def hamiltonian_closed(spec, coefficients=None):
    """``H_XXZ + sum_k [C (sz_k sm_{k+1} + sm_k sz_{k+1}) + D sm_k sm_{k+1}]``, periodic."""
    delta, C, D = coefficients or closed_coefficients(spec)
    local = (kron(SIGMA_PLUS, SIGMA_MINUS) + kron(SIGMA_MINUS, SIGMA_PLUS)
             + kron(SIGMA_Z, SIGMA_Z).scale(delta)
             + (kron(SIGMA_Z, SIGMA_MINUS) + kron(SIGMA_MINUS, SIGMA_Z)).scale(C)
             + kron(SIGMA_MINUS, SIGMA_MINUS).scale(D))
    H = None
    for k in range(1, spec.N + 1):
        term = bond_embed(local, k, spec.N)
        H = term if H is None else H + term
    return H


def compare_hamiltonians(spec, check_id="hamiltonian", coefficients=None, uncorrected=False):
    """``H_from_transfer - H_closed = c I``; the scalar ``c`` is reported.

    ``uncorrected=True`` uses the uncorrected normalization and coefficients on both sides.
    """
    coefficients = coefficients or closed_coefficients(spec, uncorrected)
    diff = hamiltonian_from_transfer(spec, uncorrected) - hamiltonian_closed(spec, coefficients)
    c = diff.scalar_value()
    if c is not None:
        return make_check(check_id, True,
                          f"H_transfer - H_closed = c*I with c = {fmt_rational(c)} "
                          f"(c/N = {fmt_rational(c / spec.N)})", c=c)
    where, val = diff.max_offending(diff.entry(0, 0))
    return make_check(check_id, False, f"difference not scalar: entry {where} deviates by {val}")


def verify_literal_route(spec, check_id="hamiltonian-literal"):
    a = hamiltonian_literal(spec)
    b = hamiltonian_from_transfer(spec)
    if a == b:
        return make_check(check_id, True, "t'(s2) t(s2)^-1 route equals the sum of local densities")
    where, val = (a - b).max_offending()
    return make_check(check_id, False, f"routes differ at {where} by {val}")


def charge(idx, N):
    """Number of up spins (state 1) in a basis state."""
    return N - bin(idx).count("1")


def verify_charge_triangular(H, N, check_id="charge-triangular"):
    """``<s|H|s'> = 0`` whenever charge(s) > charge(s'): H never raises the up-spin count."""
    dim = 1 << N
    ch = [charge(i, N) for i in range(dim)]
    for i in range(dim):
        for j in range(dim):
            if ch[i] > ch[j] and H.num[i, j]:
                return make_check(check_id, False, f"raising entry at ({i},{j})")
    return make_check(check_id, True, "no charge-raising entries")


def verify_translation(H, N, check_id="translation"):
    S = shift_operator(N)
    ok = H.commutator(S).is_zero()
    return make_check(check_id, ok, "H commutes with the cyclic shift" if ok
                      else "H does not commute with the cyclic shift")


def verify_h_commutes_t(spec, z, check_id="h-commutes-t"):
    H = hamiltonian_from_transfer(spec)
    t = transfer_matrix(spec, z)
    ok = H.commutator(t).is_zero()
    return make_check(check_id, ok, f"[H, t({fmt_rational(scalar(z))})] = 0" if ok
                      else f"[H, t({fmt_rational(scalar(z))})] != 0")


# -- spectra ----------------------------------------------------------------------------

def _spectra_close(a, b, tol):
    a = sorted(a, key=lambda z: (z.real, z.imag))
    b = sorted(b, key=lambda z: (z.real, z.imag))
    if len(a) != len(b):
        return False, float("inf")
    # greedy nearest matching is robust to ordering ties among near-equal values
    rest = list(b)
    worst = 0.0
    for x in a:
        j = min(range(len(rest)), key=lambda k: abs(rest[k] - x))
        worst = max(worst, abs(rest[j] - x))
        rest.pop(j)
    return worst <= tol, worst


def charges(N):
    return [charge(i, N) for i in range(1 << N)]


def verify_isospectral(spec, check_id="isospectral", tol=1e-9):
    """Exact charpoly equality between deformed and undeformed closed-form Hamiltonians,
    plus float spectra compared to ``tol``.

    Float spectra use the charge-block solver (both matrices are exactly
    block-triangular in the up-spin count) and are cross-checked against the exact
    rational eigenvalues; the dense-solver deviation is reported for information.
    """
    if spec.N > MAX_EXACT_SITES:
        raise ValueError(f"exact mode supports N <= {MAX_EXACT_SITES}")
    H = hamiltonian_closed(spec)
    H0 = hamiltonian_closed(spec.undeformed())
    cp, cp0 = charpoly(H), charpoly(H0)
    exact = cp == cp0
    grades = charges(spec.N)
    ev, ev0 = spectrum_float(H, grades), spectrum_float(H0, grades)
    ok_f, worst = _spectra_close(ev, ev0, tol)
    vs_exact = check_against_exact(ev, rational_eigenvalues(H, ev), tol)
    _, dense = _spectra_close(spectrum_float_dense(H), spectrum_float_dense(H0), tol)
    ok = exact and ok_f and vs_exact <= tol
    detail = (f"charpoly {'equal' if exact else 'differs'} (degree {len(cp) - 1}); "
              f"float spectra max deviation {worst:.3g} (charge-block solver), "
              f"vs exact rational eigenvalues {vs_exact:.3g}, dense solver {dense:.3g}")
    return make_check(check_id, ok, detail, exact=exact, float_ok=ok_f, worst=worst, dense=dense)


def jordan_report(spec, seed=0, hamiltonian=None):
    if spec.N > MAX_EXACT_SITES:
        raise ValueError(f"exact mode supports N <= {MAX_EXACT_SITES}")
    H = hamiltonian if hamiltonian is not None else hamiltonian_closed(spec)
    return spectrum_report(H, seed, charges(spec.N))


def jordan_check(spec, seed=0, check_id="jordan"):
    rep = jordan_report(spec, seed)
    defective = rep.jordan_eigenvalues
    if rep.squarefree:
        verdict = "diagonalizable (minimal polynomial squarefree)"
    else:
        verdict = "not diagonalizable (minimal polynomial has a repeated factor)"
        if defective:
            verdict += "; geometric < algebraic at " + ", ".join(fmt_rational(x) for x in defective)
    # the verdict is recorded either way; a squarefree minpoly with a defective eigenvalue is a bug
    consistent = not (rep.squarefree and defective)
    return make_check(check_id, consistent, verdict, report=rep)


# -- seeded parameter draws -------------------------------------------------------------

def random_spec(family, N, sampler):
    """A nonsingular random :class:`ChainSpec` from a :class:`RationalSampler`."""
    avoid = {"q": (Fraction(1), Fraction(-1))} if family in ("trig", "rat") else {}
    for _ in range(100):
        b = sampler.draw(FAMILY_PARAMS[family] + ("s2",), avoid)
        s2 = b.pop("s2")
        spec = ChainSpec(N, family, b, s2)
        try:
            r_matrix_at(spec, s2)
            prefactor(spec)
            r_derivative_at(spec)
        except ZeroDivisionError:
            continue
        return spec
    raise RuntimeError("no nonsingular parameter draw in 100 attempts")


def random_spectral(spec, sampler, count=2):
    out = []
    while len(out) < count:
        z = sampler.rational()
        if z in out:
            continue
        try:
            r_matrix_at(spec, z)
        except ZeroDivisionError:
            continue
        out.append(z)
    return out
