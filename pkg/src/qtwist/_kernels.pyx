# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``_kernels_py`` exactly."""

from libc.stdlib cimport malloc, free
from cpython.dict cimport PyDict_Next, PyDict_GetItem, PyDict_SetItem
from cpython.ref cimport PyObject


def poly_mul(dict a, dict b):
    """Multiply two sparse polynomials given as ``{packed_exponent: coeff}``."""
    if len(a) < len(b):
        a, b = b, a
    cdef dict out = {}
    cdef list bkeys = list(b.keys())
    cdef list bvals = list(b.values())
    cdef Py_ssize_t nb = len(bkeys)
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t j
    cdef PyObject *pk
    cdef PyObject *pv
    cdef PyObject *cur
    cdef object ea, ca, e, prod
    while PyDict_Next(a, &pos, &pk, &pv):
        ea = <object>pk
        ca = <object>pv
        for j in range(nb):
            e = ea + bkeys[j]
            prod = ca * bvals[j]
            cur = PyDict_GetItem(out, e)
            if cur is NULL:
                PyDict_SetItem(out, e, prod)
            else:
                PyDict_SetItem(out, e, (<object>cur) + prod)
    return {k: v for k, v in out.items() if v}


def poly_scale_add(dict acc, dict a, factor, shift):
    """acc += factor * x^shift * a, in place. Zero coefficients are dropped."""
    cdef Py_ssize_t pos = 0
    cdef PyObject *pk
    cdef PyObject *pv
    cdef PyObject *cur
    cdef object k, v
    while PyDict_Next(a, &pos, &pk, &pv):
        k = (<object>pk) + shift
        cur = PyDict_GetItem(acc, k)
        if cur is NULL:
            v = factor * (<object>pv)
        else:
            v = (<object>cur) + factor * (<object>pv)
        if v:
            acc[k] = v
        elif cur is not NULL:
            del acc[k]
    return acc


cdef long long _inv_mod(long long a, long long p):
    cdef long long t = 0, newt = 1, r = p, newr = a, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def charpoly_mod(rows, long long p):
    """Characteristic polynomial of a square integer matrix modulo prime ``p``.

    ``p`` must be below 2**31 so products fit in 64 bits. Returns ``n + 1``
    residues, lowest degree first.
    """
    cdef Py_ssize_t n = len(rows)
    cdef long long *H = <long long *>malloc(n * n * sizeof(long long) + 1)
    cdef long long *P
    cdef Py_ssize_t i, j, m, k, piv
    cdef long long t, s, h, inv, tmp, x
    if H is NULL:
        raise MemoryError()
    try:
        for i in range(n):
            row = rows[i]
            for j in range(n):
                H[i * n + j] = row[j] % p
        for m in range(1, n - 1):
            piv = -1
            for i in range(m, n):
                if H[i * n + m - 1] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != m:
                for j in range(n):
                    tmp = H[piv * n + j]
                    H[piv * n + j] = H[m * n + j]
                    H[m * n + j] = tmp
                for j in range(n):
                    tmp = H[j * n + piv]
                    H[j * n + piv] = H[j * n + m]
                    H[j * n + m] = tmp
            inv = _inv_mod(H[m * n + m - 1], p)
            for i in range(m + 1, n):
                t = H[i * n + m - 1] * inv % p
                if t == 0:
                    continue
                for j in range(m - 1, n):
                    x = (H[i * n + j] - t * H[m * n + j]) % p
                    if x < 0:
                        x += p
                    H[i * n + j] = x
                for j in range(n):
                    H[j * n + m] = (H[j * n + m] + t * H[j * n + i]) % p

        # polys[m] stored in row m of a (n+1) x (n+1) table
        P = <long long *>malloc((n + 1) * (n + 1) * sizeof(long long))
        if P is NULL:
            raise MemoryError()
        try:
            for i in range((n + 1) * (n + 1)):
                P[i] = 0
            P[0] = 1
            for m in range(1, n + 1):
                h = H[(m - 1) * n + m - 1]
                for k in range(m):
                    s = P[(m - 1) * (n + 1) + k]
                    P[m * (n + 1) + k + 1] = (P[m * (n + 1) + k + 1] + s) % p
                    x = (P[m * (n + 1) + k] - h * s) % p
                    if x < 0:
                        x += p
                    P[m * (n + 1) + k] = x
                t = 1
                for i in range(1, m):
                    t = t * H[(m - i) * n + m - i - 1] % p
                    if t == 0:
                        break
                    s = t * H[(m - i - 1) * n + m - 1] % p
                    if s == 0:
                        continue
                    for k in range(m - i):
                        x = (P[m * (n + 1) + k] - s * P[(m - i - 1) * (n + 1) + k]) % p
                        if x < 0:
                            x += p
                        P[m * (n + 1) + k] = x
            return [P[n * (n + 1) + k] for k in range(n + 1)]
        finally:
            free(P)
    finally:
        free(H)
