"""Pure-Python implementations of the hot kernels.

Same signatures and results as the compiled ``_kernels`` extension; used when
the extension is unavailable or ``QTWIST_PURE_PYTHON`` is set.
"""


def poly_mul(a, b):
    """Multiply two sparse polynomials given as ``{packed_exponent: coeff}``."""
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    bitems = list(b.items())
    for ea, ca in a.items():
        for eb, cb in bitems:
            e = ea + eb
            out[e] = get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def poly_scale_add(acc, a, factor, shift):
    """acc += factor * x^shift * a, in place. Zero coefficients are dropped."""
    get = acc.get
    for e, c in a.items():
        k = e + shift
        v = get(k, 0) + factor * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)
    return acc


def charpoly_mod(rows, p):
    """Characteristic polynomial of a square integer matrix modulo prime ``p``.

    Reduces to upper Hessenberg form by elementary similarity transforms and
    runs the Hessenberg determinant recurrence. Returns ``n + 1`` residues,
    lowest degree first (the leading coefficient is 1).
    """
    n = len(rows)
    H = [[x % p for x in row] for row in rows]
    for m in range(1, n - 1):
        piv = -1
        for i in range(m, n):
            if H[i][m - 1]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != m:
            H[piv], H[m] = H[m], H[piv]
            for row in H:
                row[piv], row[m] = row[m], row[piv]
        inv = pow(H[m][m - 1], p - 2, p)
        Hm = H[m]
        for i in range(m + 1, n):
            Hi = H[i]
            t = Hi[m - 1] * inv % p
            if not t:
                continue
            for j in range(m - 1, n):
                Hi[j] = (Hi[j] - t * Hm[j]) % p
            for row in H:
                row[m] = (row[m] + t * row[i]) % p

    polys = [[1]]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        h = H[m - 1][m - 1]
        cur = [0] * (m + 1)
        for k, c in enumerate(prev):
            cur[k + 1] = (cur[k + 1] + c) % p
            cur[k] = (cur[k] - h * c) % p
        t = 1
        for i in range(1, m):
            t = t * H[m - i][m - i - 1] % p
            if not t:
                break
            s = t * H[m - i - 1][m - 1] % p
            if s:
                for k, c in enumerate(polys[m - i - 1]):
                    cur[k] = (cur[k] - s * c) % p
        polys.append(cur)
    return polys[n]
