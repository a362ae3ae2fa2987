"""Pure-Python dyadic kernels.

A dyadic number is a pair ``(m, e)`` of Python ints standing for ``m * 2**e``.
Every rounding routine takes a flag ``up``: ``False`` rounds toward minus
infinity, ``True`` toward plus infinity, so callers can build outward-rounded
interval endpoints.  The compiled module ``_dyadic_ext`` exposes the same
functions with the same semantics.
"""


def round_dyadic(m, e, prec, up):
    """Round ``m*2**e`` to at most ``prec`` mantissa bits."""
    bl = m.bit_length() if m >= 0 else (-m).bit_length()
    if bl <= prec:
        return m, e
    s = bl - prec
    if up:
        return -((-m) >> s), e + s
    return m >> s, e + s


def cmp_dyadic(m1, e1, m2, e2):
    if e1 >= e2:
        a, b = m1 << (e1 - e2), m2
    else:
        a, b = m1, m2 << (e2 - e1)
    return (a > b) - (a < b)


def _bits(m):
    return m.bit_length() if m >= 0 else (-m).bit_length()


def add_dyadic(m1, e1, m2, e2, prec, up):
    if m1 == 0:
        return round_dyadic(m2, e2, prec, up)
    if m2 == 0:
        return round_dyadic(m1, e1, prec, up)
    # order so that term 1 has the larger magnitude exponent top
    t1 = e1 + _bits(m1)
    t2 = e2 + _bits(m2)
    if t1 < t2:
        m1, e1, m2, e2, t1, t2 = m2, e2, m1, e1, t2, t1
    # a tiny second term only matters as a sticky bit
    # term 1 must be a multiple of 2^floor_e for the sticky bit to be exact
    floor_e = min(t1 - prec - 4, e1)
    if t2 < floor_e:
        m2 = 1 if m2 > 0 else -1
        e2 = floor_e - 1
    if e1 >= e2:
        m = (m1 << (e1 - e2)) + m2
        e = e2
    else:
        m = m1 + (m2 << (e2 - e1))
        e = e1
    return round_dyadic(m, e, prec, up)


def mul_dyadic(m1, e1, m2, e2, prec, up):
    return round_dyadic(m1 * m2, e1 + e2, prec, up)


def div_dyadic(m1, e1, m2, e2, prec, up):
    """Directed-rounded quotient; ``m2`` must be nonzero."""
    if m1 == 0:
        return 0, 0
    if m2 < 0:
        m1, m2 = -m1, -m2
    k = prec + _bits(m2) - _bits(m1) + 2
    if k >= 0:
        num = m1 << k
    else:
        num = m1
        m2 = m2 << (-k)
    if up:
        q = -((-num) // m2)
    else:
        q = num // m2
    return round_dyadic(q, e1 - e2 - k, prec, up)


def pi_fixed(w):
    """Return ``(p, err)`` with ``(p - err)/2**w <= pi <= (p + err)/2**w``."""
    a, ea = _atan_inv_fixed(5, w)
    b, eb = _atan_inv_fixed(239, w)
    return 16 * a - 4 * b, 16 * ea + 4 * eb


def _atan_inv_fixed(x, w):
    # floor(floor(u)/v) == floor(u/v) for positive integer v, so every
    # power and every term below is an exact floor of its real value
    x2 = x * x
    p = (1 << w) // x
    s = 0
    k = 0
    while p:
        t = p // (2 * k + 1)
        s = s + t if k % 2 == 0 else s - t
        k += 1
        p //= x2
    # k floors of error < 1 each, tail below the first omitted term (< 1)
    return s, k + 2


def sin_fixed(r, w):
    """Taylor enclosure of sin(r/2**w) for |r| <= 2**w.

    Returns ``(s, err)`` with the true value in ``[(s-err)/2**w, (s+err)/2**w]``.
    """
    r2 = (r * r) >> w
    t = r
    s = r
    k = 0
    while t:
        t = -((t * r2) >> w) // ((2 * k + 2) * (2 * k + 3))
        s += t
        k += 1
    return s, 3 * k + 6


def cos_fixed(r, w):
    """Taylor enclosure of cos(r/2**w) for |r| <= 2**w (see ``sin_fixed``)."""
    r2 = (r * r) >> w
    t = 1 << w
    s = t
    k = 0
    while t:
        t = -((t * r2) >> w) // ((2 * k + 1) * (2 * k + 2))
        s += t
        k += 1
    return s, 3 * k + 6
