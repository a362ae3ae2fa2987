# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled dyadic kernels; same contract as ``_dyadic_py``."""


cdef inline long _bits(object m):
    if m >= 0:
        return m.bit_length()
    return (-m).bit_length()


cpdef tuple round_dyadic(object m, object e, long prec, bint up):
    cdef long bl = _bits(m)
    cdef long s
    if bl <= prec:
        return m, e
    s = bl - prec
    if up:
        return -((-m) >> s), e + s
    return m >> s, e + s


cpdef int cmp_dyadic(object m1, object e1, object m2, object e2):
    cdef object a, b
    if e1 >= e2:
        a = m1 << (e1 - e2)
        b = m2
    else:
        a = m1
        b = m2 << (e2 - e1)
    if a > b:
        return 1
    if a < b:
        return -1
    return 0


cpdef tuple add_dyadic(object m1, object e1, object m2, object e2, long prec, bint up):
    cdef object t1, t2, floor_e, m, e
    if m1 == 0:
        return round_dyadic(m2, e2, prec, up)
    if m2 == 0:
        return round_dyadic(m1, e1, prec, up)
    t1 = e1 + _bits(m1)
    t2 = e2 + _bits(m2)
    if t1 < t2:
        m1, e1, m2, e2, t1, t2 = m2, e2, m1, e1, t2, t1
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


cpdef tuple mul_dyadic(object m1, object e1, object m2, object e2, long prec, bint up):
    return round_dyadic(m1 * m2, e1 + e2, prec, up)


cpdef tuple div_dyadic(object m1, object e1, object m2, object e2, long prec, bint up):
    cdef long k
    cdef object num, q
    if m1 == 0:
        return 0, 0
    if m2 < 0:
        m1 = -m1
        m2 = -m2
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


cdef tuple _atan_inv_fixed(long x, long w):
    cdef object x2 = x * x
    cdef object p = (<object>1 << w) // x
    cdef object s = 0
    cdef object t
    cdef long k = 0
    while p:
        t = p // (2 * k + 1)
        if k % 2 == 0:
            s = s + t
        else:
            s = s - t
        k += 1
        p = p // x2
    return s, k + 2


cpdef tuple pi_fixed(long w):
    cdef object a, ea, b, eb
    a, ea = _atan_inv_fixed(5, w)
    b, eb = _atan_inv_fixed(239, w)
    return 16 * a - 4 * b, 16 * ea + 4 * eb


cpdef tuple sin_fixed(object r, long w):
    cdef object r2 = (r * r) >> w
    cdef object t = r
    cdef object s = r
    cdef long k = 0
    while t:
        t = -((t * r2) >> w) // ((2 * k + 2) * (2 * k + 3))
        s += t
        k += 1
    return s, 3 * k + 6


cpdef tuple cos_fixed(object r, long w):
    cdef object r2 = (r * r) >> w
    cdef object t = <object>1 << w
    cdef object s = t
    cdef long k = 0
    while t:
        t = -((t * r2) >> w) // ((2 * k + 1) * (2 * k + 2))
        s += t
        k += 1
    return s, 3 * k + 6
