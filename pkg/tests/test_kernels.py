"""Both dyadic kernels against each other and against exact rationals."""

import random
from fractions import Fraction

import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from skewbox import _dyadic_py, _kernel
from skewbox.scalar import dyadic_to_fraction

try:
    from skewbox import _dyadic_ext
except ImportError:  # pragma: no cover
    _dyadic_ext = None

mant = st.integers(-(1 << 200), 1 << 200).filter(bool)
expo = st.integers(-300, 100)
prec = st.integers(4, 260)


def F(t):
    return dyadic_to_fraction(*t)


@given(mant, expo, prec, st.booleans())
def test_round_is_directed(m, e, p, up):
    r = _dyadic_py.round_dyadic(m, e, p, up)
    x, y = F((m, e)), F(r)
    assert (y >= x) if up else (y <= x)
    # rounding up may carry into one extra bit (a power of two)
    assert abs(r[0]).bit_length() <= p + 1


@given(mant, expo, mant, expo, prec, st.booleans())
# a small term below the sticky threshold but above the first term's last bit
@example(1, 0, 1022, 0, 4, False)
def test_arith_is_directed(m1, e1, m2, e2, p, up):
    a, b = F((m1, e1)), F((m2, e2))
    for fn, exact in ((_dyadic_py.add_dyadic, a + b), (_dyadic_py.mul_dyadic, a * b),
                      (_dyadic_py.div_dyadic, a / b)):
        y = F(fn(m1, e1, m2, e2, p, up))
        assert (y >= exact) if up else (y <= exact)
        # at most one unit in the last place away (plus the sticky bit for add)
        if exact:
            assert abs(y - exact) <= abs(exact) * Fraction(1, 1 << (p - 3))
    assert _dyadic_py.cmp_dyadic(m1, e1, m2, e2) == (a > b) - (a < b)


def test_pi_enclosure_matches_mpmath():
    import mpmath
    for w in (64, 128, 300):
        p, err = _dyadic_py.pi_fixed(w)
        with mpmath.workprec(w + 40):
            ref = mpmath.mpf(mpmath.pi) * mpmath.mpf(2) ** w
            assert p - err <= ref <= p + err


@pytest.mark.parametrize("w", [64, 200])
def test_sin_cos_fixed_match_mpmath(w):
    import mpmath
    rng = random.Random(w)
    for _ in range(200):
        r = rng.randrange(-(1 << w), 1 << w)
        s, es = _dyadic_py.sin_fixed(r, w)
        c, ec = _dyadic_py.cos_fixed(r, w)
        with mpmath.workprec(w + 60):
            x = mpmath.mpf(r) / mpmath.mpf(2) ** w
            sv, cv = mpmath.sin(x) * mpmath.mpf(2) ** w, mpmath.cos(x) * mpmath.mpf(2) ** w
        assert s - es <= sv <= s + es
        assert c - ec <= cv <= c + ec


@pytest.mark.skipif(_dyadic_ext is None, reason="compiled kernel not built")
def test_compiled_agrees_with_python():
    rng = random.Random(1)
    for w in (63, 64, 65, 100, 400):
        assert _dyadic_ext.pi_fixed(w) == _dyadic_py.pi_fixed(w)
    for _ in range(5000):
        w = rng.randrange(8, 300)
        r = rng.randrange(-(1 << w), 1 << w)
        assert _dyadic_ext.sin_fixed(r, w) == _dyadic_py.sin_fixed(r, w)
        assert _dyadic_ext.cos_fixed(r, w) == _dyadic_py.cos_fixed(r, w)
        m1 = rng.randrange(-(1 << 200), 1 << 200) or 1
        m2 = rng.randrange(-(1 << 200), 1 << 200) or 1
        e1, e2 = rng.randrange(-400, 100), rng.randrange(-400, 100)
        p, up = rng.randrange(2, 300), rng.random() < 0.5
        assert _dyadic_ext.round_dyadic(m1, e1, p, up) == _dyadic_py.round_dyadic(m1, e1, p, up)
        assert _dyadic_ext.cmp_dyadic(m1, e1, m2, e2) == _dyadic_py.cmp_dyadic(m1, e1, m2, e2)
        for name in ("add_dyadic", "mul_dyadic", "div_dyadic"):
            args = (m1, e1, m2, e2, p, up)
            assert getattr(_dyadic_ext, name)(*args) == getattr(_dyadic_py, name)(*args), name


def test_backend_selection(monkeypatch):
    import importlib
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-c", "import skewbox._kernel as k; print(k.BACKEND)"],
                         env={**__import__("os").environ, "SKEWBOX_PURE": "1"},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert _kernel.BACKEND in ("python", "compiled")
    assert importlib.import_module("skewbox").BACKEND == _kernel.BACKEND
