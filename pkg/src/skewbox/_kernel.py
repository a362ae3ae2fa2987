"""Pick the dyadic kernel backend at import time.

The compiled module is used when it was built; ``SKEWBOX_PURE=1`` forces the
pure-Python fallback.
"""

import os

BACKEND = "python"

if os.environ.get("SKEWBOX_PURE", "") not in ("", "0"):
    from . import _dyadic_py as impl
else:
    try:
        from . import _dyadic_ext as impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        from . import _dyadic_py as impl

round_dyadic = impl.round_dyadic
cmp_dyadic = impl.cmp_dyadic
add_dyadic = impl.add_dyadic
mul_dyadic = impl.mul_dyadic
div_dyadic = impl.div_dyadic
pi_fixed = impl.pi_fixed
sin_fixed = impl.sin_fixed
cos_fixed = impl.cos_fixed
