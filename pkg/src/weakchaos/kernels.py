"""Backend selection for the hot loops.

The compiled extension ``weakchaos._kernels`` is used when it imports;
otherwise, or when ``WEAKCHAOS_PURE_PYTHON=1`` is set, the pure-Python
module ``weakchaos._purekernels`` is used. Both expose the same functions.
"""

import os

from . import _purekernels as pure

compiled = None
if os.environ.get("WEAKCHAOS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

impl = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

rk4_jacobi = impl.rk4_jacobi
rk4_jacobi_samples = impl.rk4_jacobi_samples
benettin_jacobi = impl.benettin_jacobi
logistic_log_sensitivity = impl.logistic_log_sensitivity
logistic_iterate = impl.logistic_iterate
cat_map_iterate = impl.cat_map_iterate
map_spectrum_2x2 = impl.map_spectrum_2x2
geodesic_rk4 = impl.geodesic_rk4
bilinear_form = impl.bilinear_form

__all__ = [
    "BACKEND",
    "benettin_jacobi",
    "bilinear_form",
    "cat_map_iterate",
    "compiled",
    "geodesic_rk4",
    "impl",
    "logistic_iterate",
    "logistic_log_sensitivity",
    "map_spectrum_2x2",
    "pure",
    "rk4_jacobi",
    "rk4_jacobi_samples",
]
