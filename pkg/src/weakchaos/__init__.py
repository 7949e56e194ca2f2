"""Weak chaos on constant-curvature spaces and simple maps.

Submodules:

``qcalc``      deformed numbers, q-exponential/logarithm, Tsallis entropy
``spaceform``  constant-curvature manifolds, geodesics, curvature estimates
``jacobi``     Jacobi fields and separation growth classes
``lyapunov``   exponent estimators for separation series
``systems``    concrete flows and maps that feed the estimators
``expcli``     reproducible experiment runner
"""

from . import jacobi, kernels, lyapunov, qcalc, spaceform, systems

__version__ = "0.1.0"
__all__ = ["jacobi", "kernels", "lyapunov", "qcalc", "spaceform", "systems", "__version__"]
