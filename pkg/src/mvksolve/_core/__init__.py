"""Hot evaluation kernels for the exponential-loss residual system.

The compiled Cython extension is preferred when it was built; otherwise
the numpy reference implementation is used.  Both expose the same
functions:

* ``els_residual(a, K, M, y_flat, y_offs, d_offs, l, gamma_A, gamma_I)``
* ``els_jacobian_R(a, K, MK, y_flat, y_offs, d_offs, l, gamma_A, gamma_I)``
"""

try:
    from ._els import els_jacobian_R, els_residual

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on the build
    from ._ref import els_jacobian_R, els_residual

    HAVE_COMPILED = False

from . import _ref

__all__ = ["els_residual", "els_jacobian_R", "HAVE_COMPILED", "_ref"]
