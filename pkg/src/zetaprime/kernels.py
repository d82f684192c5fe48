"""Select the kernel backend at import.

The compiled extension ``_ckernels`` is used when it imports; otherwise
(or when ``ZETAPRIME_PURE`` is set to a non-empty value) the NumPy
implementation in ``_pykernels`` is used. ``BACKEND`` names the choice.
"""

import os

from . import _pykernels as pure

if os.environ.get("ZETAPRIME_PURE"):
    impl = pure
else:
    try:
        from . import _ckernels as impl
    except ImportError:  # extension not built
        impl = pure

BACKEND = "compiled" if impl is not pure else "python"

theta_ld = impl.theta_ld
theta_mod = impl.theta_mod
rs_batch = impl.rs_batch
em_batch = impl.em_batch
neumaier_sum = impl.neumaier_sum
exp_sum_grid = impl.exp_sum_grid


def compiled():
    """Return the compiled module, or None when it is not built."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels
