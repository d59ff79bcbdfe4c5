"""Kernel selection.

The compiled extension ``phasepom._core`` is used when it imports; otherwise
the numpy implementation in ``phasepom._fallback`` is used. Set
``PHASEPOM_BACKEND=python`` to force the fallback and ``PHASEPOM_THREADS``
to cap the worker count of the compiled kernel.
"""

import os

from . import _fallback

try:
    from . import _core
except ImportError:  # pragma: no cover - depends on the build
    _core = None

BACKENDS = {"python": _fallback}
if _core is not None:
    BACKENDS["compiled"] = _core

if os.environ.get("PHASEPOM_BACKEND", "").lower() == "python" or _core is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"


def num_threads():
    try:
        return max(1, int(os.environ.get("PHASEPOM_THREADS", "1")))
    except ValueError:
        return 1


def displacement_batch(betas, dim, backend=None):
    """Displacement matrices D(beta) of size dim x dim for every beta in ``betas``."""
    impl = BACKENDS[backend or BACKEND]
    return impl.displacement_batch(betas, int(dim), num_threads())
