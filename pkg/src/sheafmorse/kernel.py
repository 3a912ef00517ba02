"""Backend selection for the integer kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used.  Set ``SHEAFMORSE_KERNEL=python`` to force the fallback.
"""

import os

from . import _kernel_py

_python = _kernel_py

if os.environ.get("SHEAFMORSE_KERNEL", "").lower() == "python":
    _impl = _python
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _impl = _python

BACKEND = _impl.BACKEND
snf_invariants = _impl.snf_invariants
eliminate_units = _impl.eliminate_units
normalize_diagonal = _python.normalize_diagonal


def backends():
    """All importable backends, keyed by name (used by the benchmark and tests)."""
    found = {"python": _python}
    try:
        from . import _kernel  # type: ignore[attr-defined]

        found[_kernel.BACKEND] = _kernel
    except ImportError:
        pass
    return found
