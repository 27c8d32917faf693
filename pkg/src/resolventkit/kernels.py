"""Kernel backend selection.

The compiled extension is used when it imports; set ``RESOLVENTKIT_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("RESOLVENTKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "compiled"
    except ImportError:
        pass

epi_exp_project = _impl.epi_exp_project
epi_exp_project_many = _impl.epi_exp_project_many
prox_exp = _impl.prox_exp
prox_exp_many = _impl.prox_exp_many
minkowski_mark = _impl.minkowski_mark
TIE = _pykernels.TIE


def compiled_module():
    """The compiled kernel module, or ``None`` if it is not built."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels
