"""Iteration-kernel selection: the compiled extension when present, the
NumPy twin otherwise. ``RISBEAM_BACKEND=c|py`` overrides the automatic
choice; an explicit SolverOptions.backend always wins."""

import os

from . import _kernel_py

try:
    from . import _kernel  # compiled extension, built by setup.py
except ImportError:  # pragma: no cover - depends on the install
    _kernel = None

HAVE_EXTENSION = _kernel is not None


def resolve_backend(requested="auto"):
    """Map a requested backend name to ("c"|"py", module)."""
    name = requested
    if name == "auto":
        env = os.environ.get("RISBEAM_BACKEND", "").strip().lower()
        if env in ("c", "py"):
            name = env
        else:
            name = "c" if HAVE_EXTENSION else "py"
    if name == "c":
        if not HAVE_EXTENSION:
            raise RuntimeError(
                "compiled kernel requested but the extension is not built; "
                "run `python setup.py build_ext --inplace` or use backend='py'"
            )
        return "c", _kernel
    if name == "py":
        return "py", _kernel_py
    raise ValueError(f"unknown backend {requested!r}")
