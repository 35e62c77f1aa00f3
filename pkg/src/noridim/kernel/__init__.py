"""Hot-loop kernels with backend selection.

The compiled core is used when its extension module imported cleanly;
otherwise the pure-Python twin takes over.  Set NORIDIM_KERNEL to
"compiled" or "python" to force a backend (forcing "compiled" on a box
without the built extension raises at import).  Both backends produce
byte-identical results; only speed differs.
"""

from __future__ import annotations

import os

_requested = os.environ.get("NORIDIM_KERNEL", "auto").strip().lower() or "auto"
if _requested not in ("auto", "compiled", "python"):
    raise ImportError(
        f"NORIDIM_KERNEL={_requested!r}: expected 'auto', 'compiled' or 'python'"
    )

if _requested == "python":
    from . import _pycore as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pycore as _impl

        BACKEND = "python"

bfs_closure = _impl.bfs_closure

__all__ = ["BACKEND", "bfs_closure"]
