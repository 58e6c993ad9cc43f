"""Select the compiled kernels when built, else the pure-Python ones.

Set ``STRATA_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("STRATA_PURE_PYTHON"):
    from strata._kernels_py import *  # noqa: F401,F403
else:
    try:
        from strata._kernels import *  # noqa: F401,F403
    except ImportError:
        from strata._kernels_py import *  # noqa: F401,F403
