"""State-feedback H-infinity synthesis via LMIs: degeneracy diagnosis,
facial reduction to an equivalent well-posed problem, and gain recovery."""

try:
    from ._hinffr import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # in-tree build with the extension on sys.path
    from _hinffr import *  # noqa: F401,F403
