"""Python surface over the mnsga search core."""

try:
    from ._mnsga import *  # noqa: F401,F403  (installed package layout)
    from ._mnsga import __doc__  # noqa: F401
except ImportError:
    from _mnsga import *  # noqa: F401,F403  (build-tree layout)
    from _mnsga import __doc__  # noqa: F401
