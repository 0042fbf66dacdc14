from ._tnl import *  # noqa: F401,F403
