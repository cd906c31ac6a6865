from ._hashpop import *  # noqa: F401,F403
