from optgym.tdb.store import TransitionStore
from optgym.tdb.wrapper import TransitionLogger

__all__ = ["TransitionLogger", "TransitionStore"]
