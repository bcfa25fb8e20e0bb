from contextlib import contextmanager, nullcontext


@contextmanager
def open_text(target):
    """Yield a writable text handle for a path or an already open file."""
    if hasattr(target, "write"):
        with nullcontext(target) as fh:
            yield fh
    else:
        with open(target, "w", newline="") as fh:
            yield fh
