"""Shared store for acceptance outcomes, printed by the terminal summary hook."""

from contextlib import contextmanager
import time

LINES: list[str] = []


@contextmanager
def criterion(number: int, title: str):
    start = time.perf_counter()
    details: dict = {}
    try:
        yield details
    except BaseException:
        _emit(number, title, False, time.perf_counter() - start, details)
        raise
    _emit(number, title, True, time.perf_counter() - start, details)


def _emit(number, title, ok, elapsed, details):
    extra = "".join(f"; {k}={v}" for k, v in details.items())
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} ({elapsed:.1f} s{extra})"
    LINES.append(line)
    print(line)
