"""Shared acceptance registry: every criterion part records a verdict, and the
terminal summary prints one PASS/FAIL line per criterion."""

import pytest

_RESULTS = {}


class Recorder:
    def __call__(self, cid, passed, detail):
        _RESULTS.setdefault(cid, []).append((bool(passed), detail))
        return passed


@pytest.fixture(scope="session")
def record():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_RESULTS, key=lambda c: int(c[1:])):
        parts = _RESULTS[cid]
        ok = all(p for p, _ in parts)
        shown = [d for p, d in parts if not p] or [d for _, d in parts]
        tr.write_line(f"{cid:<4}{'PASS' if ok else 'FAIL'}  " + "; ".join(shown))
