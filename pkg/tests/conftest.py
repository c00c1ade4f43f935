"""Shared test fixtures.

The ``acceptance`` fixture records one verdict per acceptance criterion and
``pytest_terminal_summary`` prints the collected PASS/FAIL lines in their own
terminal section, so the criterion-by-criterion outcome is visible regardless
of output capturing.
"""

import contextlib

import pytest

_RESULTS: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def acceptance():
    """Context manager factory: ``with acceptance(3, "...") as outcome``.

    The body fills ``outcome["ok"]`` and ``outcome["detail"]``; the verdict is
    recorded on exit (including exceptional exit) and the test then asserts it.
    """

    @contextlib.contextmanager
    def criterion(number: int, description: str):
        outcome = {"ok": False, "detail": "did not complete"}
        try:
            yield outcome
        except BaseException as exc:
            _RESULTS.append(
                (number, description, False, f"{type(exc).__name__}: {exc}")
            )
            raise
        _RESULTS.append(
            (number, description, bool(outcome["ok"]), str(outcome["detail"]))
        )
        assert outcome["ok"], f"criterion {number}: {outcome['detail']}"

    return criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, ok, detail in sorted(_RESULTS):
        flag = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"[{flag}] criterion {number}: {description} -- {detail}"
        )
