import pytest

from gel.quadratic import build_spectrum

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def spec_small():
    return build_spectrum(1e4)


@pytest.fixture(scope="session")
def spec_big():
    # shared by the slower checks; about two seconds to build
    return build_spectrum(1e6)


@pytest.fixture
def verdict():
    """Record one acceptance line, then assert it."""
    def record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"acceptance {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"criterion {number}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"acceptance {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
