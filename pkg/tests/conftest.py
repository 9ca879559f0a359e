import pytest

from stabsim import builtin_dataset


@pytest.fixture(scope="session")
def he():
    return builtin_dataset("He2")


@pytest.fixture(scope="session")
def h2():
    return builtin_dataset("H2")


@pytest.fixture(scope="session")
def h3():
    return builtin_dataset("H3")


@pytest.fixture
def report(capsys):
    """Print a PASS/FAIL line for an acceptance criterion, then assert it."""

    def _report(number, label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {label}  {detail}")
        assert ok, f"criterion {number} ({label}) failed: {detail}"

    return _report
