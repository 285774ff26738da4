import pytest

CRITERIA: dict[int, tuple[bool, str]] = {}


def record(number: int, passed: bool, detail: str) -> None:
    CRITERIA[number] = (bool(passed), detail)
    print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'} | {detail}")


@pytest.fixture
def criterion():
    def check(number, passed, detail):
        record(number, passed, detail)
        assert passed, f"criterion {number}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        passed, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'} | {detail}")
    n_pass = sum(p for p, _ in CRITERIA.values())
    terminalreporter.write_line(f"{n_pass}/{len(CRITERIA)} criteria passed")
