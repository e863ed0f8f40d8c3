import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

# criterion number -> list of (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    def record(number, title, passed, detail=""):
        ACCEPTANCE.setdefault(number, {"title": title, "parts": []})["parts"].append(
            (passed, detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[number]
        parts = entry["parts"]
        if all(p is None for p, _ in parts):
            verdict = "INFO"
        else:
            verdict = "PASS" if all(p is not False for p, _ in parts) else "FAIL"
        details = "; ".join(d for _, d in parts if d)
        tr.write_line(f"[{verdict}] {number}. {entry['title']}: {details}")
