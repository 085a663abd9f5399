import pytest

ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def acceptance(request):
    """Record the verdict of one acceptance criterion for the final summary.

    Usage: ``with acceptance(7, "end-to-end synthetic") as note: ...; note("E=...")``.
    """
    results = request.config.stash[ACCEPTANCE_KEY]

    class Criterion:
        def __init__(self, number, title):
            self.number, self.title, self.details = number, title, []

        def __call__(self, detail):
            self.details.append(str(detail))

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc_type is not None and issubclass(exc_type, pytest.skip.Exception):
                verdict = "SKIP"
                self.details.append(str(exc))
            else:
                verdict = "FAIL" if exc_type is not None else "PASS"
            results[self.number] = (verdict, self.title, "; ".join(self.details))
            return False

    return Criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[ACCEPTANCE_KEY]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        verdict, title, detail = results[number]
        line = f"criterion {number:>2} {verdict}: {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
