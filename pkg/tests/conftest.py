import sys


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance criteria as one PASS/FAIL line each, whatever the capture mode."""
    results = None
    for mod in list(sys.modules.values()):
        found = getattr(mod, "ACCEPTANCE_RESULTS", None)
        if isinstance(found, dict) and found:
            results = found
            break
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
