def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance")
    for k in range(1, 13):
        status, what, detail = mod.RESULTS.get(k, ("NOT RUN", "", ""))
        line = f"ACCEPTANCE {k:2d}: {status} {what}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
