def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance")
        for ac in sorted(LINES, key=lambda s: int(s.split("-")[1])):
            terminalreporter.write_line(LINES[ac])
