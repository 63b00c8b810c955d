def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for outcome in sorted(RESULTS, key=lambda o: o.number):
            terminalreporter.write_line(f"{outcome.line()} ({outcome.seconds:.1f} s)")
