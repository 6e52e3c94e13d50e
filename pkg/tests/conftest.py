import re


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = re.search(r"test_acceptance\.py::test_ac(\d+)_(\w+)", getattr(rep, "nodeid", ""))
            if not m or rep.when != "call" and outcome == "passed":
                continue
            detail = dict(getattr(rep, "user_properties", ())).get("detail", "")
            status = "PASS" if outcome == "passed" else "FAIL"
            lines.append((int(m.group(1)), f"AC{m.group(1)} {status} {m.group(2)}: {detail}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
