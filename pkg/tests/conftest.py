"""Prints one pass/fail line per acceptance criterion after the run."""

_CRITERIA: dict[str, dict] = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.failed:
        entry = _CRITERIA.setdefault(props["criterion"], {"title": props.get("title", ""), "ok": True, "notes": []})
        entry["ok"] = entry["ok"] and report.passed
        if "detail" in props:
            entry["notes"].append(props["detail"])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=int):
        e = _CRITERIA[key]
        status = "PASS" if e["ok"] else "FAIL"
        notes = "; ".join(e["notes"])
        terminalreporter.write_line(f"criterion {key:>2} {status}  {e['title']}" + (f"  [{notes}]" if notes else ""))
