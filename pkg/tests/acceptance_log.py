"""Shared store for acceptance result lines, printed at the end of the session."""

RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, detail: str, seconds: float | None = None) -> None:
    timing = "" if seconds is None else f" [{seconds:.1f}s]"
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}{timing}"
    RESULTS.append(line)
    print(line)
