"""Report rendering and crash-safe persistence."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path

from toricres.models import Report

logger = logging.getLogger(__name__)


def render_json(report: Report) -> str:
    return json.dumps(report.to_json_dict(), indent=2, sort_keys=False) + "\n"


def render_text(report: Report) -> str:
    lines: list[str] = []
    for result in report.results:
        lines.append(f"query: {result.echo}")
        lines.extend(f"  {line}" for line in result.lines)
    if report.verification is not None:
        v = report.verification
        lines.append(f"verification: {v.checks_run} check(s), {v.critical_count} critical, {v.warning_count} warning(s)")
        for flag in v.flags:
            lines.append(f"  {flag.severity.value} {flag.check_name}: {flag.message}")
    return "\n".join(lines) + "\n"


def write_report(serialized: str, path: Path) -> None:
    """Atomic write: temp file in the target directory, then ``os.replace``."""
    path = Path(path)
    fd, tmp_path = tempfile.mkstemp(dir=str(path.parent), suffix=".tmp", prefix=".report_")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(serialized)
        os.replace(tmp_path, str(path))
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
    logger.info("report written to %s", path)
