"""Structured run events for the kernel, the Monte Carlo engine and the CLI.

Every notable step (a chunked risk evaluation finishing, a verification
report failing, an advisory truncation) calls emit(). Events live in an
in-process buffer guarded by a lock; the CLI dumps them to ``events.jsonl``
next to its other outputs when a command finishes.
"""

from __future__ import annotations

import json
import logging
import threading
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)

CATEGORIES = ("specfun", "estimators", "risk", "analysis", "cli")
SEVERITIES = ("debug", "info", "warning", "error")

_lock = threading.Lock()
_events: list[dict[str, Any]] = []
_next_id = 1


def _event_record(
    event_id: int,
    category: str,
    severity: str,
    event_type: str,
    message: str,
    context: dict[str, Any] | None,
) -> dict[str, Any]:
    return {
        "id": event_id,
        "timestamp": datetime.now(UTC).isoformat(),
        "category": category,
        "severity": severity,
        "event_type": event_type,
        "message": message,
        "context": dict(context or {}),
    }


def emit(
    category: str,
    severity: str,
    event_type: str,
    message: str,
    *,
    context: dict[str, Any] | None = None,
) -> int:
    """Record a structured event and return its id."""
    global _next_id
    if category not in CATEGORIES:
        raise ValueError(f"unknown event category {category!r}, expected one of {CATEGORIES}")
    if severity not in SEVERITIES:
        logger.warning("Unknown event severity %r, recording as info", severity)
        severity = "info"
    with _lock:
        event_id = _next_id
        _next_id += 1
        _events.append(_event_record(event_id, category, severity, event_type, message, context))
    logger.log(
        logging.WARNING if severity in ("warning", "error") else logging.INFO,
        "[event] %s/%s: %s",
        category,
        event_type,
        message,
    )
    return event_id


def get_events(
    severity: str | None = None,
    category: str | None = None,
    limit: int | None = None,
) -> list[dict[str, Any]]:
    """Events in emission order, optionally filtered."""
    with _lock:
        rows = [dict(e) for e in _events]
    if severity:
        rows = [e for e in rows if e["severity"] == severity]
    if category:
        rows = [e for e in rows if e["category"] == category]
    if limit is not None:
        rows = rows[:limit]
    return rows


def clear() -> None:
    global _next_id
    with _lock:
        _events.clear()
        _next_id = 1


def write_jsonl(path: Path) -> int:
    """Write all buffered events as JSON lines. Returns the number written."""
    rows = get_events()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, default=str, sort_keys=True) + "\n")
    logger.debug("Wrote %d events to %s", len(rows), path)
    return len(rows)
