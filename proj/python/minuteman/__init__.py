"""Python bindings for the Minuteman meeting-minuting core.

Lines are dicts ``{"text": str, "attrs": {"utt_seq": int, "summary_id": int}}``
(``author`` and ``stamps`` are optional and round-trip through ``apply``).
Edits are lists of components: ``{"retain": n}``, ``{"delete": n}`` or
``{"insert": text, "attrs": {...}}``. Positions count Unicode code points.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from . import _core
from ._core import (
    CHUNK_SAMPLES,
    SAMPLE_RATE,
    Error,
    FormatError,
    MalformedEditError,
    NotFoundError,
    SequencingError,
    ValidationError,
    detect_speech,
    mock_summarize,
    preprocess,
    rms_dbfs,
    segment,
    word_count,
)

__all__ = [
    "CHUNK_SAMPLES",
    "SAMPLE_RATE",
    "Error",
    "FormatError",
    "MalformedEditError",
    "NotFoundError",
    "SequencingError",
    "ValidationError",
    "apply",
    "detect_speech",
    "extract_segment",
    "mock_summarize",
    "preprocess",
    "replay",
    "replay_file",
    "rms_dbfs",
    "segment",
    "stamp_user_inserts",
    "transform",
    "word_count",
]

Line = Mapping[str, Any]
Component = Mapping[str, Any]


def _lines(lines: Iterable[Line | str]) -> str:
    return json.dumps([{"text": l} if isinstance(l, str) else dict(l) for l in lines])


def extract_segment(lines: Iterable[Line | str], start_seq: int, end_seq: int) -> tuple[str, list[int]]:
    """Text and line indices of the utterance range ``start_seq..end_seq``."""
    return _core.extract_segment_json(_lines(lines), start_seq, end_seq)


def transform(a: Sequence[Component], b: Sequence[Component]) -> tuple[list[dict], list[dict]]:
    """Concurrent edits ``(a, b)`` of one document to ``(a', b')``."""
    a2, b2 = _core.transform_json(json.dumps(list(a)), json.dumps(list(b)))
    return json.loads(a2), json.loads(b2)


def apply(lines: Iterable[Line | str], components: Sequence[Component],
          author: str = "user") -> tuple[list[dict], list[dict]]:
    """Applies an edit. Returns the new lines and the attributes of lines it modified."""
    out, modified = _core.apply_json(_lines(lines), json.dumps(list(components)), author)
    return json.loads(out), json.loads(modified)


def stamp_user_inserts(lines: Iterable[Line | str], components: Sequence[Component]) -> list[dict]:
    """Attributes a user edit's inserts the way the server does."""
    return json.loads(_core.stamp_user_inserts_json(_lines(lines), json.dumps(list(components))))


def replay(manifest_yaml: str, *, base_dir: str | Path = "", seed: int | None = None,
           debounce_s: float | None = None, realtime: bool = False) -> dict:
    """Runs a scripted meeting in process. Returns transcript, minutes and events."""
    return _core.replay(manifest_yaml, str(base_dir), seed, debounce_s, realtime)


def replay_file(path: str | Path, **kwargs: Any) -> dict:
    path = Path(path)
    return replay(path.read_text(encoding="utf-8"), base_dir=path.parent, **kwargs)
