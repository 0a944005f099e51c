"""Append-only event journal with CRC-guarded lines and snapshots.

Line format: canonical key-sorted JSON of the event, a ``|`` separator, and
the CRC32 of the JSON bytes as 8 hex digits. Sequence numbers are gapless
from 1; any gap, bad checksum, or unparsable line reports the first bad
sequence number. A journal with no path keeps lines in memory (tests).
"""

from __future__ import annotations

import json
import os
import zlib
from datetime import datetime
from pathlib import Path

from .errors import CorruptJournal, StorageFailure
from .events import Event, apply_event
from .state import State


def encode_line(event: Event) -> str:
    body = json.dumps(event.to_dict(), sort_keys=True, separators=(",", ":"))
    crc = zlib.crc32(body.encode()) & 0xFFFFFFFF
    return f"{body}|{crc:08x}"


def decode_line(line: str, expected_seq: int) -> Event:
    body, sep, crc_text = line.rstrip("\n").rpartition("|")
    if not sep:
        raise CorruptJournal(expected_seq, "missing checksum separator")
    if f"{zlib.crc32(body.encode()) & 0xFFFFFFFF:08x}" != crc_text:
        raise CorruptJournal(expected_seq, "checksum mismatch")
    try:
        event = Event.from_dict(json.loads(body))
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptJournal(expected_seq, f"unreadable event: {exc}") from exc
    if event.seq != expected_seq:
        raise CorruptJournal(expected_seq, f"sequence gap: found {event.seq}")
    return event


class Journal:
    """Single-writer event log; readers may re-scan it at any time."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._lines: list[str] = []
        self._events: list[Event] = []
        if self.path is not None and self.path.exists():
            self._lines = self.path.read_text().splitlines()
            # validate the whole log up front: appending after a torn or
            # tampered tail would hand out duplicate sequence numbers
            self._events = [decode_line(line, i + 1) for i, line in enumerate(self._lines)]
        self.last_seq = len(self._lines)

    def append_batch(self, at: datetime, decided: list[tuple[str, dict]]) -> list[Event]:
        """Durably append one command's events before any effect is visible."""
        events = [
            Event(seq=self.last_seq + 1 + i, at=at, kind=kind, payload=payload)
            for i, (kind, payload) in enumerate(decided)
        ]
        lines = [encode_line(e) for e in events]
        if self.path is not None:
            try:
                with open(self.path, "a") as f:
                    f.write("".join(line + "\n" for line in lines))
                    f.flush()
                    os.fsync(f.fileno())
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc
        self._lines.extend(lines)
        self._events.extend(events)
        self.last_seq += len(events)
        return events

    def append(self, at: datetime, kind: str, payload: dict) -> Event:
        return self.append_batch(at, [(kind, payload)])[0]

    def events(self) -> list[Event]:
        return list(self._events)

    def lines(self) -> list[str]:
        return list(self._lines)


def replay(journal: Journal) -> State:
    state = State()
    for event in journal.events():
        apply_event(state, event)
    return state


def write_snapshot(state: State, as_of_seq: int, path: str | Path) -> None:
    doc = {"as_of_seq": as_of_seq, "state": state.to_dict()}
    Path(path).write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")))


def load_snapshot(path: str | Path) -> tuple[int, State]:
    doc = json.loads(Path(path).read_text())
    return doc["as_of_seq"], State.from_dict(doc["state"])


def load(snapshot_path: str | Path, journal: Journal) -> State:
    """Snapshot plus journal tail; equivalent to a full replay."""
    as_of_seq, state = load_snapshot(snapshot_path)
    if as_of_seq > journal.last_seq:
        raise CorruptJournal(journal.last_seq + 1, "snapshot beyond journal end")
    for event in journal.events():
        if event.seq > as_of_seq:
            apply_event(state, event)
    return state
