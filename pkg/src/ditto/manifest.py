"""Append-only journal and snapshot store: the single source of truth.

Journal format, one record per line:

    <sequence> <kind> <asset_id> <payload-json> <checksum>\n

where the checksum is SHA-256 over everything before it on the line.
Records are immutable; state is a pure fold over records, so the replayed
state is independent of read chunking and of when snapshots were taken.
"""

import json
import os
import re
import threading
from dataclasses import dataclass, field

from .encoding import canonical_json, sha256_hex
from .errors import CorruptJournal, DuplicatePublish, EmptyDataset, IoFailure

RECORD_KINDS = ("ASSET", "STAGE_RESULT", "COST", "REJECT", "PUBLISH")


@dataclass(frozen=True)
class ManifestRecord:
    sequence: int
    kind: str
    asset_id: str
    payload: dict

    def body(self) -> str:
        return f"{self.sequence} {self.kind} {self.asset_id} {canonical_json(self.payload)}"

    def line(self) -> str:
        body = self.body()
        return f"{body} {sha256_hex(body.encode('utf-8'))}\n"

    @classmethod
    def parse_line(cls, line: str, offset: int) -> "ManifestRecord":
        if not line.endswith("\n"):
            raise CorruptJournal("truncated final record", offset)
        stripped = line[:-1]
        head = stripped.split(" ", 3)
        if len(head) != 4:
            raise CorruptJournal("short record", offset)
        seq_s, kind, asset_id, rest = head
        payload_s, sep, checksum = rest.rpartition(" ")
        body = f"{seq_s} {kind} {asset_id} {payload_s}"
        if not sep or sha256_hex(body.encode("utf-8")) != checksum:
            raise CorruptJournal("checksum mismatch", offset)
        if kind not in RECORD_KINDS:
            raise CorruptJournal(f"unknown record kind {kind!r}", offset)
        try:
            sequence = int(seq_s)
            payload = json.loads(payload_s)
        except ValueError:
            raise CorruptJournal("unparseable record fields", offset) from None
        return cls(sequence, kind, asset_id, payload)


@dataclass
class ManifestState:
    assets: dict = field(default_factory=dict)
    stage_results: dict = field(default_factory=dict)  # asset_id -> stage -> payload
    costs: list = field(default_factory=list)
    rejects: dict = field(default_factory=dict)
    publishes: dict = field(default_factory=dict)
    record_count: int = 0

    def apply(self, record: ManifestRecord):
        if record.kind == "ASSET":
            self.assets[record.asset_id] = record.payload
        elif record.kind == "STAGE_RESULT":
            self.stage_results.setdefault(record.asset_id, {})[record.payload["stage"]] = record.payload
        elif record.kind == "COST":
            self.costs.append({"asset_id": record.asset_id, **record.payload})
        elif record.kind == "REJECT":
            self.rejects[record.asset_id] = record.payload
        elif record.kind == "PUBLISH":
            if record.asset_id in self.publishes:
                raise DuplicatePublish(f"second PUBLISH for {record.asset_id}")
            self.publishes[record.asset_id] = record.payload
        self.record_count += 1

    def done_stages(self, asset_id: str) -> set[str]:
        results = self.stage_results.get(asset_id, {})
        return {s for s, p in results.items() if p.get("status") == "DONE"}

    def to_canonical(self) -> dict:
        """Order-independent view: invariant to scheduling interleavings."""
        return {
            "assets": self.assets,
            "stage_results": self.stage_results,
            "costs": sorted(self.costs, key=canonical_json),
            "rejects": self.rejects,
            "publishes": self.publishes,
        }

    def digest(self) -> str:
        return sha256_hex(canonical_json(self.to_canonical()).encode("utf-8"))

    def total_gpu_seconds(self) -> float:
        return sum(c["gpu_seconds"] for c in self.costs)


def replay(path, state: ManifestState | None = None, after_sequence: int = -1) -> ManifestState:
    """Fold the journal into state, validating every record."""
    state = state if state is not None else ManifestState()
    expected_seq = None
    try:
        with open(path, "r", encoding="utf-8") as f:
            offset = 0
            for raw in f:
                record = ManifestRecord.parse_line(raw, offset)
                if expected_seq is not None and record.sequence != expected_seq:
                    raise CorruptJournal(
                        f"sequence {record.sequence}, expected {expected_seq}", offset
                    )
                expected_seq = record.sequence + 1
                if record.sequence > after_sequence:
                    state.apply(record)
                offset += len(raw.encode("utf-8"))
    except OSError as e:
        raise IoFailure(f"cannot read journal {path}: {e}") from e
    return state


class ManifestWriter:
    """Single serialized writer; every append is durable before returning."""

    def __init__(self, path):
        self.path = str(path)
        self._lock = threading.Lock()
        self.state = replay(self.path) if os.path.exists(self.path) else ManifestState()
        self._next_seq = self.state.record_count
        self._fh = open(self.path, "a", encoding="utf-8")

    def append(self, kind: str, asset_id: str, payload: dict) -> int:
        if kind not in RECORD_KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        if not asset_id or " " in asset_id:
            raise ValueError(f"bad asset_id {asset_id!r}")
        with self._lock:
            record = ManifestRecord(self._next_seq, kind, asset_id, payload)
            self.state.apply(record)  # raises DuplicatePublish before touching disk
            try:
                self._fh.write(record.line())
                self._fh.flush()
                os.fsync(self._fh.fileno())
            except OSError as e:
                raise IoFailure(f"cannot append to journal: {e}") from e
            self._next_seq += 1
            return record.sequence

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


# --- snapshots ---------------------------------------------------------------


def snapshot(state: ManifestState, path):
    doc = {"high_water_mark": state.record_count - 1, "state": state.to_canonical()}
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(canonical_json(doc))
    except OSError as e:
        raise IoFailure(f"cannot write snapshot {path}: {e}") from e


def load_snapshot(path) -> tuple[ManifestState, int]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise IoFailure(f"cannot read snapshot {path}: {e}") from e
    s = doc["state"]
    state = ManifestState(
        assets=s["assets"],
        stage_results=s["stage_results"],
        costs=s["costs"],
        rejects=s["rejects"],
        publishes=s["publishes"],
        record_count=doc["high_water_mark"] + 1,
    )
    return state, doc["high_water_mark"]


def replay_with_snapshot(journal_path, snapshot_path) -> ManifestState:
    state, hwm = load_snapshot(snapshot_path)
    return replay(journal_path, state=state, after_sequence=hwm)


# --- statistics --------------------------------------------------------------


@dataclass(frozen=True)
class CompositionRow:
    count: int
    width: int
    height: int
    frames: int
    fps: int
    global_count: int
    local_count: int


def stats_composition(state: ManifestState) -> CompositionRow:
    """Dataset table row computed from PUBLISH records; empty store is a zero row."""
    pubs = state.publishes.values()
    if not pubs:
        return CompositionRow(0, 0, 0, 0, 0, 0, 0)
    formats: dict[tuple, int] = {}
    n_global = 0
    for p in pubs:
        fmt = p["format"]
        key = (fmt["width"], fmt["height"], fmt["frames"], fmt["fps"])
        formats[key] = formats.get(key, 0) + 1
        if p["category"].startswith("GLOBAL"):
            n_global += 1
    (w, h, frames, fps), _ = max(formats.items(), key=lambda kv: kv[1])
    total = len(state.publishes)
    return CompositionRow(total, w, h, frames, fps, n_global, total - n_global)


def stats_tokens(state: ManifestState, top_k: int) -> list[tuple[str, int]]:
    """Top-k instruction tokens; lowercase alphanumeric split, ties lexicographic."""
    counts: dict[str, int] = {}
    for p in state.publishes.values():
        for tok in re.findall(r"[0-9a-z]+", p["instruction"].lower()):
            counts[tok] = counts.get(tok, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_k]


def composition_categories(state: ManifestState) -> list[str]:
    if not state.publishes:
        raise EmptyDataset("no published triplets")
    return [p["category"] for p in state.publishes.values()]
