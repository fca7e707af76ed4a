import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ditto import manifest
from ditto.errors import CorruptJournal, DuplicatePublish
from ditto.manifest import ManifestRecord, ManifestState, ManifestWriter, replay


def write_sample_journal(path, n_assets=3):
    with ManifestWriter(path) as w:
        for i in range(n_assets):
            aid = f"a{i}"
            w.append("ASSET", aid, {"source": f"/videos/{aid}.dvf"})
            w.append("STAGE_RESULT", aid, {"stage": "CAPTION", "status": "DONE"})
            w.append("COST", aid, {"stage": "CAPTION", "gpu_seconds": 2})
            w.append("PUBLISH", aid, {
                "category": "GLOBAL_STYLE" if i % 2 == 0 else "LOCAL_ADD",
                "instruction": f"add a dog to the scene number {i}",
                "format": {"width": 1280, "height": 720, "frames": 101, "fps": 20},
            })
        return w.state.digest()


class TestRecordLine:
    def test_round_trip(self):
        rec = ManifestRecord(3, "COST", "a1", {"stage": "DEPTH", "gpu_seconds": 8})
        parsed = ManifestRecord.parse_line(rec.line(), 0)
        assert parsed == rec

    def test_missing_newline_is_truncation(self):
        rec = ManifestRecord(0, "ASSET", "a1", {})
        with pytest.raises(CorruptJournal):
            ManifestRecord.parse_line(rec.line()[:-1], 120)

    def test_byte_flip_detected(self):
        line = ManifestRecord(0, "ASSET", "a1", {"k": "value"}).line()
        flipped = line.replace("value", "vblue")
        with pytest.raises(CorruptJournal, match="checksum"):
            ManifestRecord.parse_line(flipped, 0)

    @settings(max_examples=50, deadline=None)
    @given(seq=st.integers(0, 10 ** 9),
           kind=st.sampled_from(manifest.RECORD_KINDS),
           aid=st.from_regex(r"[A-Za-z0-9_\-]{1,20}", fullmatch=True),
           payload=st.dictionaries(
               st.from_regex(r"[a-z_]{1,8}", fullmatch=True),
               st.one_of(st.integers(-1000, 1000), st.text(
                   alphabet=st.characters(blacklist_categories=("Cs",)), max_size=20)),
               max_size=4))
    def test_round_trip_property(self, seq, kind, aid, payload):
        rec = ManifestRecord(seq, kind, aid, payload)
        assert ManifestRecord.parse_line(rec.line(), 0) == rec


class TestReplay:
    def test_journal_round_trip(self, tmp_path):
        path = tmp_path / "run.manifest"
        digest = write_sample_journal(path)
        state = replay(path)
        assert state.record_count == 12
        assert state.digest() == digest
        assert set(state.publishes) == {"a0", "a1", "a2"}
        assert state.total_gpu_seconds() == 6

    def test_truncated_tail_reports_offset(self, tmp_path):
        path = tmp_path / "run.manifest"
        write_sample_journal(path)
        data = path.read_bytes()
        # chop mid-way through the final record
        cut = data[: len(data) - 10]
        last_line_start = cut.rfind(b"\n") + 1
        path.write_bytes(cut)
        with pytest.raises(CorruptJournal) as ei:
            replay(path)
        assert ei.value.offset == last_line_start

    def test_mid_file_corruption_offset(self, tmp_path):
        path = tmp_path / "run.manifest"
        write_sample_journal(path)
        lines = path.read_bytes().splitlines(keepends=True)
        offset_of_third = sum(len(l) for l in lines[:2])
        lines[2] = lines[2].replace(b"CAPTION", b"CAPTIOM", 1)
        path.write_bytes(b"".join(lines))
        with pytest.raises(CorruptJournal) as ei:
            replay(path)
        assert ei.value.offset == offset_of_third

    def test_sequence_gap_detected(self, tmp_path):
        path = tmp_path / "run.manifest"
        lines = [
            ManifestRecord(0, "ASSET", "a0", {}).line(),
            ManifestRecord(2, "ASSET", "a1", {}).line(),
        ]
        path.write_text("".join(lines))
        with pytest.raises(CorruptJournal, match="sequence"):
            replay(path)

    def test_state_digest_order_independent(self):
        recs = [
            ManifestRecord(0, "COST", "a", {"stage": "CAPTION", "gpu_seconds": 2}),
            ManifestRecord(1, "COST", "b", {"stage": "DEPTH", "gpu_seconds": 8}),
            ManifestRecord(2, "ASSET", "a", {"source": "x"}),
            ManifestRecord(3, "ASSET", "b", {"source": "y"}),
        ]
        s1 = ManifestState()
        for r in recs:
            s1.apply(r)
        s2 = ManifestState()
        for i, r in enumerate(reversed(recs)):
            s2.apply(ManifestRecord(i, r.kind, r.asset_id, r.payload))
        assert s1.digest() == s2.digest()


class TestWriter:
    def test_duplicate_publish_blocked_before_disk(self, tmp_path):
        path = tmp_path / "run.manifest"
        with ManifestWriter(path) as w:
            w.append("PUBLISH", "a0", {"category": "LOCAL_ADD", "instruction": "i",
                                       "format": {"width": 1, "height": 1, "frames": 1, "fps": 1}})
            before = path.read_bytes()
            with pytest.raises(DuplicatePublish):
                w.append("PUBLISH", "a0", {"category": "LOCAL_ADD", "instruction": "i",
                                           "format": {"width": 1, "height": 1, "frames": 1, "fps": 1}})
        assert path.read_bytes() == before

    def test_reopen_continues_sequence(self, tmp_path):
        path = tmp_path / "run.manifest"
        with ManifestWriter(path) as w:
            w.append("ASSET", "a0", {})
        with ManifestWriter(path) as w:
            seq = w.append("ASSET", "a1", {})
        assert seq == 1
        assert replay(path).record_count == 2

    def test_bad_asset_id(self, tmp_path):
        with ManifestWriter(tmp_path / "m") as w:
            with pytest.raises(ValueError):
                w.append("ASSET", "has space", {})


class TestSnapshots:
    def test_snapshot_plus_suffix_equals_full_replay(self, tmp_path):
        path = tmp_path / "run.manifest"
        with ManifestWriter(path) as w:
            for i in range(4):
                w.append("ASSET", f"a{i}", {"source": str(i)})
            manifest.snapshot(w.state, tmp_path / "snap.json")
            for i in range(4):
                w.append("COST", f"a{i}", {"stage": "CAPTION", "gpu_seconds": 2})
        full = replay(path)
        resumed = manifest.replay_with_snapshot(path, tmp_path / "snap.json")
        assert resumed.digest() == full.digest()
        assert resumed.record_count == full.record_count


class TestStats:
    def test_composition_row(self, tmp_path):
        path = tmp_path / "run.manifest"
        write_sample_journal(path)
        row = manifest.stats_composition(replay(path))
        assert (row.count, row.width, row.height, row.frames, row.fps) == (3, 1280, 720, 101, 20)
        assert (row.global_count, row.local_count) == (2, 1)

    def test_composition_empty_zero_row(self):
        row = manifest.stats_composition(ManifestState())
        assert row == manifest.CompositionRow(0, 0, 0, 0, 0, 0, 0)

    def test_token_stats_ranking_and_ties(self, tmp_path):
        state = ManifestState()
        pubs = [
            ("a0", "Add a dog, a DOG!"),
            ("a1", "remove the dog"),
            ("a2", "add a kite"),
        ]
        for i, (aid, instr) in enumerate(pubs):
            state.apply(ManifestRecord(i, "PUBLISH", aid, {
                "category": "LOCAL_ADD", "instruction": instr,
                "format": {"width": 1, "height": 1, "frames": 1, "fps": 1}}))
        ranked = manifest.stats_tokens(state, 4)
        # dog:3, a:3, add:2 -- "a" before "dog" lexicographically on the tie
        assert ranked[:3] == [("a", 3), ("dog", 3), ("add", 2)]

    def test_categories_list(self, tmp_path):
        path = tmp_path / "run.manifest"
        write_sample_journal(path)
        cats = manifest.composition_categories(replay(path))
        assert sorted(cats) == ["GLOBAL_STYLE", "GLOBAL_STYLE", "LOCAL_ADD"]
