import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ditto import media
from ditto.errors import MalformedContainer
from tests.conftest import make_frames


class TestContainer:
    def test_round_trip_identity(self, tmp_path):
        header = media.VideoHeader(4, 4, 20, 2)
        frames = make_frames(header, seed=1)
        path = tmp_path / "v.dvf"
        media.write_video(header, frames, path)
        header2, frames2 = media.read_video(path)
        assert header2 == header
        assert np.array_equal(frames2, frames)

    def test_truncated_payload_rejected(self, tmp_path):
        header = media.VideoHeader(4, 4, 20, 2)
        data = media.encode_video(header, make_frames(header))
        path = tmp_path / "bad.dvf"
        path.write_bytes(data[:-5])
        with pytest.raises(MalformedContainer):
            media.read_video(path)

    def test_dataset_format_header_parses(self, tmp_path):
        # 1280x720, 101 frames at 20 fps is the published dataset shape
        header = media.VideoHeader(1280, 720, 20, 101)
        line = header.header_line()
        assert line == b"DVF1 1280 720 20 101 RGB8\n"
        # frame 0 starts right after the header line
        frames = np.zeros((101, 720, 1280, 3), dtype=np.uint8)
        data = media.encode_video(header, frames)
        assert data[len(line):len(line) + header.frame_bytes] == frames[0].tobytes()

    def test_same_input_same_digest(self, tmp_path):
        header = media.VideoHeader(4, 4, 20, 2)
        frames = make_frames(header, seed=2)
        d1 = media.write_video(header, frames, tmp_path / "a.dvf")
        d2 = media.write_video(header, frames, tmp_path / "b.dvf")
        assert d1 == d2

    def test_one_byte_change_changes_digest(self, tmp_path):
        header = media.VideoHeader(4, 4, 20, 2)
        frames = make_frames(header, seed=3)
        d1 = media.write_video(header, frames, tmp_path / "a.dvf")
        frames2 = frames.copy()
        frames2[0, 0, 0, 0] ^= 1
        d2 = media.write_video(header, frames2, tmp_path / "b.dvf")
        assert d1 != d2

    def test_zero_frames_rejected_before_write(self, tmp_path):
        with pytest.raises(MalformedContainer):
            media.write_video(
                media.VideoHeader(4, 4, 20, 0), np.zeros((0, 4, 4, 3), dtype=np.uint8),
                tmp_path / "z.dvf",
            )
        assert not (tmp_path / "z.dvf").exists()


class TestStandardize:
    def test_resampling_arithmetic(self):
        header = media.VideoHeader(640, 360, 8, 10)
        frames = make_frames(header, seed=4)
        out_header, out_frames = media.standardize(header, frames)
        assert out_header == media.VideoHeader(1280, 720, 20, 25)
        assert out_frames.shape == (25, 720, 1280, 3)

    def test_conforming_input_is_identity(self):
        header = media.VideoHeader(1280, 720, 20, 101)
        frames = np.zeros((101, 720, 1280, 3), dtype=np.uint8)
        frames[:, ::7, ::11] = 255
        out_header, out_frames = media.standardize(header, frames)
        assert out_header == header
        assert np.array_equal(out_frames, frames)

    def test_defaults_reproduce_dataset_format(self):
        # long enough source that the cap binds: 101 frames at 20 fps
        header = media.VideoHeader(320, 180, 10, 60)
        frames = make_frames(header, seed=5)
        out_header, _ = media.standardize(header, frames)
        assert (out_header.width, out_header.height) == (1280, 720)
        assert out_header.fps == 20
        assert out_header.frame_count == 101

    @settings(max_examples=25, deadline=None)
    @given(
        w=st.integers(2, 16), h=st.integers(2, 16),
        fps=st.integers(1, 30), fc=st.integers(1, 30), seed=st.integers(0, 10),
    )
    def test_idempotent(self, w, h, fps, fc, seed):
        target = media.StandardTarget(8, 8, 12, 10)
        header = media.VideoHeader(w, h, fps, fc)
        frames = make_frames(header, seed=seed)
        once = media.standardize(header, frames, target)
        twice = media.standardize(*once, target)
        assert twice[0] == once[0]
        assert np.array_equal(twice[1], once[1])


class TestKeyframe:
    def test_first_policy(self):
        header = media.VideoHeader(4, 4, 20, 101)
        assert media.select_keyframe(header) == 0

    def test_middle_policy(self):
        header = media.VideoHeader(4, 4, 20, 101)
        assert media.select_keyframe(header, media.KeyframePolicy.MIDDLE) == 50

    def test_single_frame(self):
        header = media.VideoHeader(4, 4, 20, 1)
        for policy in media.KeyframePolicy:
            assert media.select_keyframe(header, policy) == 0


class TestGridPoints:
    def test_two_by_two_cell_centers(self):
        pts = media.grid_points(4, 4, media.GridSpec(2, 2))
        assert pts == [(1.0, 1.0), (3.0, 1.0), (1.0, 3.0), (3.0, 3.0)]

    def test_single_cell_is_center(self):
        assert media.grid_points(10, 6, media.GridSpec(1, 1)) == [(5.0, 3.0)]

    def test_count_is_rows_times_cols(self):
        assert len(media.grid_points(100, 100, media.GridSpec(2, 2))) == 4

    @settings(max_examples=30, deadline=None)
    @given(rows=st.integers(1, 12), cols=st.integers(1, 12),
           w=st.integers(12, 200), h=st.integers(12, 200))
    def test_points_distinct_and_inside(self, rows, cols, w, h):
        pts = media.grid_points(w, h, media.GridSpec(rows, cols))
        assert len(set(pts)) == rows * cols
        assert all(0 <= x < w and 0 <= y < h for x, y in pts)
