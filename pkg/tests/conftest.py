import numpy as np
import pytest

from ditto import media


def make_frames(header: media.VideoHeader, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(
        0, 256, (header.frame_count, header.height, header.width, 3), dtype=np.uint8
    )


@pytest.fixture
def small_video():
    header = media.VideoHeader(8, 6, 4, 3)
    return header, make_frames(header, seed=7)


@pytest.fixture
def video_factory(tmp_path):
    """Writes seeded random videos to disk and returns their paths."""

    def make(n, width=48, height=27, fps=10, frame_count=13, seed=0):
        paths = []
        for i in range(n):
            header = media.VideoHeader(width, height, fps, frame_count)
            frames = make_frames(header, seed=seed * 1000 + i)
            path = tmp_path / f"src_{seed}_{i}.dvf"
            media.write_video(header, frames, path)
            paths.append(str(path))
        return paths

    return make


DESK_CONFIG = {
    "standardize": {"width": 64, "height": 36, "fps": 20, "frame_cap": 26},
}


@pytest.fixture
def desk_config():
    from ditto.pipeline import RunConfig

    return RunConfig.from_dict(dict(DESK_CONFIG))
