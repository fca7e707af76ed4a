"""Desk-scale raw video container and deterministic media transforms.

Container layout (bit-exact): one ASCII header line
``DVF1 <width> <height> <fps> <frame_count> RGB8\n`` followed by the raw
RGB8 frames, row-major, frame-major. The content digest is SHA-256 over
the whole file.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .encoding import sha256_hex
from .errors import IoFailure, MalformedContainer
from . import kernels

MAGIC = "DVF1"
PIXEL_FORMAT = "RGB8"


@dataclass(frozen=True)
class VideoHeader:
    width: int
    height: int
    fps: int
    frame_count: int
    pixel_format: str = PIXEL_FORMAT

    def validate(self):
        for name in ("width", "height", "fps", "frame_count"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v <= 0:
                raise MalformedContainer(f"{name} must be a positive int, got {v!r}")
        if self.pixel_format != PIXEL_FORMAT:
            raise MalformedContainer(f"unsupported pixel format {self.pixel_format!r}")

    @property
    def frame_bytes(self) -> int:
        return self.width * self.height * 3

    @property
    def payload_bytes(self) -> int:
        return self.frame_bytes * self.frame_count

    def header_line(self) -> bytes:
        return f"{MAGIC} {self.width} {self.height} {self.fps} {self.frame_count} {self.pixel_format}\n".encode("ascii")


def _check_payload(header: VideoHeader, frames: np.ndarray):
    expected = (header.frame_count, header.height, header.width, 3)
    if frames.dtype != np.uint8 or frames.shape != expected:
        raise MalformedContainer(
            f"payload shape {frames.shape}/{frames.dtype} does not match header {expected}/uint8"
        )


def encode_video(header: VideoHeader, frames: np.ndarray) -> bytes:
    header.validate()
    _check_payload(header, frames)
    return header.header_line() + frames.tobytes()


def write_video(header: VideoHeader, frames: np.ndarray, path) -> str:
    """Write the container and return the SHA-256 digest of the file bytes."""
    data = encode_video(header, frames)
    try:
        with open(path, "wb") as f:
            f.write(data)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return sha256_hex(data)


def read_video(path) -> tuple[VideoHeader, np.ndarray]:
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    return decode_video(data)


def decode_video(data: bytes) -> tuple[VideoHeader, np.ndarray]:
    nl = data.find(b"\n")
    if nl < 0:
        raise MalformedContainer("missing header line")
    parts = data[:nl].decode("ascii", errors="replace").split(" ")
    if len(parts) != 6 or parts[0] != MAGIC:
        raise MalformedContainer(f"bad header line {parts!r}")
    try:
        width, height, fps, frame_count = (int(p) for p in parts[1:5])
    except ValueError as e:
        raise MalformedContainer(f"non-integer header field: {e}") from e
    header = VideoHeader(width, height, fps, frame_count, parts[5])
    header.validate()
    payload = data[nl + 1:]
    if len(payload) != header.payload_bytes:
        raise MalformedContainer(
            f"payload is {len(payload)} bytes, header requires {header.payload_bytes}"
        )
    frames = np.frombuffer(payload, dtype=np.uint8).reshape(
        header.frame_count, header.height, header.width, 3
    )
    return header, frames


@dataclass(frozen=True)
class StandardTarget:
    """Output geometry for standardization; defaults match the dataset format."""

    width: int = 1280
    height: int = 720
    fps: int = 20
    frame_cap: int = 101

    def validate(self):
        if min(self.width, self.height, self.fps, self.frame_cap) <= 0:
            raise MalformedContainer("standardization target fields must be positive")


def standardize(
    header: VideoHeader, frames: np.ndarray, target: StandardTarget = StandardTarget()
) -> tuple[VideoHeader, np.ndarray]:
    """Nearest-neighbor spatial resample + nearest-frame temporal resample.

    Output frame count is min(round(n_src * fps_tgt / fps_src), frame_cap);
    source frame for output index i is round(i * fps_src / fps_tgt), clamped.
    Idempotent: re-standardizing an already conforming video is the identity.
    """
    header.validate()
    target.validate()
    _check_payload(header, frames)

    n_out = min(round(header.frame_count * target.fps / header.fps), target.frame_cap)
    n_out = max(n_out, 1)
    t_idx = np.minimum(
        np.round(np.arange(n_out) * header.fps / target.fps).astype(np.int64),
        header.frame_count - 1,
    )
    y_idx = (np.arange(target.height) * header.height) // target.height
    x_idx = (np.arange(target.width) * header.width) // target.width

    out = frames[t_idx][:, y_idx][:, :, x_idx]
    out_header = VideoHeader(target.width, target.height, target.fps, n_out)
    return out_header, np.ascontiguousarray(out)


class KeyframePolicy(enum.Enum):
    FIRST = "FIRST"
    MIDDLE = "MIDDLE"


def select_keyframe(header: VideoHeader, policy: KeyframePolicy = KeyframePolicy.FIRST) -> int:
    header.validate()
    if policy is KeyframePolicy.MIDDLE:
        return header.frame_count // 2
    return 0


@dataclass(frozen=True)
class GridSpec:
    rows: int = 16
    cols: int = 16

    def validate(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must have at least one row and one column")


def grid_points(width: int, height: int, spec: GridSpec) -> list[tuple[float, float]]:
    """Cell-center lattice, row-major: x = (j+0.5)*w/cols, y = (i+0.5)*h/rows."""
    spec.validate()
    if width < spec.cols or height < spec.rows:
        raise ValueError("grid denser than the pixel raster")
    return [
        ((j + 0.5) * width / spec.cols, (i + 0.5) * height / spec.rows)
        for i in range(spec.rows)
        for j in range(spec.cols)
    ]


def to_luminance(frames: np.ndarray) -> np.ndarray:
    """Depth-proxy transform: integer BT.601 luma replicated across channels."""
    return kernels.luminance(frames)
