"""Hot numeric kernels.

Each kernel has a numba ``@njit`` implementation and a pure-numpy fallback.
Setting the environment variable ``DITTO_NO_NUMBA=1`` (or numba being
unimportable) selects the fallback; both paths are exercised by the test
suite and compared in ``benchmarks/bench_kernels.py``.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("DITTO_NO_NUMBA", "") not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


# ---------------------------------------------------------------------------
# greedy duplicate sweep over unit-normalized feature vectors


def _greedy_dedup_np(normed: np.ndarray, threshold: float) -> np.ndarray:
    n = normed.shape[0]
    sims = normed @ normed.T
    out = np.full(n, -1, dtype=np.int64)
    for i in range(1, n):
        for j in range(i):
            if out[j] == -1 and sims[i, j] > threshold:
                out[i] = j
                break
    return out


def _greedy_dedup_loop(normed, threshold):
    n, d = normed.shape
    out = np.full(n, -1, dtype=np.int64)
    for i in range(1, n):
        for j in range(i):
            if out[j] != -1:
                continue
            s = 0.0
            for k in range(d):
                s += normed[i, k] * normed[j, k]
            if s > threshold:
                out[i] = j
                break
    return out


# ---------------------------------------------------------------------------
# per-trajectory cumulative displacement, batched as (n_traj, n_frames, 2)


def _cumulative_displacements_np(positions: np.ndarray) -> np.ndarray:
    if positions.shape[1] < 2:
        return np.zeros(positions.shape[0])
    deltas = np.diff(positions, axis=1)
    return np.sqrt((deltas ** 2).sum(axis=2)).sum(axis=1)


def _cumulative_displacements_loop(positions):
    n, t, _ = positions.shape
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for k in range(t - 1):
            dx = positions[i, k + 1, 0] - positions[i, k, 0]
            dy = positions[i, k + 1, 1] - positions[i, k, 1]
            acc += np.sqrt(dx * dx + dy * dy)
        out[i] = acc
    return out


# ---------------------------------------------------------------------------
# integer luminance, round-half-up, replicated across channels


def _luminance_np(frames: np.ndarray) -> np.ndarray:
    f = frames.astype(np.int64)
    y = (299 * f[..., 0] + 587 * f[..., 1] + 114 * f[..., 2] + 500) // 1000
    return np.repeat(y[..., None], 3, axis=-1).astype(np.uint8)


def _luminance_loop(frames):
    flat = frames.reshape(-1, 3)
    out = np.empty_like(flat)
    for i in range(flat.shape[0]):
        r = np.int64(flat[i, 0])
        g = np.int64(flat[i, 1])
        b = np.int64(flat[i, 2])
        y = (299 * r + 587 * g + 114 * b + 500) // 1000
        out[i, 0] = y
        out[i, 1] = y
        out[i, 2] = y
    return out.reshape(frames.shape)


# ---------------------------------------------------------------------------
# invertible keyed color map: channel permutation + per-channel offset mod 256


def _color_map_np(frames: np.ndarray, perm: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    shifted = frames[..., perm].astype(np.uint16) + offsets.astype(np.uint16)
    return (shifted & 0xFF).astype(np.uint8)


def _color_map_loop(frames, perm, offsets):
    flat = frames.reshape(-1, 3)
    out = np.empty_like(flat)
    for i in range(flat.shape[0]):
        for c in range(3):
            out[i, c] = (np.uint16(flat[i, perm[c]]) + np.uint16(offsets[c])) & 0xFF
    return out.reshape(frames.shape)


if USE_NUMBA:
    greedy_dedup = njit(cache=True)(_greedy_dedup_loop)
    cumulative_displacements = njit(cache=True)(_cumulative_displacements_loop)
    luminance = njit(cache=True)(_luminance_loop)
    apply_color_map = njit(cache=True)(_color_map_loop)
else:
    greedy_dedup = _greedy_dedup_np
    cumulative_displacements = _cumulative_displacements_np
    luminance = _luminance_np
    apply_color_map = _color_map_np

# fallbacks kept importable for the benchmark and equivalence tests
numpy_impls = {
    "greedy_dedup": _greedy_dedup_np,
    "cumulative_displacements": _cumulative_displacements_np,
    "luminance": _luminance_np,
    "apply_color_map": _color_map_np,
}
