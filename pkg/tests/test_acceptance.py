"""Acceptance gate: one criterion per test, one printed PASS/FAIL line each.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines inline.
The format-constants criterion runs at the full 1280x720/101-frame default
target, so it writes a few hundred MB of scratch video per asset.
"""

import base64
import contextlib
import json
import os
import time
import urllib.request

import numpy as np
import pytest

from ditto import filtering, media, pipeline, training
from ditto.backends.mocks import MockBackendHost, mock_instruction
from ditto.backends.protocol import BackendRequest, JudgeScores
from ditto.backends.server import MockServer
from ditto.curation import CurationPolicy, accept
from ditto.encoding import canonical_json, sha256_hex
from ditto.errors import AbortRun
from ditto.manifest import replay
from ditto.pipeline import RunConfig, budget_report
from ditto.training import CurriculumSchedule, FlowSample
from tests.conftest import DESK_CONFIG, make_frames

VECTORS_PATH = os.path.join(os.path.dirname(__file__), "..", "conformance", "vectors.json")


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def write_assets(tmp_path, n, width=48, height=27, fps=10, frame_count=13, seed=0):
    paths = []
    for i in range(n):
        header = media.VideoHeader(width, height, fps, frame_count)
        frames = make_frames(header, seed=seed * 1000 + i)
        path = tmp_path / f"src_{i}.dvf"
        media.write_video(header, frames, path)
        paths.append(str(path))
    return paths


def test_filtering_oracles():
    with criterion("filtering-oracles"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(0)

        vectors = [
            filtering.FeatureVector(f"v{i}", v)
            for i, v in enumerate(rng.normal(size=(200, 32)))
        ]
        # brute-force greedy oracle, written against the definition
        kept: list[int] = []
        expected = []
        for i, fv in enumerate(vectors):
            dup = next(
                (j for j in kept
                 if filtering.cosine_similarity(fv, vectors[j]) > 0.9), None)
            if dup is None:
                kept.append(i)
            expected.append((fv.asset_id, dup is None,
                             None if dup is None else vectors[dup].asset_id))
        got = [(d.asset_id, d.kept, d.duplicate_of)
               for d in filtering.dedup(vectors, 0.9)]
        assert got == expected

        for k in range(1000):
            n_pts = int(rng.integers(1, 30))
            pts = rng.normal(size=(n_pts, 2)) * 20
            traj = filtering.Trajectory(str(k), pts)
            brute = sum(
                float(np.hypot(*(pts[i + 1] - pts[i]))) for i in range(n_pts - 1))
            assert abs(filtering.cumulative_displacement(traj) - brute) <= 1e-9

        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0, f"filtering oracles took {elapsed:.1f}s"


def test_determinism_50_assets(tmp_path):
    with criterion("determinism-50-assets"):
        t0 = time.perf_counter()
        paths = write_assets(tmp_path, 50, seed=41)
        digests = []
        for label, workers in (("w1", 1), ("w8", 8), ("w8-again", 8)):
            cfg = RunConfig.from_dict(dict(DESK_CONFIG, workers=workers))
            summary = pipeline.execute(cfg, paths, tmp_path / f"run-{label}")
            assert summary.exit_code == 0
            digests.append(summary.manifest_digest)
        assert len(set(digests)) == 1
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0, f"determinism check took {elapsed:.1f}s"


def test_crash_resume_every_boundary(tmp_path):
    with criterion("crash-resume-every-boundary"):
        paths = write_assets(tmp_path, 3, seed=42)
        cfg = lambda: RunConfig.from_dict(dict(DESK_CONFIG, workers=1))
        clean = pipeline.execute(cfg(), paths, tmp_path / "clean")

        for stage in pipeline.STAGES:
            fired = {"done": False}

            def hook(s, asset_id, _stage=stage, _fired=fired):
                if s == _stage and not _fired["done"]:
                    _fired["done"] = True
                    raise AbortRun(f"kill after {_stage}")

            run_dir = tmp_path / f"crash-{stage}"
            crashed = pipeline.execute(cfg(), paths, run_dir, fault_hook=hook)
            assert crashed.aborted, f"hook never fired at {stage}"
            resumed = pipeline.resume(run_dir)
            assert resumed.manifest_digest == clean.manifest_digest, stage


def test_dataset_format_constants(tmp_path):
    with criterion("dataset-format-constants"):
        # small sources, full default standardization target
        paths = write_assets(tmp_path, 4, width=160, height=90, fps=20,
                             frame_count=101, seed=43)
        cfg = RunConfig.from_dict({"workers": 2})
        summary = pipeline.execute(cfg, paths, tmp_path / "run")
        assert summary.exit_code == 0
        state = replay(tmp_path / "run" / "journal.log")
        assert state.publishes, "run published nothing; format check is vacuous"
        for p in state.publishes.values():
            assert p["format"] == {"width": 1280, "height": 720,
                                   "frames": 101, "fps": 20}


def test_composition_split():
    with criterion("composition-split"):
        n = 10_000
        digest = sha256_hex(b"composition-check")
        n_global = sum(
            mock_instruction(digest, "a quiet street in the old town", seed)[1]
            .startswith("GLOBAL")
            for seed in range(n)
        )
        frac = n_global / n
        assert abs(frac - 0.70) <= 0.02, f"global fraction {frac}"


def test_cost_model(tmp_path):
    with criterion("cost-model"):
        paths = write_assets(tmp_path, 8, seed=44)
        cfg = RunConfig.from_dict(dict(DESK_CONFIG))
        pipeline.execute(cfg, paths, tmp_path / "run")
        state = replay(tmp_path / "run" / "journal.log")
        report = budget_report(state, target_count=1_000_000)

        gen = report.per_stage["GENERATE"]
        base = cfg["generate"]["base_gpu_seconds"]
        assert base == 3000  # 50 GPU-minutes
        assert gen["mean"] == base * 0.20  # distilled = exactly 20% of base

        projected_generate_days = gen["mean"] * 1_000_000 / 86400.0
        assert 1_000 <= projected_generate_days <= 12_000
        assert report.projected_gpu_days >= projected_generate_days


def test_curation_logic():
    with criterion("curation-logic"):
        policy = CurationPolicy()
        rng = np.random.default_rng(7)
        for _ in range(10_000):
            s = rng.uniform(0, 1, size=4)
            base = accept(JudgeScores(*s), policy)
            bumped = np.minimum(1.0, s + rng.uniform(0, 0.3, size=4))
            if base.accepted:
                assert accept(JudgeScores(*bumped), policy).accepted

        # hand-enumerated truth table at the decision boundaries
        table = [
            ((0.7, 0.7, 0.7, 0.9), True),
            ((0.699999, 0.7, 0.7, 0.9), False),
            ((0.7, 0.699999, 0.7, 0.9), False),
            ((0.7, 0.7, 0.699999, 0.9), False),
            ((0.7, 0.7, 0.7, 0.899999), False),
            ((1.0, 1.0, 1.0, 1.0), True),
            ((0.0, 1.0, 1.0, 1.0), False),
            ((1.0, 1.0, 1.0, 0.7), False),
        ]
        for values, want in table:
            assert accept(JudgeScores(*values), policy).accepted == want, values


def test_training_math():
    with criterion("training-math"):
        sample = FlowSample(np.array([1.0, 2.0, 3.0]), np.array([3.0, 6.0, 1.0]), 0.5)
        # z_t = [2, 4, 2]; target = z0 - z_t = [-1, -2, 1]
        assert np.allclose(training.flow_target(sample), [-1.0, -2.0, 1.0])
        assert training.flow_matching_loss(training.flow_target(sample), sample) == 0.0
        assert training.flow_matching_loss(np.zeros(3), sample) == pytest.approx(6.0)

        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(100):
            s = FlowSample(rng.normal(size=4), rng.normal(size=4), float(rng.uniform(0, 1)))
            pred = rng.normal(size=4)
            analytic = training.flow_matching_loss_grad(pred, s)
            for i in range(4):
                hi, lo = pred.copy(), pred.copy()
                hi[i] += h
                lo[i] -= h
                fd = (training.flow_matching_loss(hi, s)
                      - training.flow_matching_loss(lo, s)) / (2 * h)
                denom = max(abs(analytic[i]), 1.0)
                assert abs(fd - analytic[i]) / denom <= 1e-5

        sched = CurriculumSchedule(5000, 16000)
        assert training.scaffold_probability(0, sched) == 1.0
        assert training.scaffold_probability(5000, sched) == 0.0
        prev = 1.0
        for step in range(16001):
            p = training.scaffold_probability(step, sched)
            assert p <= prev
            prev = p


def test_protocol_conformance(tmp_path):
    with criterion("protocol-conformance"):
        with open(VECTORS_PATH, "r", encoding="utf-8") as f:
            doc = json.load(f)
        root = tmp_path / "media"
        root.mkdir()
        for m in doc["media"]:
            (root / m["path"]).write_bytes(base64.b64decode(m["base64"]))

        host = MockBackendHost(root)
        for v in doc["vectors"]:
            req = BackendRequest.from_wire(v["kind"], v["request"])
            assert host.handle(req).serialize() == canonical_json(v["response"])

        with MockServer(root) as server:
            for v in doc["vectors"]:
                body = canonical_json(v["request"]).encode("utf-8")
                http_req = urllib.request.Request(
                    f"{server.url}/v1/{v['kind']}", data=body,
                    headers={"Content-Type": "application/json"}, method="POST")
                with urllib.request.urlopen(http_req, timeout=10) as resp:
                    raw = resp.read()
                assert raw == canonical_json(v["response"]).encode("utf-8")
