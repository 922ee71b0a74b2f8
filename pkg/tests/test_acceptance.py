"""Acceptance criteria 1-11, one test each, with a PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v -s``.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from helpers import random_selection_case, selection_violations
from oracles import dft_bins_batch, keyframe_recursion
from soccer_highlights import documents as docs
from soccer_highlights.audio import (
    FRAME_SIZE, WhistleDetector, analyze_track, goertzel_band, spectral_entropy,
)
from soccer_highlights.cli import main
from soccer_highlights.highlights import (
    ELEMENTARY_FILTERS, AdvancedFilterSpec, HighlightScorer, ScoreTable, score_shots, select_shots,
)
from soccer_highlights.keyframes import extract_keyframes
from soccer_highlights.media_io import Shot, check_tiling
from soccer_highlights.pipeline import OUTPUTS, STAGES
from soccer_highlights.replay import ReplayDetector
from soccer_highlights.shots import PhaseSchedule, segment_shots
from soccer_highlights.synthetic import (
    GRASS, replay_clip, scripted_match, splice_corpus, whistle_test_signal, write_match_fixture,
)
from soccer_highlights.video import is_zoom_frame, long_shot_evidence, zoom_evidence


@pytest.fixture
def report(capsys):
    def _report(n, checks):
        failed = [name for name, ok in checks if not ok]
        line = f"criterion {n}: {'PASS' if not failed else 'FAIL'} | " + "; ".join(
            ("FAILED " if not ok else "") + name for name, ok in checks)
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line
    return _report


def _frames_inside(t0, t1):
    """Indices of 100 ms audio frames lying entirely within [t0, t1) seconds."""
    return list(range(math.ceil(t0 * 10), math.floor(t1 * 10)))


# 1 ------------------------------------------------------------------ whistles

def test_criterion_1_whistles(report):
    sig = whistle_test_signal(seed=0)
    t0 = time.perf_counter()
    det = WhistleDetector().fit(sig.track)
    elapsed = time.perf_counter() - t0
    events = [(float(e.start()), float(e.end())) for e in det.events_]

    def overlaps(a, b):
        return a[0] < b[1] and b[0] < a[1]

    hits = sum(any(overlaps(w, e) for e in events) for w in sig.whistles)
    false = sum(not any(overlaps(e, w) for w in sig.whistles) for e in events)
    ent = det.analysis_.entropy
    whistle_max = max(np.nanmax(ent[_frames_inside(*w)]) for w in sig.whistles)
    noise_min = min(np.nanmin(ent[_frames_inside(a, b)]) for a, b, _ in sig.noise_bursts)
    report(1, [
        (f"{hits}/10 whistles detected", hits >= 9),
        (f"{false} false events", false == 0),
        (f">= 5 noise bursts ({len(sig.noise_bursts)})", len(sig.noise_bursts) >= 5),
        (f"whistle entropy {whistle_max:.3f} below noise entropy {noise_min:.3f}", whistle_max < noise_min),
        (f"runtime {elapsed:.2f}s", elapsed < 5.0),
    ])


# 2 ------------------------------------------------------------------ Goertzel

def test_criterion_2_goertzel_vs_dft(report):
    rng = np.random.default_rng(2)
    n = np.arange(FRAME_SIZE)
    frames = rng.normal(0, rng.uniform(1, 8000, (1000, 1)), (1000, FRAME_SIZE))
    for i in range(0, 1000, 2):  # half the frames also carry in-band tones
        for f in rng.uniform(3500, 4500, 3):
            frames[i] += rng.uniform(100, 10000) * np.sin(2 * np.pi * f * n / 48000 + rng.uniform(0, 6.3))
    g = goertzel_band(frames)
    d = dft_bins_batch(frames, range(350, 451))
    rel = float(np.max(np.abs(g - d) / d))
    report(2, [(f"max relative error {rel:.2e}", rel < 1e-6)])


# 3 ------------------------------------------------------------------- entropy

def test_criterion_3_entropy(report):
    one = np.zeros(101)
    one[17] = 3.0
    uniform = spectral_entropy(np.ones(101))
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        p = rng.random(101) ** 4
        c = 10.0 ** rng.uniform(-6, 6)
        h = spectral_entropy(p)
        worst = max(worst, abs(spectral_entropy(p * c) - h) / h)
    report(3, [
        ("one bin -> 0", spectral_entropy(one) == 0.0),
        (f"uniform -> {uniform!r}", abs(uniform - math.log2(101)) <= 1e-9),
        (f"gain invariance worst relative change {worst:.1e}", worst <= 1e-12),
    ])


# 4 --------------------------------------------------------------- segmentation

def test_criterion_4_segmentation(report):
    corpus = splice_corpus(n_shots=200, n_dissolves=3, seed=0)
    n = len(corpus.frames)
    schedule = PhaseSchedule.from_out_of_game(corpus.out_of_game, n)
    shots = segment_shots(corpus.frames, schedule)
    cuts = {s.start_frame for s in shots if s.transition_in == "hard-cut"}
    truth = set(corpus.cuts)
    recall = len(cuts & truth) / len(truth)
    precision = len(cuts & truth) / len(cuts) if cuts else 0.0
    found = sorted(s.start_frame for s in shots if s.transition_in == "dissolve")
    localized = len(found) == len(corpus.dissolves) and all(a <= f < b for f, (a, b) in zip(found, corpus.dissolves))

    rng = np.random.default_rng(4)
    broken = 0
    for _ in range(10_000):
        m = int(rng.integers(0, 150))
        hist = rng.integers(0, 5, (m, 16)) * rng.integers(0, 2, (m, 1))
        ogg = sorted(rng.integers(0, m + 1, 2).tolist())
        sched = PhaseSchedule.from_out_of_game([tuple(ogg)], m) if m else None
        try:
            out = segment_shots(None, sched, 16, float(rng.uniform(0.01, 1.0)), int(rng.integers(2, 16)),
                                float(rng.uniform(0.01, 0.9)), int(rng.integers(1, 40)), int(rng.integers(1, 20)),
                                histograms=hist)
            if m:
                check_tiling(out, m)
            elif out:
                broken += 1
        except Exception:
            broken += 1
    report(4, [
        (f"hard-cut recall {recall:.3f}", recall == 1.0),
        (f"hard-cut precision {precision:.3f}", precision == 1.0),
        (f"dissolves {found} inside {corpus.dissolves}", localized),
        (f"{broken} tiling violations in 10000 runs", broken == 0),
    ])


# 5 ----------------------------------------------------------------- keyframes

def test_criterion_5_keyframes(report):
    spike = [3, 2, 1, 2, 3, 3, 2, 1.5, 2, 3] + [10] + [2, 3, 2, 2, 0.5, 2, 3, 2, 2]
    twelve = np.ones(65)
    twelve[4:60:5] = 100
    rng = np.random.default_rng(5)
    over_cap = mismatch = 0
    t0 = time.perf_counter()
    for _ in range(10_000):
        n = int(rng.integers(0, 300))
        kind = rng.integers(3)
        act = rng.random(n) if kind == 0 else rng.integers(0, 4, n).astype(float) if kind == 1 else \
            np.where(rng.random(n) < 0.2, rng.uniform(10, 100, n), rng.random(n))
        got = extract_keyframes(0, act)
        over_cap += len(got) > 10
        mismatch += got != keyframe_recursion(act)
    elapsed = time.perf_counter() - t0
    report(5, [
        ("constant -> [0]", extract_keyframes(0, np.full(50, 2.0)) == [0]),
        ("single spike -> [2, 15]", extract_keyframes(0, spike) == [2, 15]),
        ("12 spikes -> [0, 5, ..., 45]", extract_keyframes(0, twelve) == list(range(0, 50, 5))),
        (f"{over_cap} series over the cap", over_cap == 0),
        (f"{mismatch} disagreements with the recursive oracle", mismatch == 0),
        (f"10000 series terminated in {elapsed:.1f}s", True),
    ])


# 6 ---------------------------------------------------------------------- zoom

def _radial(scale, center, rows=18, cols=23):
    y, x = np.mgrid[0:rows, 0:cols].astype(float)
    return np.stack([scale * (x - center[1]), scale * (y - center[0])], axis=-1)


def test_criterion_6_zoom(report):
    rng = np.random.default_rng(6)
    radial = pans = outliers = total_out = 0
    for _ in range(500):
        center = tuple(rng.uniform([3, 4], [15, 19]))
        scale = float(rng.choice([-1, 1]) * rng.uniform(0.1, 2.0))
        radial += is_zoom_frame(_radial(scale, center))
        pans += not is_zoom_frame(np.broadcast_to(rng.uniform(-6, 6, 2), (18, 23, 2)))
    for scale in (0.5, 1.0):
        for center in ((8.5, 11.0), (6.0, 8.0), (11.0, 15.0)):
            for seed in range(100):
                r = np.random.default_rng(seed)
                f = _radial(scale, center)
                m = r.random(f.shape[:2]) < 0.2
                f[m] = r.uniform(-8, 8, (m.sum(), 2))
                outliers += is_zoom_frame(f)
                total_out += 1
    exact = decisions = True
    for _ in range(300):
        f = rng.integers(-4, 5, (18, 23, 2)).astype(float) if rng.random() < 0.5 else \
            _radial(rng.uniform(-1, 1), tuple(rng.uniform([3, 4], [15, 19])))
        exact &= zoom_evidence(f * 2.0 ** int(rng.integers(-8, 9))) == zoom_evidence(f)
        decisions &= is_zoom_frame(f * rng.uniform(1e-3, 1e3)) == is_zoom_frame(f)
    report(6, [
        (f"radial fields {radial}/500", radial == 500),
        (f"pans rejected {pans}/500", pans == 500),
        (f"radial with 20% outliers {outliers}/{total_out}", outliers == total_out),
        ("evidence identical under binary scaling", exact),
        ("decision identical under any positive scaling", decisions),
    ])


# 7 ----------------------------------------------------------------- long shot

def test_criterion_7_long_shot(report):
    green = np.broadcast_to(np.array(GRASS, np.uint8), (144, 176, 3)).copy()
    mid = green.copy()
    mid[50:144, 20:80] = (200, 30, 30)
    mid[60:144, 100:160] = (30, 30, 200)
    rng = np.random.default_rng(7)
    changed = 0
    for _ in range(300):
        base = green.copy() if rng.random() < 0.5 else mid.copy()
        base[60:100, 40:90] = rng.integers(0, 256, 3)
        ev = long_shot_evidence(base)
        mutated = base.copy()
        mutated[:48] = rng.integers(0, 256, (48, 176, 3))
        changed += long_shot_evidence(mutated) != ev
    report(7, [
        ("uniform green is a long shot", long_shot_evidence(green).long_shot),
        ("mid shot is not", not long_shot_evidence(mid).long_shot),
        (f"top third mutations changed the evidence {changed}/300 times", changed == 0),
    ])


# 8 -------------------------------------------------------------------- replay

def test_criterion_8_replay(report):
    checks = []
    for p in (0, 1, 3, 7):
        clip = replay_clip(p, seed=p)
        det = ReplayDetector()
        got = det.fit_predict(clip.frames, clip.boundaries)
        placed = len(got) == p and all(abs(g.start - a) <= 2 and abs(g.end - b) <= 2
                                       for g, (a, b) in zip(got, clip.replays))
        checks.append((f"P={p}: {len(got)} intervals", placed))
        if p:
            mad = float(np.abs(det.template_.image - clip.logo).mean())
            checks.append((f"P={p}: template MAD {mad:.2f}", mad < 2))
    report(8, checks)


# 9 ------------------------------------------------------------------- scoring

def test_criterion_9_scoring(report):
    rng = np.random.default_rng(9)
    not_exact = 0
    for _ in range(1000):
        n, m = int(rng.integers(1, 40)), int(rng.integers(1, 6))
        specs = [AdvancedFilterSpec(f"f{j}", {str(rng.choice(ELEMENTARY_FILTERS)): float(rng.normal(0, 3))
                                              for _ in range(int(rng.integers(1, 6)))} | {"zoom": 1.0})
                 for j in range(m)]
        table = score_shots(specs, rng.random((n, len(ELEMENTARY_FILTERS))) < 0.4)
        exact = [float(sum(Fraction(v) for v in row)) for row in table.local]
        not_exact += not np.array_equal(table.global_, exact)

    binary_flips = tol_flips = 0
    for _ in range(1000):
        weights = {}
        for _ in range(int(rng.integers(1, 7))):
            name, off = str(rng.choice(ELEMENTARY_FILTERS)), int(rng.integers(-2, 3))
            weights[name if off == 0 else f"{name}@{off:+d}"] = float(rng.uniform(-5, 5))
        spec = AdvancedFilterSpec("f", weights)
        E = rng.random((30, len(ELEMENTARY_FILTERS))) < 0.4
        a = score_shots([spec], E).local[:, 0]
        b = score_shots([spec.scaled(2.0 ** int(rng.integers(-10, 11)))], E).local[:, 0]
        binary_flips += not np.array_equal(np.argsort(-a, kind="stable"), np.argsort(-b, kind="stable"))
        c = score_shots([spec.scaled(float(rng.uniform(1e-3, 1e3)))], E).local[:, 0]
        tol = 1e-9 * max(abs(w) for w in weights.values())
        tol_flips += any(a[i] > a[j] + tol and not c[i] > c[j] for i in range(30) for j in range(30))

    goal_checks = []
    scores = {}
    for k in range(1, 6):
        match = scripted_match(k)
        L = HighlightScorer(frame_rate=match.frame_rate).transform(match.descriptors).local[:, 0]
        (g,) = match.goal_shots
        scores[k] = L[g]
        goal_checks.append((f"match {k}: goal score {L[g]} vs best other {np.delete(L, g).max()}",
                            L[g] > np.delete(L, g).max()))
    degraded = all(0 < scores[k] < min(scores[1], scores[2], scores[3]) for k in (4, 5))
    report(9, [
        (f"{not_exact}/1000 tables where G differs from the exact sum of L", not_exact == 0),
        (f"{binary_flips}/1000 rankings changed by power-of-two scaling", binary_flips == 0),
        (f"{tol_flips}/1000 rankings reordered beyond 1e-9 by arbitrary scaling", tol_flips == 0),
        *goal_checks,
        (f"matches without replays degraded but nonzero ({scores[4]}, {scores[5]})", degraded),
    ])


# 10 ----------------------------------------------------------------- selection

def test_criterion_10_selection(report):
    rng = np.random.default_rng(10)
    bad = []
    for t in range(10_000):
        shots, table, alloc, target = random_selection_case(rng)
        s = select_shots(table, shots, target, alloc)
        v = selection_violations(shots, table, alloc, target, s)
        if v:
            bad.append((t, v))

    # three minutes split 50/30/10/10 over four filters with plenty of candidates
    n = 240
    lens = rng.integers(2 * 25, 10 * 25, n)
    starts = np.concatenate([[0], np.cumsum(lens)[:-1]])
    shots = [Shot(i, int(a), int(a + b), "hard-cut" if i else "stream-start") for i, (a, b) in enumerate(zip(starts, lens))]
    local = np.zeros((n, 4))
    local[np.arange(n), np.arange(n) % 4] = rng.uniform(0.5, 5, n)
    table = ScoreTable(["a", "b", "c", "d"], local, local.sum(axis=1))
    s = select_shots(table, shots, 180, {"a": 50, "b": 30, "c": 10, "d": 10})
    longest = max(float(e.shot.duration(25)) for e in s.entries)
    split = [(a.filter, a.budget, a.claimed) for a in s.allocations]
    worked = all(a.budget == want and abs(a.claimed - want) <= longest
                 for a, want in zip(s.allocations, (90, 54, 18, 18)))
    report(10, [
        (f"{len(bad)} of 10000 fuzzed cases broke the duration or conservation contract {bad[:3]}", not bad),
        (f"3 min at 50/30/10/10 -> {split}", worked),
    ])


# 11 --------------------------------------------------------------- end to end

def test_criterion_11_end_to_end(report, tmp_path_factory):
    fx = write_match_fixture(tmp_path_factory.mktemp("match"), duration=300, width=360, height=288, seed=0)
    names = [n for s in STAGES for n in OUTPUTS[s]]
    outputs, times = {}, {}
    for label, threads in (("run 1", 1), ("run 2", 1), ("threads 4", 4), ("threads 8", 8)):
        out = tmp_path_factory.mktemp(label.replace(" ", "_"))
        t0 = time.perf_counter()
        rc = main(["--video", str(fx.video_path), "--audio", str(fx.audio_path), "--width", "360", "--height",
                   "288", "--fps", "25", "--out", str(out), "--duration", "60", "--threads", str(threads),
                   "--out-of-game", fx.out_of_game])
        times[label] = time.perf_counter() - t0
        assert rc == 0
        outputs[label] = {n: (out / n).read_bytes() for n in names}
    same = {label: outputs[label] == outputs["run 1"] for label in outputs}
    summary = docs.read_summary(outputs["run 1"]["summary.xml"])
    goal_starts = {fx.shots[g].start for g in fx.goal_shots}
    picked = {e.shot.start_frame for e in summary.entries}
    report(11, [
        *((f"{label} byte-identical to run 1", same[label]) for label in ("run 2", "threads 4", "threads 8")),
        *((f"{label} took {t:.1f}s", t < 60) for label, t in times.items()),
        (f"summary contains both goals ({sorted(goal_starts)} in {sorted(picked)})", goal_starts <= picked),
    ])
