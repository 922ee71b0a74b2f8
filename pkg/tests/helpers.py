import numpy as np

from soccer_highlights.media_io import FrameSequence, VideoConfig


def luma_sequence(lumas, fps=25):
    """Wrap ``(n, h, w)`` luma arrays as a yuv420p sequence with neutral chroma."""
    lumas = np.asarray(lumas, dtype=np.uint8)
    n, h, w = lumas.shape
    data = np.concatenate([lumas.reshape(n, -1), np.full((n, h * w // 2), 128, np.uint8)], axis=1)
    return FrameSequence(VideoConfig(w, h, fps, "yuv420p"), data)


def rgb_sequence(rgbs, fps=25):
    """Planar RGB sequence from ``(n, h, w, 3)`` arrays."""
    rgbs = np.asarray(rgbs, dtype=np.uint8)
    n, h, w, _ = rgbs.shape
    data = rgbs.transpose(0, 3, 1, 2).reshape(n, -1)
    return FrameSequence(VideoConfig(w, h, fps, "rgbp"), data)


def random_selection_case(rng):
    """Random shots, score table and allocation for selection fuzzing."""
    from soccer_highlights.highlights import ScoreTable
    from soccer_highlights.media_io import Shot

    n, m = int(rng.integers(1, 30)), int(rng.integers(1, 8))
    lens = rng.integers(1, 2000, size=n)
    starts = np.concatenate([[0], np.cumsum(lens)[:-1]])
    shots = [Shot(i, int(a), int(a + b), "hard-cut" if i else "stream-start")
             for i, (a, b) in enumerate(zip(starts, lens))]
    local = rng.integers(-2, 4, size=(n, m)).astype(float) * (rng.random((n, m)) < 0.6)
    table = ScoreTable([f"f{j}" for j in range(m)], local, local.sum(axis=1))
    w = rng.integers(0, 5, size=m)
    if w.sum() == 0:
        w[0] = 1
    pcts = w / w.sum() * 100
    alloc = [(f"f{j}", float(pcts[j])) for j in range(m)]
    return shots, table, alloc, float(rng.uniform(1, 200))


def selection_violations(shots, table, alloc, target, summary, fps=25):
    """Broken selection invariants of ``summary`` as readable strings."""
    out = []
    ids = [e.shot.id for e in summary.entries]
    if ids != sorted(set(ids)):
        out.append("shots repeated or out of order")
    longest = max((float(e.shot.duration(fps)) for e in summary.entries), default=0.0)
    if summary.duration > target + longest + 1e-9:
        out.append(f"duration {summary.duration} exceeds {target} + {longest}")
    chosen = set(ids)
    pct = dict(alloc)
    col = {name: j for j, name in enumerate(table.filters)}
    leftover = {name: any(table.local[i, col[name]] > 0 and i not in chosen for i in range(len(shots)))
                for name in pct}
    if any(leftover[n] for n in pct if pct[n] > 0):
        total = sum(a.budget for a in summary.allocations)
        if abs(total - target) > 1e-6:
            out.append(f"allocated {total} of {target}")
    for a in summary.allocations:
        if pct[a.filter] > 0 and leftover[a.filter] and a.claimed < a.budget - longest - 1e-9:
            out.append(f"{a.filter} claimed {a.claimed} of {a.budget}")
    return out
