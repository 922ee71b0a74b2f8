"""Keyframe selection driven by motion activity.

Each shot's per-frame motion activity is searched for its peak; if the peak
stands out from the median by more than a factor ``alpha`` the shot is split
there and both halves are processed again, otherwise the calmest frame of the
interval becomes a candidate.  Candidates with near-identical HSV histograms
are then collapsed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._kernels import block_match, candidate_order
from ._parallel import chunks, ordered_map
from .media_io import Frame, FrameSequence, Shot, rgb_to_hsv
from .shots import chi_square_distance
from .validation import check_is_fitted, check_scalar, check_shots


@dataclass(frozen=True)
class MotionField:
    """Block motion vectors from frame ``frame`` to frame ``frame + 1``."""

    frame: int
    dx: np.ndarray
    dy: np.ndarray
    block_size: int = 16

    @property
    def shape(self):
        return self.dx.shape

    def vectors(self) -> np.ndarray:
        return np.stack([self.dx, self.dy], axis=-1).astype(np.float64)

    def __eq__(self, other):
        if not isinstance(other, MotionField):
            return NotImplemented
        return (
            self.frame == other.frame
            and self.block_size == other.block_size
            and np.array_equal(self.dx, other.dx)
            and np.array_equal(self.dy, other.dy)
        )


def _as_luma(x):
    return x.luma if isinstance(x, Frame) else np.asarray(x, dtype=np.uint8)


def estimate_motion(prev, nxt, block_size=16, search_radius=4, frame=0) -> MotionField:
    """Exhaustive SAD block matching of ``nxt`` against ``prev`` on luma.

    A vector ``(dx, dy)`` means the block's content sat at ``p - (dx, dy)`` in
    ``prev``.  Ties go to the smallest ``|dx| + |dy|``, then ``dy``, then
    ``dx``; pixels outside ``prev`` are edge-replicated.
    """
    a = _as_luma(prev)
    b = np.ascontiguousarray(_as_luma(nxt))
    if a.shape != b.shape:
        raise ValueError(f"frame shapes differ: {a.shape} vs {b.shape}")
    r = int(search_radius)
    padded = np.pad(a, r, mode="edge")
    cdx, cdy = candidate_order(r)
    dx, dy = block_match(padded, b, int(block_size), r, cdx, cdy)
    return MotionField(frame, dx, dy, int(block_size))


def compute_motion_fields(frames: FrameSequence, block_size=16, search_radius=4, threads=1):
    """Motion fields for every adjacent frame pair, in frame order."""
    r = int(search_radius)
    cdx, cdy = candidate_order(r)

    def work(span):
        lo, hi = span
        out = []
        prev = np.pad(np.asarray(frames.luma(lo)), r, mode="edge")
        for t in range(lo, hi):
            nxt = np.ascontiguousarray(frames.luma(t + 1))
            dx, dy = block_match(prev, nxt, int(block_size), r, cdx, cdy)
            out.append(MotionField(t, dx, dy, int(block_size)))
            prev = np.pad(nxt, r, mode="edge")
        return out

    parts = ordered_map(work, chunks(max(len(frames) - 1, 0), 64), threads)
    return [f for part in parts for f in part]


def motion_activity(field) -> float:
    """Standard deviation of motion vector magnitudes over the field."""
    v = field.vectors() if isinstance(field, MotionField) else np.asarray(field, dtype=np.float64)
    if v.size == 0:
        raise ValueError("empty motion field")
    mag = np.hypot(v[..., 0], v[..., 1])
    return float(mag.std())


def frame_activities(fields, shots, n_frames) -> np.ndarray:
    """Per-frame activity series that never reads a field across a shot boundary.

    Frame ``t`` takes the activity of the pair ``(t, t+1)``; the last frame of
    each shot repeats its predecessor's value and one-frame shots get 0.
    """
    pair = np.array([motion_activity(f) for f in fields], dtype=np.float64)
    act = np.zeros(n_frames, dtype=np.float64)
    for s in shots:
        if s.n_frames < 2:
            continue
        act[s.start_frame:s.end_frame - 1] = pair[s.start_frame:s.end_frame - 1]
        act[s.end_frame - 1] = act[s.end_frame - 2]
    return act


def extract_keyframes(shot, activities, alpha=2.0, max_keyframes=10, min_length=2):
    """Candidate keyframe indices for one shot, in temporal order.

    ``activities`` holds one value per frame of ``shot``.  Intervals of at
    most ``min_length`` frames are never split; the search stops once
    ``max_keyframes`` candidates exist.
    """
    act = np.asarray(activities, dtype=np.float64)
    start = shot.start_frame if isinstance(shot, Shot) else int(shot)
    if isinstance(shot, Shot) and len(act) != shot.n_frames:
        raise ValueError(f"got {len(act)} activities for a {shot.n_frames}-frame shot")
    if alpha <= 1:
        raise ValueError("alpha must be greater than 1")
    if len(act) == 0:
        return []

    found = []
    stack = [(0, len(act))]
    while stack and len(found) < max_keyframes:
        lo, hi = stack.pop()
        seg = act[lo:hi]
        if hi - lo > min_length:
            i_max = int(np.argmax(seg))
            if alpha * np.median(seg) < seg[i_max]:
                # The peak frame itself belongs to neither half; push right first
                # so the left half is handled first.
                if i_max + 1 < hi - lo:
                    stack.append((lo + i_max + 1, hi))
                if i_max > 0:
                    stack.append((lo, lo + i_max))
                continue
        found.append(start + lo + int(np.argmin(seg)))
    return sorted(found)


def hsv_histogram(frame, bins=(16, 4, 4)) -> np.ndarray:
    """Unit-sum joint H x S x V histogram of a frame."""
    rgb = frame.rgb() if isinstance(frame, Frame) else np.asarray(frame)
    hsv = rgb_to_hsv(rgb).reshape(-1, 3)
    nh, ns, nv = bins
    hi = np.minimum((hsv[:, 0] / 360.0 * nh).astype(np.int64), nh - 1)
    si = np.minimum((hsv[:, 1] * ns).astype(np.int64), ns - 1)
    vi = np.minimum((hsv[:, 2] * nv).astype(np.int64), nv - 1)
    counts = np.bincount((hi * ns + si) * nv + vi, minlength=nh * ns * nv).astype(np.float64)
    return counts / counts.sum()


def dedup_keyframes(candidates, frames, threshold=0.3, bins=(16, 4, 4)):
    """Greedy left-to-right filter: keep a candidate only if its HSV histogram
    is farther than ``threshold`` from every keyframe kept so far."""
    kept, kept_hist = [], []
    for idx in candidates:
        h = hsv_histogram(frames[idx], bins)
        if all(chi_square_distance(h, k) > threshold for k in kept_hist):
            kept.append(idx)
            kept_hist.append(h)
    return kept


class KeyframeExtractor(BaseEstimator):
    """Select up to ``max_keyframes`` keyframes per shot.

    After ``fit``: ``motion_fields_``, ``activities_`` (per frame),
    ``candidates_`` and ``keyframes_`` (dicts keyed by shot id) and
    ``mean_activity_`` per shot.
    """

    def __init__(self, alpha=2.0, max_keyframes=10, min_length=2, dup_threshold=0.3, block_size=16,
                 search_radius=4, threads=1):
        self.alpha = alpha
        self.max_keyframes = max_keyframes
        self.min_length = min_length
        self.dup_threshold = dup_threshold
        self.block_size = block_size
        self.search_radius = search_radius
        self.threads = threads

    def fit(self, frames, shots, motion_fields=None):
        check_scalar(self.alpha, "alpha", 1.0, include_min=False)
        check_scalar(self.max_keyframes, "max_keyframes", 1)
        shots = check_shots(shots, len(frames))
        if motion_fields is None:
            motion_fields = compute_motion_fields(frames, self.block_size, self.search_radius, self.threads)
        elif len(motion_fields) != max(len(frames) - 1, 0):
            raise ValueError(f"expected {len(frames) - 1} motion fields, got {len(motion_fields)}")
        self.motion_fields_ = motion_fields
        self.activities_ = frame_activities(motion_fields, shots, len(frames))
        self.candidates_, self.keyframes_, self.mean_activity_ = {}, {}, {}

        def per_shot(s):
            act = self.activities_[s.start_frame:s.end_frame]
            cands = extract_keyframes(s, act, self.alpha, self.max_keyframes, self.min_length)
            return cands, dedup_keyframes(cands, frames, self.dup_threshold)

        results = ordered_map(per_shot, shots, self.threads)
        for s, (cands, kept) in zip(shots, results):
            self.candidates_[s.id] = cands
            self.keyframes_[s.id] = kept
            if s.n_frames > 1:
                self.mean_activity_[s.id] = float(self.activities_[s.start_frame:s.end_frame - 1].mean())
            else:
                self.mean_activity_[s.id] = 0.0
        return self

    def transform(self, shots):
        check_is_fitted(self, "keyframes_")
        return [self.keyframes_[s.id] for s in shots]
