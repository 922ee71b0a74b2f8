"""Shot boundary detection.

Hard cuts are found by thresholding the chi-square distance between luma
histograms of adjacent frames.  Cross dissolves are found by rank tracing:
the normalized histograms of a sliding window of frames form a matrix whose
effective rank is 1 inside a shot and rises while one picture blends into
another.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.base import BaseEstimator

from ._parallel import chunks, ordered_map
from .media_io import Frame, FrameSequence, Shot
from .validation import check_frames, check_is_fitted, check_scalar

IN_GAME = "in-game"
OUT_OF_GAME = "out-of-game"


class Boundary(NamedTuple):
    frame: int
    kind: str  # "hard-cut" or "dissolve"


def luma_histogram(frame, n_bins=64) -> np.ndarray:
    """Counts of luma values in ``n_bins`` equal-width bins over 0..255."""
    if n_bins <= 0 or 256 % n_bins:
        raise ValueError(f"n_bins={n_bins} must divide 256")
    luma = frame.luma if isinstance(frame, Frame) else np.asarray(frame, dtype=np.uint8)
    shift = (256 // n_bins).bit_length() - 1
    return np.bincount((luma >> shift).ravel(), minlength=n_bins).astype(np.int64)


def compute_histograms(frames: FrameSequence, n_bins=64, threads=1) -> np.ndarray:
    """``(n_frames, n_bins)`` luma histograms, computed in frame chunks."""

    def work(span):
        lo, hi = span
        return np.stack([luma_histogram(frames.luma(i), n_bins) for i in range(lo, hi)])

    parts = ordered_map(work, chunks(len(frames), 256), threads)
    if not parts:
        return np.zeros((0, n_bins), dtype=np.int64)
    return np.concatenate(parts)


def _normalize_rows(h):
    h = np.asarray(h, dtype=np.float64)
    s = h.sum(axis=-1, keepdims=True)
    return np.divide(h, s, out=np.zeros_like(h), where=s > 0)


def chi_square_distance(h1, h2) -> float:
    """Chi-square distance between two histograms after unit-sum normalization.

    ``0.5 * sum((a - b)^2 / (a + b))`` over bins with a nonzero denominator;
    ranges over [0, 1], reaching 1 for histograms with disjoint support.
    """
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    if h1.shape != h2.shape:
        raise ValueError(f"histogram bin counts differ: {h1.shape} vs {h2.shape}")
    return float(_chi_square_rows(_normalize_rows(h1)[None], _normalize_rows(h2)[None])[0])


def _chi_square_rows(a, b):
    num = (a - b) ** 2
    den = a + b
    terms = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return 0.5 * terms.sum(axis=-1)


def adjacent_distances(histograms) -> np.ndarray:
    """Chi-square distance between each frame and the next (length n-1)."""
    p = _normalize_rows(histograms)
    return _chi_square_rows(p[:-1], p[1:])


def _hard_cuts(distances, threshold, min_shot_len):
    out = []
    last = 0
    for t in np.flatnonzero(distances > threshold):
        b = int(t) + 1
        if b - last >= min_shot_len:
            out.append(Boundary(b, "hard-cut"))
            last = b
    return out


def detect_hard_cuts(frames, n_bins=64, threshold=0.25, min_shot_len=12, histograms=None):
    """Boundaries where the histogram distance to the previous frame exceeds ``threshold``.

    A cut is only accepted once ``min_shot_len`` frames have passed since the
    previous one (or since frame 0).
    """
    if histograms is None:
        check_frames(frames, 2)
        histograms = compute_histograms(frames, n_bins)
    return _hard_cuts(adjacent_distances(histograms), threshold, min_shot_len)


def effective_ranks(histograms, window=10, rank_tol=0.1) -> np.ndarray:
    """Effective rank of every sliding window of normalized histograms.

    Entry ``i`` belongs to the window ending at frame ``i + window - 1``.  The
    rank counts singular values above ``rank_tol`` times the largest one.
    """
    p = _normalize_rows(histograms)
    if len(p) < window:
        raise ValueError(f"window of {window} frames is longer than the {len(p)}-frame sequence")
    win = sliding_window_view(p, window, axis=0)  # (n_windows, B, window)
    sv = np.linalg.svd(win, compute_uv=False)
    top = sv[:, :1]
    return np.sum(sv > rank_tol * top, axis=1)


def _dissolves_from_ranks(ranks, window, min_dissolve_len):
    out = []
    high = np.concatenate([[False], ranks > 1, [False]])
    edges = np.flatnonzero(np.diff(high.astype(np.int8)))
    for lo, hi in zip(edges[::2], edges[1::2]):
        first_end = int(lo) + window - 1
        last_end = int(hi) - 1 + window - 1
        # A window spans `window` frames, so an instantaneous change keeps the
        # rank up for window-1 windows; subtract that to get transition frames.
        span = last_end - first_end - window + 3
        if span >= min_dissolve_len:
            out.append(Boundary((first_end + last_end - window + 2) // 2, "dissolve"))
    return out


def rank_trace_dissolves(frames, window=10, n_bins=64, rank_tol=0.1, min_dissolve_len=6, histograms=None):
    """Dissolve boundaries at the midpoint of each rank excursion.

    An excursion caused by a hard cut lasts exactly ``window - 1`` windows,
    i.e. a one-frame transition, and is therefore rejected for any
    ``min_dissolve_len > 1``.
    """
    if histograms is None:
        histograms = compute_histograms(frames, n_bins)
    if window < 2:
        raise ValueError("window must be at least 2")
    ranks = effective_ranks(histograms, window, rank_tol)
    return _dissolves_from_ranks(ranks, window, min_dissolve_len)


@dataclass(frozen=True)
class PhaseSchedule:
    """Half-open frame intervals labelled in-game / out-of-game tiling the timeline."""

    intervals: tuple  # of (start_frame, end_frame, label)

    def __post_init__(self):
        pos = 0
        for lo, hi, label in self.intervals:
            if lo != pos or hi <= lo or label not in (IN_GAME, OUT_OF_GAME):
                raise ValueError(f"invalid phase interval ({lo}, {hi}, {label!r})")
            pos = hi

    @classmethod
    def all_in_game(cls, n_frames):
        return cls(((0, n_frames, IN_GAME),))

    @classmethod
    def from_out_of_game(cls, ranges, n_frames):
        """Build from ``[(start_frame, end_frame), ...]`` out-of-game ranges."""
        mask = np.zeros(n_frames, dtype=bool)
        for lo, hi in ranges:
            mask[max(0, lo):min(n_frames, hi)] = True
        return cls._from_mask(mask)

    @classmethod
    def from_whistles(cls, events, n_frames, frame_rate):
        """Out-of-game before the first whistle and after the last one.

        ``events`` are ``(start_s, end_s)`` pairs.  Fewer than two events leave
        the whole timeline in-game.
        """
        if len(events) < 2 or n_frames == 0:
            return cls.all_in_game(n_frames)
        lo = min(int(events[0][0] * frame_rate), n_frames)
        hi = min(int(np.ceil(events[-1][1] * frame_rate)), n_frames)
        return cls.from_out_of_game([(0, lo), (hi, n_frames)], n_frames)

    @classmethod
    def _from_mask(cls, mask):
        n = len(mask)
        if n == 0:
            return cls(())
        cuts = np.flatnonzero(np.diff(mask.astype(np.int8))) + 1
        starts = np.concatenate([[0], cuts])
        ends = np.concatenate([cuts, [n]])
        return cls(tuple((int(a), int(b), OUT_OF_GAME if mask[a] else IN_GAME) for a, b in zip(starts, ends)))

    def label_at(self, frame):
        for lo, hi, label in self.intervals:
            if lo <= frame < hi:
                return label
        raise IndexError(frame)

    @property
    def has_out_of_game(self):
        return any(label == OUT_OF_GAME for _, _, label in self.intervals)


def merge_boundaries(boundaries, min_shot_len):
    """Sort, then drop any boundary closer than ``min_shot_len`` to the last kept one."""
    order = sorted(boundaries, key=lambda b: (b.frame, b.kind != "hard-cut"))
    kept = []
    last = 0
    for b in order:
        if b.frame - last >= min_shot_len:
            kept.append(b)
            last = b.frame
    return kept


def shots_from_boundaries(boundaries, n_frames):
    starts = [0] + [b.frame for b in boundaries]
    kinds = ["stream-start"] + [b.kind for b in boundaries]
    ends = starts[1:] + [n_frames]
    return [Shot(i, s, e, k) for i, (s, e, k) in enumerate(zip(starts, ends, kinds))]


def segment_shots(frames, schedule=None, n_bins=64, cut_threshold=0.25, window=10, rank_tol=0.1,
                  min_shot_len=12, min_dissolve_len=6, threads=1, histograms=None):
    """Split ``frames`` into shots that tile ``[0, len(frames))``.

    Hard cuts are searched everywhere; dissolves only inside out-of-game
    intervals of ``schedule`` (default: the whole timeline is in-game).
    """
    n = len(frames) if histograms is None else len(histograms)
    if n == 0:
        return []
    if schedule is None:
        schedule = PhaseSchedule.all_in_game(n)
    if histograms is None:
        histograms = compute_histograms(frames, n_bins, threads)
    bounds = _hard_cuts(adjacent_distances(histograms), cut_threshold, min_shot_len)
    if schedule.has_out_of_game and n >= window:
        for b in rank_trace_dissolves(None, window, n_bins, rank_tol, min_dissolve_len, histograms):
            if schedule.label_at(b.frame) == OUT_OF_GAME:
                bounds.append(b)
    return shots_from_boundaries(merge_boundaries(bounds, min_shot_len), n)


class ShotSegmenter(BaseEstimator):
    """Estimator wrapper around :func:`segment_shots`.

    ``fit`` stores ``histograms_``, ``boundaries_`` and ``shots_``;
    ``fit_predict`` returns the shot id of every frame.
    """

    def __init__(self, n_bins=64, cut_threshold=0.25, window=10, rank_tol=0.1, min_shot_len=12,
                 min_dissolve_len=6, threads=1):
        self.n_bins = n_bins
        self.cut_threshold = cut_threshold
        self.window = window
        self.rank_tol = rank_tol
        self.min_shot_len = min_shot_len
        self.min_dissolve_len = min_dissolve_len
        self.threads = threads

    def _validate_params(self):
        check_scalar(self.cut_threshold, "cut_threshold", 0.0)
        check_scalar(self.rank_tol, "rank_tol", 0.0, 1.0, include_min=False)
        check_scalar(self.window, "window", 2)
        check_scalar(self.min_shot_len, "min_shot_len", 1)
        check_scalar(self.min_dissolve_len, "min_dissolve_len", 1)
        if 256 % self.n_bins:
            raise ValueError(f"n_bins={self.n_bins} must divide 256")

    def fit(self, frames, y=None, schedule=None):
        self._validate_params()
        check_frames(frames)
        self.histograms_ = compute_histograms(frames, self.n_bins, self.threads)
        self.shots_ = segment_shots(
            frames, schedule, self.n_bins, self.cut_threshold, self.window, self.rank_tol,
            self.min_shot_len, self.min_dissolve_len, self.threads, histograms=self.histograms_,
        )
        self.boundaries_ = [Boundary(s.start_frame, s.transition_in) for s in self.shots_[1:]]
        self.n_frames_ = len(frames)
        return self

    def predict(self, frames=None):
        check_is_fitted(self, "shots_")
        labels = np.empty(self.n_frames_, dtype=np.int64)
        for s in self.shots_:
            labels[s.start_frame:s.end_frame] = s.id
        return labels

    def fit_predict(self, frames, y=None, schedule=None):
        return self.fit(frames, schedule=schedule).predict()
