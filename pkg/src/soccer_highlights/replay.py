"""Replay detection through broadcaster logo transitions.

Four stages: candidate frames (luminance jumps plus frames around shot
boundaries), logo template discovery (k-means on per-frame luminance mean and
variance, keeping the most self-similar cluster), template matching by mean
absolute pixel difference, and pairing of opening/closing logos.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator

from ._parallel import chunks, ordered_map
from .audio import merge_runs
from .validation import check_frames, check_is_fitted
from .video import kmeans


class LogoCandidate(NamedTuple):
    frame: int
    mean: float
    var: float


class ReplayInterval(NamedTuple):
    start: int  # frame of the opening logo
    end: int  # frame of the closing logo (exclusive bound)


@dataclass
class LogoTemplate:
    image: np.ndarray
    members: list = field(default_factory=list)
    spread: float = 0.0  # mean absolute deviation of members from the template

    @property
    def mean(self) -> float:
        return float(self.image.mean())


def luma_stats(frames, threads=1):
    """Per-frame mean and variance of the luma plane."""

    def work(span):
        lo, hi = span
        out = np.empty((hi - lo, 2))
        for i in range(lo, hi):
            y = np.asarray(frames.luma(i), dtype=np.float64)
            out[i - lo] = y.mean(), y.var()
        return out

    parts = ordered_map(work, chunks(len(frames), 256), threads)
    stats = np.concatenate(parts) if parts else np.zeros((0, 2))
    return stats[:, 0], stats[:, 1]


def logo_candidates(frames, boundaries, luma_threshold=20.0, margin=2, stats=None):
    """Frames whose mean luma jumps by more than ``luma_threshold`` from the
    previous frame, plus every frame within ``margin`` of a shot boundary."""
    means, var = stats if stats is not None else luma_stats(frames)
    n = len(means)
    picked = set((np.flatnonzero(np.abs(np.diff(means)) > luma_threshold) + 1).tolist())
    for b in boundaries:
        f = b.frame if hasattr(b, "frame") else b.start_frame if hasattr(b, "start_frame") else int(b)
        picked.update(range(max(0, f - margin), min(n, f + margin + 1)))
    return [LogoCandidate(int(i), float(means[i]), float(var[i])) for i in sorted(picked)]


def _farthest_seeds(x, k):
    seeds = [0]
    d = ((x - x[0]) ** 2).sum(axis=1)
    while len(seeds) < k:
        i = int(np.argmax(d))
        if d[i] <= 0:
            break
        seeds.append(i)
        d = np.minimum(d, ((x - x[i]) ** 2).sum(axis=1))
    return x[seeds].copy()


def cluster_features(features, k=4, n_iter=100):
    """k-means labels for standardized (mean, variance) features."""
    x = np.asarray(features, dtype=np.float64)
    sd = x.std(axis=0)
    x = (x - x.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    _, labels = kmeans(x, _farthest_seeds(x, k), n_iter)
    return labels


def discover_template(candidates, frames, k=4):
    """Pixel-mean template of the most self-similar candidate cluster.

    Returns ``None`` when there are fewer than ``k`` candidates.  Singleton
    clusters are only considered when no cluster has two members.
    """
    if len(candidates) < k or len(candidates) == 0:
        return None
    labels = cluster_features([(c.mean, c.var) for c in candidates], k)
    best = None
    sizes = np.bincount(labels)
    allow_single = sizes.max() < 2
    for j in range(len(sizes)):
        members = [candidates[i].frame for i in np.flatnonzero(labels == j)]
        if len(members) < 2 and not allow_single:
            continue
        stack = np.stack([np.asarray(frames.luma(f), dtype=np.float64) for f in members])
        image = stack.mean(axis=0)
        spread = float(np.abs(stack - image).mean())
        key = (spread, -len(members), members[0])
        if best is None or key < best[0]:
            best = (key, LogoTemplate(image, members, spread))
    return best[1]


def match_logo(template, frames, match_threshold=12.0, max_run=None, means=None):
    """Frames within ``match_threshold`` mean absolute difference of the template.

    Consecutive matches collapse to the first frame of their run; runs longer
    than ``max_run`` frames are ignored (a logo transition is brief, a
    recurring camera view is not).
    """
    image = template.image if isinstance(template, LogoTemplate) else np.asarray(template, dtype=np.float64)
    tmean = image.mean()
    n = len(frames)
    hit = np.zeros(n, dtype=bool)
    for i in range(n):
        # |mean(a - b)| <= mean|a - b|, so a large mean gap already rules the frame out
        if means is not None and abs(means[i] - tmean) >= match_threshold:
            continue
        y = np.asarray(frames.luma(i), dtype=np.float64)
        hit[i] = np.abs(y - image).mean() < match_threshold
    return [a for a, b in merge_runs(hit) if max_run is None or b - a <= max_run]


def pair_logos(occurrences, frame_rate, min_gap=2.0, max_gap=60.0):
    """Greedy opening/closing pairing of sorted logo occurrences (frame indices)."""
    fr = Fraction(frame_rate)
    occ = sorted(occurrences)
    out = []
    i = 0
    while i < len(occ):
        j = i + 1
        paired = False
        while j < len(occ):
            gap = Fraction(occ[j] - occ[i]) / fr
            if gap > max_gap:
                break
            if gap >= min_gap:
                out.append(ReplayInterval(occ[i], occ[j]))
                paired = True
                break
            j += 1
        i = j + 1 if paired else i + 1
    return out


def single_logo_intervals(occurrences, frame_rate, length=10.0, n_frames=None):
    """Each occurrence opens a replay of ``length`` seconds, cut short by the next one."""
    occ = sorted(occurrences)
    span = int(round(length * float(frame_rate)))
    out = []
    for i, a in enumerate(occ):
        b = a + span
        if i + 1 < len(occ):
            b = min(b, occ[i + 1])
        if n_frames is not None:
            b = min(b, n_frames)
        if b > a:
            out.append(ReplayInterval(a, b))
    return out


def replay_flags(shots, intervals):
    """Half-open overlap test of each shot against every replay interval."""
    return [any(s.start_frame < iv.end and iv.start < s.end_frame for iv in intervals) for s in shots]


class ReplayDetector(BaseEstimator):
    """Two-pass replay detector.

    ``fit`` discovers the logo template from candidate frames (or adopts the
    one given); ``predict`` matches it over a sequence and returns replay
    intervals.  Without a usable template no replays are reported.
    """

    def __init__(self, luma_threshold=20.0, boundary_margin=2, n_clusters=4, match_threshold=12.0,
                 max_logo_seconds=2.0, min_gap=2.0, max_gap=60.0, pairing=True, single_logo_seconds=10.0,
                 threads=1):
        self.luma_threshold = luma_threshold
        self.boundary_margin = boundary_margin
        self.n_clusters = n_clusters
        self.match_threshold = match_threshold
        self.max_logo_seconds = max_logo_seconds
        self.min_gap = min_gap
        self.max_gap = max_gap
        self.pairing = pairing
        self.single_logo_seconds = single_logo_seconds
        self.threads = threads

    def fit(self, frames, boundaries=(), template=None):
        check_frames(frames)
        self.stats_ = luma_stats(frames, self.threads)
        self.candidates_ = logo_candidates(frames, boundaries, self.luma_threshold, self.boundary_margin, self.stats_)
        if template is not None:
            image = np.asarray(template, dtype=np.float64)
            if image.shape != frames.luma(0).shape:
                raise ValueError(f"logo template shape {image.shape} does not match frames {frames.luma(0).shape}")
            self.template_ = LogoTemplate(image)
        else:
            t = discover_template(self.candidates_, frames, self.n_clusters)
            # a cluster whose members do not even match their own mean is not a logo
            self.template_ = t if t is not None and t.spread < self.match_threshold else None
        return self

    def predict(self, frames):
        check_is_fitted(self, "candidates_")
        if self.template_ is None:
            self.occurrences_ = []
            return []
        fr = frames.config.frame_rate
        means = self.stats_[0] if len(self.stats_[0]) == len(frames) else None
        max_run = int(round(self.max_logo_seconds * float(fr))) if self.max_logo_seconds else None
        self.occurrences_ = match_logo(self.template_, frames, self.match_threshold, max_run, means)
        if self.pairing:
            return pair_logos(self.occurrences_, fr, self.min_gap, self.max_gap)
        return single_logo_intervals(self.occurrences_, fr, self.single_logo_seconds, len(frames))

    def fit_predict(self, frames, boundaries=(), template=None):
        return self.fit(frames, boundaries, template).predict(frames)
