"""Keyframe colour descriptors, long-shot / person cues and zoom detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import median_filter
from sklearn.base import BaseEstimator

from .exceptions import DocumentError
from .keyframes import MotionField
from .media_io import Frame, rgb_to_hsv, rgb_to_ycbcr


def _rgb(img) -> np.ndarray:
    return img.rgb() if isinstance(img, Frame) else np.asarray(img, dtype=np.uint8)


def _ycc(img) -> np.ndarray:
    return img.ycbcr() if isinstance(img, Frame) else rgb_to_ycbcr(np.asarray(img))


# ---------------------------------------------------------------- dominant colour

@dataclass(frozen=True)
class DominantColor:
    rgb: tuple
    fraction: float


def _farthest_point_seeds(pool, k):
    seeds = [0]
    d = ((pool - pool[0]) ** 2).sum(axis=1)
    while len(seeds) < k:
        i = int(np.argmax(d))
        if d[i] == 0:
            break
        seeds.append(i)
        d = np.minimum(d, ((pool - pool[i]) ** 2).sum(axis=1))
    return pool[seeds].copy()


def kmeans(points, centers, n_iter=20):
    """Plain Lloyd iterations; empty clusters are removed.

    Returns ``(centers, labels)``.  Deterministic for fixed inputs.
    """
    points = np.asarray(points, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    labels = None
    for _ in range(n_iter):
        d = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = np.argmin(d, axis=1)
        keep = np.unique(new)
        if len(keep) < len(centers):
            remap = np.full(len(centers), -1)
            remap[keep] = np.arange(len(keep))
            new = remap[new]
            centers = centers[keep]
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.stack([points[labels == j].mean(axis=0) for j in range(len(centers))])
    return centers, labels


def dominant_colors(keyframe, k=8, n_iter=20, max_samples=8192, min_fraction=0.01):
    """Up to ``k`` (RGB centroid, pixel fraction) pairs, largest first.

    k-means runs on a fixed-stride pixel sample; seeds are chosen from that
    sample by farthest-point traversal starting at its first pixel.
    Clusters holding under ``min_fraction`` of the pixels are dropped.
    """
    px = _rgb(keyframe).reshape(-1, 3).astype(np.float64)
    stride = max(1, -(-len(px) // max_samples))
    sample = px[::stride]
    centers, labels = kmeans(sample, _farthest_point_seeds(sample, k), n_iter)
    counts = np.bincount(labels, minlength=len(centers))
    frac = counts / len(sample)
    order = sorted(range(len(centers)), key=lambda j: (-frac[j], tuple(centers[j])))
    return [DominantColor(tuple(float(c) for c in centers[j]), float(frac[j])) for j in order
            if frac[j] >= min_fraction]


# ---------------------------------------------------------------- colour layout

def pool_8x8(channel) -> np.ndarray:
    """Area-average a 2-D array down to 8 x 8."""
    a = np.asarray(channel, dtype=np.float64)
    h, w = a.shape
    rows = [(i * h) // 8 for i in range(9)]
    cols = [(j * w) // 8 for j in range(9)]
    out = np.empty((8, 8))
    for i in range(8):
        for j in range(8):
            out[i, j] = a[rows[i]:rows[i + 1], cols[j]:cols[j + 1]].mean()
    return out


@dataclass(frozen=True)
class ColorLayout:
    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray

    def channels(self):
        return self.y, self.cb, self.cr


def color_layout(keyframe) -> ColorLayout:
    """Orthonormal 8 x 8 DCT-II of the average-pooled Y, Cb and Cr planes."""
    ycc = _ycc(keyframe)
    coeffs = [dctn(pool_8x8(ycc[..., c]), type=2, norm="ortho") for c in range(3)]
    return ColorLayout(*coeffs)


def inverse_color_layout(layout: ColorLayout) -> np.ndarray:
    """Reconstruct the ``(8, 8, 3)`` pooled YCbCr image."""
    return np.stack([idctn(c, type=2, norm="ortho") for c in layout.channels()], axis=-1)


def zigzag_order(n=8):
    """(row, col) pairs of an ``n x n`` block in JPEG zig-zag order."""
    return sorted(((i, j) for i in range(n) for j in range(n)),
                  key=lambda p: (p[0] + p[1], p[0] if (p[0] + p[1]) % 2 else p[1]))


_AC9 = zigzag_order()[1:10]


def chroma_ac_variance(layout: ColorLayout):
    """Variance of the first nine zig-zag AC coefficients of Cb and of Cr."""
    r = [i for i, _ in _AC9]
    c = [j for _, j in _AC9]
    return float(np.var(layout.cb[r, c])), float(np.var(layout.cr[r, c]))


# ---------------------------------------------------------------- long shot

@dataclass(frozen=True)
class LongShotEvidence:
    green: bool
    green_fraction: float
    var_cb: float
    var_cr: float
    long_shot: bool


def long_shot_evidence(keyframe, green_fraction=0.45, var_threshold=25.0) -> LongShotEvidence:
    if isinstance(keyframe, Frame):
        ycc = keyframe.ycbcr()
        rgb = keyframe.rgb()
    else:
        rgb = np.asarray(keyframe, dtype=np.uint8)
        ycc = rgb_to_ycbcr(rgb)
    top = rgb.shape[0] // 3
    rgb, ycc = rgb[top:], ycc[top:]
    colors = dominant_colors(rgb)
    r, g, b = colors[0].rgb
    frac = colors[0].fraction
    green = g > r and g > b and frac >= green_fraction
    layout = ColorLayout(*(dctn(pool_8x8(ycc[..., c]), type=2, norm="ortho") for c in range(3)))
    vcb, vcr = chroma_ac_variance(layout)
    homogeneous = vcb < var_threshold and vcr < var_threshold
    return LongShotEvidence(bool(green), frac, vcb, vcr, bool(green and homogeneous))


def detect_long_shot(keyframe, green_fraction=0.45, var_threshold=25.0) -> bool:
    """Panoramic field view: the top third is discarded, then the rest must be
    green-dominated and chromatically flat at 8 x 8 resolution."""
    return long_shot_evidence(keyframe, green_fraction, var_threshold).long_shot


class LongShotClassifier(BaseEstimator):
    """Keyframe-level long-shot classifier with a per-shot majority vote."""

    def __init__(self, green_fraction=0.45, var_threshold=25.0):
        self.green_fraction = green_fraction
        self.var_threshold = var_threshold

    def fit(self, X=None, y=None):
        return self

    def predict(self, keyframes):
        return np.array([detect_long_shot(k, self.green_fraction, self.var_threshold) for k in keyframes], dtype=bool)

    def predict_shot(self, keyframes) -> bool:
        votes = self.predict(keyframes)
        return bool(len(votes) and 2 * votes.sum() > len(votes))


# ---------------------------------------------------------------- persons

SKIN_HUE_DEG = (0.0, 50.0)
SKIN_SAT = (0.1, 0.68)


def skin_mask(keyframe) -> np.ndarray:
    """Pixels passing both the RGB skin rule and the HSV refinement."""
    rgb = _rgb(keyframe).astype(np.int32)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    spread = rgb.max(axis=-1) - rgb.min(axis=-1)
    rgb_rule = (r > 95) & (g > 40) & (b > 20) & (r > g) & (r > b) & (spread > 15)
    hsv = rgb_to_hsv(rgb)
    h, s = hsv[..., 0], hsv[..., 1]
    hsv_rule = (h >= SKIN_HUE_DEG[0]) & (h <= SKIN_HUE_DEG[1]) & (s >= SKIN_SAT[0]) & (s <= SKIN_SAT[1])
    return rgb_rule & hsv_rule


def skin_percentage(keyframe) -> float:
    m = skin_mask(keyframe)
    return float(m.sum()) / m.size


def persons_flag(shot, skin_fractions, detected_shots=(), skin_threshold=0.08) -> bool:
    """True if an external detector marked the shot or any keyframe is skin-heavy enough."""
    sid = shot.id if hasattr(shot, "id") else int(shot)
    if sid in detected_shots:
        return True
    return any(p >= skin_threshold for p in skin_fractions)


def load_persons_sidecar(source, shots):
    """Shot ids marked by an external person detector.

    One record per line: ``shot <id>`` or ``frame <index> [x y w h]``; a frame
    record marks the shot containing that frame.  ``#`` starts a comment.
    """
    text = open(source, encoding="utf-8").read() if not hasattr(source, "read") else source.read()
    starts = np.array([s.start_frame for s in shots])
    ends = np.array([s.end_frame for s in shots])
    marked = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "shot" and len(parts) == 2:
                sid = int(parts[1])
                if not any(s.id == sid for s in shots):
                    raise ValueError(f"unknown shot id {sid}")
                marked.add(sid)
            elif parts[0] == "frame" and len(parts) in (2, 6):
                f = int(parts[1])
                [float(v) for v in parts[2:]]
                hit = np.flatnonzero((starts <= f) & (f < ends))
                if len(hit) == 0:
                    raise ValueError(f"frame {f} is outside the video")
                marked.add(shots[int(hit[0])].id)
            else:
                raise ValueError(f"unrecognized record {line!r}")
        except ValueError as exc:
            raise DocumentError(f"persons sidecar line {lineno}: {exc}") from exc
    return marked


# ---------------------------------------------------------------- zoom

def golden_sections(rows, cols):
    """Nine ``(r0, r1, c0, c1)`` regions from 3:5:3 splits of the grid."""
    def cuts(n):
        return [0, int(round(n * 3 / 11)), int(round(n * 8 / 11)), n]

    rc, cc = cuts(rows), cuts(cols)
    return [(rc[i], rc[i + 1], cc[j], cc[j + 1]) for i in range(3) for j in range(3)]


# Sections on opposite sides of the focal point give nearly collinear lines
# whose intersection is ill-conditioned; such pairs are skipped.
PARALLEL_DEG = 20.0


@dataclass(frozen=True)
class ZoomEvidence:
    n_vectors: int
    n_intersections: int
    dispersion: float
    zoom: bool


def zoom_evidence(field, focal_threshold=2.0, min_vectors=6, parallel_deg=PARALLEL_DEG) -> ZoomEvidence:
    v = field.vectors() if isinstance(field, MotionField) else np.asarray(field, dtype=np.float64)
    rows, cols = v.shape[:2]
    v = np.stack([median_filter(v[..., c], size=3, mode="nearest") for c in range(2)], axis=-1)
    centers, dirs = [], []
    for r0, r1, c0, c1 in golden_sections(rows, cols):
        if r1 <= r0 or c1 <= c0:
            continue
        centers.append(((c0 + c1) / 2.0, (r0 + r1) / 2.0))
        dirs.append(v[r0:r1, c0:c1].reshape(-1, 2).mean(axis=0))
    centers = np.array(centers)
    dirs = np.array(dirs)
    mags = np.hypot(dirs[:, 0], dirs[:, 1])
    top = mags.max() if len(mags) else 0.0
    live = mags > 1e-6 * top if top > 0 else np.zeros(len(mags), dtype=bool)
    n_live = int(live.sum())
    if n_live < min_vectors:
        return ZoomEvidence(n_live, 0, float("inf"), False)
    p = centers[live]
    d = dirs[live] / mags[live, None]
    sin_min = np.sin(np.deg2rad(parallel_deg))
    pts = []
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            cross = d[i, 0] * d[j, 1] - d[i, 1] * d[j, 0]
            if abs(cross) < sin_min:
                continue
            w = p[j] - p[i]
            t = (w[0] * d[j, 1] - w[1] * d[j, 0]) / cross
            pts.append(p[i] + t * d[i])
    if not pts:
        return ZoomEvidence(n_live, 0, float("inf"), False)
    pts = np.array(pts)
    disp = float(np.sqrt(((pts - pts.mean(axis=0)) ** 2).sum(axis=1).mean()))
    return ZoomEvidence(n_live, len(pts), disp, disp < focal_threshold)


def is_zoom_frame(field, focal_threshold=2.0, min_vectors=6, parallel_deg=PARALLEL_DEG) -> bool:
    """Zoom test on one motion field.

    After a component-wise 3x3 median filter, each golden section's mean
    vector is extended to a line through the section centre; the field is a
    zoom when at least ``min_vectors`` sections move and the pairwise line
    intersections cluster within ``focal_threshold`` grid cells (RMS).
    """
    return zoom_evidence(field, focal_threshold, min_vectors, parallel_deg).zoom


def detect_zoom(fields, focal_threshold=2.0, min_frames=5, min_vectors=6, parallel_deg=PARALLEL_DEG) -> bool:
    """True when ``min_frames`` consecutive fields of the shot are zoom frames."""
    run = 0
    for f in fields:
        run = run + 1 if is_zoom_frame(f, focal_threshold, min_vectors, parallel_deg) else 0
        if run >= min_frames:
            return True
    return False


class ZoomDetector(BaseEstimator):
    def __init__(self, focal_threshold=2.0, min_frames=5, min_vectors=6, parallel_deg=PARALLEL_DEG):
        self.focal_threshold = focal_threshold
        self.min_frames = min_frames
        self.min_vectors = min_vectors
        self.parallel_deg = parallel_deg

    def fit(self, X=None, y=None):
        return self

    def predict(self, shots_fields):
        """One boolean per shot; ``shots_fields`` is a list of per-shot field lists."""
        return np.array([detect_zoom(f, self.focal_threshold, self.min_frames, self.min_vectors, self.parallel_deg)
                         for f in shots_fields], dtype=bool)
