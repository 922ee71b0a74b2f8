"""Referee whistle detection and shot-level audio power flags.

Whistle chain: 100 ms frames -> Goertzel bins over 3.5-4.5 kHz -> band
energy gate -> spectral entropy gate -> peak count in {2, 3}.  A referee
whistle is a cluster of two or three close tones, so its in-band spectrum is
peaky (low entropy) where crowd noise in the same band is flat.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator

from ._kernels import goertzel_power
from ._parallel import chunks, ordered_map
from .media_io import AudioTrack, Shot
from .validation import check_audio, check_is_fitted, check_scalar

SAMPLE_RATE = 48000
FRAME_SIZE = 4800
BAND_HZ = (3500, 4500)

FLAG_NAMES = ("A.Power.H", "A.Power.VH", "A.IntraInc.50", "A.IntraInc.100", "A.InterInc.50", "A.InterInc.100")


def band_bins(n=FRAME_SIZE, fs=SAMPLE_RATE, band=BAND_HZ):
    """``(K1, K2)``: first and last DFT bin inside ``band``."""
    lo, hi = band
    return -(-lo * n // fs), hi * n // fs


def frame_audio(track: AudioTrack, frame_size=FRAME_SIZE) -> np.ndarray:
    """Non-overlapping ``(n_frames, frame_size)`` view; a trailing partial frame is dropped."""
    check_audio(track, SAMPLE_RATE)
    n = len(track.samples) // frame_size
    return track.samples[: n * frame_size].reshape(n, frame_size)


def goertzel_band(frame, k1=None, k2=None) -> np.ndarray:
    """``|X(k)|^2`` for ``k1 <= k <= k2`` via the Goertzel recurrence.

    Accepts one frame or a 2-D stack of frames (one per row).
    """
    x = np.asarray(frame, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    n = x.shape[1]
    if k1 is None or k2 is None:
        k1, k2 = band_bins(n)
    coeffs = 2.0 * np.cos(2.0 * np.pi * np.arange(k1, k2 + 1) / n)
    out = goertzel_power(np.ascontiguousarray(x), coeffs)
    # the recurrence can leave -1e-12 style residue on silent bins
    np.maximum(out, 0.0, out=out)
    return out[0] if single else out


def band_energy(spectrum):
    """Total in-band energy (sum over the last axis)."""
    return np.asarray(spectrum, dtype=np.float64).sum(axis=-1)


def spectral_entropy(spectrum):
    """Shannon entropy in bits of the normalized in-band power spectrum.

    Zero-energy frames have no defined entropy and yield ``nan``, which every
    comparison treats as "not tonal".
    """
    p = np.asarray(spectrum, dtype=np.float64)
    total = p.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = p / total
        terms = np.where(rho > 0, rho * np.log2(np.where(rho > 0, rho, 1.0)), 0.0)
    h = -terms.sum(axis=-1)
    h = np.where(total[..., 0] > 0, h, np.nan)
    return float(h) if h.ndim == 0 else h


def count_band_peaks(spectrum, peak_threshold=0.2) -> int:
    """Local maxima at or above ``peak_threshold`` times the band maximum.

    A plateau of equal values counts once when it rises above both the bin to
    its left and the bin to its right; bins beyond the band edges count as
    -inf.
    """
    p = np.asarray(spectrum, dtype=np.float64)
    if p.size == 0:
        return 0
    top = p.max()
    if top <= 0:
        return 0
    # collapse plateaus to one value each
    change = np.concatenate([[True], p[1:] != p[:-1]])
    vals = p[change]
    padded = np.concatenate([[-np.inf], vals, [-np.inf]])
    is_peak = (vals > padded[:-2]) & (vals > padded[2:]) & (vals >= peak_threshold * top)
    return int(is_peak.sum())


class WhistleEvent(NamedTuple):
    """Run of whistle frames ``[start_frame, end_frame)`` in audio-frame units."""

    start_frame: int
    end_frame: int

    def start(self, frame_seconds=Fraction(1, 10)) -> Fraction:
        return self.start_frame * frame_seconds

    def end(self, frame_seconds=Fraction(1, 10)) -> Fraction:
        return self.end_frame * frame_seconds


def merge_runs(mask):
    """Half-open ``(start, end)`` index pairs of the True runs of ``mask``."""
    m = np.concatenate([[False], np.asarray(mask, dtype=bool), [False]])
    edges = np.flatnonzero(np.diff(m.astype(np.int8)))
    return [(int(a), int(b)) for a, b in zip(edges[::2], edges[1::2])]


@dataclass
class WhistleAnalysis:
    spectra: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray
    peaks: np.ndarray


def analyze_track(track, peak_threshold=0.2, threads=1) -> WhistleAnalysis:
    frames = frame_audio(track)

    def work(span):
        lo, hi = span
        return goertzel_band(frames[lo:hi])

    k1, k2 = band_bins()
    parts = ordered_map(work, chunks(len(frames), 256), threads)
    spectra = np.concatenate(parts) if parts else np.zeros((0, k2 - k1 + 1))
    energy = band_energy(spectra)
    entropy = spectral_entropy(spectra) if len(spectra) else np.zeros(0)
    peaks = np.array([count_band_peaks(s, peak_threshold) for s in spectra], dtype=np.int64)
    return WhistleAnalysis(spectra, energy, np.atleast_1d(entropy), peaks)


def adaptive_energy_threshold(energy, margin_db=20.0, percentile=10.0) -> float:
    """``margin_db`` above the given percentile of the per-frame band energy."""
    if len(energy) == 0:
        return 0.0
    return float(np.percentile(energy, percentile) * 10.0 ** (margin_db / 10.0))


class WhistleDetector(BaseEstimator):
    """Frame-level whistle classifier.

    ``fit`` learns ``energy_threshold_`` from the track unless
    ``energy_threshold`` is given explicitly, then stores the per-frame
    analysis, ``mask_`` and ``events_`` for that track.
    """

    def __init__(self, energy_threshold=None, margin_db=20.0, percentile=10.0, entropy_threshold=3.0,
                 peak_threshold=0.2, threads=1):
        self.energy_threshold = energy_threshold
        self.margin_db = margin_db
        self.percentile = percentile
        self.entropy_threshold = entropy_threshold
        self.peak_threshold = peak_threshold
        self.threads = threads

    def fit(self, track, y=None):
        check_audio(track, SAMPLE_RATE)
        check_scalar(self.peak_threshold, "peak_threshold", 0.0, 1.0)
        self.analysis_ = analyze_track(track, self.peak_threshold, self.threads)
        if self.energy_threshold is None:
            self.energy_threshold_ = adaptive_energy_threshold(self.analysis_.energy, self.margin_db, self.percentile)
        else:
            self.energy_threshold_ = float(self.energy_threshold)
        self.mask_ = self._classify(self.analysis_)
        self.events_ = [WhistleEvent(a, b) for a, b in merge_runs(self.mask_)]
        return self

    def _classify(self, a: WhistleAnalysis):
        with np.errstate(invalid="ignore"):
            tonal = a.entropy < self.entropy_threshold
        return (a.energy > self.energy_threshold_) & tonal & ((a.peaks == 2) | (a.peaks == 3))

    def predict(self, track):
        """Boolean whistle decision for every 100 ms frame of ``track``."""
        check_is_fitted(self, "energy_threshold_")
        return self._classify(analyze_track(track, self.peak_threshold, self.threads))

    def detect(self, track):
        return [WhistleEvent(a, b) for a, b in merge_runs(self.predict(track))]


def detect_whistles(track, energy_threshold=None, entropy_threshold=3.0, peak_threshold=0.2, margin_db=20.0,
                    threads=1):
    """Whistle events of ``track``; see :class:`WhistleDetector`."""
    det = WhistleDetector(energy_threshold, margin_db, 10.0, entropy_threshold, peak_threshold, threads)
    return det.fit(track).events_


@dataclass(frozen=True)
class AudioPowerSeries:
    frame_power: np.ndarray  # mean square per 100 ms frame
    per_second: np.ndarray  # mean of each complete group of 10 frames
    frame_seconds: Fraction = Fraction(1, 10)

    @property
    def frames_per_second(self) -> int:
        return int(round(1 / self.frame_seconds))


def audio_power(track: AudioTrack) -> AudioPowerSeries:
    """Mean squared sample value per 100 ms frame, plus per-second means."""
    if track.sample_rate % 10:
        raise ValueError(f"sample rate {track.sample_rate} is not a multiple of 10 Hz")
    size = track.sample_rate // 10
    n = len(track.samples) // size
    x = track.samples[: n * size].astype(np.float64).reshape(n, size)
    power = (x * x).mean(axis=1)
    full = n // 10
    per_second = power[: full * 10].reshape(full, 10).mean(axis=1)
    return AudioPowerSeries(power, per_second, Fraction(size, track.sample_rate))


@dataclass(frozen=True)
class AudioFlags:
    power_h: bool = False
    power_vh: bool = False
    intra_50: bool = False
    intra_100: bool = False
    inter_50: bool = False
    inter_100: bool = False

    def as_dict(self):
        return dict(zip(FLAG_NAMES, (getattr(self, f.name) for f in fields(self))))

    @classmethod
    def from_dict(cls, d):
        return cls(*(bool(d[name]) for name in FLAG_NAMES))


def _increase(prev, cur, ratio):
    return bool(cur > prev and cur >= ratio * prev)


def shot_audio_frames(shot: Shot, frame_rate, power: AudioPowerSeries):
    """Indices of the audio frames that start inside the shot.

    A shot too short to contain a frame start borrows the frame it starts in.
    """
    fr = Fraction(frame_rate)
    d = power.frame_seconds
    t0 = shot.start_frame / fr / d
    t1 = shot.end_frame / fr / d
    n = len(power.frame_power)
    lo = min(-(-t0.numerator // t0.denominator), n)
    hi = min(-(-t1.numerator // t1.denominator), n)
    if hi <= lo:
        m = t0.numerator // t0.denominator
        return np.arange(m, m + 1) if m < n else np.arange(0)
    return np.arange(lo, hi)


def _second_means(p, per_second):
    """Means of consecutive one-second chunks from the shot start; a trailing
    chunk counts only if it covers at least half a second."""
    out = []
    for i in range(0, len(p), per_second):
        chunk = p[i:i + per_second]
        if len(chunk) * 2 >= per_second:
            out.append(chunk.mean())
    return out


def audio_flags(shots, power: AudioPowerSeries, frame_rate, high=0.95, very_high=0.97, inc_50=1.5, inc_100=2.0):
    """Six boolean audio descriptors per shot, in shot order.

    Power flags compare the shot's loudest frame with the loudest frame of the
    whole track; increment flags compare consecutive one-second means inside
    the shot (intra) or the shot's mean with the previous shot's (inter).
    """
    fp = power.frame_power
    global_max = fp.max() if len(fp) else 0.0
    out = []
    prev_mean = None
    for s in shots:
        idx = shot_audio_frames(s, frame_rate, power)
        p = fp[idx]
        peak = p.max() if len(p) else 0.0
        mean = p.mean() if len(p) else 0.0
        secs = _second_means(p, power.frames_per_second)
        pairs = list(zip(secs[:-1], secs[1:]))
        flags = AudioFlags(
            power_h=bool(peak > high * global_max),
            power_vh=bool(peak > very_high * global_max),
            intra_50=any(_increase(a, b, inc_50) for a, b in pairs),
            intra_100=any(_increase(a, b, inc_100) for a, b in pairs),
            inter_50=prev_mean is not None and bool(_increase(prev_mean, mean, inc_50)),
            inter_100=prev_mean is not None and bool(_increase(prev_mean, mean, inc_100)),
        )
        out.append(flags)
        prev_mean = mean
    return out


def whistle_flags(shots, events, frame_rate, frame_seconds=Fraction(1, 10)):
    """True for each shot whose time span overlaps a whistle event."""
    fr = Fraction(frame_rate)
    out = []
    for s in shots:
        a, b = s.start_frame / fr, s.end_frame / fr
        out.append(any(e.start(frame_seconds) < b and a < e.end(frame_seconds) for e in events))
    return out
