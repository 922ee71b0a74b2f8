"""Input validation helpers used by the estimators and the stage runners."""

import numbers

import numpy as np
from sklearn.utils.validation import check_is_fitted  # noqa: F401  (re-exported)

from .exceptions import AudioFormatError, MediaError
from .media_io import AudioTrack, FrameSequence, Shot, check_tiling


def check_frames(frames, min_frames=1) -> FrameSequence:
    if not isinstance(frames, FrameSequence):
        raise MediaError(f"expected a FrameSequence, got {type(frames).__name__}")
    if len(frames) < min_frames:
        raise MediaError(f"need at least {min_frames} frames, got {len(frames)}")
    return frames


def check_audio(track, sample_rate=None) -> AudioTrack:
    if not isinstance(track, AudioTrack):
        raise AudioFormatError(f"expected an AudioTrack, got {type(track).__name__}")
    if sample_rate is not None and track.sample_rate != sample_rate:
        raise AudioFormatError(
            f"sample rate {track.sample_rate} Hz is not supported here; resample to {sample_rate} Hz"
        )
    return track


def check_shots(shots, n_frames=None):
    shots = list(shots)
    for s in shots:
        if not isinstance(s, Shot):
            raise MediaError(f"expected Shot instances, got {type(s).__name__}")
    check_tiling(shots, n_frames)
    return shots


def check_scalar(x, name, min_val=None, max_val=None, include_min=True, include_max=True):
    """Bounds check in the spirit of sklearn's ``check_scalar``; returns ``x``."""
    if not isinstance(x, numbers.Real) or isinstance(x, bool):
        raise TypeError(f"{name} must be a real number, got {type(x).__name__}")
    if min_val is not None and (x < min_val if include_min else x <= min_val):
        raise ValueError(f"{name}={x} is below its minimum {min_val}")
    if max_val is not None and (x > max_val if include_max else x >= max_val):
        raise ValueError(f"{name}={x} is above its maximum {max_val}")
    return x


def check_histogram(h, name="histogram") -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 1:
        raise ValueError(f"{name} must be 1-D")
    if np.any(h < 0):
        raise ValueError(f"{name} has negative bins")
    return h
