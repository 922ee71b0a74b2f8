"""Raw media ingestion and the core value types (frames, audio, shots).

Video arrives as headerless planar frames whose geometry is supplied by the
caller; audio arrives as signed 16-bit little-endian mono, either raw or in a
RIFF/WAVE container.  Frame indices are the ground truth for time: every
timestamp is derived from an index with rational arithmetic so that two-hour
recordings do not accumulate drift.
"""

from __future__ import annotations

import io
import os
import re
import wave
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import AudioFormatError, EmptyInputError, MediaError, TruncatedStreamError

PIXEL_FORMATS = ("yuv420p", "rgbp")

TRANSITIONS = ("stream-start", "hard-cut", "dissolve")

# BT.601 studio-swing RGB -> YCbCr, rows are Y, Cb, Cr.
_RGB2YCC = np.array(
    [
        [65.481, 128.553, 24.966],
        [-37.797, -74.203, 112.0],
        [112.0, -93.786, -18.214],
    ]
) / 255.0
_YCC_OFFSET = np.array([16.0, 128.0, 128.0])
_YCC2RGB = np.linalg.inv(_RGB2YCC)


def rgb_to_ycbcr(rgb):
    """Convert an ``(..., 3)`` RGB array to float YCbCr (BT.601, studio swing)."""
    rgb = np.asarray(rgb, dtype=np.float64)
    return rgb @ _RGB2YCC.T + _YCC_OFFSET


def ycbcr_to_rgb(ycc):
    """Inverse of :func:`rgb_to_ycbcr`; returns float RGB, not clipped."""
    ycc = np.asarray(ycc, dtype=np.float64)
    return (ycc - _YCC_OFFSET) @ _YCC2RGB.T


def rgb_to_hsv(rgb):
    """RGB (0..255) to HSV with hue in degrees [0, 360), saturation and value in [0, 1]."""
    rgb = np.asarray(rgb, dtype=np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    delta = mx - mn
    safe = np.where(delta > 0, delta, 1.0)
    h = np.where(
        mx == r, ((g - b) / safe) % 6.0,
        np.where(mx == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0),
    )
    h = np.where(delta > 0, 60.0 * h, 0.0)
    s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)
    return np.stack([h, s, mx], axis=-1)


def _to_fraction(rate) -> Fraction:
    if isinstance(rate, Fraction):
        return rate
    if isinstance(rate, str):
        return Fraction(rate)
    if isinstance(rate, float):
        return Fraction(rate).limit_denominator(1001000)
    return Fraction(rate)


@dataclass(frozen=True)
class VideoConfig:
    width: int
    height: int
    frame_rate: Fraction = Fraction(25)
    pixel_format: str = "yuv420p"

    def __post_init__(self):
        object.__setattr__(self, "frame_rate", _to_fraction(self.frame_rate))
        if self.width <= 0 or self.height <= 0:
            raise MediaError(f"frame dimensions must be positive, got {self.width}x{self.height}")
        if self.pixel_format not in PIXEL_FORMATS:
            raise MediaError(f"unsupported pixel format {self.pixel_format!r}; expected one of {PIXEL_FORMATS}")
        if self.pixel_format == "yuv420p" and (self.width % 2 or self.height % 2):
            raise MediaError("4:2:0 frames need even width and height")
        if self.frame_rate <= 0:
            raise MediaError("frame_rate must be positive")

    @property
    def plane_shapes(self):
        h, w = self.height, self.width
        if self.pixel_format == "yuv420p":
            return ((h, w), (h // 2, w // 2), (h // 2, w // 2))
        return ((h, w), (h, w), (h, w))

    @property
    def frame_size(self) -> int:
        return sum(a * b for a, b in self.plane_shapes)

    def timestamp(self, index) -> Fraction:
        return Fraction(index) / self.frame_rate

    def frame_at(self, seconds) -> int:
        """Index of the first frame whose timestamp is >= ``seconds``."""
        q = _to_fraction(seconds) * self.frame_rate
        return int(-(-q.numerator // q.denominator))


@dataclass(frozen=True)
class Frame:
    """One decoded picture.  ``planes`` are (Y, Cb, Cr) or (R, G, B) uint8 arrays."""

    index: int
    planes: tuple
    pixel_format: str = "yuv420p"

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]

    @property
    def luma(self) -> np.ndarray:
        """8-bit luma plane."""
        if self.pixel_format == "yuv420p":
            return self.planes[0]
        y = rgb_to_ycbcr(self.rgb())[..., 0]
        return np.clip(np.rint(y), 0, 255).astype(np.uint8)

    def ycbcr(self) -> np.ndarray:
        """Full-resolution float ``(H, W, 3)`` YCbCr image; chroma is pixel-replicated."""
        if self.pixel_format == "yuv420p":
            y, cb, cr = self.planes
            cb = cb.repeat(2, axis=0).repeat(2, axis=1)
            cr = cr.repeat(2, axis=0).repeat(2, axis=1)
            return np.stack([y, cb, cr], axis=-1).astype(np.float64)
        return rgb_to_ycbcr(self.rgb())

    def rgb(self) -> np.ndarray:
        """``(H, W, 3)`` uint8 RGB image."""
        if self.pixel_format == "rgbp":
            return np.stack(self.planes, axis=-1)
        rgb = ycbcr_to_rgb(self.ycbcr())
        return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)

    @classmethod
    def from_rgb(cls, rgb, index=0, pixel_format="yuv420p"):
        rgb = np.asarray(rgb)
        if pixel_format == "rgbp":
            planes = tuple(np.ascontiguousarray(rgb[..., c], dtype=np.uint8) for c in range(3))
            return cls(index, planes, "rgbp")
        ycc = rgb_to_ycbcr(rgb)
        y = np.clip(np.rint(ycc[..., 0]), 0, 255).astype(np.uint8)
        h, w = y.shape
        chroma = ycc[..., 1:].reshape(h // 2, 2, w // 2, 2, 2).mean(axis=(1, 3))
        chroma = np.clip(np.rint(chroma), 0, 255).astype(np.uint8)
        return cls(index, (y, np.ascontiguousarray(chroma[..., 0]), np.ascontiguousarray(chroma[..., 1])), "yuv420p")

    def to_bytes(self) -> bytes:
        return b"".join(np.ascontiguousarray(p, dtype=np.uint8).tobytes() for p in self.planes)


class FrameSequence(Sequence):
    """Random-access view over a run of raw frames.

    Backed by an ``(n_frames, frame_size)`` uint8 array that may be a memmap,
    so a long recording can be iterated more than once without being held in
    memory.
    """

    def __init__(self, config: VideoConfig, data):
        data = np.asarray(data, dtype=np.uint8) if not isinstance(data, np.memmap) else data
        if data.ndim != 2 or data.shape[1] != config.frame_size:
            raise MediaError(f"frame buffer shape {data.shape} does not match frame size {config.frame_size}")
        self.config = config
        self._data = data
        offsets = np.cumsum([0] + [a * b for a, b in config.plane_shapes])
        self._planes = [(int(offsets[i]), int(offsets[i + 1]), shp) for i, shp in enumerate(config.plane_shapes)]

    @classmethod
    def from_frames(cls, config: VideoConfig, frames):
        frames = list(frames)
        data = np.empty((len(frames), config.frame_size), dtype=np.uint8)
        for i, f in enumerate(frames):
            for (lo, hi, shp), plane in zip(cls._plane_slices(config), f.planes):
                if plane.shape != shp:
                    raise MediaError(f"frame {i}: plane shape {plane.shape} != {shp}")
                data[i, lo:hi] = np.asarray(plane, dtype=np.uint8).ravel()
        return cls(config, data)

    @staticmethod
    def _plane_slices(config):
        offsets = np.cumsum([0] + [a * b for a, b in config.plane_shapes])
        return [(int(offsets[i]), int(offsets[i + 1]), shp) for i, shp in enumerate(config.plane_shapes)]

    def __len__(self):
        return self._data.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        n = len(self)
        if i < 0:
            i += n
        if not 0 <= i < n:
            raise IndexError(i)
        row = self._data[i]
        planes = tuple(row[lo:hi].reshape(shp) for lo, hi, shp in self._planes)
        return Frame(i, planes, self.config.pixel_format)

    def luma(self, i) -> np.ndarray:
        if self.config.pixel_format == "yuv420p":
            lo, hi, shp = self._planes[0]
            return self._data[i, lo:hi].reshape(shp)
        return self[i].luma

    def timestamp(self, i) -> Fraction:
        return self.config.timestamp(i)

    @property
    def duration(self) -> Fraction:
        return self.config.timestamp(len(self))

    def to_bytes(self) -> bytes:
        return np.ascontiguousarray(self._data).tobytes()


def load_video(source, config: VideoConfig) -> FrameSequence:
    """Load headerless planar frames.

    A path is memory-mapped; anything else must be bytes-like or readable.
    """
    fs = config.frame_size
    if isinstance(source, (str, os.PathLike)):
        size = os.path.getsize(source)
        if size == 0:
            raise EmptyInputError(f"{os.fspath(source)}: empty video stream")
        if size % fs:
            raise TruncatedStreamError(
                f"{os.fspath(source)}: {size} bytes is not a multiple of the {fs}-byte frame size"
            )
        data = np.memmap(source, dtype=np.uint8, mode="r", shape=(size // fs, fs))
        return FrameSequence(config, data)
    if hasattr(source, "read"):
        source = source.read()
    buf = np.frombuffer(bytes(source), dtype=np.uint8)
    if buf.size == 0:
        raise EmptyInputError("empty video stream")
    if buf.size % fs:
        raise TruncatedStreamError(f"{buf.size} bytes is not a multiple of the {fs}-byte frame size")
    return FrameSequence(config, buf.reshape(-1, fs))


@dataclass(frozen=True)
class AudioTrack:
    sample_rate: int
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise AudioFormatError("sample_rate must be positive")
        s = np.asarray(self.samples)
        if s.ndim != 1:
            raise AudioFormatError("audio must be mono (1-D samples)")
        object.__setattr__(self, "samples", s.astype(np.int16, copy=False))

    @property
    def duration(self) -> Fraction:
        return Fraction(len(self.samples), self.sample_rate)

    def __len__(self):
        return len(self.samples)


def _read_bytes(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    if hasattr(source, "read"):
        return source.read()
    return bytes(source)


def load_audio(source, sample_rate: int = 48000) -> AudioTrack:
    """Load s16le mono audio.

    RIFF/WAVE input is detected by its header and its own sample rate wins;
    for headerless input ``sample_rate`` is used.
    """
    raw = _read_bytes(source)
    if raw[:4] == b"RIFF" and raw[8:12] == b"WAVE":
        try:
            with wave.open(io.BytesIO(raw)) as wf:
                channels, width, rate = wf.getnchannels(), wf.getsampwidth(), wf.getframerate()
                payload = wf.readframes(wf.getnframes())
        except (wave.Error, EOFError) as exc:
            raise AudioFormatError(f"unsupported WAVE encoding: {exc}") from exc
        if channels != 1:
            raise AudioFormatError(f"multi-channel audio ({channels} channels) is not supported; downmix first")
        if width != 2:
            raise AudioFormatError(f"unsupported sample width {8 * width} bits; expected 16")
        raw, sample_rate = payload, rate
    if len(raw) % 2:
        raise AudioFormatError(f"odd byte count {len(raw)} for 16-bit samples")
    return AudioTrack(int(sample_rate), np.frombuffer(raw, dtype="<i2").astype(np.int16))


def write_wav(path, track: AudioTrack):
    with wave.open(os.fspath(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(track.sample_rate)
        wf.writeframes(track.samples.astype("<i2").tobytes())


@dataclass(frozen=True)
class Shot:
    id: int
    start_frame: int
    end_frame: int
    transition_in: str = "hard-cut"

    def __post_init__(self):
        if self.start_frame >= self.end_frame:
            raise MediaError(f"shot {self.id}: start_frame {self.start_frame} >= end_frame {self.end_frame}")
        if self.transition_in not in TRANSITIONS:
            raise MediaError(f"shot {self.id}: unknown transition {self.transition_in!r}")

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame

    def duration(self, frame_rate) -> Fraction:
        return Fraction(self.n_frames) / _to_fraction(frame_rate)

    def start_time(self, frame_rate) -> Fraction:
        return Fraction(self.start_frame) / _to_fraction(frame_rate)

    def end_time(self, frame_rate) -> Fraction:
        return Fraction(self.end_frame) / _to_fraction(frame_rate)


def check_tiling(shots, n_frames=None):
    """Raise unless ``shots`` tile ``[0, n_frames)`` contiguously."""
    pos = 0
    for s in shots:
        if s.start_frame != pos:
            raise MediaError(f"shot {s.id} starts at {s.start_frame}, expected {pos}")
        pos = s.end_frame
    if n_frames is not None and pos != n_frames:
        raise MediaError(f"shots end at frame {pos}, sequence has {n_frames}")


def format_seconds(t) -> str:
    """Seconds with exactly three decimals, rounded from the exact rational."""
    q = round(_to_fraction(t) * 1000)
    sign = "-" if q < 0 else ""
    q = abs(q)
    return f"{sign}{q // 1000}.{q % 1000:03d}"


# magic, then width, height and maxval separated by whitespace or comment lines,
# then exactly one whitespace byte before the payload
_PGM_HEADER = re.compile(rb"P5(?:\s+|#[^\n]*\n)+(\d+)(?:\s+|#[^\n]*\n)+(\d+)(?:\s+|#[^\n]*\n)+(\d+)\s")


def read_pgm(source, shape=None) -> np.ndarray:
    """Read a binary (P5) portable graymap, or raw 8-bit gray bytes of ``shape``."""
    raw = _read_bytes(source)
    if raw[:2] == b"P5":
        m = _PGM_HEADER.match(raw)
        if not m:
            raise MediaError("malformed graymap header")
        w, h, maxval = (int(g) for g in m.groups())
        if maxval > 255:
            raise MediaError("16-bit graymaps are not supported")
        img = np.frombuffer(raw[m.end():m.end() + w * h], dtype=np.uint8)
        if img.size != w * h or w * h == 0:
            raise TruncatedStreamError("graymap payload is truncated")
        return img.reshape(h, w).copy()
    if shape is None:
        raise MediaError("raw grayscale input needs an explicit shape")
    img = np.frombuffer(raw, dtype=np.uint8)
    if img.size != shape[0] * shape[1]:
        raise TruncatedStreamError(f"raw grayscale image has {img.size} bytes, expected {shape[0] * shape[1]}")
    return img.reshape(shape).copy()


def write_pgm(path, image):
    image = np.asarray(image, dtype=np.uint8)
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(image.tobytes())
