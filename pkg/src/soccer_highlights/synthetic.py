"""Seeded synthetic fixtures with known ground truth.

* :func:`splice_corpus` - random-texture shots joined by hard cuts and a few
  cross dissolves (shot segmentation).
* :func:`whistle_test_signal` - crowd noise with three-tone whistle bursts and
  in-band noise bursts (whistle detection).
* :func:`replay_clip` - moving content with ``P`` logo-bracketed replays.
* :func:`scripted_match` - descriptor streams with a goal pattern (scoring).
* :func:`write_match_fixture` - a complete raw video + audio broadcast
  (end-to-end runs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates

from .audio import AudioFlags
from .highlights import ShotDescriptors
from .media_io import AudioTrack, FrameSequence, Shot, VideoConfig, rgb_to_ycbcr, write_wav

WHISTLE_TONES_HZ = (3700.0, 3900.0, 4100.0)


# ------------------------------------------------------------ splice corpus

@dataclass
class SpliceCorpus:
    frames: FrameSequence
    cuts: list  # first frame of each shot entered by a hard cut
    dissolves: list  # (first, last + 1) frames of each blend
    out_of_game: list  # (start, end) frame ranges around the dissolves


def _texture(rng, shape, mean, std):
    t = gaussian_filter(rng.normal(0.0, 1.0, shape), 1.0)
    t *= std / t.std()
    return t + mean


def splice_corpus(n_shots=200, n_dissolves=3, shape=(48, 64), seed=0, min_len=20, max_len=40,
                  dissolve_len=20, fps=25) -> SpliceCorpus:
    """Luma-only clips of distinct random textures that drift one pixel per frame."""
    rng = np.random.default_rng(seed)
    h, w = shape
    means, prev = [], None
    for _ in range(n_shots):
        while True:
            m = rng.uniform(30, 225)
            if prev is None or abs(m - prev) >= 60:
                break
        means.append(m)
        prev = m
    lengths = rng.integers(min_len, max_len + 1, size=n_shots)
    dissolve_at = set(rng.choice(np.arange(1, n_shots), size=n_dissolves, replace=False).tolist())
    for k in dissolve_at:  # the blend must not eat into the minimum shot length
        lengths[k] += dissolve_len

    clips = []
    for m, n in zip(means, lengths):
        tex = _texture(rng, (h, w + max_len + 2 * dissolve_len), m, rng.uniform(8, 15))
        clips.append(np.stack([tex[:, t:t + w] for t in range(n + dissolve_len)]))

    frames, cuts, dissolves = [], [], []
    pos = 0
    for k, (clip, n) in enumerate(zip(clips, lengths)):
        if k in dissolve_at:
            prev_clip, prev_n = clips[k - 1], lengths[k - 1]
            a = np.linspace(0.0, 1.0, dissolve_len + 2)[1:-1]
            blend = [(1 - a[i]) * prev_clip[prev_n + i] + a[i] * clip[i] for i in range(dissolve_len)]
            dissolves.append((int(pos), int(pos + dissolve_len)))
            frames.extend(blend)
            pos += dissolve_len
            frames.extend(clip[dissolve_len:n])
            pos += n - dissolve_len
        else:
            if k > 0:
                cuts.append(int(pos))
            frames.extend(clip[:n])
            pos += n
    noise = rng.normal(0.0, 1.0, (len(frames), h, w))
    luma = np.clip(np.rint(np.array(frames) + noise), 0, 255).astype(np.uint8)
    data = np.concatenate([luma.reshape(len(luma), -1), np.full((len(luma), h * w // 2), 128, np.uint8)], axis=1)
    frames_seq = FrameSequence(VideoConfig(w, h, fps, "yuv420p"), data)
    margin = 15
    ogg = [(max(0, a - margin), min(len(luma), b + margin)) for a, b in dissolves]
    return SpliceCorpus(frames_seq, cuts, dissolves, ogg)


# ----------------------------------------------------------- whistle signal

@dataclass
class WhistleSignal:
    track: AudioTrack
    whistles: list  # (start_s, end_s)
    noise_bursts: list  # (start_s, end_s, bandwidth_hz)


def _band_noise(rng, n, lo, hi, sr):
    spec = np.fft.rfft(rng.normal(0.0, 1.0, n))
    f = np.fft.rfftfreq(n, 1.0 / sr)
    spec[(f < lo) | (f > hi)] = 0
    x = np.fft.irfft(spec, n)
    return x / x.std()


def _crowd(rng, n, sr, cutoff=1500.0):
    """Low-passed noise standing in for crowd murmur, unit RMS."""
    spec = np.fft.rfft(rng.normal(0.0, 1.0, n))
    f = np.fft.rfftfreq(n, 1.0 / sr)
    spec /= np.sqrt(1.0 + (f / cutoff) ** 4)
    x = np.fft.irfft(spec, n)
    return x / x.std()


def whistle_tone(n, sr=48000, amplitude=2500.0, tones=WHISTLE_TONES_HZ):
    t = np.arange(n) / sr
    return amplitude * sum(np.sin(2 * np.pi * f * t) for f in tones)


def _place(rng, duration, count, length_range, taken, gap=1.0):
    out = []
    while len(out) < count:
        d = rng.uniform(*length_range)
        t0 = rng.uniform(0.5, duration - d - 0.5)
        if all(t0 + d + gap < a or b + gap < t0 for a, b in taken):
            taken.append((t0, t0 + d))
            out.append((t0, t0 + d))
    return out


def whistle_test_signal(seed=0, duration=60.0, n_whistles=10, n_noise=6, sr=48000) -> WhistleSignal:
    """Crowd noise, ``n_whistles`` three-tone bursts and ``n_noise`` in-band noise bursts."""
    rng = np.random.default_rng(seed)
    n = int(duration * sr)
    x = 400.0 * _crowd(rng, n, sr)
    taken = []
    whistles = sorted(_place(rng, duration, n_whistles, (0.4, 1.2), taken))
    noise = sorted(_place(rng, duration, n_noise, (0.4, 1.2), taken))
    for t0, t1 in whistles:
        a, b = int(t0 * sr), int(t1 * sr)
        x[a:b] += whistle_tone(b - a, sr, rng.uniform(1500, 3000))
    bursts = []
    for i, (t0, t1) in enumerate(noise):
        a, b = int(t0 * sr), int(t1 * sr)
        bw = (1000.0, 600.0, 400.0)[i % 3]
        lo = rng.uniform(3500.0, 4500.0 - bw)
        x[a:b] += rng.uniform(2000, 4000) * _band_noise(rng, b - a, lo, lo + bw, sr)
        bursts.append((t0, t1, bw))
    samples = np.clip(np.rint(x), -32768, 32767).astype(np.int16)
    return WhistleSignal(AudioTrack(sr, samples), whistles, bursts)


# -------------------------------------------------------------- replay clip

def logo_image(shape, seed=7) -> np.ndarray:
    """Bright diamond-and-bars graphic, distinct from any pitch view."""
    h, w = shape
    y, x = np.mgrid[0:h, 0:w]
    img = np.full(shape, 200.0)
    diamond = np.abs(x - w / 2) / (w / 2) + np.abs(y - h / 2) / (h / 2) < 0.6
    img[diamond] = 60.0
    bars = ((x // max(w // 16, 1)) % 2 == 0) & (np.abs(y - h / 2) < h / 10)
    img[bars & diamond] = 240.0
    return img


@dataclass
class ReplayClip:
    frames: FrameSequence
    logo: np.ndarray  # luma of the injected logo
    logo_starts: list  # first frame of every logo occurrence
    replays: list  # (open logo start, close logo start)
    boundaries: list  # frames where a new shot starts


def replay_clip(n_pairs, shape=(72, 96), fps=25, seed=0, logo_len=8, noise=1.0) -> ReplayClip:
    """Textured panning shots with ``n_pairs`` logo / replay / logo insertions."""
    rng = np.random.default_rng(seed)
    h, w = shape
    logo = logo_image(shape)
    segments = []

    def content(n):
        tex = _texture(rng, (h, w + 2 * n + 8), rng.uniform(70, 150), rng.uniform(25, 40))
        step = int(rng.integers(1, 3))
        return [tex[:, t * step:t * step + w] for t in range(n)]

    for _ in range(n_pairs):
        segments.append(("play", content(int(rng.integers(60, 120)))))
        segments.append(("logo", [logo] * logo_len))
        segments.append(("replay", content(int(rng.integers(75, 150)))))
        segments.append(("logo", [logo] * logo_len))
    segments.append(("play", content(int(rng.integers(60, 120)))))
    if n_pairs == 0:
        segments.append(("play", content(90)))

    frames, logo_starts, boundaries = [], [], []
    for kind, seg in segments:
        if frames:
            boundaries.append(len(frames))
        if kind == "logo":
            logo_starts.append(len(frames))
        frames.extend(seg)
    luma = np.array(frames) + rng.normal(0.0, noise, (len(frames), h, w))
    luma = np.clip(np.rint(luma), 0, 255).astype(np.uint8)
    data = np.concatenate([luma.reshape(len(luma), -1), np.full((len(luma), h * w // 2), 128, np.uint8)], axis=1)
    replays = list(zip(logo_starts[::2], logo_starts[1::2]))
    return ReplayClip(FrameSequence(VideoConfig(w, h, fps, "yuv420p"), data), logo, logo_starts, replays,
                      boundaries)


# ------------------------------------------------------- scripted matches

@dataclass
class ScriptedMatch:
    descriptors: list  # ShotDescriptors
    goal_shots: list  # indices of the goal shots
    frame_rate: Fraction = Fraction(25)
    has_replays: bool = True


def scripted_match(index: int, n_shots=80, fps=25) -> ScriptedMatch:
    """Descriptor stream for match ``index`` (1..5) with one scripted goal.

    Matches 4 and 5 are produced without replays, so their goal lacks the
    replay terms.  Each stream also carries near misses: loud shots without a
    celebration, fouls with close-ups and replays, and random noise flags.
    """
    rng = np.random.default_rng(1000 + index)
    has_replays = index <= 3
    rows = []
    for _ in range(n_shots):
        rows.append(dict(long_shot=rng.random() < 0.5, zoom=rng.random() < 0.1, whistle=rng.random() < 0.1,
                         replay=False, persons=rng.random() < 0.1, motion=float(rng.uniform(0, 3)),
                         power=(False, False), intra=(False, False), inter=(rng.random() < 0.1, False),
                         n=int(rng.integers(50, 400))))

    def set_(i, **kw):
        if 0 <= i < n_shots:
            rows[i].update(kw)

    goal = int(rng.integers(n_shots // 4, 3 * n_shots // 4))
    set_(goal, power=(True, True), intra=(True, True), long_shot=False)
    set_(goal + 1, persons=True, replay=False, power=(False, False), intra=(False, False))
    set_(goal + 2, persons=True, replay=has_replays, power=(False, False), intra=(False, False))
    for k in range(3):  # near misses
        s = int(rng.integers(2, n_shots - 3))
        if abs(s - goal) <= 3:
            continue
        kind = k % 3
        if kind == 0:  # loud moment, nobody celebrates
            set_(s, power=(True, True), intra=(True, True))
            set_(s + 1, persons=False, replay=False)
            set_(s + 2, persons=False, replay=False)
        elif kind == 1:  # foul: close-up then replay
            set_(s, whistle=True, power=(True, False))
            set_(s + 1, persons=True)
            set_(s + 2, replay=has_replays)
        else:  # crowd surge without an intra-shot jump
            set_(s, power=(True, True), intra=(False, False))
            set_(s + 1, persons=True)
            set_(s + 2, persons=False, replay=False)
    # the loudest moment of the match is the goal
    for i, r in enumerate(rows):
        if i != goal and r["power"][1] and abs(i - goal) > 3:
            r["power"] = (True, False)

    descs, pos = [], 0
    for i, r in enumerate(rows):
        shot = Shot(i, pos, pos + r["n"], "stream-start" if i == 0 else "hard-cut")
        pos += r["n"]
        flags = AudioFlags(r["power"][0], r["power"][1], r["intra"][0], r["intra"][1], r["inter"][0],
                           r["inter"][1])
        descs.append(ShotDescriptors(shot, keyframes=[shot.start_frame], mean_motion=r["motion"], zoom=r["zoom"],
                                     long_shot=r["long_shot"], persons=r["persons"], whistle=r["whistle"],
                                     replay=r["replay"], audio=flags))
    return ScriptedMatch(descs, [goal], Fraction(fps), has_replays)


# ------------------------------------------------------------ match fixture

GRASS = (58, 132, 52)


@dataclass
class ScriptedShot:
    kind: str
    start: int
    end: int
    transition: str = "hard-cut"


@dataclass
class MatchFixture:
    config: VideoConfig
    video_path: Path
    audio_path: Path
    shots: list  # ScriptedShot ground truth
    goal_shots: list  # indices into shots
    logo_starts: list
    whistles: list  # (start_s, end_s)
    out_of_game: str  # CLI time range of the studio intro
    logo: np.ndarray = field(repr=False, default=None)


def _blobs(rng, img, count, size, colors):
    h, w = img.shape[:2]
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(count):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        ry, rx = size * rng.uniform(0.8, 1.2), size * rng.uniform(0.3, 0.5)
        mask = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 < 1
        img[mask] = colors[int(rng.integers(len(colors)))]


def _pitch(rng, h, w, stripe=48, shade=1.0):
    img = np.empty((h, w, 3))
    img[:] = np.array(GRASS) * shade
    bands = ((np.arange(w) // stripe) % 2 == 0)
    img[:, bands] *= 1.06
    img += rng.normal(0.0, 3.0, (h, w, 1))
    return img


STUDIO_LEVELS = (70.0, 140.0, 210.0)  # luma of the intro shots, one per shot


def _canvas(kind, rng, h, w, level=None):
    """RGB canvas for a shot; larger than the frame to leave room for panning."""
    if kind in ("long", "zoom"):
        img = _pitch(rng, h, w)
        img[: h // 4] = rng.uniform(30, 160, (h // 4 // 4 + 1, w // 4 + 1, 3)).repeat(4, 0).repeat(4, 1)[: h // 4, :w]
        img[h // 4: h // 4 + 2] = 235
        img[:, w // 2: w // 2 + 2] = 235
        _blobs(rng, img, 24, 7, [(200, 30, 30), (30, 40, 190), (230, 230, 230)])
    elif kind in ("mid", "replay"):
        img = _pitch(rng, h, w, stripe=96, shade=1.15)
        _blobs(rng, img, 14, h / 5, [(220, 220, 220), (20, 20, 30), (200, 30, 30)])
    elif kind == "close":
        img = gaussian_filter(rng.uniform(40, 120, (h, w, 3)), (8, 8, 0))
        yy, xx = np.mgrid[0:h, 0:w]
        face = ((yy - h * 0.4) / (h * 0.28)) ** 2 + ((xx - w * 0.5) / (w * 0.16)) ** 2 < 1
        shirt = (yy > h * 0.62) & (np.abs(xx - w * 0.5) < w * 0.3)
        img[shirt] = (200, 30, 30)
        img[face] = (205, 145, 115)
        img += rng.normal(0.0, 4.0, (h, w, 1))
    elif kind == "crowd":
        img = rng.uniform(20, 220, (h // 6 + 1, w // 6 + 1, 3)).repeat(6, 0).repeat(6, 1)[:h, :w]
        img = 0.5 * img + 0.5 * np.array([40.0, 40.0, 110.0])
    elif kind == "studio":
        img = np.empty((h, w, 3))
        tint = rng.uniform(-20, 20, 3)
        img[:] = level + tint - tint.mean()
        img += _texture(rng, (h, w), 0.0, 25.0)[..., None]
    else:
        raise ValueError(kind)
    return np.clip(img, 0, 255)


class _ShotRenderer:
    """Renders the frames of one scripted shot straight into YCbCr planes."""

    MARGIN = 48

    def __init__(self, kind, rng, width, height, level=None):
        self.kind, self.w, self.h = kind, width, height
        m = self.MARGIN
        rgb = _canvas(kind, rng, height + 2 * m, width + 2 * m, level)
        ycc = rgb_to_ycbcr(rgb)
        self.y = ycc[..., 0]
        c = ycc[..., 1:]
        self.c = c.reshape(c.shape[0] // 2, 2, c.shape[1] // 2, 2, 2).mean(axis=(1, 3))
        self.speed = {"long": 2, "mid": 2, "replay": 1, "crowd": 1, "close": 0, "studio": 0, "zoom": 0}[kind]
        self.direction = 1 if rng.random() < 0.5 else -1

    def _offset(self, t):
        if self.speed == 0:
            return self.MARGIN, self.MARGIN
        span = 2 * self.MARGIN
        p = (t * self.speed) % (2 * span)
        p = p if p < span else 2 * span - p
        p = p if self.direction > 0 else span - p
        return self.MARGIN, int(p) & ~1

    def frame(self, t):
        h, w, m = self.h, self.w, self.MARGIN
        if self.kind == "zoom":
            # constant relative rate, zooming in and back out every 30 frames
            p = t % 60
            s = 1.025 ** (p if p < 30 else 60 - p)
            yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
            cy, cx = m + h / 2, m + w / 2
            y = map_coordinates(self.y, [cy + (yy - h / 2) / s, cx + (xx - w / 2) / s], order=1)
            cyy, cxx = np.mgrid[0:h // 2, 0:w // 2].astype(np.float64)
            coords = [(cy + (2 * cyy - h / 2) / s) / 2, (cx + (2 * cxx - w / 2) / s) / 2]
            cb = map_coordinates(self.c[..., 0], coords, order=1)
            cr = map_coordinates(self.c[..., 1], coords, order=1)
            return y, cb, cr
        oy, ox = self._offset(t if self.kind != "replay" else t // 2)
        y = self.y[oy:oy + h, ox:ox + w]
        c = self.c[oy // 2:(oy + h) // 2, ox // 2:(ox + w) // 2]
        return y, c[..., 0], c[..., 1]


# views of the pitch that a luma histogram cannot tell apart
_ALIKE = {"long": {"long", "zoom"}, "zoom": {"long", "zoom"}, "mid": {"mid", "replay"}, "replay": {"mid"}}


def _next_kind(rng, prev):
    while True:
        r = rng.random()
        kind = "long" if r < 0.45 else "mid" if r < 0.75 else "zoom" if r < 0.85 else "close" if r < 0.93 \
            else "crowd"
        if kind != prev and kind not in _ALIKE.get(prev, ()):
            return kind


def _plan(rng, total, fps, intro_cut, goals):
    """Shot kinds and lengths (frames) covering ``total`` frames."""
    plan = [("studio", 4 * fps, "stream-start"), ("studio", 4 * fps, "dissolve"), ("studio", intro_cut - 8 * fps,
                                                                                     "dissolve")]
    pos = intro_cut
    goal_idx = []
    goal_frames = [int(g * total) for g in goals]
    logo = fps // 2 - fps // 2 % 2
    while pos < total:
        goal = bool(goal_frames) and pos >= goal_frames[0]
        if goal:
            goal_frames.pop(0)
            seq = [("mid", 6 * fps), ("close", 3 * fps), ("logo", logo), ("replay", 6 * fps), ("logo", logo),
                   ("crowd", 2 * fps)]
        elif rng.random() < 0.12:  # foul: whistle, close-up, replay
            seq = [("long", 5 * fps), ("close", 2 * fps), ("logo", logo), ("replay", 4 * fps), ("logo", logo)]
        else:
            kind = _next_kind(rng, plan[-1][0])
            lo, hi = {"long": (6, 14), "mid": (3, 7), "zoom": (3, 4), "close": (2, 4), "crowd": (2, 3)}[kind]
            seq = [(kind, int(rng.integers(lo * fps, hi * fps + 1)))]
        if seq[0][0] == plan[-1][0] or seq[0][0] in _ALIKE.get(plan[-1][0], ()):
            seq.insert(0, ("crowd" if plan[-1][0] != "crowd" else "close", 2 * fps))
        if goal:
            goal_idx.append(len(plan) + len(seq) - 6)
        plan.extend((kind, n, "hard-cut") for kind, n in seq)
        pos += sum(n for _, n in seq)
    # trim the tail to the exact length without leaving a stub or a dangling logo
    excess = pos - total
    while excess > 0:
        kind, n, tr = plan[-1]
        if kind != "logo" and n - excess >= 2 * fps:
            plan[-1] = (kind, n - excess, tr)
            excess = 0
            break
        plan.pop()
        excess -= n
    while plan[-1][0] == "logo":
        excess -= plan.pop()[1]
    if excess < 0:
        kind, n, tr = plan[-1]
        plan[-1] = (kind, n - excess, tr)
    return plan, goal_idx


def write_match_fixture(directory, duration=300, width=360, height=288, fps=25, seed=0,
                        goals=(0.3, 0.7), dissolve_len=20) -> MatchFixture:
    """Write ``match.yuv`` (yuv420p) and ``match.wav`` (48 kHz mono) into ``directory``."""
    rng = np.random.default_rng(seed)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    total = int(duration * fps)
    intro_cut = 11 * fps
    plan, goal_idx = _plan(rng, total, fps, intro_cut, goals)
    cfg = VideoConfig(width, height, fps, "yuv420p")
    logo_y = logo_image((height, width))
    logo_c = np.full((height // 2, width // 2), 128.0)
    noise_bank = rng.normal(0.0, 1.5, (8, height, width))

    shots, logo_starts = [], []
    video_path = directory / "match.yuv"
    with open(video_path, "wb") as fh:
        pos = 0
        prev_tail = None
        for k, (kind, n, transition) in enumerate(plan):
            if kind == "logo":
                logo_starts.append(pos)
                render = None
            else:
                level = STUDIO_LEVELS[k % len(STUDIO_LEVELS)] if kind == "studio" else None
                render = _ShotRenderer(kind, rng, width, height, level)
            tail = None
            for t in range(n):
                if render is None:
                    y, cb, cr = logo_y, logo_c, logo_c
                else:
                    y, cb, cr = render.frame(t)
                if transition == "dissolve" and t < dissolve_len and prev_tail is not None:
                    a = (t + 1) / (dissolve_len + 1)
                    py, pcb, pcr = prev_tail.frame(prev_tail.n + t)
                    y, cb, cr = (1 - a) * py + a * y, (1 - a) * pcb + a * cb, (1 - a) * pcr + a * cr
                y = y + noise_bank[int(rng.integers(8))]
                fh.write(np.clip(np.rint(y), 0, 255).astype(np.uint8).tobytes())
                fh.write(np.clip(np.rint(cb), 0, 255).astype(np.uint8).tobytes())
                fh.write(np.clip(np.rint(cr), 0, 255).astype(np.uint8).tobytes())
            if render is not None:
                render.n = n
                tail = render
            prev_tail = tail
            shots.append(ScriptedShot(kind, pos, pos + n, transition))
            pos += n

    sr = 48000
    n_samples = int(duration * sr)
    level = np.full(n_samples, 1200.0)
    roar = 5000.0 * _crowd(np.random.default_rng(seed + 99), 12 * sr, sr)
    env = np.concatenate([np.linspace(0.0, 1.0, sr // 4), np.ones(2 * sr), np.exp(-np.arange(12 * sr - sr // 4 - 2 * sr)
                                                                                     / (3.0 * sr))])
    crowd = level * _crowd(rng, n_samples, sr)
    x = np.zeros(n_samples)
    mix = np.zeros(n_samples)
    for g in goal_idx:
        # roars start on the 100 ms power grid so every goal peaks equally loud
        onset = int((Fraction(shots[g].start + shots[g].end, 2) / fps) * 10) * (sr // 10)
        seg = slice(onset, min(onset + len(roar), n_samples))
        x[seg] += (env * roar)[: seg.stop - seg.start]
        mix[seg] = np.maximum(mix[seg], env[: seg.stop - seg.start])
    x += (1.0 - mix) * crowd  # the roar drowns the murmur
    whistles = [(intro_cut / fps + 0.5, intro_cut / fps + 1.3)]
    for k, s in enumerate(shots):
        if s.kind == "close" and k + 1 < len(shots) and shots[k + 1].kind == "logo" and k - 1 not in goal_idx:
            t = shots[k].start / fps - 0.8
            whistles.append((t, t + 0.6))
    whistles.append((duration - 2.0, duration - 1.0))
    for t0, t1 in whistles:
        a, b = int(t0 * sr), int(t1 * sr)
        x[a:b] += whistle_tone(b - a, sr, 2500.0)
    samples = np.clip(np.rint(x), -32768, 32767).astype(np.int16)
    audio_path = directory / "match.wav"
    write_wav(audio_path, AudioTrack(sr, samples))
    return MatchFixture(cfg, video_path, audio_path, shots, goal_idx, logo_starts, whistles,
                        f"0-{intro_cut // fps + 1}", logo_y)
