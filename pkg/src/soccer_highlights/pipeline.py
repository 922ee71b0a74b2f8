"""Stage orchestration.

Each stage reads the documents of earlier stages from the output directory
and writes its own, so any stage can be rerun in isolation and the full run
is just the stages in order.

    segment    -> shots.xml
    keyframes  -> keyframes.xml, motion.xml
    audio      -> audio.xml
    video      -> video.xml
    replay     -> replay.xml
    describe   -> descriptors.xml
    score      -> scores.xml
    select     -> summary.xml
"""

from __future__ import annotations

import logging
import re
import time
from fractions import Fraction
from pathlib import Path

from . import documents as docs
from .audio import WhistleDetector, audio_flags, audio_power, whistle_flags
from .config import PipelineConfig
from .exceptions import ConfigError, HighlightsError, StageError
from .highlights import HighlightScorer, ShotDescriptors, select_shots
from .keyframes import KeyframeExtractor
from .media_io import VideoConfig, load_audio, load_video, read_pgm
from .replay import ReplayDetector, replay_flags
from .shots import Boundary, PhaseSchedule, segment_shots
from .video import LongShotClassifier, detect_zoom, load_persons_sidecar, persons_flag, skin_percentage

log = logging.getLogger(__name__)

STAGES = ("segment", "keyframes", "audio", "video", "replay", "describe", "score", "select")

OUTPUTS = {
    "segment": ("shots.xml",),
    "keyframes": ("keyframes.xml", "motion.xml"),
    "audio": ("audio.xml",),
    "video": ("video.xml",),
    "replay": ("replay.xml",),
    "describe": ("descriptors.xml",),
    "score": ("scores.xml",),
    "select": ("summary.xml",),
}

PREREQUISITES = {
    "segment": (),
    "keyframes": ("shots.xml",),
    "audio": ("shots.xml",),
    "video": ("shots.xml", "keyframes.xml", "motion.xml"),
    "replay": ("shots.xml",),
    "describe": ("shots.xml", "keyframes.xml", "audio.xml", "video.xml", "replay.xml"),
    "score": ("descriptors.xml",),
    "select": ("scores.xml",),
}

MEDIA = {"segment": ("video",), "keyframes": ("video",), "audio": ("audio",), "video": ("video",),
         "replay": ("video",)}

_RANGE = re.compile(r"^\s*([0-9.]+)\s*-\s*([0-9.]+)\s*$")


def parse_time_ranges(text, frame_rate):
    """``"0-30, 2700-2760"`` (seconds) -> ``[(start_frame, end_frame), ...]``."""
    out = []
    for part in filter(None, (p.strip() for p in (text or "").split(","))):
        m = _RANGE.match(part)
        if not m:
            raise ConfigError(f"bad time range {part!r}; expected <start>-<end> in seconds")
        a, b = (Fraction(g) * Fraction(frame_rate) for g in m.groups())
        if b <= a:
            raise ConfigError(f"empty time range {part!r}")
        out.append((int(a), int(-(-b // 1))))
    return out


class Pipeline:
    """Runs stages against ``config`` with documents kept in ``out_dir``."""

    def __init__(self, config: PipelineConfig, out_dir):
        self.config = config
        self.out = Path(out_dir)
        self._frames = None
        self._track = None

    # -- inputs
    @property
    def threads(self):
        return self.config["pipeline"]["threads"]

    @property
    def video_config(self):
        i = self.config["input"]
        return VideoConfig(i["width"], i["height"], i["fps"], i["pixfmt"])

    def video(self):
        if self._frames is None:
            self._frames = load_video(self.config["input"]["video"], self.video_config)
        return self._frames

    def audio(self):
        if self._track is None:
            i = self.config["input"]
            self._track = load_audio(i["audio"], i["sample_rate"])
        return self._track

    def path(self, name) -> Path:
        return self.out / name

    def check_inputs(self, stages):
        """Fail before any work if a needed input is unset or missing."""
        needed = {m for s in stages for m in MEDIA.get(s, ())}
        if "segment" in stages and self.config["segmentation"]["phases"] == "whistles":
            needed.add("audio")
        for key in sorted(needed):
            if self.config["input"][key] is None:
                raise ConfigError(f"stage needs --{key} but none was given")
        self.config.check_paths(*sorted(needed), "logo_template", "persons_sidecar", "motion_sidecar")

    # -- stages
    def run(self, stages=STAGES):
        stages = list(stages)
        for s in stages:
            if s not in STAGES:
                raise ConfigError(f"unknown stage {s!r}; choose from {', '.join(STAGES)}")
        self.check_inputs(stages)
        self.out.mkdir(parents=True, exist_ok=True)
        for s in stages:
            self.run_stage(s)

    def run_stage(self, stage):
        if stage not in STAGES:
            raise ConfigError(f"unknown stage {stage!r}; choose from {', '.join(STAGES)}")
        for name in PREREQUISITES[stage]:
            if not self.path(name).is_file():
                raise StageError(stage, f"missing prerequisite document {name}")
        t0 = time.perf_counter()
        try:
            getattr(self, "_" + stage)()
        except StageError:
            raise
        except (HighlightsError, ValueError, OSError) as exc:
            raise StageError(stage, exc) from exc
        log.info("stage %s done in %.1fs", stage, time.perf_counter() - t0)

    def _shots(self):
        shots, fr = docs.read_shot_list(self.path("shots.xml"))
        return shots, fr

    def _segment(self):
        frames = self.video()
        c = self.config["segmentation"]
        n = len(frames)
        fr = frames.config.frame_rate
        if c["out_of_game"]:
            schedule = PhaseSchedule.from_out_of_game(parse_time_ranges(c["out_of_game"], fr), n)
        elif c["phases"] == "whistles":
            events = self._whistle_detector().fit(self.audio()).events_
            schedule = PhaseSchedule.from_whistles([(e.start(), e.end()) for e in events], n, fr)
        else:
            schedule = PhaseSchedule.all_in_game(n)
        shots = segment_shots(frames, schedule, c["n_bins"], c["cut_threshold"], c["window"], c["rank_tol"],
                              c["min_shot_len"], c["min_dissolve_len"], self.threads)
        docs.write_shot_list(shots, fr, n, self.path("shots.xml"))

    def _keyframes(self):
        frames = self.video()
        shots, fr = self._shots()
        c = self.config["keyframes"]
        fields = None
        sidecar = self.config["input"]["motion_sidecar"]
        if sidecar:
            fields = docs.read_motion(sidecar)
        ext = KeyframeExtractor(c["alpha"], c["max_keyframes"], c["min_length"], c["dup_threshold"],
                                c["block_size"], c["search_radius"], self.threads)
        ext.fit(frames, shots, fields)
        bundle = docs.DescriptorBundle(fr, [
            ShotDescriptors(s, keyframes=ext.keyframes_[s.id], mean_motion=ext.mean_activity_[s.id]) for s in shots
        ])
        docs.write_motion(ext.motion_fields_, self.path("motion.xml"))
        docs.write_descriptors(bundle, self.path("keyframes.xml"))

    def _whistle_detector(self):
        c = self.config["whistle"]
        return WhistleDetector(c["energy_threshold"], c["margin_db"], c["percentile"], c["entropy_threshold"],
                               c["peak_threshold"], self.threads)

    def _audio(self):
        track = self.audio()
        shots, fr = self._shots()
        events = self._whistle_detector().fit(track).events_
        c = self.config["audio"]
        flags = audio_flags(shots, audio_power(track), fr, c["high"], c["very_high"], c["inc_50"], c["inc_100"])
        wflags = whistle_flags(shots, events, fr)
        bundle = docs.DescriptorBundle(fr, [ShotDescriptors(s, whistle=w, audio=a)
                                            for s, w, a in zip(shots, wflags, flags)], whistles=events)
        docs.write_descriptors(bundle, self.path("audio.xml"))

    def _video(self):
        frames = self.video()
        shots, fr = self._shots()
        kf = docs.read_descriptors(self.path("keyframes.xml"))
        fields = docs.read_motion(self.path("motion.xml"))
        if len(fields) != max(len(frames) - 1, 0):
            raise StageError("video", f"motion.xml has {len(fields)} fields for {len(frames)} frames")
        lc, zc, sc = self.config["longshot"], self.config["zoom"], self.config["skin"]
        classifier = LongShotClassifier(lc["green_fraction"], lc["var_threshold"])
        sidecar = self.config["input"]["persons_sidecar"]
        marked = load_persons_sidecar(sidecar, shots) if sidecar else set()
        out = []
        for s, d in zip(shots, kf.shots):
            keys = [frames[i] for i in d.keyframes]
            votes = [bool(v) for v in classifier.predict(keys)]
            skin = [skin_percentage(k.rgb()) for k in keys]
            shot_fields = fields[s.start_frame:s.end_frame - 1]
            zoom = detect_zoom(shot_fields, zc["focal_threshold"], zc["min_frames"], zc["min_vectors"],
                               zc["parallel_deg"])
            out.append(ShotDescriptors(
                s, keyframes=d.keyframes, keyframe_long_shot=votes, skin=skin,
                long_shot=bool(2 * sum(votes) > len(votes)), zoom=zoom,
                persons=persons_flag(s, skin, marked, sc["skin_threshold"]),
            ))
        docs.write_descriptors(docs.DescriptorBundle(fr, out), self.path("video.xml"))

    def _replay(self):
        frames = self.video()
        shots, fr = self._shots()
        c = self.config["replay"]
        det = ReplayDetector(c["luma_threshold"], c["boundary_margin"], c["n_clusters"], c["match_threshold"],
                             c["max_logo_seconds"], c["min_gap"], c["max_gap"], c["pairing"],
                             c["single_logo_seconds"], self.threads)
        template = self.config["input"]["logo_template"]
        if template:
            template = read_pgm(template, frames.luma(0).shape)
        boundaries = [Boundary(s.start_frame, s.transition_in) for s in shots[1:]]
        intervals = det.fit_predict(frames, boundaries, template)
        flags = replay_flags(shots, intervals)
        bundle = docs.DescriptorBundle(fr, [ShotDescriptors(s, replay=f) for s, f in zip(shots, flags)],
                                       replays=intervals)
        docs.write_descriptors(bundle, self.path("replay.xml"))

    def _describe(self):
        shots, fr = self._shots()
        merged = None
        for name in ("keyframes.xml", "audio.xml", "video.xml", "replay.xml"):
            part = docs.read_descriptors(self.path(name))
            if [d.shot for d in part.shots] != shots:
                raise StageError("describe", f"{name} was computed for a different shot list")
            merged = part if merged is None else merged.merged(part)
        docs.write_descriptors(merged, self.path("descriptors.xml"))

    def _score(self):
        bundle = docs.read_descriptors(self.path("descriptors.xml"))
        h = self.config["highlights"]
        scorer = HighlightScorer(self.config.specs, (h["very_short"], h["short"], h["long"]),
                                 h["motion_threshold"], bundle.frame_rate)
        table = scorer.fit_transform(bundle.shots)
        docs.write_scores(table, [d.shot for d in bundle.shots], scorer.filters_, bundle.frame_rate,
                          self.path("scores.xml"))

    def _select(self):
        table, shots, specs, fr = docs.read_scores(self.path("scores.xml"))
        allocations = [(name, pct) for name, pct in self.config.allocations if name in table.filters]
        if len(allocations) != len(self.config.allocations):
            raise StageError("select", "scores.xml was computed with a different filter bank")
        summary = select_shots(table, shots, self.config["summary"]["duration"], allocations, fr)
        docs.write_summary(summary, self.path("summary.xml"))


def run_pipeline(config: PipelineConfig, out_dir, stages=STAGES):
    Pipeline(config, out_dir).run(stages)
    return Path(out_dir)


def summary_shot_ids(out_dir):
    return [e.shot.id for e in docs.read_summary(Path(out_dir) / "summary.xml").entries]
