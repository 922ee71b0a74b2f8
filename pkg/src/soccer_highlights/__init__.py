"""Automatic highlights summaries for soccer broadcasts.

Shots are segmented from raw video, described by audio (whistles, crowd
power) and visual (long shot, zoom, persons, replay) detectors, scored by a
bank of weighted filters and selected under a duration budget.
"""

from .audio import WhistleDetector, detect_whistles
from .highlights import AdvancedFilterSpec, HighlightScorer, ShotSelector, goal_filter_preset, select_shots
from .keyframes import KeyframeExtractor
from .media_io import AudioTrack, FrameSequence, Shot, VideoConfig, load_audio, load_video
from .replay import ReplayDetector
from .shots import PhaseSchedule, ShotSegmenter, segment_shots
from .video import LongShotClassifier, ZoomDetector

__version__ = "0.1.0"

__all__ = [
    "AdvancedFilterSpec", "AudioTrack", "FrameSequence", "HighlightScorer", "KeyframeExtractor",
    "LongShotClassifier", "PhaseSchedule", "ReplayDetector", "Shot", "ShotSegmenter", "ShotSelector",
    "VideoConfig", "WhistleDetector", "ZoomDetector", "detect_whistles", "goal_filter_preset", "load_audio",
    "load_video", "segment_shots", "select_shots",
]
