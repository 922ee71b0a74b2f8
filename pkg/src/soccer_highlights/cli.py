"""Command line entry point.

    soccer-highlights --video match.yuv --audio match.wav --out run/ --duration 180
    soccer-highlights --stage score --out run/         # rerun one stage from its documents

Exit status: 0 on success, 1 when a stage fails, 2 for usage or configuration
errors (including missing input files).
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from .config import load_config
from .exceptions import ConfigError, MediaError, StageError
from .media_io import PIXEL_FORMATS, VideoConfig
from .pipeline import STAGES, Pipeline

log = logging.getLogger("soccer_highlights")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="soccer-highlights",
        description="Build a time-coded highlights summary from raw soccer broadcast video and audio.",
    )
    io = p.add_argument_group("inputs")
    io.add_argument("--video", help="headerless planar video file")
    io.add_argument("--audio", help="mono s16le raw PCM or RIFF/WAVE file")
    io.add_argument("--config", help="INI configuration file")
    io.add_argument("--out", help="directory for stage documents (default: from config or ./highlights-out)")
    io.add_argument("--logo-template", help="replay logo image: binary PGM or raw frame-sized 8-bit gray")
    io.add_argument("--persons-sidecar", help="external person detections ('shot <id>' or 'frame <i> [x y w h]')")
    io.add_argument("--motion-sidecar", help="motion-field XML document replacing block matching")
    fmt = p.add_argument_group("raw video format")
    fmt.add_argument("--width", type=int)
    fmt.add_argument("--height", type=int)
    fmt.add_argument("--fps", help="frame rate, integer or ratio such as 30000/1001")
    fmt.add_argument("--pixfmt", choices=PIXEL_FORMATS)
    fmt.add_argument("--sample-rate", type=int, help="sample rate of raw PCM audio (default 48000)")
    run = p.add_argument_group("run")
    run.add_argument("--duration", type=float, help="summary length in seconds (overrides [summary] duration)")
    run.add_argument("--stage", choices=STAGES, help="run only this stage from persisted documents")
    run.add_argument("--threads", type=int, help="worker threads (results do not depend on this)")
    run.add_argument("--out-of-game", help="out-of-game time ranges in seconds, e.g. '0-30,2700-2760'")
    run.add_argument("-v", "--verbose", action="count", default=0)
    return p


def configure(args):
    cfg = load_config(args.config)
    try:
        fps = Fraction(args.fps) if args.fps is not None else None
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad --fps {args.fps!r}") from exc
    cfg = cfg.with_overrides(
        "input", video=args.video, audio=args.audio, width=args.width, height=args.height, fps=fps,
        pixfmt=args.pixfmt, sample_rate=args.sample_rate, logo_template=args.logo_template,
        persons_sidecar=args.persons_sidecar, motion_sidecar=args.motion_sidecar, out=args.out,
    )
    cfg = cfg.with_overrides("summary", duration=args.duration)
    cfg = cfg.with_overrides("pipeline", threads=args.threads)
    cfg = cfg.with_overrides("segmentation", out_of_game=args.out_of_game)
    if cfg["summary"]["duration"] <= 0:
        raise ConfigError("--duration must be positive")
    if cfg["pipeline"]["threads"] < 1:
        raise ConfigError("--threads must be at least 1")
    i = cfg["input"]
    try:
        VideoConfig(i["width"], i["height"], i["fps"], i["pixfmt"])
    except MediaError as exc:
        raise ConfigError(f"bad video format: {exc}") from exc
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        cfg = configure(args)
        pipeline = Pipeline(cfg, cfg["input"]["out"] or "highlights-out")
        pipeline.run([args.stage] if args.stage else STAGES)
    except ConfigError as exc:
        print(f"soccer-highlights: configuration error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"soccer-highlights: {exc}", file=sys.stderr)
        return 1
    log.info("documents written to %s", pipeline.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
