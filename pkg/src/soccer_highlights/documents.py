"""XML documents exchanged between pipeline stages.

Frame indices are the ground truth in every document; the ``start``/``end``
time codes next to them are derived (seconds, three decimals) and ignored on
read.  Floats are written with ``repr`` so parsing returns the same value.
Writers are deterministic: same input, same bytes.

Schemas (attributes in brackets are optional)::

    <shots frame_rate n_frames>
      <shot id start_frame end_frame start end transition/>
    <descriptors frame_rate>
      <whistles frame_seconds><event start_frame end_frame start end/></whistles>
      <replays><interval start_frame end_frame start end/></replays>
      <shot id start_frame end_frame start end transition
            [mean_motion] [zoom] [long_shot] [persons] [whistle] [replay]>
        [<keyframes frames [long_shot] [skin]/>]
        [<audio A.Power.H ... A.InterInc.100/>]
    <motion block_size rows cols>
      <field frame dx dy/>            (row-major, space separated)
    <scores frame_rate>
      <filter name><weight term value/></filter>
      <shot id start_frame end_frame start end global><local filter value/></shot>
    <summary frame_rate target_duration duration>
      <allocation filter percentage budget claimed/>
      <shot id start_frame end_frame start end transition filter local global rank/>
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .audio import FLAG_NAMES, AudioFlags, WhistleEvent
from .exceptions import DocumentError
from .highlights import AdvancedFilterSpec, Allocation, ScoreTable, ShotDescriptors, Summary, SummaryEntry
from .keyframes import MotionField
from .media_io import Shot, format_seconds
from .replay import ReplayInterval

_BOOL = {"true": True, "false": False}


def _b(v: bool) -> str:
    return "true" if v else "false"


def _f(v) -> str:
    return repr(float(v))


def _ints(values) -> str:
    return " ".join(str(int(v)) for v in values)


def _floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _serialize(root: ET.Element) -> bytes:
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def _parse(source, tag) -> ET.Element:
    try:
        if isinstance(source, (bytes, bytearray)):
            root = ET.fromstring(source)
        elif isinstance(source, str) and source.lstrip().startswith("<"):
            root = ET.fromstring(source.encode())
        else:
            root = ET.parse(source).getroot()
    except (ET.ParseError, OSError) as exc:
        raise DocumentError(f"cannot read <{tag}> document: {exc}") from exc
    if root.tag != tag:
        raise DocumentError(f"expected <{tag}> document, found <{root.tag}>")
    return root


def _attr(el, name, conv=str, default=...):
    raw = el.get(name)
    if raw is None:
        if default is ...:
            raise DocumentError(f"<{el.tag}> is missing attribute {name!r}")
        return default
    try:
        return conv(raw)
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        raise DocumentError(f"<{el.tag}> attribute {name}={raw!r} is invalid") from exc


def _bool(raw):
    return _BOOL[raw]


def _write(doc: bytes, path):
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(doc)
    return doc


def _span(el, start, end, fr):
    el.set("start_frame", str(start))
    el.set("end_frame", str(end))
    el.set("start", format_seconds(Fraction(start) / fr))
    el.set("end", format_seconds(Fraction(end) / fr))


def _shot_el(parent, shot: Shot, fr, tag="shot"):
    el = ET.SubElement(parent, tag, id=str(shot.id))
    _span(el, shot.start_frame, shot.end_frame, fr)
    el.set("transition", shot.transition_in)
    return el


def _read_shot(el) -> Shot:
    try:
        return Shot(_attr(el, "id", int), _attr(el, "start_frame", int), _attr(el, "end_frame", int),
                    _attr(el, "transition"))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


# ------------------------------------------------------------------ shots

def write_shot_list(shots, frame_rate, n_frames=None, path=None) -> bytes:
    fr = Fraction(frame_rate)
    root = ET.Element("shots", frame_rate=str(fr))
    if n_frames is not None:
        root.set("n_frames", str(n_frames))
    for s in shots:
        _shot_el(root, s, fr)
    return _write(_serialize(root), path)


def read_shot_list(source):
    """``(shots, frame_rate)``."""
    root = _parse(source, "shots")
    return [_read_shot(el) for el in root.iter("shot")], _attr(root, "frame_rate", Fraction)


# ------------------------------------------------------------ descriptors

@dataclass
class DescriptorBundle:
    frame_rate: Fraction
    shots: list  # ShotDescriptors
    whistles: list = field(default_factory=list)  # WhistleEvent
    replays: list = field(default_factory=list)  # ReplayInterval
    whistle_frame_seconds: Fraction = Fraction(1, 10)

    def merged(self, other: "DescriptorBundle") -> "DescriptorBundle":
        if len(other.shots) != len(self.shots):
            raise DocumentError("descriptor documents disagree on the shot list")
        return DescriptorBundle(
            self.frame_rate,
            [a.merged(b) for a, b in zip(self.shots, other.shots)],
            self.whistles or other.whistles,
            self.replays or other.replays,
            self.whistle_frame_seconds,
        )


_SCALARS = (("mean_motion", _f, float), ("zoom", _b, _bool), ("long_shot", _b, _bool), ("persons", _b, _bool),
            ("whistle", _b, _bool), ("replay", _b, _bool))


def write_descriptors(bundle: DescriptorBundle, path=None) -> bytes:
    fr = Fraction(bundle.frame_rate)
    root = ET.Element("descriptors", frame_rate=str(fr))
    if bundle.whistles:
        w = ET.SubElement(root, "whistles", frame_seconds=str(bundle.whistle_frame_seconds))
        for e in bundle.whistles:
            el = ET.SubElement(w, "event")
            el.set("start_frame", str(e.start_frame))
            el.set("end_frame", str(e.end_frame))
            el.set("start", format_seconds(e.start(bundle.whistle_frame_seconds)))
            el.set("end", format_seconds(e.end(bundle.whistle_frame_seconds)))
    if bundle.replays:
        r = ET.SubElement(root, "replays")
        for iv in bundle.replays:
            _span(ET.SubElement(r, "interval"), iv.start, iv.end, fr)
    for d in bundle.shots:
        el = _shot_el(root, d.shot, fr)
        for name, fmt, _ in _SCALARS:
            value = getattr(d, name)
            if value is not None:
                el.set(name, fmt(value))
        if d.keyframes is not None:
            kf = ET.SubElement(el, "keyframes", frames=_ints(d.keyframes))
            if d.keyframe_long_shot is not None:
                kf.set("long_shot", " ".join(_b(v) for v in d.keyframe_long_shot))
            if d.skin is not None:
                kf.set("skin", _floats(d.skin))
        if d.audio is not None:
            ET.SubElement(el, "audio", {k: _b(v) for k, v in d.audio.as_dict().items()})
    return _write(_serialize(root), path)


def _split(raw, conv):
    return [conv(t) for t in raw.split()]


def read_descriptors(source) -> DescriptorBundle:
    root = _parse(source, "descriptors")
    fr = _attr(root, "frame_rate", Fraction)
    whistles, replays, fs = [], [], Fraction(1, 10)
    w = root.find("whistles")
    if w is not None:
        fs = _attr(w, "frame_seconds", Fraction)
        whistles = [WhistleEvent(_attr(e, "start_frame", int), _attr(e, "end_frame", int)) for e in w.iter("event")]
    r = root.find("replays")
    if r is not None:
        replays = [ReplayInterval(_attr(e, "start_frame", int), _attr(e, "end_frame", int))
                   for e in r.iter("interval")]
    shots = []
    for el in root.findall("shot"):
        d = ShotDescriptors(_read_shot(el))
        for name, _, conv in _SCALARS:
            setattr(d, name, _attr(el, name, conv, None))
        kf = el.find("keyframes")
        if kf is not None:
            d.keyframes = _attr(kf, "frames", lambda s: _split(s, int))
            d.keyframe_long_shot = _attr(kf, "long_shot", lambda s: _split(s, _bool), None)
            d.skin = _attr(kf, "skin", lambda s: _split(s, float), None)
        au = el.find("audio")
        if au is not None:
            d.audio = AudioFlags.from_dict({n: _attr(au, n, _bool) for n in FLAG_NAMES})
        shots.append(d)
    return DescriptorBundle(fr, shots, whistles, replays, fs)


# ----------------------------------------------------------------- motion

def write_motion(fields, path=None) -> bytes:
    """Motion-field sidecar; every field must share one grid shape."""
    fields = list(fields)
    bs = fields[0].block_size if fields else 16
    rows, cols = fields[0].shape if fields else (0, 0)
    root = ET.Element("motion", block_size=str(bs), rows=str(rows), cols=str(cols))
    for f in fields:
        if f.shape != (rows, cols) or f.block_size != bs:
            raise ValueError("motion fields differ in grid shape or block size")
        ET.SubElement(root, "field", frame=str(f.frame), dx=_ints(f.dx.ravel()), dy=_ints(f.dy.ravel()))
    return _write(_serialize(root), path)


def read_motion(source):
    root = _parse(source, "motion")
    bs, rows, cols = (_attr(root, k, int) for k in ("block_size", "rows", "cols"))
    out = []
    for el in root.iter("field"):
        grids = []
        for k in ("dx", "dy"):
            v = np.array(_attr(el, k, lambda s: _split(s, int)), dtype=np.int64)
            if v.size != rows * cols:
                raise DocumentError(f"motion field {el.get('frame')}: {k} has {v.size} values, expected {rows * cols}")
            grids.append(v.reshape(rows, cols))
        out.append(MotionField(_attr(el, "frame", int), grids[0], grids[1], bs))
    return out


# ----------------------------------------------------------------- scores

def write_scores(table: ScoreTable, shots, specs, frame_rate, path=None) -> bytes:
    fr = Fraction(frame_rate)
    root = ET.Element("scores", frame_rate=str(fr))
    for spec in specs:
        f = ET.SubElement(root, "filter", name=spec.name)
        for term, w in spec.weights.items():
            ET.SubElement(f, "weight", term=term, value=_f(w))
    for s, row, g in zip(shots, table.local, table.global_):
        el = _shot_el(root, s, fr)
        el.set("global", _f(g))
        for name, v in zip(table.filters, row):
            ET.SubElement(el, "local", filter=name, value=_f(v))
    return _write(_serialize(root), path)


def read_scores(source):
    """``(table, shots, specs, frame_rate)``."""
    root = _parse(source, "scores")
    fr = _attr(root, "frame_rate", Fraction)
    specs = []
    for f in root.findall("filter"):
        weights = {_attr(w, "term"): _attr(w, "value", float) for w in f.findall("weight")}
        try:
            specs.append(AdvancedFilterSpec(_attr(f, "name"), weights))
        except ValueError as exc:
            raise DocumentError(str(exc)) from exc
    names = [s.name for s in specs]
    shots, local, glob = [], [], []
    for el in root.findall("shot"):
        shots.append(_read_shot(el))
        vals = {_attr(l, "filter"): _attr(l, "value", float) for l in el.findall("local")}
        if sorted(vals) != sorted(names):
            raise DocumentError(f"shot {el.get('id')} has local scores for {sorted(vals)}, expected {sorted(names)}")
        local.append([vals[n] for n in names])
        glob.append(_attr(el, "global", float))
    table = ScoreTable(names, np.array(local, dtype=np.float64).reshape(len(shots), len(names)),
                       np.array(glob, dtype=np.float64), [s.id for s in shots])
    return table, shots, specs, fr


# ---------------------------------------------------------------- summary

def write_summary(summary: Summary, path=None) -> bytes:
    fr = Fraction(summary.frame_rate)
    root = ET.Element("summary", frame_rate=str(fr), target_duration=_f(summary.target_duration),
                      duration=format_seconds(sum((e.shot.duration(fr) for e in summary.entries), Fraction(0))))
    for a in summary.allocations:
        ET.SubElement(root, "allocation", filter=a.filter, percentage=_f(a.percentage), budget=_f(a.budget),
                      claimed=_f(a.claimed))
    for e in summary.entries:
        el = _shot_el(root, e.shot, fr)
        el.set("filter", e.filter)
        el.set("local", _f(e.local_score))
        el.set("global", _f(e.global_score))
        el.set("rank", str(e.rank))
    return _write(_serialize(root), path)


def read_summary(source) -> Summary:
    root = _parse(source, "summary")
    allocs = [Allocation(_attr(a, "filter"), _attr(a, "percentage", float), _attr(a, "budget", float),
                         _attr(a, "claimed", float)) for a in root.findall("allocation")]
    entries = [SummaryEntry(_read_shot(el), _attr(el, "filter"), _attr(el, "local", float),
                            _attr(el, "global", float), _attr(el, "rank", int)) for el in root.findall("shot")]
    return Summary(_attr(root, "frame_rate", Fraction), _attr(root, "target_duration", float), entries, allocs)
