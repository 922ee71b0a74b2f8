from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soccer_highlights.audio import AudioFlags, WhistleEvent
from soccer_highlights.documents import (
    DescriptorBundle, read_descriptors, read_motion, read_scores, read_shot_list, read_summary,
    write_descriptors, write_motion, write_scores, write_shot_list, write_summary,
)
from soccer_highlights.exceptions import DocumentError
from soccer_highlights.highlights import (
    Allocation, HighlightScorer, ShotDescriptors, Summary, SummaryEntry, goal_filter_preset,
)
from soccer_highlights.keyframes import MotionField
from soccer_highlights.media_io import Shot
from soccer_highlights.replay import ReplayInterval

SHOTS = [Shot(0, 0, 250), Shot(1, 250, 300, "hard-cut"), Shot(2, 300, 420, "dissolve")]


def test_shot_list_round_trip_and_time_codes(tmp_path):
    doc = write_shot_list(SHOTS, 25, 420, tmp_path / "shots.xml")
    assert b'start="0.000"' in doc and b'end="10.000"' in doc
    shots, fr = read_shot_list(tmp_path / "shots.xml")
    assert shots == SHOTS and fr == 25
    assert write_shot_list(shots, fr, 420) == doc


def test_ntsc_rate_survives():
    shots, fr = read_shot_list(write_shot_list(SHOTS, Fraction(30000, 1001)))
    assert fr == Fraction(30000, 1001)


def test_empty_shot_list():
    assert read_shot_list(write_shot_list([], 25)) == ([], 25)


def test_wrong_root_and_garbage():
    with pytest.raises(DocumentError):
        read_shot_list(write_summary(Summary(Fraction(25), 10.0, [], [])))
    with pytest.raises(DocumentError):
        read_shot_list(b"<shots")
    with pytest.raises(DocumentError):
        read_shot_list(b'<shots frame_rate="25"><shot id="0" start_frame="5" end_frame="2" transition="hard-cut"/>'
                       b"</shots>")


def _bundle():
    descs = [
        ShotDescriptors(SHOTS[0], keyframes=[3, 100], mean_motion=0.1 + 0.2, zoom=True, long_shot=False,
                        keyframe_long_shot=[False, True], skin=[0.01, 1 / 3], persons=False, whistle=True,
                        replay=False, audio=AudioFlags(True, True, False, False, True, False)),
        ShotDescriptors(SHOTS[1], mean_motion=2.5),
        ShotDescriptors(SHOTS[2]),
    ]
    return DescriptorBundle(Fraction(25), descs, [WhistleEvent(3, 7)], [ReplayInterval(260, 400)])


def test_descriptor_round_trip_keeps_missing_fields_missing():
    b = _bundle()
    doc = write_descriptors(b)
    back = read_descriptors(doc)
    assert back == b
    assert back.shots[2].zoom is None and back.shots[1].audio is None
    assert back.shots[0].mean_motion == 0.1 + 0.2
    assert write_descriptors(back) == doc


def test_descriptor_merge_prefers_present_values():
    a = DescriptorBundle(Fraction(25), [ShotDescriptors(SHOTS[0], zoom=True)])
    b = DescriptorBundle(Fraction(25), [ShotDescriptors(SHOTS[0], zoom=False, replay=True)], [WhistleEvent(0, 1)])
    m = a.merged(b)
    assert m.shots[0].zoom is True and m.shots[0].replay is True and m.whistles == [WhistleEvent(0, 1)]


@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 5))
@settings(max_examples=30)
def test_motion_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    fields = [MotionField(t, rng.integers(-4, 5, (3, 4)), rng.integers(-4, 5, (3, 4))) for t in range(n)]
    assert read_motion(write_motion(fields)) == fields


def test_motion_grid_mismatch():
    with pytest.raises(ValueError):
        write_motion([MotionField(0, np.zeros((2, 2), int), np.zeros((2, 2), int)),
                      MotionField(1, np.zeros((3, 2), int), np.zeros((3, 2), int))])
    bad = b'<motion block_size="16" rows="1" cols="2"><field frame="0" dx="1" dy="1 2"/></motion>'
    with pytest.raises(DocumentError):
        read_motion(bad)


def test_scores_round_trip():
    descs = [ShotDescriptors(s, mean_motion=0.0, zoom=False, long_shot=False, persons=i == 1, whistle=False,
                             replay=i == 2, audio=AudioFlags(i == 0, i == 0, i == 0, i == 0))
             for i, s in enumerate(SHOTS)]
    spec = goal_filter_preset()
    table = HighlightScorer([spec]).transform(descs)
    doc = write_scores(table, SHOTS, [spec], 25)
    t2, shots, specs, fr = read_scores(doc)
    assert t2 == table and shots == SHOTS and specs == [spec] and fr == 25
    assert table.global_[0] == 6.5


def test_summary_round_trip():
    s = Summary(Fraction(25), 12.5, [SummaryEntry(SHOTS[0], "goal", 8.0, 8.5, 1),
                                     SummaryEntry(SHOTS[2], "goal", 0.1, 0.30000000000000004, 2)],
                [Allocation("goal", 100.0, 12.5, 14.8)])
    doc = write_summary(s)
    assert b'duration="14.800"' in doc
    assert read_summary(doc) == s
