import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import luma_sequence, rgb_sequence
from oracles import keyframe_recursion, sad_motion
from soccer_highlights.keyframes import (
    KeyframeExtractor, MotionField, compute_motion_fields, dedup_keyframes, estimate_motion, extract_keyframes,
    frame_activities, hsv_histogram, motion_activity,
)
from soccer_highlights.media_io import Shot

SPIKE_LEFT = [3, 2, 1, 2, 3, 3, 2, 1.5, 2, 3]
SPIKE_RIGHT = [2, 3, 2, 2, 0.5, 2, 3, 2, 2]


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([(16, 16), (20, 36), (33, 17)]), st.sampled_from([4, 8, 16]),
       st.integers(1, 4))
@settings(max_examples=25)
def test_block_matching_matches_exhaustive_oracle(seed, shape, block, radius):
    rng = np.random.default_rng(seed)
    prev = rng.integers(0, 256, shape, dtype=np.uint8)
    if seed % 2:  # a shifted copy exercises real motion, the other half pure noise
        nxt = np.roll(prev, (seed % 3 - 1, seed % 5 - 2), axis=(0, 1))
    else:
        nxt = rng.integers(0, 256, shape, dtype=np.uint8)
    f = estimate_motion(prev, nxt, block, radius)
    dx, dy = sad_motion(prev, nxt, block, radius)
    assert np.array_equal(f.dx, dx) and np.array_equal(f.dy, dy)


def test_shift_by_four_pixels():
    rng = np.random.default_rng(0)
    big = rng.integers(0, 256, (64, 80), dtype=np.uint8)
    prev, nxt = big[8:56, 8:72], big[8:56, 4:68]  # content moves right by 4
    f = estimate_motion(prev, nxt)
    assert f.shape == (3, 4)
    assert np.all(f.dx[:, 1:] == 4) and np.all(f.dy == 0)


def test_flat_frames_give_zero_vectors():
    flat = np.full((32, 32), 90, np.uint8)
    f = estimate_motion(flat, flat)
    assert not f.dx.any() and not f.dy.any()
    assert motion_activity(f) == 0.0


def test_activity_is_magnitude_dispersion():
    dx = np.array([[3, 0], [3, 0]])
    dy = np.array([[4, 0], [4, 0]])
    assert motion_activity(MotionField(0, dx, dy)) == pytest.approx(2.5)


def test_motion_fields_thread_independent():
    lumas = np.random.default_rng(1).integers(0, 256, (70, 32, 48), dtype=np.uint8)
    seq = luma_sequence(lumas)
    a = compute_motion_fields(seq, threads=1)
    b = compute_motion_fields(seq, threads=3)
    assert len(a) == 69 and a == b
    assert a[5] == estimate_motion(lumas[5], lumas[6], frame=5)


def test_activities_do_not_cross_boundaries():
    fields = [MotionField(t, np.full((1, 2), t), np.zeros((1, 2), int)) for t in range(5)]
    fields[2] = MotionField(2, np.array([[0, 8]]), np.zeros((1, 2), int))  # only the cross-boundary pair moves
    act = frame_activities(fields, [Shot(0, 0, 3), Shot(1, 3, 6)], 6)
    assert act.tolist() == [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]


def test_constant_series_gives_first_frame():
    assert extract_keyframes(100, np.ones(40)) == [100]
    assert keyframe_recursion(np.ones(40)) == [0]


def test_single_spike_series():
    act = SPIKE_LEFT + [10] + SPIKE_RIGHT
    assert extract_keyframes(0, act) == [2, 15]
    assert keyframe_recursion(act) == [2, 15]


def test_twelve_spike_series_hits_cap():
    act = np.ones(65)
    act[4:60:5] = 100
    assert np.count_nonzero(act == 100) == 12
    expected = [0, 5, 10, 15, 20, 25, 30, 35, 40, 45]
    assert extract_keyframes(0, act) == expected
    assert keyframe_recursion(act) == expected


def test_shot_length_must_match():
    with pytest.raises(ValueError):
        extract_keyframes(Shot(0, 0, 5), np.ones(4))


@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=0, max_size=200), st.floats(1.01, 6),
       st.integers(1, 12), st.integers(1, 5))
@settings(max_examples=300)
def test_keyframes_match_recursive_oracle(act, alpha, cap, lmin):
    got = extract_keyframes(0, act, alpha, cap, lmin)
    assert len(got) <= cap
    assert got == sorted(set(got))
    assert all(0 <= k < len(act) for k in got)
    assert got == keyframe_recursion(act, alpha, cap, lmin)
    if act:
        assert got


def test_hsv_histogram_is_unit_sum():
    rgb = np.random.default_rng(2).integers(0, 256, (8, 8, 3), dtype=np.uint8)
    h = hsv_histogram(rgb)
    assert h.shape == (256,) and h.sum() == pytest.approx(1.0)


def test_dedup_keeps_distinct_frames():
    red = np.zeros((4, 4, 3), np.uint8)
    red[..., 0] = 200
    blue = np.zeros((4, 4, 3), np.uint8)
    blue[..., 2] = 200
    frames = rgb_sequence([red, red, blue, red])
    assert dedup_keyframes([0, 1, 2, 3], frames) == [0, 2]


def test_extractor_caps_keyframes_per_shot():
    rng = np.random.default_rng(3)
    lumas = rng.integers(0, 256, (40, 32, 32), dtype=np.uint8)
    seq = luma_sequence(lumas)
    shots = [Shot(0, 0, 25), Shot(1, 25, 40, "hard-cut")]
    ex = KeyframeExtractor(max_keyframes=3).fit(seq, shots)
    for s in shots:
        assert 1 <= len(ex.keyframes_[s.id]) <= 3
        assert set(ex.keyframes_[s.id]) <= set(ex.candidates_[s.id])
        assert all(s.start_frame <= k < s.end_frame for k in ex.keyframes_[s.id])
    assert ex.transform(shots) == [ex.keyframes_[0], ex.keyframes_[1]]
