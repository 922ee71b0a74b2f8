import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import luma_sequence
from soccer_highlights.media_io import Shot
from soccer_highlights.replay import (
    LogoCandidate, ReplayDetector, ReplayInterval, discover_template, logo_candidates, match_logo, pair_logos,
    replay_flags, single_logo_intervals,
)
from soccer_highlights.synthetic import logo_image, replay_clip


def test_candidates_from_jumps_and_boundaries():
    means = np.array([10, 10, 50, 50, 50, 50, 50, 50, 50, 50], float)
    cands = logo_candidates(None, [8], luma_threshold=20, margin=1, stats=(means, np.zeros(10)))
    assert [c.frame for c in cands] == [2, 7, 8, 9]
    assert cands[0] == LogoCandidate(2, 50.0, 0.0)


def test_template_found_among_distractors():
    """Ten identical logo frames hidden among forty textured pitch-like frames."""
    rng = np.random.default_rng(0)
    shape = (24, 32)
    logo = logo_image(shape)
    varied = [rng.uniform(70, 150) + rng.normal(0, rng.uniform(25, 40), shape) for _ in range(40)]
    order = rng.permutation(50)
    lumas = np.array([logo if j >= 40 else varied[j] for j in order])
    seq = luma_sequence(np.clip(np.rint(lumas), 0, 255))
    cands = logo_candidates(seq, range(50), margin=0)
    assert len(cands) == 50
    t = discover_template(cands, seq)
    assert sorted(t.members) == sorted(np.flatnonzero(order >= 40).tolist())
    assert np.abs(t.image - logo).mean() < 2


def test_identical_candidates_give_that_frame():
    img = np.random.default_rng(1).integers(0, 256, (8, 8))
    seq = luma_sequence(np.array([img] * 6))
    t = discover_template([LogoCandidate(i, 0.0, 0.0) for i in range(6)], seq)
    assert np.array_equal(t.image, img) and t.spread == 0


def test_too_few_candidates():
    seq = luma_sequence(np.zeros((3, 8, 8)))
    cands = [LogoCandidate(i, 0.0, 0.0) for i in range(3)]
    assert discover_template(cands, seq, k=4) is None


def test_match_collapses_runs_and_skips_long_runs():
    logo = logo_image((16, 16))
    other = np.full((16, 16), 30.0)
    lumas = [other] * 3 + [logo] * 3 + [other] * 3 + [logo] * 10 + [other]
    seq = luma_sequence(np.array(lumas))
    assert match_logo(logo, seq) == [3, 9]
    assert match_logo(logo, seq, max_run=5) == [3]


@pytest.mark.parametrize("occ,expected", [
    ([2500, 2875], [ReplayInterval(2500, 2875)]),  # 100 s and 115 s
    ([250, 300, 1000], [ReplayInterval(250, 300)]),  # 10 s, 12 s, then a lone 40 s logo
    ([0, 25], []),  # one second apart: too close for a replay
    ([0, 1600], []),  # 64 s apart: too far
    ([0, 100, 200, 300], [ReplayInterval(0, 100), ReplayInterval(200, 300)]),
])
def test_pairing_examples(occ, expected):
    assert pair_logos(occ, 25) == expected


@given(st.lists(st.integers(0, 5000), max_size=30), st.floats(0.5, 5), st.floats(5, 80))
def test_paired_intervals_are_disjoint(occ, lo, hi):
    iv = pair_logos(occ, 25, lo, hi)
    for a in iv:
        assert lo * 25 <= a.end - a.start <= hi * 25 + 1e-9
    for a, b in zip(iv, iv[1:]):
        assert a.end <= b.start


def test_single_logo_intervals():
    assert single_logo_intervals([100, 200], 25, 10.0, 300) == [ReplayInterval(100, 200), ReplayInterval(200, 300)]


def test_replay_flags_half_open():
    shots = [Shot(0, 0, 10), Shot(1, 10, 20, "hard-cut"), Shot(2, 20, 30, "hard-cut")]
    assert replay_flags(shots, [ReplayInterval(10, 20)]) == [False, True, False]
    assert replay_flags(shots, [ReplayInterval(19, 21)]) == [False, True, True]


@pytest.mark.parametrize("pairs", [0, 1, 3])
def test_clip_replays_recovered(pairs):
    clip = replay_clip(pairs, seed=1)
    det = ReplayDetector()
    got = det.fit_predict(clip.frames, clip.boundaries)
    assert len(got) == pairs
    for iv, (a, b) in zip(got, clip.replays):
        assert abs(iv.start - a) <= 2 and abs(iv.end - b) <= 2


def test_given_template_is_used():
    clip = replay_clip(2, seed=2)
    det = ReplayDetector()
    got = det.fit_predict(clip.frames, (), template=clip.logo)
    assert [(i.start, i.end) for i in got] == clip.replays
    with pytest.raises(ValueError):
        ReplayDetector().fit(clip.frames, (), template=np.zeros((3, 3)))


def test_stricter_threshold_matches_subset():
    clip = replay_clip(3, seed=3, noise=4.0)
    found = []
    for tau in (2.0, 4.0, 8.0, 12.0):
        found.append(set(match_logo(clip.logo, clip.frames, tau)))
    for a, b in zip(found, found[1:]):
        assert a <= b
    assert found[-1] == set(clip.logo_starts)
