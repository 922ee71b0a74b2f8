"""Shot scoring and summary assembly.

Every shot gets a vector of boolean elementary filters.  An advanced filter is
a signed weighted sum of elementary filters, optionally read from the shots
up to two positions before or after; its value is the shot's local score and
the sum of all local scores is the global score.  Selection then spends a
per-filter share of the requested duration on each filter's best shots.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .audio import FLAG_NAMES
from .exceptions import IncompleteDescriptorsError
from .media_io import Shot

ELEMENTARY_FILTERS = (
    "long_shot", "zoom", "whistle", "replay", "persons", "high_motion",
    *FLAG_NAMES,
    "dur_long", "dur_medium", "dur_short", "dur_very_short",
)
_INDEX = {name: i for i, name in enumerate(ELEMENTARY_FILTERS)}
MAX_OFFSET = 2

_TERM = re.compile(r"^(?P<name>[A-Za-z_][\w.]*?)(?:@(?P<off>[+-]\d+))?$")


@dataclass
class ShotDescriptors:
    """Everything the analysis stages know about one shot; ``None`` = not computed."""

    shot: Shot
    keyframes: list | None = None
    mean_motion: float | None = None
    zoom: bool | None = None
    long_shot: bool | None = None
    keyframe_long_shot: list | None = None
    skin: list | None = None
    persons: bool | None = None
    whistle: bool | None = None
    replay: bool | None = None
    audio: object | None = None  # AudioFlags

    def merged(self, other: "ShotDescriptors") -> "ShotDescriptors":
        """Field-wise union; values already present here win."""
        if other.shot != self.shot:
            raise ValueError(f"cannot merge descriptors of different shots ({self.shot} vs {other.shot})")
        out = ShotDescriptors(self.shot)
        for name in self.__dataclass_fields__:
            if name == "shot":
                continue
            mine = getattr(self, name)
            setattr(out, name, mine if mine is not None else getattr(other, name))
        return out


def duration_class(seconds, thresholds=(2.0, 6.0, 15.0)) -> str:
    """very_short < t1 <= short < t2 <= medium < t3 <= long."""
    t1, t2, t3 = thresholds
    if seconds < t1:
        return "dur_very_short"
    if seconds < t2:
        return "dur_short"
    if seconds < t3:
        return "dur_medium"
    return "dur_long"


_REQUIRED = ("mean_motion", "zoom", "long_shot", "persons", "whistle", "replay", "audio")


def evaluate_elementary(desc: ShotDescriptors, frame_rate, duration_thresholds=(2.0, 6.0, 15.0),
                        motion_threshold=1.5) -> dict:
    """Elementary filter values of one shot, keyed by filter name."""
    missing = [name for name in _REQUIRED if getattr(desc, name) is None]
    if missing:
        raise IncompleteDescriptorsError(f"shot {desc.shot.id} lacks descriptors: {', '.join(missing)}")
    seconds = desc.shot.duration(frame_rate)
    out = {
        "long_shot": bool(desc.long_shot),
        "zoom": bool(desc.zoom),
        "whistle": bool(desc.whistle),
        "replay": bool(desc.replay),
        "persons": bool(desc.persons),
        "high_motion": bool(desc.mean_motion > motion_threshold),
    }
    out.update(desc.audio.as_dict())
    klass = duration_class(seconds, duration_thresholds)
    for name in ("dur_long", "dur_medium", "dur_short", "dur_very_short"):
        out[name] = name == klass
    return out


def elementary_matrix(descriptors, frame_rate, duration_thresholds=(2.0, 6.0, 15.0), motion_threshold=1.5):
    """``(n_shots, n_filters)`` boolean matrix in :data:`ELEMENTARY_FILTERS` column order."""
    rows = [evaluate_elementary(d, frame_rate, duration_thresholds, motion_threshold) for d in descriptors]
    return np.array([[r[name] for name in ELEMENTARY_FILTERS] for r in rows], dtype=bool).reshape(
        len(rows), len(ELEMENTARY_FILTERS))


@dataclass(frozen=True)
class Term:
    name: str
    offset: int
    weight: float

    @property
    def key(self):
        return self.name if self.offset == 0 else f"{self.name}@{self.offset:+d}"


def parse_term(key: str, weight) -> Term:
    m = _TERM.match(key.strip())
    if not m or m.group("name") not in _INDEX:
        raise ValueError(f"unknown elementary filter {key!r}")
    off = int(m.group("off") or 0)
    if abs(off) > MAX_OFFSET:
        raise ValueError(f"neighbour offset {off:+d} in {key!r} exceeds +-{MAX_OFFSET}")
    return Term(m.group("name"), off, float(weight))


@dataclass(frozen=True)
class AdvancedFilterSpec:
    """Named signed-weight combination of elementary filters.

    ``weights`` maps ``"name"`` or ``"name@+1"`` style keys to weights.
    """

    name: str
    weights: dict

    def __post_init__(self):
        terms = tuple(parse_term(k, w) for k, w in self.weights.items())
        if not any(t.weight != 0 for t in terms):
            raise ValueError(f"advanced filter {self.name!r} needs at least one nonzero weight")
        object.__setattr__(self, "terms", terms)

    def scaled(self, c) -> "AdvancedFilterSpec":
        return AdvancedFilterSpec(self.name, {k: c * w for k, w in self.weights.items()})


GOAL_WEIGHTS = {
    "A.Power.VH": 2.0,
    "A.IntraInc.100": 2.0,
    "persons@+1": 1.5,
    "persons@+2": 1.5,
    "replay@+1": 1.0,
    "replay@+2": 1.0,
}


def goal_filter_preset(**overrides) -> AdvancedFilterSpec:
    """Goal pattern: a sudden loud shot followed within two shots by
    celebrating players and/or a replay."""
    weights = dict(GOAL_WEIGHTS)
    weights.update(overrides)
    return AdvancedFilterSpec("goal", weights)


def local_score(spec: AdvancedFilterSpec, elementary, s: int) -> float:
    """Weighted sum for shot ``s``; neighbours outside the stream contribute 0."""
    E = np.asarray(elementary, dtype=bool)
    parts = []
    for t in spec.terms:
        j = s + t.offset
        if 0 <= j < len(E) and E[j, _INDEX[t.name]]:
            parts.append(t.weight)
    return math.fsum(parts)


def global_score(locals_) -> float:
    return math.fsum(locals_)


@dataclass
class ScoreTable:
    filters: list
    local: np.ndarray  # (n_shots, n_filters)
    global_: np.ndarray  # (n_shots,)
    shot_ids: list = field(default_factory=list)

    def __eq__(self, other):
        return (
            isinstance(other, ScoreTable)
            and self.filters == other.filters
            and self.shot_ids == other.shot_ids
            and np.array_equal(self.local, other.local)
            and np.array_equal(self.global_, other.global_)
        )


def score_shots(specs, elementary, shot_ids=None) -> ScoreTable:
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ValueError("advanced filter names must be unique")
    E = np.asarray(elementary, dtype=bool)
    n = len(E)
    local = np.array([[local_score(spec, E, s) for spec in specs] for s in range(n)], dtype=np.float64)
    local = local.reshape(n, len(specs))
    glob = np.array([global_score(row) for row in local], dtype=np.float64)
    return ScoreTable(names, local, glob, list(shot_ids) if shot_ids is not None else list(range(n)))


class HighlightScorer(TransformerMixin, BaseEstimator):
    """Turns shot descriptors (or a ready elementary matrix) into a :class:`ScoreTable`."""

    def __init__(self, filters=None, duration_thresholds=(2.0, 6.0, 15.0), motion_threshold=1.5, frame_rate=25):
        self.filters = filters
        self.duration_thresholds = duration_thresholds
        self.motion_threshold = motion_threshold
        self.frame_rate = frame_rate

    def fit(self, X=None, y=None):
        self.filters_ = list(self.filters) if self.filters else [goal_filter_preset()]
        return self

    def transform(self, X):
        if not hasattr(self, "filters_"):
            self.fit()
        if len(X) and isinstance(X[0], ShotDescriptors):
            E = elementary_matrix(X, self.frame_rate, self.duration_thresholds, self.motion_threshold)
            ids = [d.shot.id for d in X]
        else:
            E = np.asarray(X, dtype=bool).reshape(len(X), len(ELEMENTARY_FILTERS))
            ids = None
        return score_shots(self.filters_, E, ids)


# ---------------------------------------------------------------- selection

@dataclass(frozen=True)
class SummaryEntry:
    shot: Shot
    filter: str
    local_score: float
    global_score: float
    rank: int  # 1 = highest global score among selected shots


@dataclass(frozen=True)
class Allocation:
    filter: str
    percentage: float
    budget: float  # seconds after redistribution
    claimed: float  # seconds actually selected


@dataclass
class Summary:
    frame_rate: Fraction
    target_duration: float
    entries: list
    allocations: list

    @property
    def duration(self) -> float:
        return float(sum(e.shot.duration(self.frame_rate) for e in self.entries))

    def __eq__(self, other):
        return (
            isinstance(other, Summary)
            and Fraction(self.frame_rate) == Fraction(other.frame_rate)
            and self.target_duration == other.target_duration
            and self.entries == other.entries
            and self.allocations == other.allocations
        )


def select_shots(table: ScoreTable, shots, total_duration, allocations, frame_rate=25) -> Summary:
    """Spend ``allocations`` (filter name -> percent) of ``total_duration`` seconds.

    Filters are visited in declaration order.  Each claims its unclaimed
    positive-score shots best-first (local score, then global score, then
    earlier shot) while the running total of claimed time is below the
    running total of budgets, so one filter's overshoot is absorbed by the
    next instead of accumulating.  A filter that runs out of candidates gives
    its unmet budget back.  In each later round the returned pool is split
    equally among filters that still have candidates and claimed one shot at a
    time by the filter furthest below its budget, until the pool is empty or
    every filter is dry.
    """
    shots = list(shots)
    if not shots:
        raise ValueError("cannot summarize an empty shot list")
    if len(shots) != len(table.local):
        raise ValueError(f"score table has {len(table.local)} rows for {len(shots)} shots")
    allocations = list(allocations.items()) if isinstance(allocations, dict) else list(allocations)
    if not total_duration > 0:
        raise ValueError("total_duration must be positive")
    pcts = [float(p) for _, p in allocations]
    if any(p < 0 for p in pcts) or abs(math.fsum(pcts) - 100.0) > 1e-9:
        raise ValueError(f"allocation percentages must be non-negative and sum to 100, got {math.fsum(pcts)}")
    col = {name: i for i, name in enumerate(table.filters)}
    for name, _ in allocations:
        if name not in col:
            raise ValueError(f"allocation names unknown advanced filter {name!r}")

    fr = Fraction(frame_rate)
    dur = [float(s.duration(fr)) for s in shots]
    G = table.global_
    ranked = []
    for name, _ in allocations:
        L = table.local[:, col[name]]
        ranked.append(sorted((i for i in range(len(shots)) if L[i] > 0), key=lambda i: (-L[i], -G[i], i)))

    active = [j for j, p in enumerate(pcts) if p > 0]
    budget = [p / 100.0 * total_duration for p in pcts]
    claimed = [0.0] * len(pcts)
    owner, ptr, dry = {}, [0] * len(pcts), set()
    # one running account across all rounds: claiming stops as soon as the
    # claimed total reaches the budget handed out so far
    acct = {"budget": 0.0, "claimed": 0.0}

    def next_candidate(j):
        cands = ranked[j]
        while ptr[j] < len(cands) and cands[ptr[j]] in owner:
            ptr[j] += 1
        return cands[ptr[j]] if ptr[j] < len(cands) else None

    def visit(j, amount):
        """Add ``amount`` to filter ``j`` and claim; return budget it could not use."""
        budget[j] += amount
        acct["budget"] += amount
        while acct["claimed"] < acct["budget"] and claimed[j] < budget[j]:
            i = next_candidate(j)
            if i is None:
                dry.add(j)
                short = min(acct["budget"] - acct["claimed"], budget[j] - claimed[j])
                short = max(short, 0.0)
                budget[j] -= short
                acct["budget"] -= short
                return short
            owner[i] = j
            claimed[j] += dur[i]
            acct["claimed"] += dur[i]
        return 0.0

    # first round: budgets arrive one filter at a time, so a filter's
    # overshoot shortens the next filter's claim instead of accumulating
    shares = {j: budget[j] for j in active}
    budget = [0.0] * len(pcts)
    pool = math.fsum(visit(j, amount) for j, amount in shares.items())
    # later rounds: freed budget is split equally among filters that still
    # have candidates, then claimed one shot at a time by whichever of them
    # is furthest below its budget
    for _ in range(len(pcts)):
        recipients = [j for j in active if j not in dry]
        if pool <= 0 or not recipients:
            break
        acct["budget"] += pool
        for j in recipients:
            budget[j] += pool / len(recipients)
        pool = 0.0
        while acct["claimed"] < acct["budget"]:
            open_ = [j for j in recipients if j not in dry and claimed[j] < budget[j]]
            if not open_:
                break
            j = max(open_, key=lambda k: (budget[k] - claimed[k], -k))
            i = next_candidate(j)
            if i is None:
                dry.add(j)
                short = max(min(acct["budget"] - acct["claimed"], budget[j] - claimed[j]), 0.0)
                budget[j] -= short
                acct["budget"] -= short
                pool += short
                continue
            owner[i] = j
            claimed[j] += dur[i]
            acct["claimed"] += dur[i]

    chosen = sorted(owner)
    by_score = sorted(chosen, key=lambda i: (-G[i], i))
    rank = {i: r + 1 for r, i in enumerate(by_score)}
    entries = []
    for i in chosen:
        name = allocations[owner[i]][0]
        entries.append(SummaryEntry(shots[i], name, float(table.local[i, col[name]]), float(G[i]), rank[i]))
    allocs = [Allocation(name, pcts[j], float(budget[j]), float(claimed[j])) for j, (name, _) in enumerate(allocations)]
    return Summary(fr, float(total_duration), entries, allocs)


class ShotSelector(BaseEstimator):
    def __init__(self, total_duration=180.0, allocations=None, frame_rate=25):
        self.total_duration = total_duration
        self.allocations = allocations
        self.frame_rate = frame_rate

    def fit(self, table: ScoreTable, shots):
        alloc = self.allocations or {name: 100.0 / len(table.filters) for name in table.filters}
        self.summary_ = select_shots(table, shots, self.total_duration, alloc, self.frame_rate)
        return self

    def predict(self, table=None, shots=None):
        if table is not None:
            self.fit(table, shots)
        return [e.shot.id for e in self.summary_.entries]
