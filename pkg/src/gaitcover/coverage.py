"""Goal sets, word enumeration over a motion library, and the coverage cost.

The coverage cost of a motion set is the weighted average of each goal's
distance to the nearest achievable motion; the depth-k variant searches all
words (compositions) of up to k letters from the library. Enumeration and
cost evaluation are pure functions; enumeration order is canonical
(length-major, then lexicographic by letter index), which also fixes the
tie-break for equally-near words.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import se2
from .errors import InvalidInputError, WordLimitError
from .se2 import Pose2

# Enumerating more words than this raises unless the caller lifts the cap.
DEFAULT_WORD_CAP = 10_000_000

INVERSE_SUFFIX = "'"


@dataclass(frozen=True)
class GoalSet:
    """Weighted coverage points on SE(2).

    Weights are stored normalized to sum 1, so the cost reads as the average
    normed distance to a coverage point.
    """

    goals: tuple[Pose2, ...]
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        goals = tuple(self.goals)
        if not goals:
            raise InvalidInputError("goal set must contain at least one goal")
        weights = tuple(float(w) for w in self.weights) or tuple(1.0 for _ in goals)
        if len(weights) != len(goals):
            raise InvalidInputError(
                f"{len(weights)} weights for {len(goals)} goals"
            )
        if any(w <= 0.0 for w in weights):
            raise InvalidInputError("all goal weights must be positive")
        total = sum(weights)
        object.__setattr__(self, "goals", goals)
        object.__setattr__(self, "weights", tuple(w / total for w in weights))

    def __len__(self) -> int:
        return len(self.goals)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([g.as_array() for g in self.goals]),
            np.array(self.weights),
        )

    def as_json(self) -> dict:
        return {
            "goals": [g.as_json() for g in self.goals],
            "weights": list(self.weights),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GoalSet":
        return cls(
            goals=tuple(Pose2.from_array(g) for g in data["goals"]),
            weights=tuple(data.get("weights", ())),
        )


def make_uniform_grid(x_vals, y_vals, theta_vals, weight: float = 1.0) -> GoalSet:
    """Cartesian product of coordinate values with equal weights."""
    if not (len(x_vals) and len(y_vals) and len(theta_vals)):
        raise InvalidInputError("grid value lists must be non-empty")
    goals = tuple(
        Pose2(x, y, th)
        for x, y, th in itertools.product(x_vals, y_vals, theta_vals)
    )
    return GoalSet(goals, tuple(weight for _ in goals))


@dataclass(frozen=True)
class Library:
    """Achievable per-cycle motions (letters) a planner may compose.

    With `include_inverses` the effective alphabet is the letters plus their
    group inverses (labels suffixed with an apostrophe), which makes
    commutator words expressible. Only enable it when each letter's motion
    is actually reversible on the underlying system.
    """

    letters: tuple[Pose2, ...]
    labels: tuple[str, ...] = ()
    include_inverses: bool = True

    def __post_init__(self):
        letters = tuple(self.letters)
        labels = tuple(self.labels) or tuple(f"M{j}" for j in range(len(letters)))
        if len(labels) != len(letters):
            raise InvalidInputError(
                f"{len(labels)} labels for {len(letters)} letters"
            )
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "labels", labels)

    def alphabet(self) -> tuple[np.ndarray, tuple[str, ...]]:
        """Effective letters as an (m, 3) array plus their labels."""
        base = np.array([g.as_array() for g in self.letters]).reshape(-1, 3)
        if self.include_inverses and len(self.letters):
            inv = se2.inverse_many(base)
            labels = self.labels + tuple(s + INVERSE_SUFFIX for s in self.labels)
            return np.concatenate([base, inv], axis=0), labels
        return base, self.labels


@dataclass(frozen=True)
class Word:
    """A composition of alphabet letters; the empty word is the identity."""

    letter_indices: tuple[int, ...]
    net_motion: Pose2

    def __len__(self) -> int:
        return len(self.letter_indices)


@dataclass(frozen=True)
class GoalMatch:
    goal: Pose2
    weight: float
    distance: float
    motion_index: int
    word: Word | None = None
    label: str | None = None


@dataclass(frozen=True)
class CoverageReport:
    """Cost h plus the per-goal best match under the canonical tie-break."""

    h: float
    matches: tuple[GoalMatch, ...]
    k: int | None = None
    alphabet_size: int | None = None

    def as_json(self) -> dict:
        return {
            "h": self.h,
            "k": self.k,
            "alphabet_size": self.alphabet_size,
            "matches": [
                {
                    "goal": m.goal.as_json(),
                    "weight": m.weight,
                    "distance": m.distance,
                    "word": list(m.word.letter_indices) if m.word else None,
                    "label": m.label,
                }
                for m in self.matches
            ],
        }


def word_count(alphabet_size: int, k: int) -> int:
    """Number of words of length 0..k inclusive."""
    if alphabet_size <= 1:
        return k + 1 if alphabet_size == 1 else 1
    return (alphabet_size ** (k + 1) - 1) // (alphabet_size - 1)


def _check_budget(alphabet_size: int, k: int, max_words) -> int:
    total = word_count(alphabet_size, k)
    if max_words is None:
        if total > DEFAULT_WORD_CAP:
            warnings.warn(
                f"enumerating {total} words (alphabet {alphabet_size}, depth {k}); "
                "this will be slow",
                RuntimeWarning,
                stacklevel=3,
            )
    elif total > max_words:
        raise WordLimitError(
            f"{total} words (alphabet {alphabet_size}, depth {k}) exceeds the cap "
            f"of {max_words}; raise max_words or pass max_words=None to proceed"
        )
    return total


@lru_cache(maxsize=32)
def word_sequences(alphabet_size: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All letter-index sequences of length 0..k in canonical order."""
    out = [()]
    level = [()]
    for _ in range(k):
        level = [seq + (j,) for seq in level for j in range(alphabet_size)]
        out.extend(level)
    return tuple(out)


def net_motions(letters: np.ndarray, k: int) -> np.ndarray:
    """Net motion of every word of length 0..k, in canonical order.

    `letters` is the effective (m, 3) alphabet; the output row order matches
    `word_sequences(m, k)`.
    """
    letters = np.asarray(letters, dtype=float).reshape(-1, 3)
    m = letters.shape[0]
    levels = [np.zeros((1, 3))]
    for _ in range(k):
        prev = levels[-1]
        expanded = np.repeat(prev, m, axis=0)
        tiled = np.tile(letters, (prev.shape[0], 1))
        levels.append(se2.compose_many(expanded, tiled))
    return np.concatenate(levels, axis=0)


def dedupe_motions(nets: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Indices of first occurrences when motions are quantized to `tol`.

    Duplicates never change the cost, only enumeration time; keeping first
    occurrences preserves the canonical tie-break.
    """
    keys = np.round(np.asarray(nets) / tol).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return np.sort(idx)


def goal_min_distances(
    nets: np.ndarray,
    goals_arr: np.ndarray,
    rot_weight: float = se2.DEFAULT_ROT_WEIGHT,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-goal (min distance, argmin motion row); first minimum wins ties."""
    inv_goals = se2.inverse_many(goals_arr)
    dists = se2.eta_many(
        se2.log_many(se2.compose_many(nets[:, None, :], inv_goals[None, :, :])),
        rot_weight,
    )
    best = np.argmin(dists, axis=0)
    return dists[best, np.arange(dists.shape[1])], best


def coverage_cost(
    motions,
    goals: GoalSet,
    rot_weight: float = se2.DEFAULT_ROT_WEIGHT,
) -> CoverageReport:
    """Weighted average distance from each goal to its nearest motion."""
    motion_list = list(motions)
    if not motion_list:
        raise InvalidInputError("coverage cost needs at least one motion")
    nets = np.array([g.as_array() for g in motion_list])
    goals_arr, weights = goals.as_arrays()
    dmin, argmin = goal_min_distances(nets, goals_arr, rot_weight)
    h = float(np.dot(weights, dmin))
    matches = tuple(
        GoalMatch(
            goal=goals.goals[i],
            weight=float(weights[i]),
            distance=float(dmin[i]),
            motion_index=int(argmin[i]),
        )
        for i in range(len(goals))
    )
    return CoverageReport(h=h, matches=matches)


def word_label(labels: tuple[str, ...], sequence: tuple[int, ...]) -> str:
    return ".".join(labels[j] for j in sequence)


def enumerate_words(lib: Library, k: int, max_words=DEFAULT_WORD_CAP) -> list[Word]:
    """All words of length 0..k over the effective alphabet.

    Deterministic order: length-major, then lexicographic by letter indices.
    The empty word (identity motion) is always included.
    """
    if k < 0:
        raise InvalidInputError(f"word depth must be >= 0, got {k}")
    letters, _ = lib.alphabet()
    _check_budget(letters.shape[0], k, max_words)
    nets = net_motions(letters, k)
    seqs = word_sequences(letters.shape[0], k)
    return [
        Word(seq, Pose2.from_array(nets[i])) for i, seq in enumerate(seqs)
    ]


def coverage_cost_k(
    lib: Library,
    k: int,
    goals: GoalSet,
    rot_weight: float = se2.DEFAULT_ROT_WEIGHT,
    max_words=DEFAULT_WORD_CAP,
    dedupe: bool = False,
) -> CoverageReport:
    """Coverage cost of all words of k or fewer letters from the library."""
    if k < 0:
        raise InvalidInputError(f"word depth must be >= 0, got {k}")
    letters, labels = lib.alphabet()
    m = letters.shape[0]
    _check_budget(m, k, max_words)
    nets = net_motions(letters, k)
    seqs = word_sequences(m, k)
    keep = np.arange(nets.shape[0])
    if dedupe:
        keep = dedupe_motions(nets)
        nets = nets[keep]
    goals_arr, weights = goals.as_arrays()
    dmin, argmin = goal_min_distances(nets, goals_arr, rot_weight)
    h = float(np.dot(weights, dmin))
    matches = []
    for i in range(len(goals)):
        row = int(keep[argmin[i]])
        seq = seqs[row]
        matches.append(
            GoalMatch(
                goal=goals.goals[i],
                weight=float(weights[i]),
                distance=float(dmin[i]),
                motion_index=row,
                word=Word(seq, Pose2.from_array(nets[argmin[i]])),
                label=word_label(labels, seq),
            )
        )
    return CoverageReport(
        h=h, matches=tuple(matches), k=k, alphabet_size=m
    )


def reachable_set(
    lib: Library, k: int, max_words=DEFAULT_WORD_CAP
) -> list[tuple[int, str, Pose2]]:
    """(word length, word label, net motion) for every word of length <= k.

    The rows back the reachable-poses scatter plots; canonical order.
    """
    letters, labels = lib.alphabet()
    _check_budget(letters.shape[0], k, max_words)
    nets = net_motions(letters, k)
    seqs = word_sequences(letters.shape[0], k)
    return [
        (len(seq), word_label(labels, seq), Pose2.from_array(nets[i]))
        for i, seq in enumerate(seqs)
    ]
