"""Pairwise-comparison analysis of blur-radius preference studies.

Bradley-Terry scores are fitted with the minorization-maximization fixed
point ``q_i <- W_i / sum_j n_ij / (q_i + q_j)`` followed by geometric-mean
normalization every iteration. Pair similarity is a binomial likelihood
ratio test against ``p = 1/2`` referenced to chi-square with one degree of
freedom at the 5% level.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "CHI2_DF1_ALPHA05",
    "STUDY_RADII",
    "DegenerateComparisonError",
    "VoteFormatError",
    "ComparisonMatrix",
    "BtScores",
    "LrtResult",
    "bt_fit",
    "bt_log_likelihood",
    "bt_preference",
    "lrt",
    "lrt_statistic",
    "preferred_radius",
    "select_preferred_radius",
    "find_peaks",
    "ingest_votes",
    "analyze_scene",
]

CHI2_DF1_ALPHA05 = 3.84
STUDY_RADII = (0, 3, 6, 9, 12, 15)


class DegenerateComparisonError(ValueError):
    """A stimulus has no wins (or no comparisons), so its MLE score is zero."""


class VoteFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, eq=False)
class ComparisonMatrix:
    """``wins[i, j]`` counts how often ``stimuli[i]`` was preferred over ``stimuli[j]``."""

    stimuli: tuple[int, ...]
    wins: np.ndarray
    scene: str = ""

    def __post_init__(self) -> None:
        w = np.array(self.wins, dtype=np.int64)
        n = len(self.stimuli)
        if n < 2:
            raise ValueError("a comparison matrix needs at least two stimuli")
        if w.shape != (n, n):
            raise ValueError(f"wins must be {n}x{n}, got {w.shape}")
        if np.any(np.diag(w) != 0):
            raise ValueError("wins diagonal must be zero")
        if np.any(w < 0):
            raise ValueError("win counts must be non-negative")
        w.flags.writeable = False
        object.__setattr__(self, "stimuli", tuple(self.stimuli))
        object.__setattr__(self, "wins", w)

    def index(self, radius: int) -> int:
        try:
            return self.stimuli.index(radius)
        except ValueError:
            raise KeyError(f"radius {radius} not among stimuli {self.stimuli}") from None

    def count(self, ri: int, rj: int) -> int:
        return int(self.wins[self.index(ri), self.index(rj)])

    def compared(self, ri: int, rj: int) -> bool:
        return self.count(ri, rj) + self.count(rj, ri) > 0

    @property
    def total(self) -> int:
        return int(self.wins.sum())


@dataclass(frozen=True)
class BtScores:
    q: tuple[float, ...]
    stimuli: tuple[int, ...] = ()
    iterations: int = 0
    converged: bool = False
    log_likelihood_trace: tuple[float, ...] = field(default=(), repr=False)

    def score(self, radius: int) -> float:
        return self.q[self.stimuli.index(radius)]


def bt_log_likelihood(wins: np.ndarray, q: np.ndarray) -> float:
    """Sum over ordered pairs of ``w_ij * log(q_i / (q_i + q_j))``."""
    w = np.asarray(wins, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    i, j = np.nonzero(w)
    return float(np.sum(w[i, j] * (np.log(q[i]) - np.log(q[i] + q[j]))))


def bt_fit(w: ComparisonMatrix, max_iter: int = 10_000, tol: float = 1e-9,
           smoothing: float | None = None, track_likelihood: bool = False) -> BtScores:
    """Fit Bradley-Terry scores, normalized to unit geometric mean.

    ``smoothing`` adds that many pseudo-wins to every off-diagonal directed
    pair (0.5 is a sensible choice). Without it a stimulus that never wins
    raises :class:`DegenerateComparisonError`.
    """
    wins = w.wins.astype(np.float64)
    if smoothing:
        wins = wins + smoothing * (1.0 - np.eye(len(w.stimuli)))
    total_wins = wins.sum(axis=1)
    games = wins + wins.T
    if np.any(total_wins <= 0):
        bad = [w.stimuli[i] for i in np.nonzero(total_wins <= 0)[0]]
        raise DegenerateComparisonError(
            f"scene {w.scene!r}: stimuli {bad} have no wins; enable smoothing to regularize")

    q = np.ones(len(w.stimuli))
    trace = [bt_log_likelihood(wins, q)] if track_likelihood else []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        denom = (games / (q[:, None] + q[None, :])).sum(axis=1)
        new = total_wins / denom
        new = new / np.exp(np.mean(np.log(new)))
        change = np.max(np.abs(new - q) / q)
        q = new
        if track_likelihood:
            trace.append(bt_log_likelihood(wins, q))
        if change < tol:
            converged = True
            break
    return BtScores(tuple(float(v) for v in q), w.stimuli, it, converged, tuple(trace))


def bt_preference(scores: BtScores, i: int, j: int) -> float:
    """Probability that stimulus index ``i`` is preferred over index ``j``."""
    qi, qj = scores.q[i], scores.q[j]
    return qi / (qi + qj)


@dataclass(frozen=True)
class LrtResult:
    lam: float
    threshold: float = CHI2_DF1_ALPHA05

    @property
    def reject_null(self) -> bool:
        return self.lam >= self.threshold


def _xlogy(x: float, y: float) -> float:
    return 0.0 if x == 0 else x * math.log(y)


def lrt_statistic(w_ij: int, w_ji: int) -> float:
    n = w_ij + w_ji
    if n < 1:
        raise ValueError("likelihood ratio test needs at least one comparison")
    p = w_ij / n
    ll_alt = _xlogy(w_ij, p) + _xlogy(w_ji, 1.0 - p)
    ll_null = n * math.log(0.5)
    return max(0.0, -2.0 * (ll_null - ll_alt))


def lrt(w_ij: int, w_ji: int, threshold: float = CHI2_DF1_ALPHA05) -> LrtResult:
    return LrtResult(lrt_statistic(w_ij, w_ji), threshold)


def preferred_radius(peaks: Mapping[int, float], lrt_result: LrtResult, r_hat: int) -> int:
    """Pick between two peak radii given their scores and the test outcome.

    A significant difference keeps the higher-scoring radius. Otherwise the
    radii are treated as equally preferred and the smallest peak above
    ``r_hat`` wins, which removes aliasing at the least blur.
    """
    if len(peaks) != 2:
        raise ValueError(f"expected two distinct peak radii, got {sorted(peaks)}")
    if lrt_result.reject_null:
        return max(peaks, key=lambda r: (peaks[r], -r))
    above = [r for r in peaks if r > r_hat]
    if not above:
        raise ValueError(f"null accepted but no peak in {sorted(peaks)} exceeds r_hat={r_hat}")
    return min(above)


def select_preferred_radius(scores: Mapping[int, float], peaks: tuple[int, int],
                            lambdas: Mapping[tuple[int, int], float], r_hat: int,
                            threshold: float = CHI2_DF1_ALPHA05) -> int:
    """Preferred radius for one scene from peak radii and a table of pair statistics.

    ``lambdas`` maps unordered radius pairs (either key order) to LRT values.
    When the two peaks were never compared directly, a third radius that
    tests as equivalent to the first peak and was compared with the second
    stands in for it.
    """
    r1, r2 = peaks
    if r1 == r2:
        raise ValueError("peak radii must differ")

    def lookup(a: int, b: int) -> float | None:
        if (a, b) in lambdas:
            return lambdas[(a, b)]
        return lambdas.get((b, a))

    lam = lookup(r1, r2)
    if lam is None:
        for first, second in ((r1, r2), (r2, r1)):
            subs = sorted(
                r for r in scores
                if r not in (r1, r2)
                and (eq := lookup(r, first)) is not None and eq < threshold
                and lookup(r, second) is not None
            )
            if subs:
                lam = lookup(subs[0], second)
                break
        if lam is None:
            raise ValueError(f"no direct or substitute comparison between radii {r1} and {r2}")
    return preferred_radius({r1: scores[r1], r2: scores[r2]}, LrtResult(lam, threshold), r_hat)


def find_peaks(scores: BtScores) -> list[int]:
    """Local maxima of the score profile over ascending radius, best first (at most two)."""
    order = sorted(range(len(scores.stimuli)), key=lambda i: scores.stimuli[i])
    q = [scores.q[i] for i in order]
    radii = [scores.stimuli[i] for i in order]
    maxima = []
    for k in range(len(q)):
        left = q[k - 1] if k > 0 else -math.inf
        right = q[k + 1] if k + 1 < len(q) else -math.inf
        if q[k] >= left and q[k] > right:
            maxima.append(k)
    maxima.sort(key=lambda k: (-q[k], radii[k]))
    return [radii[k] for k in maxima[:2]]


def analyze_scene(w: ComparisonMatrix, r_hat: int, smoothing: float | None = None) -> dict:
    """Bradley-Terry fit, LRT on every compared pair and the preferred radius."""
    scores = bt_fit(w, smoothing=smoothing)
    q = dict(zip(w.stimuli, scores.q))
    lambdas = {}
    table = []
    for a in range(len(w.stimuli)):
        for b in range(a + 1, len(w.stimuli)):
            ra, rb = w.stimuli[a], w.stimuli[b]
            wab, wba = int(w.wins[a, b]), int(w.wins[b, a])
            if wab + wba == 0:
                continue
            res = lrt(wab, wba)
            lambdas[(ra, rb)] = res.lam
            table.append({"pair": [ra, rb], "wins": [wab, wba], "lambda": res.lam,
                          "reject_null": res.reject_null})
    peaks = find_peaks(scores)
    if len(peaks) == 1:
        preferred = peaks[0]
    else:
        preferred = select_preferred_radius(q, (peaks[0], peaks[1]), lambdas, r_hat)
    return {
        "scene": w.scene,
        "radii": list(w.stimuli),
        "q": {str(r): v for r, v in q.items()},
        "iterations": scores.iterations,
        "converged": scores.converged,
        "lrt": table,
        "threshold": CHI2_DF1_ALPHA05,
        "peaks": peaks,
        "r_hat": r_hat,
        "preferred_radius": preferred,
    }


_VOTE_FIELDS = ("participant", "scene", "radius_a", "radius_b", "choice")


def ingest_votes(path: str | Path, radii: Iterable[int] = STUDY_RADII) -> list[ComparisonMatrix]:
    """Read ``participant,scene,radius_a,radius_b,choice`` rows into per-scene matrices.

    A header row is optional. Matrices list scenes in first-appearance order
    and only include radii that occur for that scene, ascending.
    """
    allowed = set(radii)
    per_scene: dict[str, dict[tuple[int, int], int]] = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            row = [c.strip() for c in row]
            if lineno == 1 and tuple(c.lower() for c in row) == _VOTE_FIELDS:
                continue
            if len(row) != 5:
                raise VoteFormatError(lineno, f"expected 5 fields, got {len(row)}")
            _, scene, ra, rb, choice = row
            try:
                a, b = int(ra), int(rb)
            except ValueError:
                raise VoteFormatError(lineno, f"radii must be integers, got {ra!r}, {rb!r}") from None
            for r in (a, b):
                if r not in allowed:
                    raise VoteFormatError(lineno, f"unknown radius {r}")
            if a == b:
                raise VoteFormatError(lineno, f"radius compared with itself ({a})")
            choice = choice.lower()
            if choice not in ("a", "b"):
                raise VoteFormatError(lineno, f"choice must be 'a' or 'b', got {choice!r}")
            winner, loser = (a, b) if choice == "a" else (b, a)
            counts = per_scene.setdefault(scene, {})
            counts[(winner, loser)] = counts.get((winner, loser), 0) + 1

    out = []
    for scene, counts in per_scene.items():
        stimuli = tuple(sorted({r for pair in counts for r in pair}))
        idx = {r: k for k, r in enumerate(stimuli)}
        wins = np.zeros((len(stimuli), len(stimuli)), dtype=np.int64)
        for (winner, loser), c in counts.items():
            wins[idx[winner], idx[loser]] = c
        out.append(ComparisonMatrix(stimuli, wins, scene))
    return out

