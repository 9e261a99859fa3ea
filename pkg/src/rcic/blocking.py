"""Impression-count influence block and its concave tangent envelope.

A user who saw C protector posts before reaching the rumor is blocked with
probability f(C) = 1/(1+exp(alpha - beta*C)) when C > 0, and 0 when C = 0:
unseen protectors block nobody, so the curve has a jump at zero.  The jump
makes the set objective non-submodular.  The envelope replaces f on each walk
by its concave majorant anchored at that walk's current count: a tangent line
from the anchor up to the tangency point, the logistic beyond.  The envelope
is submodular in the added set, upper-bounds the true objective, and agrees
with it exactly at the anchor, which is what the bound-based solvers rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_BISECT_TOL = 1e-9
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class LogisticParams:
    """Steepness beta and midpoint-controlling alpha; inflection at alpha/beta."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")

    @property
    def inflection(self) -> float:
        return self.alpha / self.beta


def _logistic(params: LogisticParams, t: float) -> float:
    return 1.0 / (1.0 + math.exp(params.alpha - params.beta * t))


def logistic_slope(params: LogisticParams, t: float) -> float:
    v = _logistic(params, t)
    return params.beta * v * (1.0 - v)


def logistic_block(params: LogisticParams, C: int) -> float:
    """Block probability at impression count C; 0 at C=0 by convention."""
    if C < 0:
        raise ValueError(f"impression count must be >= 0, got {C}")
    if C == 0:
        return 0.0
    return _logistic(params, C)


def impression_count(profile, P) -> int:
    """|prefix ∩ P| for one walk; meaningful only when the walk hit."""
    return len(profile.prefix & frozenset(P))


@dataclass(frozen=True)
class EnvelopeAnchor:
    """Tangent construction for one anchor count c0.

    The line through (c0, y0) with tangent_slope touches the logistic at
    tangent_c; the envelope follows the line on [c0, tangent_c] and the
    logistic beyond.  When c0 is already past the inflection the logistic is
    concave onward and tangent_c collapses to c0.
    """

    c0: float
    y0: float
    tangent_c: float
    tangent_slope: float


def tangent_point(params: LogisticParams, c0: float, y0: float) -> EnvelopeAnchor:
    """Solve (f(t) - y0)/(t - c0) = f'(t) for the tangency point t >= c0.

    Bracketed bisection on [inflection, inflection + 60/beta] to absolute
    tolerance 1e-9.  Anchors at or past the inflection need no line segment.
    An anchor (0, 0) with alpha <= 2 has no tangent: the chord slope from the
    origin exceeds every derivative, and the solve reports failure.
    """
    if c0 < 0:
        raise ValueError(f"anchor count must be >= 0, got {c0}")
    if c0 >= params.inflection:
        return EnvelopeAnchor(c0, y0, c0, logistic_slope(params, c0))

    def slope_gap(t: float) -> float:
        return (_logistic(params, t) - y0) / (t - c0) - logistic_slope(params, t)

    lo = params.inflection
    hi = params.inflection + 60.0 / params.beta
    if not (slope_gap(lo) < 0.0 < slope_gap(hi)):
        raise ArithmeticError(
            f"no tangent bracket for anchor ({c0}, {y0}) with alpha={params.alpha}, "
            f"beta={params.beta}; the envelope construction needs alpha > 2 "
            "for anchors at count 0")
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if slope_gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < _BISECT_TOL:
            break
    else:
        raise ArithmeticError("tangent bisection did not converge")
    t = 0.5 * (lo + hi)
    # chord slope through the converged point; keeps the line on the curve at t
    slope = (_logistic(params, t) - y0) / (t - c0)
    return EnvelopeAnchor(c0, y0, t, slope)


def anchor_for(params: LogisticParams, c0: int) -> EnvelopeAnchor:
    """Anchor with y0 per the block conventions: 0 at c0=0, f(c0) otherwise."""
    y0 = 0.0 if c0 == 0 else _logistic(params, c0)
    return tangent_point(params, c0, y0)


def envelope_value(anchor: EnvelopeAnchor, params: LogisticParams, c: float) -> float:
    """Envelope at count c >= anchor.c0: anchor value, line segment, or logistic."""
    if c < anchor.c0:
        raise ValueError(f"count {c} below anchor {anchor.c0}; envelope undefined")
    if c == anchor.c0:
        return anchor.y0
    if c >= anchor.tangent_c:
        return _logistic(params, c)
    return anchor.y0 + anchor.tangent_slope * (c - anchor.c0)


class EnvelopeTable:
    """Lookup tables over integer counts 0..max_count.

    f_table[c] is the block value (0 at c=0) and gain_table[c] is f(c+1)-f(c).
    Envelope rows are built on first use per anchor count c0: env_row(c0)[c]
    is the envelope anchored at c0 at count c (NaN below the anchor), and
    env_gain_row(c0) its unit gains.  Counts never exceed the longest hit-walk
    prefix, so every table stays tiny (max_count <= T + 1).  Lazy rows matter:
    anchors at count 0 have no tangent when alpha <= 2, and plain objective
    evaluation must still work there.
    """

    def __init__(self, params: LogisticParams, max_count: int):
        if max_count < 0:
            raise ValueError(f"max_count must be >= 0, got {max_count}")
        self.params = params
        self.max_count = max_count
        self.f_table = np.zeros(max_count + 1, dtype=np.float64)
        for c in range(1, max_count + 1):
            self.f_table[c] = _logistic(params, c)
        self.gain_table = np.diff(self.f_table)
        self._anchors: dict[int, EnvelopeAnchor] = {}
        self._env_rows: dict[int, np.ndarray] = {}
        self._env_gain_rows: dict[int, np.ndarray] = {}

    def anchor(self, c0: int) -> EnvelopeAnchor:
        if c0 not in self._anchors:
            self._anchors[c0] = anchor_for(self.params, c0)
        return self._anchors[c0]

    def env_row(self, c0: int) -> np.ndarray:
        if c0 not in self._env_rows:
            anchor = self.anchor(c0)
            row = np.full(self.max_count + 1, np.nan, dtype=np.float64)
            for c in range(c0, self.max_count + 1):
                row[c] = envelope_value(anchor, self.params, c)
            self._env_rows[c0] = row
        return self._env_rows[c0]

    def env_gain_row(self, c0: int) -> np.ndarray:
        if c0 not in self._env_gain_rows:
            self._env_gain_rows[c0] = np.diff(self.env_row(c0))
        return self._env_gain_rows[c0]

    def block(self, counts: np.ndarray) -> np.ndarray:
        return self.f_table[counts]

    def envelope(self, anchor_counts: np.ndarray, counts: np.ndarray) -> np.ndarray:
        out = np.empty(counts.shape, dtype=np.float64)
        for c0 in np.unique(anchor_counts):
            sel = anchor_counts == c0
            out[sel] = self.env_row(int(c0))[counts[sel]]
        return out

    def envelope_gains(self, anchor_counts: np.ndarray, counts: np.ndarray) -> np.ndarray:
        """Unit envelope gain at each (anchor, current count) pair."""
        out = np.empty(counts.shape, dtype=np.float64)
        for c0 in np.unique(anchor_counts):
            sel = anchor_counts == c0
            out[sel] = self.env_gain_row(int(c0))[counts[sel]]
        return out


def _positions(index, nodes) -> list[int]:
    return [index.position(v) for v in nodes]


def estimate_objective(store, params: LogisticParams, P) -> float:
    """Sampled objective B(P|R): weighted block value over all hit walks."""
    index = store.index
    _positions(index, P)  # validates membership
    counts = index.counts_for(P)
    table = EnvelopeTable(params, index.max_count)
    return float(np.dot(index.walk_weights, table.block(counts)))


def estimate_envelope_objective(store, params: LogisticParams, anchor_set, P) -> float:
    """Envelope objective with per-walk anchors fixed by anchor_set; P ⊇ anchor_set."""
    anchor_set = frozenset(anchor_set)
    P = frozenset(P)
    if not P >= anchor_set:
        raise ValueError("P must contain the anchor set")
    index = store.index
    _positions(index, P)
    anchors = index.counts_for(anchor_set)
    counts = anchors + index.counts_for(P - anchor_set)
    table = EnvelopeTable(params, index.max_count)
    return float(np.dot(index.walk_weights, table.envelope(anchors, counts)))


def block_degree(store) -> dict[int, int]:
    """Per non-rumor node, the number of hit walks whose prefix contains it."""
    index = store.index
    per_cand = np.diff(index.indptr)
    return {int(v): int(d) for v, d in zip(index.candidates, per_cand)}


def blocking_percentage(store, params: LogisticParams, P) -> float:
    """B(P|R) over the expected number of users the rumor reaches, in [0, 1)."""
    mass = store.index.influenced_mass
    if mass <= 0.0:
        raise ValueError("no walk reaches the rumor set within T; "
                         "blocking percentage is undefined")
    return estimate_objective(store, params, P) / mass
