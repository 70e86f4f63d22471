"""Closed race tracks: geometry queries and procedural generation.

A track is a closed centerline polyline with a half-width per point and
cumulative arclength. Generation draws jittered control points around a
circle, fits a periodic cubic spline, resamples it equidistantly and
rejects candidates that are too sharp or self-intersecting.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

TRACK_FORMAT_VERSION = 1

RADIUS_CAP = 1000.0  # returned for straight (degenerate-circle) segments


class TrackError(ValueError):
    pass


def curve_radius(p1, p2, p3, cap: float = RADIUS_CAP) -> float:
    """Circumscribed-circle radius through three points.

    Nearly collinear triples (including noisy ones) return ``cap`` instead
    of blowing up.
    """
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    p3 = np.asarray(p3, dtype=np.float64)
    a = np.linalg.norm(p2 - p3)
    b = np.linalg.norm(p1 - p3)
    c = np.linalg.norm(p1 - p2)
    cross = (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p2[1] - p1[1]) * (p3[0] - p1[0])
    area2 = abs(cross)
    if area2 < 1e-9 * max(a * b, 1e-12):
        return cap
    r = a * b * c / (2.0 * area2)
    return min(r, cap)


class Track:
    """Closed centerline with per-point half-width and arclength index."""

    def __init__(self, points, half_width, seed: int | None = None):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 8:
            raise TrackError("centerline needs at least 8 2-D points")
        # store unique points; the loop closes back to points[0]
        if np.allclose(pts[0], pts[-1]):
            pts = pts[:-1]
        hw = np.asarray(half_width, dtype=np.float64)
        if hw.ndim == 0:
            hw = np.full(pts.shape[0], float(hw))
        if hw.shape[0] != pts.shape[0] or np.any(hw <= 0):
            raise TrackError("need one positive half-width per point")
        self.points = pts
        self.half_width = hw
        self.seed = seed
        seg = np.diff(np.vstack([pts, pts[:1]]), axis=0)
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(seg_len <= 0):
            raise TrackError("degenerate (zero-length) centerline segment")
        self.seg_dir = seg / seg_len[:, None]
        self.seg_len = seg_len
        self.cum_s = np.concatenate([[0.0], np.cumsum(seg_len)])
        self.length = float(self.cum_s[-1])
        self._xs = np.concatenate([pts[:, 0], pts[:1, 0]])
        self._ys = np.concatenate([pts[:, 1], pts[:1, 1]])
        self._hw = np.concatenate([hw, hw[:1]])

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def wrap(self, s):
        return np.mod(s, self.length)

    def sample(self, s):
        """Centerline point(s) at arclength s (wraps around the loop)."""
        s = self.wrap(np.asarray(s, dtype=np.float64))
        x = np.interp(s, self.cum_s, self._xs)
        y = np.interp(s, self.cum_s, self._ys)
        return np.stack([x, y], axis=-1)

    def width_at(self, s):
        s = self.wrap(np.asarray(s, dtype=np.float64))
        return np.interp(s, self.cum_s, self._hw)

    def tangent(self, s):
        """Unit tangent of the segment containing arclength s."""
        s = self.wrap(s)
        i = min(int(np.searchsorted(self.cum_s, s, side="right")) - 1,
                self.n_points - 1)
        return self.seg_dir[i]

    def nearest(self, p, s_hint: float | None = None, window: float = 30.0):
        """Project a point onto the centerline.

        Returns (s, distance, signed_lateral, tangent). ``signed_lateral``
        is positive when p lies to the left of the travel direction. With a
        hint, only segments within ``window`` meters of arclength are
        searched; without one the whole loop is scanned.
        """
        p = np.asarray(p, dtype=np.float64)
        n = self.n_points
        if s_hint is None:
            idx = np.arange(n)
        else:
            i0 = int(np.searchsorted(self.cum_s, self.wrap(s_hint), side="right")) - 1
            k = max(2, int(window / max(self.seg_len.min(), 1e-6)))
            idx = np.arange(i0 - k, i0 + k + 1) % n
        a = self.points[idx]
        d = self.seg_dir[idx]
        ln = self.seg_len[idx]
        rel = p - a
        t = np.clip(rel[:, 0] * d[:, 0] + rel[:, 1] * d[:, 1], 0.0, ln)
        proj = a + t[:, None] * d
        dist2 = np.sum((p - proj) ** 2, axis=1)
        j = int(np.argmin(dist2))
        i = idx[j]
        s = self.wrap(self.cum_s[i] + t[j])
        tan = self.seg_dir[i]
        off = p - proj[j]
        lateral = tan[0] * off[1] - tan[1] * off[0]
        return float(s), float(math.sqrt(dist2[j])), float(lateral), tan

    def is_inside(self, p, s_hint: float | None = None) -> bool:
        s, dist, _, _ = self.nearest(p, s_hint)
        return dist <= float(self.width_at(s))

    def min_curve_radius(self, spacing: float = 3.0) -> float:
        """Smallest circumradius over centerline triples ``spacing`` apart."""
        step = max(1, int(round(spacing / (self.length / self.n_points))))
        r = RADIUS_CAP
        pts = self.points
        n = self.n_points
        for i in range(n):
            r = min(r, curve_radius(pts[i], pts[(i + step) % n], pts[(i + 2 * step) % n]))
        return r

    def self_clearance_ok(self, clearance: float | None = None,
                          arc_gap: float = 20.0) -> bool:
        """No two centerline points closer than the track width unless they
        are neighbors along the loop."""
        if clearance is None:
            clearance = 2.2 * float(self.half_width.max())
        tree = cKDTree(self.points)
        pairs = tree.query_pairs(clearance, output_type="ndarray")
        if pairs.size == 0:
            return True
        s = self.cum_s[:-1]
        ds = np.abs(s[pairs[:, 0]] - s[pairs[:, 1]])
        ds = np.minimum(ds, self.length - ds)
        return not np.any(ds > arc_gap)

    def validate(self, min_radius: float = 0.0) -> None:
        if not np.all(np.isfinite(self.points)):
            raise TrackError("non-finite centerline")
        if not np.all(np.diff(self.cum_s) > 0):
            raise TrackError("arclength not strictly increasing")
        if min_radius > 0 and self.min_curve_radius() < min_radius:
            raise TrackError("curvature bound violated")
        if not self.self_clearance_ok():
            raise TrackError("track self-intersects at its width")

    def to_dict(self) -> dict:
        return {
            "version": TRACK_FORMAT_VERSION,
            "seed": self.seed,
            "points": self.points.tolist(),
            "half_width": self.half_width.tolist(),
        }

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f)

    @classmethod
    def from_dict(cls, d: dict) -> "Track":
        if d.get("version") != TRACK_FORMAT_VERSION:
            raise TrackError(f"unsupported track format version {d.get('version')}")
        return cls(d["points"], d["half_width"], seed=d.get("seed"))

    @classmethod
    def load(cls, path) -> "Track":
        with open(path) as f:
            return cls.from_dict(json.load(f))


@dataclass
class TrackSpec:
    """Knobs of the procedural generator."""

    base_radius: float = 40.0
    n_control: int = 16
    harmonic_amps: tuple = (0.30, 0.20, 0.12)
    half_width: float = 4.0
    spacing: float = 1.0
    min_curve_radius: float = 12.0
    max_attempts: int = 200


def _spline_loop(ctrl: np.ndarray, spacing: float) -> np.ndarray:
    closed = np.vstack([ctrl, ctrl[:1]])
    chord = np.hypot(*np.diff(closed, axis=0).T)
    t = np.concatenate([[0.0], np.cumsum(chord)])
    sx = CubicSpline(t, closed[:, 0], bc_type="periodic")
    sy = CubicSpline(t, closed[:, 1], bc_type="periodic")
    dense_t = np.linspace(0.0, t[-1], 2048, endpoint=False)
    dense = np.stack([sx(dense_t), sy(dense_t)], axis=1)
    seg = np.hypot(*np.diff(np.vstack([dense, dense[:1]]), axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    n = max(16, int(round(total / spacing)))
    s_eq = np.linspace(0.0, total, n, endpoint=False)
    x = np.interp(s_eq, cum, np.concatenate([dense[:, 0], dense[:1, 0]]))
    y = np.interp(s_eq, cum, np.concatenate([dense[:, 1], dense[:1, 1]]))
    return np.stack([x, y], axis=1)


def generate_track(seed: int, spec: TrackSpec | None = None) -> Track:
    """Deterministic procedural track for a seed.

    Rejection-samples until the curvature bound and the self-clearance
    check both pass; raises TrackError if no valid candidate shows up
    within the attempt budget.
    """
    spec = spec or TrackSpec()
    rng = np.random.default_rng(np.random.SeedSequence([0x7261CE, int(seed)]))
    k = spec.n_control
    theta = np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)
    for _ in range(spec.max_attempts):
        # low-harmonic radius profile: big smooth lobes instead of kinks
        r = np.ones(k)
        for h, amp_max in enumerate(spec.harmonic_amps, start=1):
            amp = rng.uniform(0.3 * amp_max, amp_max)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            r += amp * np.cos(h * theta + phase)
        radii = spec.base_radius * r
        ctrl = np.stack([radii * np.cos(theta), radii * np.sin(theta)], axis=1)
        pts = _spline_loop(ctrl, spec.spacing)
        track = Track(pts, spec.half_width, seed=int(seed))
        try:
            track.validate(min_radius=spec.min_curve_radius)
        except TrackError:
            continue
        return track
    raise TrackError(f"no valid track for seed {seed} "
                     f"within {spec.max_attempts} attempts")


def curve_radius_ahead(track: Track, s: float,
                       offsets=(4.0, 12.0, 20.0)) -> float:
    """Curve radius of the stretch just ahead of arclength ``s``.

    Fitted as the circumscribed circle through three centerline samples at
    the given lookahead offsets.
    """
    p1 = track.sample(s + offsets[0])
    p2 = track.sample(s + offsets[1])
    p3 = track.sample(s + offsets[2])
    return curve_radius(p1, p2, p3)
