"""Pulse profiles and schedules for the two controls eps_q(t) and g(t).

A schedule is piecewise constant in its bang-bang limit; smooth schedules
replace every interior level change by an error-function switch of width
`rise` centered on the nominal switching instant. Schedules start and end
on their flat levels (no lead-in ramp from idle).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

CHANNELS = ("eps_q", "g")


def erf_switch(t, t1: float, t2: float, f1: float, f2: float):
    """Smooth switch from level f1 (at t1) to level f2 (at t2).

    f(t) = (f1+f2)/2 + (f2-f1)/2 * erf(4 (t - (t1+t2)/2) / (t2-t1))

    The switch is monotone between f1 and f2 and symmetric around the
    midpoint; at t1 and t2 it misses the terminal levels by the same
    residual |f2-f1| (1 - erf(2))/2.
    """
    if t2 <= t1:
        raise ValueError(f"switch window requires t2 > t1, got [{t1}, {t2}]")
    z = 4.0 / (t2 - t1) * (np.asarray(t, dtype=float) - 0.5 * (t1 + t2))
    return 0.5 * (f1 + f2) + 0.5 * (f2 - f1) * erf(z)


@dataclass(frozen=True)
class PulseSegment:
    """One flat-top control interval.

    `rise` is the width of the erf transition into this segment at `start`
    (0 means an instantaneous bang-bang switch).
    """

    channel: str
    level: float
    start: float
    end: float
    rise: float = 0.0

    def __post_init__(self) -> None:
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if not self.end > self.start:
            raise ValueError("segment must have end > start")
        if self.rise < 0:
            raise ValueError("rise must be non-negative")
        if self.rise > self.end - self.start:
            raise ValueError("segment shorter than its rise time")


class PulseSchedule:
    """Ordered, contiguous segments for both control channels.

    Each channel's segments must tile [0, duration] exactly; both channels
    share the same total duration. Sampling sums erf steps, one per
    interior boundary, so values are continuous for rise > 0 and exactly
    piecewise constant for rise = 0.
    """

    def __init__(self, segments: list[PulseSegment]):
        if not segments:
            raise ValueError("empty schedule")
        by_channel: dict[str, list[PulseSegment]] = {ch: [] for ch in CHANNELS}
        for seg in segments:
            by_channel[seg.channel].append(seg)
        durations = set()
        for ch, segs in by_channel.items():
            if not segs:
                raise ValueError(f"channel {ch!r} has no segments")
            segs.sort(key=lambda s: s.start)
            if segs[0].start != 0.0:
                raise ValueError(f"channel {ch!r} must start at t=0")
            for a, b in zip(segs, segs[1:]):
                if not np.isclose(a.end, b.start, rtol=0.0, atol=1e-12):
                    raise ValueError(
                        f"channel {ch!r} segments must tile contiguously "
                        f"(gap or overlap at t={a.end})"
                    )
            durations.add(round(segs[-1].end, 12))
        if len(durations) != 1:
            raise ValueError("channels must share the same total duration")

        self.segments = by_channel
        self.duration = float(by_channel["eps_q"][-1].end)
        # Per channel: initial level plus (boundary, jump, rise) per interior switch.
        self._steps: dict[str, tuple[float, np.ndarray, np.ndarray, np.ndarray]] = {}
        for ch, segs in by_channel.items():
            bounds = np.array([s.start for s in segs[1:]])
            jumps = np.array(
                [b.level - a.level for a, b in zip(segs, segs[1:])]
            )
            rises = np.array([s.rise for s in segs[1:]])
            self._steps[ch] = (segs[0].level, bounds, jumps, rises)

    def boundaries(self) -> np.ndarray:
        """Union of segment boundaries of both channels, including 0 and T."""
        pts = {0.0, self.duration}
        for segs in self.segments.values():
            pts.update(s.start for s in segs)
        return np.array(sorted(pts))

    def sample(self, t):
        """Control values (eps_q, g) at time(s) t in [0, duration]."""
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12) or np.any(t > self.duration + 1e-12):
            raise ValueError("sample time outside [0, duration]")
        out = []
        for ch in CHANNELS:
            level0, bounds, jumps, rises = self._steps[ch]
            val = np.full_like(t, level0, dtype=float)
            for b, dj, r in zip(bounds, jumps, rises):
                if r > 0:
                    step = 0.5 * (1.0 + erf(4.0 * (t - b) / r))
                else:
                    step = (t >= b).astype(float)
                val = val + dj * step
            out.append(val if t.ndim else float(val))
        return tuple(out)

    def reversed(self) -> "PulseSchedule":
        """Time-mirrored schedule (same levels, reversed order)."""
        segs = []
        T = self.duration
        for ch, chsegs in self.segments.items():
            for i, s in enumerate(chsegs):
                # The transition into the mirrored segment is the one that
                # followed it in forward time.
                nxt = chsegs[i + 1].rise if i + 1 < len(chsegs) else 0.0
                segs.append(
                    PulseSegment(ch, s.level, T - s.end, T - s.start, nxt)
                )
        return PulseSchedule(segs)

    def to_json(self) -> str:
        doc = {
            "duration": self.duration,
            "segments": [
                {
                    "channel": s.channel,
                    "level": s.level,
                    "start": s.start,
                    "end": s.end,
                    "rise": s.rise,
                }
                for segs in self.segments.values()
                for s in segs
            ],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PulseSchedule":
        doc = json.loads(text)
        return cls([PulseSegment(**d) for d in doc["segments"]])


def schedule_from_steps(steps, rise: float = 0.0) -> PulseSchedule:
    """Build a schedule from shared-boundary steps.

    `steps` is a sequence of (eps_q_level, g_level, duration) tuples; both
    channels switch at the same instants. rise = 0 gives the bang-bang
    limit.
    """
    if not steps:
        raise ValueError("empty step list")
    segs = []
    t = 0.0
    for i, (e_lvl, g_lvl, dur) in enumerate(steps):
        if dur <= 0:
            raise ValueError("step durations must be positive")
        r = rise if i > 0 else 0.0
        if r > dur:
            raise ValueError(
                f"step {i} of duration {dur} ns is shorter than the rise time {rise} ns"
            )
        segs.append(PulseSegment("eps_q", float(e_lvl), t, t + dur, r))
        segs.append(PulseSegment("g", float(g_lvl), t, t + dur, r))
        t += dur
    return PulseSchedule(segs)


def build_smooth_schedule(steps, rise: float) -> PulseSchedule:
    """Smooth (erf-switched) schedule from bang-bang steps.

    Every interior level change becomes an erf transition of width `rise`
    centered on the nominal switching instant; flat tops keep the nominal
    levels. Erf tails beyond the schedule edges are truncated, not
    compensated.
    """
    if rise <= 0:
        raise ValueError("rise must be positive; use schedule_from_steps for bang-bang")
    return schedule_from_steps(steps, rise=rise)


def sample_schedule(sched: PulseSchedule, t):
    """Control values (eps_q, g) of `sched` at time(s) t."""
    return sched.sample(t)
