"""Two-Bloch-sphere representation of three-level pure states.

A normalized state (psi_C, psi_E, psi_L) maps to polar/azimuthal angles of
a logical ("green") sphere and a leakage ("red") sphere:

    psi = (cos(vartheta/2) cos(chi/2),
           cos(vartheta/2) sin(chi/2) e^{i varrho},
           sin(vartheta/2) e^{i varsigma})

The map is bijective up to global phase; the gauge makes the C amplitude
real non-negative (falling back to E, then L, when components vanish).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagator import DEFAULT_DT, ZERO_NOISE, NoiseSample, evolve_schedule
from .pulse import PulseSchedule


@dataclass(frozen=True)
class TwoSphereState:
    """Polar/azimuth pairs (chi, varrho) green and (vartheta, varsigma) red.

    Azimuths at the poles are gauge-fixed to 0 and flagged degenerate.
    """

    chi: float
    varrho: float
    vartheta: float
    varsigma: float
    green_degenerate: bool = False
    red_degenerate: bool = False

    def __post_init__(self) -> None:
        if not (0.0 <= self.chi <= np.pi and 0.0 <= self.vartheta <= np.pi):
            raise ValueError("polar angles must lie in [0, pi]")
        for az in (self.varrho, self.varsigma):
            if not (-np.pi <= az < np.pi + 1e-12):
                raise ValueError("azimuths must lie in [-pi, pi)")

    @property
    def p_leak(self) -> float:
        return float(np.sin(0.5 * self.vartheta) ** 2)


def _wrap_azimuth(a: float) -> float:
    out = (a + np.pi) % (2.0 * np.pi) - np.pi
    return float(out)


def map_to_spheres(psi, atol: float = 1e-12) -> TwoSphereState:
    """Angles of the two-sphere representation of a normalized 3-vector."""
    psi = np.asarray(psi, dtype=complex).reshape(3)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state must be normalized (|psi| = {norm:.12f})")

    # Gauge: make the first non-vanishing component (C, then E, then L)
    # real and non-negative.
    mags = np.abs(psi)
    pole_tol = 1e-15
    if mags[0] > pole_tol:
        ref = psi[0]
    elif mags[1] > pole_tol:
        ref = psi[1]
    else:
        ref = psi[2]
    psi = psi * np.conj(ref) / abs(ref)

    vartheta = 2.0 * np.arcsin(min(mags[2], 1.0))
    chi = 2.0 * np.arctan2(mags[1], mags[0])
    if mags[0] < pole_tol and mags[1] < pole_tol:
        chi = 0.0  # logical direction undefined at full leakage

    green_pole = mags[1] < pole_tol or mags[0] < pole_tol
    red_pole = mags[2] < pole_tol
    varrho = 0.0 if green_pole else _wrap_azimuth(np.angle(psi[1]))
    varsigma = 0.0 if red_pole else _wrap_azimuth(np.angle(psi[2]))

    return TwoSphereState(
        float(chi), varrho, float(vartheta), varsigma, green_pole, red_pole
    )


def spheres_to_state(s: TwoSphereState) -> np.ndarray:
    """Normalized 3-vector of a two-sphere state."""
    return np.array(
        [
            np.cos(0.5 * s.vartheta) * np.cos(0.5 * s.chi),
            np.cos(0.5 * s.vartheta) * np.sin(0.5 * s.chi) * np.exp(1j * s.varrho),
            np.sin(0.5 * s.vartheta) * np.exp(1j * s.varsigma),
        ],
        dtype=complex,
    )


def record_trajectory(
    sched: PulseSchedule,
    noise: NoiseSample = ZERO_NOISE,
    psi0=None,
    dt: float = DEFAULT_DT,
) -> list[tuple[float, TwoSphereState, float]]:
    """Evolve psi0 under a schedule and record (t, angles, P_L) per step."""
    _, times, states = evolve_schedule(sched, noise, dt, record=True, psi0=psi0)
    out = []
    for t, psi in zip(times, states):
        psi = psi / np.linalg.norm(psi)
        s = map_to_spheres(psi)
        out.append((float(t), s, float(abs(psi[2]) ** 2)))
    return out
