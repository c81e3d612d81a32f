"""Exact and numerically integrated propagators for the three-level model.

All propagators are unitary 3x3 arrays in the {C, E, L} basis. Bang-bang
gates use the spectral decomposition of their constant Hermitian generator,
so they stay exact over arbitrarily many revolutions. Smooth schedules are
integrated with midpoint-sampled piecewise-constant steps (second-order
accurate), segment-aligned so that bang-bang schedules are reproduced
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import hermiticity_defect
from .pulse import PulseSchedule

# Default integrator step (ns); adequate for 1e-10-level targets at the
# few-GHz bandwidths used here. Halve and compare to check convergence.
DEFAULT_DT = 1e-4

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class NoiseSample:
    """One quasistatic noise draw, held constant over a gate.

    d_eps_d couples |E> to |L> (dipolar detuning fluctuation); d_eps_q
    shifts eps_q additively in every segment, including nominally zero
    ones.
    """

    d_eps_d: float = 0.0
    d_eps_q: float = 0.0


ZERO_NOISE = NoiseSample()


def _require_zeta_one(zeta: float) -> None:
    if zeta != 1.0:
        raise ValueError(
            "sequence propagators are restricted to zeta = 1; "
            f"got zeta = {zeta}"
        )


def expm_hermitian(h: np.ndarray, t: float, check: bool = True) -> np.ndarray:
    """exp(-i 2 pi h t) for Hermitian h (GHz) and time t (ns)."""
    h = np.asarray(h, dtype=complex)
    if check:
        defect = hermiticity_defect(h)
        scale = max(1.0, float(np.max(np.abs(h))))
        if defect > 1e-10 * scale:
            raise ValueError(f"generator is not Hermitian (defect {defect:.3e})")
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * TWO_PI * w * t)
    return (v * phases) @ v.conj().T


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of U†U - 1."""
    u = np.asarray(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def _generator(eps_q: float, g: float, xi: float) -> np.ndarray:
    # zeta = 1 throughout the gate constructions.
    return np.array(
        [
            [0.5 * eps_q, g, 0.0],
            [g, -0.5 * eps_q, xi],
            [0.0, xi, -0.5 * eps_q],
        ],
        dtype=complex,
    )


def bare_uz(eps_q: float, noise: NoiseSample, phi: float, zeta: float = 1.0) -> np.ndarray:
    """Noisy z-rotation: evolve H_z(eps_q + d_eps_q) + H_leak(d_eps_d).

    The gate time t_z = phi / (2 pi eps_q) is set by the nominal eps_q, so
    phi must carry the same sign as eps_q to keep the duration positive.
    """
    _require_zeta_one(zeta)
    if eps_q == 0:
        raise ValueError("bare_uz requires eps_q != 0")
    if phi * eps_q < 0:
        raise ValueError("phi must have the same sign as eps_q")
    t_z = phi / (TWO_PI * eps_q)
    h = _generator(eps_q + noise.d_eps_q, 0.0, noise.d_eps_d)
    return expm_hermitian(h, t_z, check=False)


def bare_ux(g: float, noise: NoiseSample, theta: float, zeta: float = 1.0) -> np.ndarray:
    """Noisy x-rotation: evolve H_x(g) + H_z(d_eps_q) + H_leak(d_eps_d).

    The gate time is t_x = theta / (4 pi g); theta must be positive since
    g > 0.
    """
    _require_zeta_one(zeta)
    if g <= 0:
        raise ValueError("bare_ux requires g > 0")
    if theta <= 0:
        raise ValueError("bare_ux requires theta > 0")
    t_x = theta / (2.0 * TWO_PI * g)
    h = _generator(noise.d_eps_q, g, noise.d_eps_d)
    return expm_hermitian(h, t_x, check=False)


def _expm_batch(eps: np.ndarray, gs: np.ndarray, xi: float, dt: float) -> np.ndarray:
    """Step propagators exp(-i 2 pi H_k dt) for stacked generators."""
    n = eps.shape[0]
    h = np.zeros((n, 3, 3), dtype=complex)
    h[:, 0, 0] = 0.5 * eps
    h[:, 1, 1] = -0.5 * eps
    h[:, 2, 2] = -0.5 * eps
    h[:, 0, 1] = h[:, 1, 0] = gs
    h[:, 1, 2] = h[:, 2, 1] = xi
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * TWO_PI * w * dt)
    return (v * phases[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _ordered_product(us: np.ndarray) -> np.ndarray:
    """Time-ordered product U_{n-1} ... U_1 U_0 by pairwise reduction."""
    while us.shape[0] > 1:
        n = us.shape[0]
        half = n // 2
        pairs = np.matmul(us[1 : 2 * half : 2], us[0 : 2 * half : 2])
        if n % 2:
            us = np.concatenate([pairs, us[-1:]], axis=0)
        else:
            us = pairs
    return us[0]


def evolve_schedule(
    sched: PulseSchedule,
    noise: NoiseSample = ZERO_NOISE,
    dt: float = DEFAULT_DT,
    record: bool = False,
    psi0: np.ndarray | None = None,
    zeta: float = 1.0,
):
    """Propagate a pulse schedule under one quasistatic noise sample.

    Steps are midpoint-sampled with size <= dt and aligned to segment
    boundaries, so piecewise-constant (rise = 0) schedules are integrated
    exactly.

    Returns the final unitary, or (unitary, times, states) when `record`
    is set; `psi0` defaults to |C>.
    """
    _require_zeta_one(zeta)
    if dt <= 0:
        raise ValueError("dt must be positive")
    if sched.duration < dt:
        raise ValueError("schedule duration must be at least dt")

    bounds = sched.boundaries()
    mids = []
    steps = []
    for a, b in zip(bounds, bounds[1:]):
        n = max(1, int(np.ceil((b - a) / dt - 1e-12)))
        h = (b - a) / n
        mids.append(a + (np.arange(n) + 0.5) * h)
        steps.append(np.full(n, h))
    mids = np.concatenate(mids)
    steps = np.concatenate(steps)

    eps, gs = sched.sample(mids)
    eps = np.asarray(eps) + noise.d_eps_q
    gs = np.asarray(gs)

    # Uniform steps within each window; group identical step sizes to keep
    # the batched exponential exact.
    us = np.empty((mids.size, 3, 3), dtype=complex)
    for h in np.unique(steps):
        m = steps == h
        us[m] = _expm_batch(eps[m], gs[m], noise.d_eps_d, h)

    if not record:
        return _ordered_product(us)

    psi = np.array([1.0, 0.0, 0.0], dtype=complex) if psi0 is None else np.asarray(
        psi0, dtype=complex
    )
    times = np.empty(mids.size + 1)
    states = np.empty((mids.size + 1, 3), dtype=complex)
    times[0] = 0.0
    states[0] = psi
    t = 0.0
    for k in range(mids.size):
        psi = us[k] @ psi
        t += steps[k]
        times[k + 1] = t
        states[k + 1] = psi
    return _ordered_product(us), times, states
