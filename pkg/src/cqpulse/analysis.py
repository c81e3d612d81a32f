"""Fidelity metrics, closed-form error laws and scaling fits.

The process fidelity projects the simulated 3x3 unitary onto the 2x2
logical block; the projection is generally non-unitary and the metric
charges both the computational deviation and the missing (leaked) norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .propagator import ZERO_NOISE, NoiseSample
from .sequences import GateSpec, RzxzSpec, rzxz


def _target_matrix(target) -> np.ndarray:
    m = target.matrix if isinstance(target, GateSpec) else np.asarray(target)
    return np.asarray(m, dtype=complex)


def process_fidelity(u_sim: np.ndarray, target) -> float:
    """Process fidelity of the logical block of a three-level gate.

    F = [Tr(W W†) + |Tr(T† W)|^2] / [d (d+1)] with d = 2, where W is the
    logical 2x2 block of u_sim and T the target. Equals 1 iff the gate is
    the target exactly (up to global phase) with no leakage.
    """
    t = _target_matrix(target)
    w = np.asarray(u_sim, dtype=complex)[:2, :2]
    d = 2
    return float(
        (np.real(np.trace(w @ w.conj().T)) + abs(np.trace(t.conj().T @ w)) ** 2)
        / (d * (d + 1))
    )


def leakage_probabilities(u: np.ndarray) -> tuple[float, float]:
    """(P_LC, P_LE): populations transferred from |C> and |E> to |L>."""
    u = np.asarray(u)
    return float(abs(u[2, 0]) ** 2), float(abs(u[2, 1]) ** 2)


def align_global_phase(block: np.ndarray, target) -> np.ndarray:
    """Rotate `block` by the phase maximizing Re Tr(target† block)."""
    t = _target_matrix(target)
    tr = np.trace(t.conj().T @ np.asarray(block, dtype=complex))
    if abs(tr) < 1e-300:
        return np.asarray(block, dtype=complex)
    return np.asarray(block, dtype=complex) * (np.conj(tr) / abs(tr))


def computational_error(u: np.ndarray, target) -> float:
    """Squared Frobenius deviation of the phase-aligned logical block."""
    t = _target_matrix(target)
    w = align_global_phase(np.asarray(u, dtype=complex)[:2, :2], t)
    return float(np.linalg.norm(w - t) ** 2)


# ---------------------------------------------------------------------------
# Leading-order error laws of the composite gates (bang-bang limit)


def closed_form_rzxz_leakage(theta, ratio) -> tuple[float, float]:
    """Leading-order (P_LC, P_LE) of the constrained z-x-z gate.

    Both scale with the sixth power of ratio = d_eps_d / g; tan(theta/4)
    diverges at theta = 2 pi, which the feasibility window excludes.
    """
    theta = np.asarray(theta, dtype=float)
    ratio = np.asarray(ratio, dtype=float)
    q = 0.25 * theta
    p_lc = ratio**6 * np.abs(
        np.sin(q) ** 2 / 3.0 - q * np.tan(q) + 2.0 / 3.0 * np.tan(q) ** 2
    ) ** 2
    p_le = ratio**6 * np.abs(
        2.0 / 3.0 * np.tan(q) - q + np.sin(0.5 * theta) / 6.0
    ) ** 2
    return p_lc, p_le


def closed_form_identity_errors(eps_q: float, g: float, ratio) -> tuple:
    """Leading-order (P_EC, P_LC, P_LE) of the four-pulse identity gate."""
    if eps_q <= 0 or g <= 0:
        raise ValueError("identity error laws require eps_q > 0 and g > 0")
    ratio = np.asarray(ratio, dtype=float)
    base = (np.pi + 4.0 * np.pi * g / eps_q) ** 2
    p_ec = base * ratio**4
    p_lc = (np.pi * g / eps_q) ** 2 * base * ratio**6
    p_le = base * ratio**6
    return p_ec, p_lc, p_le


def second_order_comp_coeffs(theta: float) -> tuple[float, float]:
    """Coefficients (A, B) of the second-order logical deviation.

    Under the first-order constraint the logical block of the z-x-z gate
    deviates from its target by [A(theta) I + i B(theta) n.sigma] times
    (d_eps_d/g)^2, giving the quartic computational-error law.
    """
    q = 0.25 * theta
    a = 2.0 * np.sin(q) * (np.sin(q) - q * np.cos(q))
    b = np.sin(0.5 * theta) - q * np.cos(0.5 * theta) - np.tan(q)
    return float(a), float(b)


def rzxz_first_order_term(theta: float, phi: float, eps_q: float, g: float) -> np.ndarray:
    """Coefficient matrix of (d_eps_d/g) in the z-x-z expansion.

    Vanishes identically when eps_q satisfies the cancellation constraint;
    otherwise it is the pure-leakage matrix that dominates the gate error.
    """
    s, c = np.sin(0.25 * theta), np.cos(0.25 * theta)
    k = g * phi * c / eps_q + 2.0 * s
    m = np.array(
        [
            [0.0, 0.0, np.exp(-0.5j * phi) * s],
            [0.0, 0.0, 1j * c],
            [np.exp(0.5j * phi) * s, 1j * c, 0.0],
        ],
        dtype=complex,
    )
    return -k * m


def rzxz_derivative(
    spec_builder,
    step: float,
) -> np.ndarray:
    """Central finite-difference derivative dU/d(d_eps_d) at zero noise.

    `spec_builder` maps a noise value to a 3x3 unitary.
    """
    up = spec_builder(NoiseSample(d_eps_d=step))
    dn = spec_builder(NoiseSample(d_eps_d=-step))
    return (up - dn) / (2.0 * step)


def rzxz_second_order_term(spec: RzxzSpec, step: float = 1e-4) -> np.ndarray:
    """Numeric coefficient of (d_eps_d/g)^2 of the constrained z-x-z gate."""
    up = rzxz(spec, NoiseSample(d_eps_d=step))
    mid = rzxz(spec, ZERO_NOISE)
    dn = rzxz(spec, NoiseSample(d_eps_d=-step))
    return (up - 2.0 * mid + dn) / (2.0 * step**2) * spec.g**2


def scaling_exponent_fit(points) -> float:
    """Least-squares slope of log10(error) against log10(ratio).

    Needs at least 4 strictly positive points spanning a decade or more.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (ratio, error) pairs")
    if pts.shape[0] < 4:
        raise ValueError("need at least 4 points for a scaling fit")
    if np.any(pts <= 0):
        raise ValueError("scaling fit requires strictly positive values")
    x, y = pts[:, 0], pts[:, 1]
    if x.max() / x.min() < 10.0:
        raise ValueError("ratios must span at least one decade")
    slope = np.polyfit(np.log10(x), np.log10(y), 1)[0]
    return float(slope)


@dataclass
class GateReport:
    """Error breakdown of one simulated gate against a 2x2 target."""

    fidelity: float
    infidelity: float
    p_lc: float
    p_le: float
    comp_error: float
    params: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "fidelity": self.fidelity,
            "infidelity": self.infidelity,
            "p_lc": self.p_lc,
            "p_le": self.p_le,
            "comp_error": self.comp_error,
            "params": self.params,
        }


def gate_report(u: np.ndarray, target, params: dict | None = None) -> GateReport:
    f = process_fidelity(u, target)
    p_lc, p_le = leakage_probabilities(u)
    return GateReport(
        fidelity=f,
        infidelity=1.0 - f,
        p_lc=p_lc,
        p_le=p_le,
        comp_error=computational_error(u, target),
        params=dict(params or {}),
    )
