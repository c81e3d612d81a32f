"""Three-level model Hamiltonians for a charge-quadrupole style qubit.

Basis ordering is {|C>, |E>, |L>}: two logical states and one leakage
state. All energies are linear frequencies in GHz (E/h convention), all
times are in ns, and propagation elsewhere uses exp(-i 2 pi H t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Basis indices
C, E, L = 0, 1, 2

SQRT2 = np.sqrt(2.0)

# Columns are |C>, |E>, |L> expressed in the localized {|100>,|010>,|001>} basis.
CEL_TRANSFORM = np.array(
    [
        [0.0, 1.0 / SQRT2, 1.0 / SQRT2],
        [1.0, 0.0, 0.0],
        [0.0, 1.0 / SQRT2, -1.0 / SQRT2],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class ModelParams:
    """Controls and couplings of the three-level model.

    eps_q : quadrupolar detuning (GHz), drives logical z-rotations
    g     : tunnel-coupling control (GHz), drives logical x-rotations
    xi    : coupling of |E> to the leakage state |L> (GHz); physically the
            dipolar detuning fluctuation
    zeta  : scaled leakage-state energy (dimensionless); 1 for the devices
            modeled here
    """

    eps_q: float = 0.0
    g: float = 0.0
    xi: float = 0.0
    zeta: float = 1.0

    def __post_init__(self) -> None:
        if self.g < 0:
            raise ValueError(f"g must be non-negative, got {self.g}")


@dataclass(frozen=True)
class CqLocalizedParams:
    """On-site potentials and tunnel couplings in the localized charge basis."""

    u1: float = 0.0
    u2: float = 0.0
    u3: float = 0.0
    t_a: float = 0.0
    t_b: float = 0.0

    @property
    def eps_d(self) -> float:
        """Dipolar detuning (U1 - U3)/2."""
        return 0.5 * (self.u1 - self.u3)

    @property
    def eps_q(self) -> float:
        """Quadrupolar detuning U2 - (U1 + U3)/2."""
        return self.u2 - 0.5 * (self.u1 + self.u3)


def build_model(p: ModelParams) -> np.ndarray:
    """Assemble the three-level Hamiltonian in the {C, E, L} basis.

    The diagonal carries the z-control (eps_q/2, -eps_q/2, -zeta*eps_q/2),
    g couples C and E, and xi couples E to the leakage state.
    """
    e, g, xi, zeta = p.eps_q, p.g, p.xi, p.zeta
    return np.array(
        [
            [0.5 * e, g, 0.0],
            [g, -0.5 * e, xi],
            [0.0, xi, -0.5 * zeta * e],
        ],
        dtype=complex,
    )


def build_cq_localized(p: CqLocalizedParams) -> np.ndarray:
    """Triple-dot Hamiltonian in the localized basis, identity shift included."""
    shift = 0.5 * (p.u1 + p.u3)
    return np.array(
        [
            [p.eps_d + shift, p.t_a, 0.0],
            [p.t_a, p.eps_q + shift, p.t_b],
            [0.0, p.t_b, -p.eps_d + shift],
        ],
        dtype=complex,
    )


def traceless(h: np.ndarray) -> np.ndarray:
    """Remove the identity component (global energy offset)."""
    h = np.asarray(h, dtype=complex)
    return h - (np.trace(h) / h.shape[0]) * np.eye(h.shape[0])


def to_cel_basis(h: np.ndarray) -> np.ndarray:
    """Rotate a localized-basis Hamiltonian into the {C, E, L} basis.

    The identity component is dropped, so the result is traceless; global
    energy offsets only contribute an overall propagation phase.
    """
    h = np.asarray(h, dtype=complex)
    rotated = CEL_TRANSFORM.conj().T @ h @ CEL_TRANSFORM
    return traceless(rotated)


def hermiticity_defect(h: np.ndarray) -> float:
    """Largest entrywise deviation from Hermiticity."""
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T)))


def eigenvalue_sweep(
    axis: str,
    lo: float,
    hi: float,
    n: int,
    fixed: ModelParams,
) -> np.ndarray:
    """Sweep one control and return eigenvalues sorted ascending per row.

    Parameters
    ----------
    axis : "eps_q" or "g"
        Which control to sweep; the other controls are taken from `fixed`.
    lo, hi : sweep range (GHz), lo < hi
    n : number of samples, at least 2

    Returns
    -------
    (n, 4) array with columns (param, E1, E2, E3).
    """
    if axis not in ("eps_q", "g"):
        raise ValueError(f"unknown sweep axis {axis!r}")
    if not lo < hi:
        raise ValueError(f"invalid sweep range [{lo}, {hi}]")
    if n < 2:
        raise ValueError("sweep needs at least 2 samples")

    values = np.linspace(lo, hi, n)
    out = np.empty((n, 4))
    for i, v in enumerate(values):
        if axis == "eps_q":
            p = ModelParams(eps_q=v, g=fixed.g, xi=fixed.xi, zeta=fixed.zeta)
        else:
            if v < 0:
                raise ValueError("g sweep range must be non-negative")
            p = ModelParams(eps_q=fixed.eps_q, g=v, xi=fixed.xi, zeta=fixed.zeta)
        out[i, 0] = v
        out[i, 1:] = np.linalg.eigvalsh(build_model(p))
    return out
