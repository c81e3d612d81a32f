"""Composite gates built from bare z- and x-rotations.

The z-x-z composite cancels the first-order leakage caused by the
quasistatic E-L coupling when its controls satisfy
eps_q = -(g phi / 2) cot(theta / 4); the four-pulse identity sequence
cancels first order by construction. A numeric scan demonstrates that no
two-pulse composition can do the same.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .propagator import (
    DEFAULT_DT,
    NoiseSample,
    ZERO_NOISE,
    bare_ux,
    bare_uz,
    evolve_schedule,
)
from .pulse import PulseSchedule, build_smooth_schedule, schedule_from_steps

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi

# Keep theta away from the window edges where one control diverges
# (theta -> 4 pi) or eps_q -> 0 (theta -> 2 pi).
THETA_GUARD = 1e-3

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def constraint_eps_q(theta: float, phi: float, g: float, guard: float = THETA_GUARD) -> float:
    """Quadrupolar detuning that cancels first-order leakage of the z-x-z gate.

    eps_q = -(g phi / 2) cot(theta / 4), valid for theta strictly inside
    (2 pi, 4 pi); a guard band rejects the window edges.
    """
    if g <= 0:
        raise ValueError("constraint requires g > 0")
    if phi == 0:
        raise ValueError("constraint requires phi != 0")
    if not (TWO_PI + guard <= theta <= FOUR_PI - guard):
        raise ValueError(
            f"theta = {theta} outside the feasible window "
            f"({TWO_PI + guard}, {FOUR_PI - guard})"
        )
    return -0.5 * g * phi / np.tan(0.25 * theta)


@dataclass(frozen=True)
class RzxzSpec:
    """Parameters of one constrained z-x-z composite rotation.

    The logical action at zero noise is a rotation by `theta` about the
    axis cos(phi/2) x + sin(phi/2) y.
    """

    theta: float
    phi: float
    g: float
    guard: float = THETA_GUARD

    def __post_init__(self) -> None:
        constraint_eps_q(self.theta, self.phi, self.g, self.guard)

    @property
    def eps_q(self) -> float:
        return constraint_eps_q(self.theta, self.phi, self.g, self.guard)

    @property
    def t_z(self) -> float:
        """Duration of each z-segment (ns)."""
        return 0.5 * self.phi / (TWO_PI * self.eps_q)

    @property
    def t_x(self) -> float:
        """Duration of the x-segment (ns)."""
        return self.theta / (2.0 * TWO_PI * self.g)


@dataclass(frozen=True)
class GateSpec:
    """A labeled 2x2 target unitary on the logical subspace."""

    label: str
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("target must be 2x2")
        if np.linalg.norm(m.conj().T @ m - np.eye(2)) > 1e-12:
            raise ValueError("target must be unitary within 1e-12")
        object.__setattr__(self, "matrix", m)


def su2_rotation(angle: float, axis) -> np.ndarray:
    """SU(2) rotation by `angle` about a 3-vector axis."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    gen = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return np.cos(0.5 * angle) * np.eye(2) - 1j * np.sin(0.5 * angle) * gen


def rotation_xy(theta: float, phi: float) -> np.ndarray:
    """Rotation by theta about the in-plane axis cos(phi/2) x + sin(phi/2) y."""
    return su2_rotation(theta, [np.cos(0.5 * phi), np.sin(0.5 * phi), 0.0])


def x_minus_half_pi() -> GateSpec:
    return GateSpec("X_-pi/2", su2_rotation(-0.5 * np.pi, [1.0, 0.0, 0.0]))


def identity_gate() -> GateSpec:
    return GateSpec("identity", np.eye(2))


def rzxz_target(spec: RzxzSpec) -> GateSpec:
    """Noise-free logical rotation implemented by a z-x-z spec."""
    return GateSpec(
        f"R(theta={spec.theta:.6g}, phi={spec.phi:.6g})",
        rotation_xy(spec.theta, spec.phi),
    )


def embed_logical(u2: np.ndarray) -> np.ndarray:
    """Lift a 2x2 logical unitary to 3x3 with the leakage level untouched."""
    out = np.eye(3, dtype=complex)
    out[:2, :2] = np.asarray(u2, dtype=complex)
    return out


def rzxz_steps(spec: RzxzSpec) -> list[tuple[float, float, float]]:
    """Bang-bang step list (eps_q, g, duration) of the z-x-z gate, time-ordered."""
    return [
        (-spec.eps_q, 0.0, spec.t_z),
        (0.0, spec.g, spec.t_x),
        (spec.eps_q, 0.0, spec.t_z),
    ]


def identity_steps(eps_q: float, g: float) -> list[tuple[float, float, float]]:
    """Step list of the four-pulse identity sequence (x and z full cycles, twice)."""
    if eps_q <= 0 or g <= 0:
        raise ValueError("identity sequence requires eps_q > 0 and g > 0")
    t_x = 1.0 / (2.0 * g)
    t_z = 1.0 / eps_q
    return [(0.0, g, t_x), (eps_q, 0.0, t_z)] * 2


def rzxz(
    spec: RzxzSpec,
    noise: NoiseSample = ZERO_NOISE,
    mode: str = "bang_bang",
    rise: float | None = None,
    dt: float = DEFAULT_DT,
) -> np.ndarray:
    """Composite z-x-z gate under one quasistatic noise sample.

    In bang-bang mode the three bare exponentials are multiplied exactly;
    in smooth mode the erf-switched schedule is integrated.
    """
    if mode == "bang_bang":
        first = bare_uz(-spec.eps_q, noise, -0.5 * spec.phi)
        middle = bare_ux(spec.g, noise, spec.theta)
        last = bare_uz(spec.eps_q, noise, 0.5 * spec.phi)
        return last @ middle @ first
    if mode == "smooth":
        if rise is None or rise <= 0:
            raise ValueError("smooth mode requires a positive rise time")
        sched = build_smooth_schedule(rzxz_steps(spec), rise)
        return evolve_schedule(sched, noise, dt)
    raise ValueError(f"unknown mode {mode!r}")


def identity_sequence(
    eps_q: float,
    g: float,
    noise: NoiseSample = ZERO_NOISE,
    mode: str = "bang_bang",
    rise: float | None = None,
    dt: float = DEFAULT_DT,
) -> np.ndarray:
    """Four-pulse identity gate [U_z(2 pi) U_x(2 pi)]^2."""
    if eps_q <= 0 or g <= 0:
        raise ValueError("identity sequence requires eps_q > 0 and g > 0")
    if mode == "bang_bang":
        block = bare_uz(eps_q, noise, TWO_PI) @ bare_ux(g, noise, TWO_PI)
        return block @ block
    if mode == "smooth":
        if rise is None or rise <= 0:
            raise ValueError("smooth mode requires a positive rise time")
        sched = build_smooth_schedule(identity_steps(eps_q, g), rise)
        return evolve_schedule(sched, noise, dt)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Two-step arbitrary rotations


def _axis_angle(u2: np.ndarray) -> tuple[float, np.ndarray]:
    """Rotation angle in [0, 2 pi) and unit axis of a 2x2 unitary (phase dropped)."""
    u = np.asarray(u2, dtype=complex)
    det = np.linalg.det(u)
    su = u / np.sqrt(det)
    c = np.clip(np.real(np.trace(su)) / 2.0, -1.0, 1.0)
    vec = np.array(
        [-np.imag(su[0, 1]), -np.real(su[0, 1]), -np.imag(su[0, 0])]
    )
    s = np.linalg.norm(vec)
    beta = 2.0 * np.arctan2(s, c)
    if s < 1e-14:
        return 0.0, np.array([1.0, 0.0, 0.0])
    return float(beta % FOUR_PI), vec / s


def _product_residual(x: np.ndarray, target: np.ndarray) -> np.ndarray:
    th1, ph1, th2, ph2 = x
    prod = rotation_xy(th2, ph2) @ rotation_xy(th1, ph1)
    tr = np.trace(target.conj().T @ prod)
    if abs(tr) > 1e-300:
        prod = prod * (np.conj(tr) / abs(tr))
    diff = prod - target
    return np.concatenate([diff.real.ravel(), diff.imag.ravel()])


def arbitrary_rotation(
    target: GateSpec,
    g: float,
    guard: float = THETA_GUARD,
    seed: int = 0,
    max_restarts: int = 40,
) -> tuple[RzxzSpec, RzxzSpec]:
    """Decompose a logical target into two feasible z-x-z rotations.

    The returned pair (first, second) composes in time order
    second . first = target up to global phase, verified to 1e-9. Raises
    RuntimeError if no feasible decomposition is found within the retry
    budget.
    """
    tgt = target.matrix
    beta, axis = _axis_angle(tgt)
    rng = np.random.default_rng(seed)

    if beta < 1e-12:
        # Identity target: a pi-equivalent rotation squared, lifted into the
        # window (3 pi about one axis, applied twice, is -1 = identity).
        spec = RzxzSpec(3.0 * np.pi, TWO_PI, g, guard)
        return spec, spec

    def phi_for(a: float) -> float:
        # Pulse angle for an in-plane axis at direction angle a (phi = 2a
        # modulo 4 pi), kept safely away from phi = 0.
        for cand in (2.0 * a, 2.0 * a + FOUR_PI, 2.0 * a - FOUR_PI):
            if 0.5 <= abs(cand) <= FOUR_PI:
                return cand
        return TWO_PI

    seeds = []
    if np.hypot(axis[0], axis[1]) > 1e-9:
        # Opposite-axis pair: R(3pi + beta/2, n) R(3pi - beta/2, -n) equals
        # the target exactly when its axis lies in the x-y plane, and is a
        # strong seed otherwise.
        a = np.arctan2(axis[1], axis[0])
        b = beta if beta <= TWO_PI else beta - FOUR_PI
        seeds.append(
            (3.0 * np.pi - 0.5 * b, phi_for(a + np.pi), 3.0 * np.pi + 0.5 * b, phi_for(a))
        )
    else:
        # z-axis target: two effective pi-rotations about in-plane axes
        # separated by half the target angle.
        b = 0.5 * beta * np.sign(axis[2])
        for sgn in (1.0, -1.0):
            seeds.append(
                (3.0 * np.pi, phi_for(0.5 * np.pi), 3.0 * np.pi, phi_for(0.5 * np.pi + sgn * b))
            )

    lo = np.array([TWO_PI + 2 * guard, -FOUR_PI, TWO_PI + 2 * guard, -FOUR_PI])
    hi = np.array([FOUR_PI - 2 * guard, FOUR_PI, FOUR_PI - 2 * guard, FOUR_PI])
    for _ in range(max_restarts):
        seeds.append(rng.uniform(lo, hi))

    for x0 in seeds:
        x0 = np.clip(np.asarray(x0, dtype=float), lo, hi)
        sol = least_squares(
            _product_residual,
            x0,
            args=(tgt,),
            bounds=(lo, hi),
            xtol=3e-16,
            ftol=3e-16,
            gtol=1e-15,
            max_nfev=400,
        )
        th1, ph1, th2, ph2 = sol.x
        if min(abs(ph1), abs(ph2)) < 1e-2:
            continue
        if np.linalg.norm(_product_residual(sol.x, tgt)) > 1e-9:
            continue
        try:
            spec1 = RzxzSpec(th1, ph1, g, guard)
            spec2 = RzxzSpec(th2, ph2, g, guard)
        except ValueError:
            continue
        return spec1, spec2
    raise RuntimeError(
        f"no feasible two-step decomposition found for {target.label!r} "
        f"within {max_restarts} restarts"
    )


# ---------------------------------------------------------------------------
# Two-pulse no-go scan


def two_pulse_leakage_coeffs(order: str, theta, phi, eps_q, g):
    """Leading-order leakage coefficients of a two-pulse composition.

    order "zx" means the x-pulse acts first in time (U_z U_x as a matrix
    product), "xz" the opposite. Both coefficients of a valid
    leakage-suppressing pulse pair would have to vanish simultaneously.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    eps_q = np.asarray(eps_q, dtype=float)
    g = np.asarray(g, dtype=float)
    if order == "zx":
        c1 = 2.0 * eps_q * np.sin(0.25 * theta) ** 2 + g * phi * np.sin(0.5 * theta)
        c2 = eps_q * np.sin(0.5 * theta) + g * phi * np.cos(0.5 * theta)
    elif order == "xz":
        c1 = np.cos(0.5 * theta) - 1.0
        c2 = eps_q * np.sin(0.5 * theta) + g * phi
    else:
        raise ValueError(f"unknown ordering {order!r}")
    return c1, c2


@dataclass
class NoGoCandidate:
    order: str
    theta: float
    phi: float
    eps_q: float
    g: float
    c1: float
    c2: float
    min_abs: float
    null_rotation: bool


@dataclass
class NoGoScanResult:
    n_points: int
    candidates: list[NoGoCandidate]
    verdict: bool  # True: every near-zero is a null rotation

    @property
    def violations(self) -> list[NoGoCandidate]:
        return [c for c in self.candidates if not c.null_rotation]


def _is_null_rotation(theta: float, phi: float, eps_q: float, tol: float = 1e-4) -> bool:
    # Degenerate compositions: a vanishing control or a full-cycle /
    # zero-angle pulse, i.e. the pair collapses to at most one bare gate.
    wrapped = min(abs(theta), abs(FOUR_PI - theta))
    return abs(eps_q) < tol or abs(phi) < tol or wrapped < tol


def two_pulse_nogo_scan(
    n_theta: int = 64,
    n_phi: int = 56,
    n_ratio: int = 32,
    zero_tol: float = 1e-8,
    refine_top: int = 150,
    seed: int = 0,
) -> NoGoScanResult:
    """Grid scan plus local refinement of the two-pulse leakage coefficients.

    Scans theta in (0, 4 pi), phi in (-4 pi, 4 pi) and eps_q/g in
    [-20, 20] (g normalized to 1), refines the most promising grid points,
    and classifies every refined near-zero. The composition is viable only
    if a simultaneous zero exists away from null rotations; the expected
    verdict is that none does.
    """
    thetas = np.linspace(0.0, FOUR_PI, n_theta + 2)[1:-1]
    phis = np.linspace(-FOUR_PI, FOUR_PI, n_phi + 2)[1:-1]
    ratios = np.linspace(-20.0, 20.0, n_ratio)
    tt, pp, rr = np.meshgrid(thetas, phis, ratios, indexing="ij")

    candidates: list[NoGoCandidate] = []
    n_points = 0
    for order in ("zx", "xz"):
        c1, c2 = two_pulse_leakage_coeffs(order, tt, pp, rr, 1.0)
        scale = np.maximum(1.0, np.maximum(np.abs(rr), np.abs(pp)))
        metric = np.maximum(np.abs(c1), np.abs(c2)) / scale
        n_points += metric.size

        flat = np.argsort(metric, axis=None)[:refine_top]
        starts = np.column_stack(
            [tt.ravel()[flat], pp.ravel()[flat], rr.ravel()[flat]]
        )
        lo = np.array([1e-12, -FOUR_PI, -20.0])
        hi = np.array([FOUR_PI - 1e-12, FOUR_PI, 20.0])

        def residual(x, order=order):
            a, b = two_pulse_leakage_coeffs(order, x[0], x[1], x[2], 1.0)
            return np.array([a, b])

        seen = set()
        for x0 in starts:
            sol = least_squares(
                residual, np.clip(x0, lo, hi), bounds=(lo, hi), max_nfev=200
            )
            th, ph, r = sol.x
            key = (order, round(th, 5), round(ph, 5), round(r, 5))
            if key in seen:
                continue
            seen.add(key)
            a, b = residual(sol.x)
            min_abs = max(abs(a), abs(b))
            if min_abs < zero_tol:
                candidates.append(
                    NoGoCandidate(
                        order, float(th), float(ph), float(r), 1.0,
                        float(a), float(b), float(min_abs),
                        _is_null_rotation(th, ph, r),
                    )
                )

    verdict = all(c.null_rotation for c in candidates)
    return NoGoScanResult(n_points, candidates, verdict)
