"""Finite-dimensional reduction: parameters, vector fields, Hamiltonians.

The three-dimensional system for the mode amplitudes (alpha, beta, A),

    alpha' = (Omega10 + 2 alpha^2) beta
    beta'  = -(Omega10 + 2 alpha^2 - 2 A^2) alpha
    A'     = -2 alpha beta A

conserves N = A^2 + alpha^2 + beta^2 and reduces on each level set to the
planar Hamiltonian H_DW.  The canonical rescaling

    alpha = sqrt(Omega10/2) q,  beta = sqrt(Omega10/2) p,  tau = Omega10 t

turns H_DW into  (1/2)(1 + q^2) p^2 + (1/2)(q^2 - zeta/2)^2  up to an
additive constant, with zeta = (2N - Omega10)/Omega10.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import AmplitudeError, DomainError, StiffnessError

GAMMA_MIN = 7.0 / 9.0


@dataclass(frozen=True)
class ReducedParams:
    """Parameter bundle of the reduced system.

    omega10 is the frequency splitting (> 0), N the conserved squared
    amplitude, gamma the scaling exponent used by the asymptotic
    diagnostics.  sigma, zeta and n_cr are derived identities.
    """

    omega10: float
    N: float
    gamma: float = 0.8

    def __post_init__(self):
        if not self.omega10 > 0.0:
            raise DomainError(f"omega10 must be positive, got {self.omega10!r}")
        if self.N < 0.0:
            raise DomainError(f"N must be nonnegative, got {self.N!r}")
        if not (GAMMA_MIN < self.gamma < 1.0):
            raise DomainError(f"gamma must lie in (7/9, 1), got {self.gamma!r}")

    @property
    def sigma(self) -> float:
        return self.omega10 - 2.0 * self.N

    @property
    def zeta(self) -> float:
        return -self.sigma / self.omega10

    @property
    def n_cr(self) -> float:
        return self.omega10 / 2.0

    @property
    def sigma_scale(self) -> float:
        """Asymptotic detuning |N - N_cr| used by the scaling diagnostics."""
        return abs(self.N - self.n_cr)

    @classmethod
    def from_scaling(
        cls, sigma: float, gamma: float = 0.8, supercritical: bool = True
    ) -> "ReducedParams":
        """Scaling family: N_cr = sigma**gamma, omega10 = 2 N_cr, N = N_cr +- sigma."""
        if not sigma > 0.0:
            raise DomainError(f"scaling parameter sigma must be positive, got {sigma!r}")
        ncr = sigma**gamma
        n = ncr + sigma if supercritical else ncr - sigma
        return cls(omega10=2.0 * ncr, N=n, gamma=gamma)

    @classmethod
    def from_zeta(cls, omega10: float, zeta: float, gamma: float = 0.8) -> "ReducedParams":
        return cls(omega10=omega10, N=0.5 * omega10 * (1.0 + zeta), gamma=gamma)


@dataclass(frozen=True)
class StateABA:
    alpha: float
    beta: float
    A: float
    theta: float = 0.0


@dataclass(frozen=True)
class StateQP:
    q: float
    p: float
    tau: float = 0.0


def recover_A(alpha: float, beta: float, N: float) -> float:
    """A = +sqrt(N - alpha^2 - beta^2), clamping roundoff-negative radicands."""
    rad = N - alpha * alpha - beta * beta
    if rad < 0.0:
        if rad < -1e-13 * max(N, 1.0):
            raise AmplitudeError(
                f"alpha^2 + beta^2 = {alpha**2 + beta**2!r} exceeds N = {N!r}"
            )
        rad = 0.0
    return float(np.sqrt(rad))


def vector_field_dy(
    s: StateABA, P: ReducedParams, omega: float = 0.0, omega0: float = 0.0
) -> tuple[float, float, float, float]:
    """Time derivatives (alpha', beta', A', theta')."""
    al, be, A = s.alpha, s.beta, s.A
    om = P.omega10
    dal = (om + 2.0 * al * al) * be
    dbe = -(om + 2.0 * al * al - 2.0 * A * A) * al
    dA = -2.0 * al * be * A
    dth = omega - omega0 + A * A + 3.0 * al * al + be * be
    return dal, dbe, dA, dth


def two_mode_field(
    al: float, be: float, A: float, omega10: float, a: float, b: float, c: float
) -> tuple[float, float, float]:
    """Generalized two-mode field with distinct quartic couplings.

    a, b, c weight the self-interaction of the even mode, the cross term
    and the self-interaction of the odd mode; a = b = c = 1 recovers the
    idealized reduction.
    """
    S1 = omega10 + (a - b) * A * A + (3.0 * b - c) * al * al + (b - c) * be * be
    S2 = omega10 + (a - 3.0 * b) * A * A + (3.0 * b - c) * al * al + (b - c) * be * be
    return (be * S1, -al * S2, -2.0 * b * al * be * A)


def vector_field_alphabeta(
    alpha: float, beta: float, P: ReducedParams
) -> tuple[float, float]:
    """Planar reduction on the level set N: J grad H_DW."""
    om = P.omega10
    dal = om * beta + 2.0 * alpha * alpha * beta
    dbe = (2.0 * P.N - om) * alpha - 4.0 * alpha**3 - 2.0 * alpha * beta * beta
    return dal, dbe


def hamiltonian_HDW(alpha: float, beta: float, P: ReducedParams):
    return (
        0.5 * P.omega10 * beta * beta
        + 0.5 * P.sigma * alpha * alpha
        + alpha**4
        + alpha * alpha * beta * beta
    )


def hamiltonian_qp(s: StateQP | tuple, P: ReducedParams):
    """Rescaled Hamiltonian (1/2)(1+q^2) p^2 + (1/2)(q^2 - zeta/2)^2.

    Equals 2 H_DW / Omega10^2 plus the constant zeta^2/8, so only
    differences are comparable across the rescaling.
    """
    q, p = (s.q, s.p) if isinstance(s, StateQP) else (s[0], s[1])
    return 0.5 * (1.0 + q * q) * p * p + 0.5 * (q * q - 0.5 * P.zeta) ** 2


def rescale(alpha: float, beta: float, t: float, P: ReducedParams) -> StateQP:
    """(alpha, beta, t) -> (q, p, tau)."""
    if P.omega10 <= 0.0:
        raise DomainError("rescaling requires omega10 > 0")
    r = np.sqrt(2.0 / P.omega10)
    return StateQP(q=alpha * r, p=beta * r, tau=P.omega10 * t)


def unrescale(s: StateQP, P: ReducedParams) -> tuple[float, float, float]:
    """(q, p, tau) -> (alpha, beta, t), inverse of rescale."""
    if P.omega10 <= 0.0:
        raise DomainError("rescaling requires omega10 > 0")
    r = np.sqrt(P.omega10 / 2.0)
    return s.q * r, s.p * r, s.tau / P.omega10


def fixed_points(P: ReducedParams) -> list[tuple[float, float, str]]:
    """Rest points of the rescaled planar flow with stability tags."""
    z = P.zeta
    if z < 0.0:
        return [(0.0, 0.0, "center")]
    if z == 0.0:
        return [(0.0, 0.0, "degenerate")]
    r = float(np.sqrt(z / 2.0))
    return [(0.0, 0.0, "saddle"), (r, 0.0, "center"), (-r, 0.0, "center")]


@dataclass
class Trajectory:
    """Result of an adaptive integration with invariant drift monitoring."""

    t: np.ndarray
    y: np.ndarray  # shape (len(t), dim)
    kind: str  # "aba" or "qp"
    drift_N: float
    drift_H: float
    sol: Callable = field(repr=False)  # dense interpolant, vector-valued
    t_events: list = field(default=None, repr=False)

    def __call__(self, t):
        return self.sol(t)


def _qp_rhs(zeta: float):
    def rhs(tau, y):
        q, p = y
        return ((1.0 + q * q) * p, -(q * p * p + 2.0 * q * (q * q - 0.5 * zeta)))

    return rhs


def _aba_rhs(P: ReducedParams, omega: float, omega0: float):
    om = P.omega10

    def rhs(t, y):
        al, be, A = y[0], y[1], y[2]
        al2 = al * al
        return (
            (om + 2.0 * al2) * be,
            -(om + 2.0 * al2 - 2.0 * A * A) * al,
            -2.0 * al * be * A,
            omega - omega0 + A * A + 3.0 * al2 + be * be,
        )

    return rhs


def integrate(
    s0: StateABA | StateQP,
    P: ReducedParams,
    t_final: float,
    tol: float = 1e-12,
    events=None,
    dense: bool = True,
    n_samples: int = 1024,
) -> Trajectory:
    """Adaptive DOP853 run with N and H_DW drift reporting.

    For a StateQP input the independent variable is the rescaled time tau.
    """
    if not tol > 0.0:
        raise DomainError("tolerance must be positive")
    if isinstance(s0, StateQP):
        kind = "qp"
        y0 = np.array([s0.q, s0.p])
        rhs = _qp_rhs(P.zeta)
    else:
        kind = "aba"
        y0 = np.array([s0.alpha, s0.beta, s0.A, s0.theta])
        rhs = _aba_rhs(P, 0.0, 0.0)
    atol = tol * max(1.0, float(np.max(np.abs(y0)))) * 1e-2
    sol = solve_ivp(
        rhs,
        (0.0, t_final),
        y0,
        method="DOP853",
        rtol=max(tol, 2.3e-14),
        atol=atol,
        dense_output=dense,
        events=events,
    )
    if not sol.success:
        raise StiffnessError(f"integration failed: {sol.message}")
    ts = np.linspace(0.0, sol.t[-1], n_samples)
    ys = sol.sol(ts).T if dense else sol.y.T
    if kind == "qp":
        q, p = ys[:, 0], ys[:, 1]
        al = q * np.sqrt(P.omega10 / 2.0)
        be = p * np.sqrt(P.omega10 / 2.0)
        h = 0.5 * (1.0 + q * q) * p * p + 0.5 * (q * q - 0.5 * P.zeta) ** 2
        n_inv = al * al + be * be  # N itself is not defined by (q, p) alone
        drift_N = 0.0
        drift_H = float(np.max(np.abs(h - h[0])))
    else:
        al, be, A = ys[:, 0], ys[:, 1], ys[:, 2]
        n_inv = A * A + al * al + be * be
        h = (
            0.5 * P.omega10 * be * be
            + 0.5 * P.sigma * al * al
            + al**4
            + al * al * be * be
        )
        drift_N = float(np.max(np.abs(n_inv - n_inv[0])))
        drift_H = float(np.max(np.abs(h - h[0])))
    return Trajectory(
        t=ts,
        y=ys,
        kind=kind,
        drift_N=drift_N,
        drift_H=drift_H,
        sol=sol.sol,
        t_events=sol.t_events,
    )


def origin_eigenvalue_crossing(omega10: float, n_lo: float, n_hi: float) -> float:
    """Bisect the N at which the planar origin changes type.

    The linearization at the origin has eigenvalue product
    -omega10 (2N - omega10); its sign change is bracketed to 1e-10.
    """

    def product(n):
        return -omega10 * (2.0 * n - omega10)

    lo, hi = float(n_lo), float(n_hi)
    if product(lo) * product(hi) > 0:
        raise DomainError("bracket does not straddle the crossing")
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if product(lo) * product(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
