"""Linearization about periodic orbits: fundamental and monodromy matrices.

The coefficient matrix B(t) is the Jacobian of the three-dimensional mode
system evaluated along a reference orbit chi*(t) = (alpha*, beta*, A*):

    B = [[ 4 a b,            Omega10 + 2 a^2,  0      ],
         [-(Omega10 + 6 a^2 - 2 A^2), 0,       4 a A  ],
         [-2 A b,            -2 a A,           -2 a b ]]

with trace 2 a b.  Two independent constructions of the fundamental
matrix M(t), M(0) = I, are provided: variational integration of
M' = B M, and central differencing of the closed-form orbit family in
(q0, zeta) together with the analytic flow direction.  Monodromy theory
for these orbits gives a triple unit eigenvalue with geometric
multiplicity two, which both constructions must reproduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from .elliptic import complete_K, dK_dk
from .errors import (
    DegenerateOrbitError,
    FloquetAnomalyError,
    GridError,
    RenormalizationError,
    StiffnessError,
)
from .orbits import ExactOrbit, build, eval_orbit, mode_amplitudes, period_t
from .reduced import ReducedParams


def coefficient_matrix(al: float, be: float, A: float, omega10: float) -> np.ndarray:
    """B at a phase-space point (Jacobian of the mode vector field)."""
    return np.array(
        [
            [4.0 * al * be, omega10 + 2.0 * al * al, 0.0],
            [-(omega10 + 6.0 * al * al - 2.0 * A * A), 0.0, 4.0 * al * A],
            [-2.0 * A * be, -2.0 * al * A, -2.0 * al * be],
        ]
    )


def linearized_B(orb: ExactOrbit, P: ReducedParams, t: float) -> np.ndarray:
    """Coefficient matrix along the orbit at unscaled time t."""
    al, be, A = mode_amplitudes(orb, P, P.omega10 * np.asarray(t, dtype=float))
    if np.min(A) <= 0.0:
        raise DegenerateOrbitError("linearization needs A > 0 along the orbit")
    if np.ndim(al) == 0:
        return coefficient_matrix(float(al), float(be), float(A), P.omega10)
    return np.stack(
        [coefficient_matrix(a, b, c, P.omega10) for a, b, c in zip(al, be, A)]
    )


@dataclass
class FundamentalMatrix:
    """M(t) on a uniform grid over one period, M(0) = I."""

    ts: np.ndarray  # unscaled time grid, [0, T_t]
    Ms: np.ndarray  # shape (len(ts), 3, 3)
    T_t: float
    method: str = "variational"

    def monodromy_matrix(self) -> np.ndarray:
        return self.Ms[-1]


def _variational_rhs(orb: ExactOrbit, P: ReducedParams):
    om = P.omega10
    r = math.sqrt(om / 2.0)
    opz = 1.0 + P.zeta

    def rhs(tau, y):
        q, p = eval_orbit(orb, tau)
        al, be = r * q, r * p
        A = r * math.sqrt(max(opz - q * q - p * p, 0.0))
        B = coefficient_matrix(al, be, A, om)
        return ((B / om) @ y.reshape(3, 3)).ravel()

    return rhs


def fundamental_matrix(
    orb: ExactOrbit,
    P: ReducedParams,
    tol: float = 1e-13,
    n_grid: int = 257,
    n_periods: float = 1.0,
) -> FundamentalMatrix:
    """Integrate M' = B(t) M, M(0) = I, over n_periods periods.

    Integration runs in rescaled time (where B/Omega10 has order-one
    entries) with a step cap that keeps the monodromy accurate enough for
    eigenstructure tests.
    """
    al0, be0, A0 = mode_amplitudes(orb, P, np.linspace(0.0, orb.T_tau, 64))
    if np.min(A0) <= 0.0:
        raise DegenerateOrbitError("linearization needs A > 0 along the orbit")
    tau_end = n_periods * orb.T_tau
    sol = solve_ivp(
        _variational_rhs(orb, P),
        (0.0, tau_end),
        np.eye(3).ravel(),
        method="DOP853",
        rtol=max(tol, 2.3e-14),
        atol=tol * 0.1,
        max_step=orb.T_tau / 2000.0,
        dense_output=True,
    )
    if not sol.success:
        raise StiffnessError(f"variational integration failed: {sol.message}")
    taus = np.linspace(0.0, tau_end, n_grid)
    Ms = sol.sol(taus).T.reshape(n_grid, 3, 3)
    Ms[0] = np.eye(3)
    return FundamentalMatrix(
        ts=taus / P.omega10, Ms=Ms, T_t=period_t(orb, P), method="variational"
    )


def fundamental_matrix_constant(B0: np.ndarray, ts: np.ndarray) -> FundamentalMatrix:
    """Constant-coefficient solution M(t) = exp(B0 t) (fixed-point case)."""
    from scipy.linalg import expm

    Ms = np.stack([expm(B0 * t) for t in ts])
    return FundamentalMatrix(ts=np.asarray(ts, float), Ms=Ms, T_t=float(ts[-1]),
                             method="constant")


def derivative_fundamental(
    orb: ExactOrbit,
    P: ReducedParams,
    h: float = None,
    n_grid: int = 257,
    n_periods: float = 1.0,
) -> FundamentalMatrix:
    """Fundamental matrix from derivatives of the closed-form orbit family.

    Columns: the flow direction (analytic), the q0 derivative and the
    zeta derivative of the orbit family (central differences at fixed t),
    renormalized by the inverse frame at t = 0.
    """
    om = P.omega10
    r = math.sqrt(om / 2.0)
    taus = np.linspace(0.0, n_periods * orb.T_tau, n_grid)
    if h is None:
        h = 1e-6
    hq = h * max(orb.q0, 1.0)
    hz = h * max(abs(orb.zeta), 0.1)

    def chi(q0, zeta):
        o = build(q0, zeta, sign=orb.sign)
        q, p = eval_orbit(o, taus)
        al, be = r * q, r * p
        A = r * np.sqrt(np.maximum(1.0 + zeta - q * q - p * p, 0.0))
        return np.stack([al, be, A], axis=1)

    def chi_dot():
        q, p = eval_orbit(orb, taus)
        al, be = r * q, r * p
        A = r * np.sqrt(np.maximum(1.0 + orb.zeta - q * q - p * p, 0.0))
        # flow direction = vector field value at the orbit point
        return np.stack(
            [
                (om + 2 * al * al) * be,
                -(om + 2 * al * al - 2 * A * A) * al,
                -2 * al * be * A,
            ],
            axis=1,
        )

    col_t = chi_dot()
    col_q0 = (chi(orb.q0 + hq, orb.zeta) - chi(orb.q0 - hq, orb.zeta)) / (2 * hq)
    col_z = (chi(orb.q0, orb.zeta + hz) - chi(orb.q0, orb.zeta - hz)) / (2 * hz)
    Mtil = np.stack([col_q0, col_t, col_z], axis=2)  # (n, 3, 3)
    M0 = Mtil[0]
    cond = np.linalg.cond(M0)
    if not np.isfinite(cond) or cond > 1e8:
        raise RenormalizationError(f"t=0 frame condition number {cond!r}")
    M0_inv = np.linalg.inv(M0)
    Ms = Mtil @ M0_inv
    Ms[0] = np.eye(3)
    return FundamentalMatrix(
        ts=taus / om, Ms=Ms, T_t=period_t(orb, P), method="derivative"
    )


def pairwise_sup_norm(fm: FundamentalMatrix, max_grid: int = 96) -> float:
    """sup over grid pairs (s, t) of the spectral norm of M(t) M(s)^-1."""
    n = len(fm.ts)
    idx = np.unique(np.linspace(0, n - 1, min(max_grid, n)).astype(int))
    Ms = fm.Ms[idx]
    inv = np.linalg.inv(Ms)
    prod = np.einsum("tij,sjk->tsik", Ms, inv)
    svals = np.linalg.svd(prod, compute_uv=False)
    return float(np.max(svals[..., 0]))


@dataclass(frozen=True)
class MonodromyReport:
    eigenvalues: np.ndarray  # 3 complex values, sorted by real part
    det: float
    sup_norm: float
    bound_ratio: float
    geometric_multiplicity: int
    alpha_beta_integral: float
    power_growth_coeff: float

    @property
    def max_unit_deviation(self) -> float:
        return float(np.max(np.abs(self.eigenvalues - 1.0)))


def monodromy(
    orb: ExactOrbit,
    P: ReducedParams,
    tol: float = 1e-13,
    anomaly_threshold: float = 1e-4,
    fm: FundamentalMatrix = None,
) -> MonodromyReport:
    """Monodromy eigenstructure and the within-period norm diagnostic."""
    if fm is None:
        fm = fundamental_matrix(orb, P, tol=tol)
    MT = fm.monodromy_matrix()
    eig = np.sort_complex(np.linalg.eigvals(MT))
    dev = float(np.max(np.abs(eig - 1.0)))
    if dev > anomaly_threshold:
        raise FloquetAnomalyError(
            f"monodromy eigenvalues deviate from unity by {dev!r}"
        )
    det = float(np.linalg.det(MT))
    # geometric multiplicity of the unit eigenvalue by singular value rank
    svals = np.linalg.svd(MT - np.eye(3), compute_uv=False)
    norm_MT = max(float(np.linalg.norm(MT, 2)), 1.0)
    rank = int(np.sum(svals > 1e-6 * norm_MT))
    gm = 3 - rank
    # quadrature of alpha* beta* over one period (odd about the half period)
    taus = np.linspace(0.0, orb.T_tau, 4097)
    al, be, _ = mode_amplitudes(orb, P, taus)
    integral = float(np.trapezoid(al * be, taus / P.omega10))
    # linear growth envelope of iterated monodromy powers
    ns = np.arange(1, 9)
    norms = [np.linalg.norm(np.linalg.matrix_power(MT, n), 2) for n in ns]
    coeff = float(np.polyfit(ns * fm.T_t, norms, 1)[0])
    sup = pairwise_sup_norm(fm)
    ratio = sup / P.sigma_scale ** ((P.gamma - 1.0) / 2.0)
    return MonodromyReport(
        eigenvalues=eig,
        det=det,
        sup_norm=sup,
        bound_ratio=ratio,
        geometric_multiplicity=gm,
        alpha_beta_integral=integral,
        power_growth_coeff=coeff,
    )


@dataclass(frozen=True)
class NormBoundReport:
    sup_norm: float
    sigma_scale: float
    bound_ratio: float
    within_bound: bool
    terms: dict


def _k_partials(orb: ExactOrbit) -> tuple[float, float]:
    """Analytic partials of the modulus k(q0, zeta) for the term budget."""
    q0, z = orb.q0_outer, orb.zeta
    if orb.orbit_class.value == "self-trapped":
        num = 2 * q0 * q0 - z
        den = q0 * q0 * (1 + z - q0 * q0)
        k2 = num / den
        dk2_dq0 = (4 * q0 * den - num * (2 * q0 * (1 + z) - 4 * q0**3)) / den**2
        dk2_dz = (-den - num * q0 * q0) / den**2
    else:
        den = 2 * q0 * q0 - z
        num = (1 + z - q0 * q0) * q0 * q0
        k2 = num / den
        dnum_dq0 = 2 * q0 * (1 + z) - 4 * q0**3
        dk2_dq0 = (dnum_dq0 * den - num * 4 * q0) / den**2
        dk2_dz = (q0 * q0 * den + num) / den**2
    k = math.sqrt(max(k2, 1e-300))
    return dk2_dq0 / (2 * k), dk2_dz / (2 * k)


def h2_diagnostic(
    orb: ExactOrbit,
    P: ReducedParams,
    cap: float = 10.0,
    fm: FundamentalMatrix = None,
    tol: float = 1e-13,
) -> NormBoundReport:
    """Within-period norm bound check with a labelled term budget.

    The budget lists the magnitudes of the periodic-coefficient and
    secular-coefficient families that control the fundamental matrix
    entries, evaluated from the closed form.
    """
    if fm is None:
        fm = fundamental_matrix(orb, P, tol=tol)
    sup = pairwise_sup_norm(fm)
    scale = P.sigma_scale ** ((P.gamma - 1.0) / 2.0)
    ratio = sup / scale
    om = P.omega10
    q0 = orb.q0_outer
    k = max(orb.k, 1e-300)
    K = complete_K(orb.k)
    Kp = dK_dk(orb.k) if 0.0 < orb.k < 1.0 else 0.0
    dk_dq0, dk_dz = _k_partials(orb)
    T = period_t(orb, P)
    amp = math.sqrt(om) * q0
    # internal frequency partials: w^2 = 2 q0^2 - zeta (outer families)
    if orb.orbit_class.value == "self-trapped":
        dw_dq0 = (2 * q0 * (1 + orb.zeta) - 4 * q0**3) / (2 * orb.omega)
        dw_dz = q0 * q0 / (2 * orb.omega)
    else:
        dw_dq0 = 2 * q0 / orb.omega
        dw_dz = -0.5 / orb.omega
    terms = {
        "periodic_inverse_period": amp / T,
        "periodic_dk_dzeta_over_k": abs(amp * dk_dz / k),
        "periodic_dk_dzeta_over_K": abs(amp * dk_dz / K),
        "periodic_dk_dq0_over_k": abs(amp * dk_dq0 / k),
        "periodic_dk_dq0_over_K": abs(amp * dk_dq0 / K),
        "periodic_dKdk_dk_dzeta": abs(amp * Kp * dk_dz),
        "periodic_dKdk_dk_dq0": abs(amp * Kp * dk_dq0),
        "secular_domega_dq0": abs(om**1.5 * q0 / K * dw_dq0 * T),
        "secular_domega_dzeta": abs(om**1.5 * q0 / K * dw_dz * T),
        "secular_dk_dq0": abs(om**1.5 * q0 * Kp / K**2 * dk_dq0 * orb.omega * T),
        "secular_dk_dzeta": abs(om**1.5 * q0 * Kp / K**2 * dk_dz * orb.omega * T),
    }
    return NormBoundReport(
        sup_norm=sup,
        sigma_scale=scale,
        bound_ratio=ratio,
        within_bound=ratio <= cap,
        terms=terms,
    )


def theta_variation(
    orb: ExactOrbit, P: ReducedParams, ts: np.ndarray, dchi: np.ndarray
) -> np.ndarray:
    """Phase response d(theta)(t) = int_0^t (6 a*, 2 b*, 2 A*) . dchi ds."""
    ts = np.asarray(ts, float)
    dchi = np.asarray(dchi, float)
    if dchi.shape != (len(ts), 3):
        raise GridError(f"dchi shape {dchi.shape} does not match grid {len(ts)}")
    al, be, A = mode_amplitudes(orb, P, P.omega10 * ts)
    w = np.stack([6.0 * al, 2.0 * be, 2.0 * A], axis=1)
    integrand = np.sum(w * dchi, axis=1)
    return cumulative_trapezoid(integrand, ts, initial=0.0)
