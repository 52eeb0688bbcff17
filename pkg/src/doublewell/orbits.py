"""Closed-form periodic orbits of the rescaled double-well system.

Every orbit starts from a turning point (q0, 0).  With a = sqrt(q0^2 -
zeta) the energy relation

    qdot^2 = (1 + q^2)(q0^2 - q^2)(q^2 + q0^2 - zeta)

integrates to Jacobi elliptic form.  Outside the separatrix (tunneling
and beating orbits),

    q(tau) = q0 cn(w tau, k) / sqrt(1 + q0^2 sn^2),   w^2 = 2 q0^2 - zeta,
    k^2 = (1 + zeta - q0^2) q0^2 / (2 q0^2 - zeta),    T = 4 K(k) / w,

and inside (self-trapped orbits, outer turning point q0),

    q(tau) = +- q0 dn(w tau, k) / sqrt(1 + q0^2 k^2 sn^2),
    w^2 = q0^2 (1 + zeta - q0^2),
    k^2 = (2 q0^2 - zeta) / (q0^2 (1 + zeta - q0^2)),  T = 2 K(k) / w.

Note the internal frequency w: direct substitution into the qdot^2
relation (and quadrature of the period integral) fixes w to the values
above, sqrt(2) larger than a common shorthand that drops the factor
produced by the half-angle substitution chain.  The residual and
return-time tests pin this down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize

from .elliptic import complete_K, jacobi
from .errors import (
    AmplitudeError,
    DomainError,
    InternalConsistencyError,
    NonPeriodicError,
    WindowError,
)
from .reduced import ReducedParams, StateQP, integrate

_BOUNDARY_RTOL = 1e-12


class OrbitClass(Enum):
    NONLINEAR_BEATING = "nonlinear-beating"
    JOSEPHSON = "josephson"
    SELF_TRAPPED = "self-trapped"
    SEPARATRIX = "separatrix"
    FIXED_POINT = "fixed-point"


def classify(q0: float, zeta: float) -> OrbitClass:
    """Partition of initial turning points (q0 >= 0) by orbit type."""
    if q0 < 0.0:
        raise DomainError(f"q0 must be nonnegative, got {q0!r}")
    if zeta <= 0.0:
        return OrbitClass.FIXED_POINT if q0 == 0.0 else OrbitClass.NONLINEAR_BEATING
    tol = _BOUNDARY_RTOL * max(1.0, math.sqrt(zeta))
    if q0 <= tol or abs(q0 - math.sqrt(zeta / 2.0)) <= tol:
        return OrbitClass.FIXED_POINT
    if abs(q0 - math.sqrt(zeta)) <= tol:
        return OrbitClass.SEPARATRIX
    if q0 > math.sqrt(zeta):
        return OrbitClass.JOSEPHSON
    return OrbitClass.SELF_TRAPPED


@dataclass(frozen=True)
class ExactOrbit:
    """A classified closed-form periodic orbit.

    q0 is the requested initial position (p(0) = 0); for self-trapped
    orbits started at their inner turning point, q0_outer carries the
    outer turning point used by the dn form and tau0 the half-period
    evaluation offset.
    """

    q0: float
    zeta: float
    k: float
    omega: float
    T_tau: float
    orbit_class: OrbitClass
    sign: int = 1
    tau0: float = 0.0
    q0_outer: float = None


def period_t(orb: ExactOrbit, P: ReducedParams) -> float:
    """Orbit period in unscaled time, T_tau / omega10."""
    return orb.T_tau / P.omega10


def build(q0: float, zeta: float, sign: int = 1) -> ExactOrbit:
    """Construct the closed-form orbit through (q0, 0)."""
    cls = classify(q0, zeta)
    if cls in (OrbitClass.SEPARATRIX, OrbitClass.FIXED_POINT):
        raise NonPeriodicError(f"no periodic orbit through q0={q0!r} at zeta={zeta!r}")
    if sign not in (+1, -1):
        raise DomainError("sign must be +1 or -1")
    if cls is OrbitClass.SELF_TRAPPED:
        inner = q0 < math.sqrt(zeta / 2.0)
        qo = math.sqrt(zeta - q0 * q0) if inner else q0
        w2 = qo * qo * (1.0 + zeta - qo * qo)
        k2 = (2.0 * qo * qo - zeta) / (qo * qo * (1.0 + zeta - qo * qo))
        if not 0.0 <= k2 < 1.0:
            raise InternalConsistencyError(f"self-trapped modulus k^2={k2!r} outside [0,1)")
        w = math.sqrt(w2)
        T = 2.0 * complete_K(math.sqrt(k2)) / w
        return ExactOrbit(
            q0=q0,
            zeta=zeta,
            k=math.sqrt(k2),
            omega=w,
            T_tau=T,
            orbit_class=cls,
            sign=sign,
            tau0=0.5 * T if inner else 0.0,
            q0_outer=qo,
        )
    # beating or tunneling branch (cn form)
    if q0 * q0 > (1.0 + zeta) * (1.0 + 1e-12):
        raise DomainError(
            f"q0={q0!r} exceeds the invariant circle radius sqrt(1+zeta) at zeta={zeta!r}"
        )
    w2 = 2.0 * q0 * q0 - zeta
    k2 = max((1.0 + zeta - q0 * q0) * q0 * q0 / w2, 0.0)
    if not 0.0 <= k2 < 1.0:
        raise InternalConsistencyError(f"modulus k^2={k2!r} outside [0,1)")
    w = math.sqrt(w2)
    T = 4.0 * complete_K(math.sqrt(k2)) / w
    return ExactOrbit(
        q0=q0,
        zeta=zeta,
        k=math.sqrt(k2),
        omega=w,
        T_tau=T,
        orbit_class=cls,
        sign=1,
        tau0=0.0,
        q0_outer=q0,
    )


def eval_orbit(orb: ExactOrbit, tau):
    """Evaluate (q, p) at rescaled time tau (scalar or array)."""
    u = orb.omega * (np.asarray(tau, dtype=float) + orb.tau0)
    qo = orb.q0_outer
    sn, cn, dn = jacobi(u, orb.k)
    if orb.orbit_class is OrbitClass.SELF_TRAPPED:
        D = 1.0 + (qo * orb.k) ** 2 * sn * sn
        q = orb.sign * qo * dn / np.sqrt(D)
        dqdu = -orb.sign * qo * (1.0 + qo * qo) * orb.k**2 * sn * cn / D**1.5
    else:
        D = 1.0 + qo * qo * sn * sn
        q = qo * cn / np.sqrt(D)
        dqdu = -qo * (1.0 + qo * qo) * sn * dn / D**1.5
    qdot = orb.omega * dqdu
    p = qdot / (1.0 + q * q)
    return q, p


def mode_amplitudes(orb: ExactOrbit, P: ReducedParams, tau):
    """Orbit in mode variables: (alpha, beta, A) at rescaled time tau."""
    q, p = eval_orbit(orb, tau)
    r = math.sqrt(P.omega10 / 2.0)
    rad = 1.0 + P.zeta - q * q - p * p
    bad = np.min(rad) if np.ndim(rad) else rad
    if bad < 0.0:
        if bad < -1e-13 * max(1.0, 1.0 + P.zeta):
            raise AmplitudeError("orbit leaves the invariant sphere alpha^2+beta^2 <= N")
        rad = np.maximum(rad, 0.0)
    return r * q, r * p, r * np.sqrt(rad)


def admissible_q0_window(
    P: ReducedParams, q0_max: float = 1.0, k_cap: float = 7.0 / 8.0, n_check: int = 64
) -> tuple[float, float]:
    """Turning-point window on which the period stays uniformly bounded.

    Supercritical: q0 in [sqrt(3 zeta / 2), q0_max], checked to keep the
    modulus k below k_cap by direct evaluation.  Subcritical: the lower
    endpoint degenerates to 0 and the invariant circle caps the top.
    """
    z = P.zeta
    if z > 0.0:
        lo = math.sqrt(1.5 * z)
        hi = min(q0_max, math.sqrt(1.0 + z))
    else:
        lo = 0.0
        hi = min(q0_max, math.sqrt(1.0 + z))
    if not lo < hi:
        raise WindowError(f"empty admissibility window [{lo!r}, {hi!r}]")
    qs = np.linspace(max(lo, 1e-12), hi, n_check)
    for q0 in qs:
        cls = classify(float(q0), z)
        if cls in (OrbitClass.SEPARATRIX, OrbitClass.FIXED_POINT):
            continue
        k = build(float(q0), z).k
        if k > k_cap:
            raise WindowError(
                f"modulus k={k!r} at q0={q0!r} exceeds the cap {k_cap!r}"
            )
    return lo, hi


@dataclass(frozen=True)
class AmplitudeReport:
    max_abs_alpha: float
    max_abs_beta: float
    min_A: float
    max_A: float


def amplitude_report(orb: ExactOrbit, P: ReducedParams, n_grid: int = 4096) -> AmplitudeReport:
    """Extrema of the mode amplitudes over one period.

    Dense sampling bracketed around each discrete extremum and refined by
    bounded scalar minimization.
    """
    taus = np.linspace(0.0, orb.T_tau, n_grid, endpoint=False)
    al, be, A = mode_amplitudes(orb, P, taus)

    def refine(series_fn, idx, sign):
        # sign=-1 maximizes series_fn
        lo = taus[max(idx - 2, 0)]
        hi = taus[min(idx + 2, n_grid - 1)]
        if hi <= lo:
            return series_fn(taus[idx])
        res = optimize.minimize_scalar(
            lambda t: sign * series_fn(t), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        return sign * res.fun

    def f_alpha(t):
        return abs(mode_amplitudes(orb, P, t)[0])

    def f_beta(t):
        return abs(mode_amplitudes(orb, P, t)[1])

    def f_A(t):
        return float(mode_amplitudes(orb, P, t)[2])

    max_al = refine(f_alpha, int(np.argmax(np.abs(al))), -1)
    max_be = refine(f_beta, int(np.argmax(np.abs(be))), -1)
    max_A = refine(f_A, int(np.argmax(A)), -1)
    min_A = refine(f_A, int(np.argmin(A)), +1)
    return AmplitudeReport(
        max_abs_alpha=float(max_al),
        max_abs_beta=float(max_be),
        min_A=float(min_A),
        max_A=float(max_A),
    )


@dataclass(frozen=True)
class PeriodScalingReport:
    T_t: float
    scale: float  # sigma_scale ** (-(1+gamma)/2)
    ratio: float
    flagged: bool


def period_scaling_check(
    P: ReducedParams, orb: ExactOrbit, cap: float = 10.0
) -> PeriodScalingReport:
    """Compare the orbit period against the asymptotic budget."""
    T = period_t(orb, P)
    scale = P.sigma_scale ** (-(1.0 + P.gamma) / 2.0)
    ratio = T / scale
    return PeriodScalingReport(T_t=T, scale=scale, ratio=ratio, flagged=ratio > cap)


def return_time(orb: ExactOrbit, P: ReducedParams, tol: float = 1e-12) -> float:
    """Independent orbit period from direct integration.

    Every orbit alternates between two turning points, so p vanishes only
    at multiples of the half period; the period is the first p = 0
    crossing at which q has returned to its starting turning point.
    """

    def event(tau, y):
        return y[1]

    event.direction = 0.0
    event.terminal = False
    q_start, _ = eval_orbit(orb, 0.0)
    traj = integrate(
        StateQP(q=float(q_start), p=0.0),
        P,
        t_final=1.25 * orb.T_tau,
        tol=tol,
        events=event,
        n_samples=256,
    )
    crossings = traj.t_events[0] if traj.t_events else np.array([])
    crossings = crossings[crossings > 0.05 * orb.T_tau]
    if len(crossings) == 0:
        raise InternalConsistencyError("orbit did not return within 1.25 periods")
    q_span = float(np.ptp(traj.y[:, 0]))
    for t in crossings:
        if abs(float(traj.sol(t)[0]) - q_start) < 0.25 * q_span:
            return float(t)
    raise InternalConsistencyError("no p = 0 crossing matched the starting turning point")
