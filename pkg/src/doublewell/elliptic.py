"""Elliptic integrals and Jacobi elliptic functions on the real modulus.

Conventions: the modulus is k (not the parameter m = k^2), matching
F(phi, k) = int_0^phi dt / sqrt(1 - k^2 sin^2 t).  Complete integrals use
the arithmetic-geometric mean, the Jacobi triple uses the descending
Landen (AGM phase) recursion, and the incomplete integral uses Carlson's
R_F duplication.  All entry points reject k >= 1; complete_E alone admits
the degenerate endpoint k = 1.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError

_EPS = np.finfo(float).eps
_MAX_AGM = 64


class EllipticTriple(NamedTuple):
    """Values (sn, cn, dn) at a common argument and modulus."""

    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def _check_modulus(k: float, *, allow_one: bool = False) -> float:
    k = float(k)
    if not math.isfinite(k) or k < 0.0:
        raise DomainError(f"modulus k={k!r} outside [0, 1)")
    if k > 1.0 or (k == 1.0 and not allow_one):
        raise DomainError(f"modulus k={k!r} outside [0, 1)")
    return k


def _agm_scheme(k: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """AGM sequences (a_n, b_n, c_n) down to convergence, a_0=1, b_0=k'."""
    a = [1.0]
    b = [math.sqrt((1.0 - k) * (1.0 + k))]
    c = [k]
    while abs(c[-1]) > _EPS * a[-1] and len(a) < _MAX_AGM:
        an = 0.5 * (a[-1] + b[-1])
        bn = math.sqrt(a[-1] * b[-1])
        c.append(0.5 * (a[-1] - b[-1]))
        a.append(an)
        b.append(bn)
    if abs(c[-1]) > _EPS * a[-1] * 4.0:
        raise ConvergenceError(f"AGM did not converge for k={k!r}")
    return np.asarray(a), np.asarray(b), np.asarray(c)


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind, K(k)."""
    k = _check_modulus(k)
    a, _, _ = _agm_scheme(k)
    return math.pi / (2.0 * a[-1])


def complete_E(k: float) -> float:
    """Complete elliptic integral of the second kind, E(k), for k in [0, 1]."""
    k = _check_modulus(k, allow_one=True)
    if k == 1.0:
        return 1.0
    a, _, c = _agm_scheme(k)
    csum = np.sum(np.ldexp(c * c, np.arange(len(c)) - 1))
    return complete_K(k) * (1.0 - csum)


def dK_dk(k: float) -> float:
    """dK/dk from the closed identity (E - (1-k^2) K) / (k (1-k^2))."""
    k = _check_modulus(k)
    if k == 0.0:
        raise DomainError("dK/dk identity is singular at k = 0")
    kp2 = (1.0 - k) * (1.0 + k)
    return (complete_E(k) - kp2 * complete_K(k)) / (k * kp2)


def _rf(x: float, y: float, z: float) -> float:
    """Carlson symmetric integral R_F by the duplication algorithm."""
    xn, yn, zn = float(x), float(y), float(z)
    A = (xn + yn + zn) / 3.0
    Q = (3.0 * _EPS) ** (-1.0 / 8.0) * max(abs(A - xn), abs(A - yn), abs(A - zn))
    f = 1.0
    A0 = A
    while Q * f >= abs(A):
        sx, sy, sz = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        lam = sx * sy + sy * sz + sz * sx
        xn, yn, zn = (xn + lam) / 4.0, (yn + lam) / 4.0, (zn + lam) / 4.0
        A = (A + lam) / 4.0
        f *= 0.25
    X = (A0 - x) * f / A
    Y = (A0 - y) * f / A
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    s = 1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0 - 3.0 * E2 * E3 / 44.0
    return s / math.sqrt(A)


def incomplete_F(phi: float, k: float) -> float:
    """Incomplete elliptic integral of the first kind, F(phi, k).

    Defined for all real phi via F(phi + n pi, k) = F(phi, k) + 2 n K(k);
    the core quadrant is evaluated through Carlson's R_F.
    """
    k = _check_modulus(k)
    phi = float(phi)
    if phi == 0.0:
        return 0.0
    n = round(phi / math.pi)
    phi_r = phi - n * math.pi  # in [-pi/2, pi/2]
    s, c = math.sin(phi_r), math.cos(phi_r)
    core = 0.0
    if s != 0.0:
        core = s * _rf(c * c, 1.0 - (k * s) ** 2, 1.0)
    if n == 0:
        return core
    return core + 2.0 * n * complete_K(k)


def jacobi(z, k: float) -> EllipticTriple:
    """Jacobi elliptic triple (sn, cn, dn)(z, k) for real z (scalar or array).

    Descending Landen via the AGM phase recursion: with phases
    phi_N = 2^N a_N z and phi_{n-1} = (phi_n + asin(c_n/a_n sin phi_n))/2,
    sn = sin phi_0 and cn = cos phi_0; dn follows from its defining
    identity dn = +sqrt(1 - k^2 sn^2), which is positive for k < 1.
    """
    k = _check_modulus(k)
    z_arr = np.asarray(z, dtype=float)
    a, _, c = _agm_scheme(k)
    # Argument reduction by the full period keeps 2^N * z moderate.
    K = math.pi / (2.0 * a[-1])
    period = 4.0 * K
    zr = z_arr - period * np.round(z_arr / period)
    nlev = len(a) - 1
    phi = math.ldexp(a[-1], nlev) * zr
    for i in range(nlev, 0, -1):
        ratio = c[i] / a[i]
        phi = 0.5 * (phi + np.arcsin(np.clip(ratio * np.sin(phi), -1.0, 1.0)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - (k * sn) ** 2)
    if z_arr.ndim == 0:
        return EllipticTriple(float(sn), float(cn), float(dn))
    return EllipticTriple(sn, cn, dn)
