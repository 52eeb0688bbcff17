"""Double-well Schrodinger operator: potentials, eigenpairs, diagnostics.

The operator -d^2/dx^2 + V is discretized on the interior of [-L, L]
(Dirichlet walls) with a centered high-order stencil and solved by a
shift-inverted sparse symmetric eigensolver.  The default single well is
the exactly solvable -2 sech^2(x), whose one bound state at -1 provides
ground truth; the double well V(x - ell) + V(x + ell) then carries an
even/odd pair whose splitting decays exponentially in the separation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import CubicSpline

from .errors import ConvergenceError, DomainError, SpectrumError

# centered second-derivative stencils, c[0] is the diagonal weight
_STENCILS = {
    2: [-2.0, 1.0],
    4: [-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
    8: [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0],
}


class WellKind(Enum):
    POSCHL_TELLER = "poschl-teller"
    GAUSSIAN = "gaussian"
    SQUARE_WELL = "square-well"


@dataclass(frozen=True)
class PotentialSpec:
    """Single-well shape plus the half separation of its two translates."""

    kind: WellKind = WellKind.POSCHL_TELLER
    depth: float = 2.0
    width: float = 1.0
    ell: float = 6.0

    def __post_init__(self):
        if self.depth <= 0 or self.width <= 0:
            raise DomainError("well depth and width must be positive")
        if self.ell <= 0:
            raise DomainError("half separation ell must be positive")

    def single(self, x):
        """The even unimodal well V0(x)."""
        x = np.asarray(x, dtype=float)
        if self.kind is WellKind.POSCHL_TELLER:
            return -self.depth / np.cosh(x / self.width) ** 2
        if self.kind is WellKind.GAUSSIAN:
            return -self.depth * np.exp(-0.5 * (x / self.width) ** 2)
        return np.where(np.abs(x) < self.width, -self.depth, 0.0)

    def double(self, x):
        """V0(x - ell) + V0(x + ell)."""
        x = np.asarray(x, dtype=float)
        return self.single(x - self.ell) + self.single(x + self.ell)

    def scaled(self, factor: float) -> "PotentialSpec":
        """Same dimensionless shape with all lengths multiplied by factor.

        Energies (and the mode splitting) scale by factor**-2.
        """
        return PotentialSpec(
            kind=self.kind,
            depth=self.depth / factor**2,
            width=self.width * factor,
            ell=self.ell * factor,
        )


def interior_grid(L: float, n: int) -> tuple[np.ndarray, float]:
    """Uniform interior points of [-L, L]: x_j = -L + (j+1) h, h = 2L/(n+1)."""
    h = 2.0 * L / (n + 1)
    return -L + h * np.arange(1, n + 1), h


def hamiltonian_matrix(V: np.ndarray, h: float, order: int = 8) -> sp.csc_matrix:
    if order not in _STENCILS:
        raise DomainError(f"stencil order must be one of {sorted(_STENCILS)}")
    c = _STENCILS[order]
    n = len(V)
    diags = [np.full(n, -c[0] / h**2) + V]
    offsets = [0]
    for k in range(1, len(c)):
        diags.append(np.full(n - k, -c[k] / h**2))
        offsets.append(k)
        diags.append(np.full(n - k, -c[k] / h**2))
        offsets.append(-k)
    return sp.diags(diags, offsets, format="csc")


def eigensolve_grid(
    x: np.ndarray, V: np.ndarray, m: int, order: int = 8
) -> tuple[np.ndarray, np.ndarray]:
    """Lowest m eigenpairs of -d2/dx2 + V on a uniform Dirichlet grid.

    Eigenvectors are returned with unit discrete L2 norm (sum psi^2 h = 1).
    """
    h = float(x[1] - x[0])
    H = hamiltonian_matrix(np.asarray(V, float), h, order)
    sigma = float(np.min(V)) - 1.0
    v0 = np.full(len(x), 1.0 / math.sqrt(len(x)))
    try:
        w, U = spla.eigsh(H, k=m, sigma=sigma, which="LM", v0=v0)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    idx = np.argsort(w)
    w, U = w[idx], U[:, idx]
    U = U / np.sqrt(np.sum(U * U, axis=0) * h)
    return w, U


@dataclass
class ModeBasis:
    """Lowest even/odd eigenpair of the double well on its grid."""

    grid: np.ndarray
    h: float
    omega0: float
    omega1: float
    psi0: np.ndarray
    psi1: np.ndarray
    potential: np.ndarray
    spec: PotentialSpec
    higher: list = field(default_factory=list)

    @property
    def omega10(self) -> float:
        return self.omega1 - self.omega0

    @property
    def box_length(self) -> float:
        """Dirichlet box size 2L = (n + 1) h."""
        return (len(self.grid) + 1) * self.h

    def scaled(self, factor: float) -> "ModeBasis":
        """Unit-preserving coordinate rescale x -> factor x.

        Eigenvalues scale by factor**-2 and L2-normalized modes by
        factor**-1/2; the potential follows the spec rescale.
        """
        s = float(factor)
        return ModeBasis(
            grid=self.grid * s,
            h=self.h * s,
            omega0=self.omega0 / s**2,
            omega1=self.omega1 / s**2,
            psi0=self.psi0 / math.sqrt(s),
            psi1=self.psi1 / math.sqrt(s),
            potential=self.potential / s**2,
            spec=self.spec.scaled(s),
            higher=[(w / s**2, u / math.sqrt(s)) for w, u in self.higher],
        )


def _parity_residual(psi: np.ndarray, h: float, odd: bool) -> float:
    flipped = psi[::-1]
    return float(np.sqrt(np.sum((psi + flipped) ** 2 * h))) if odd else float(
        np.sqrt(np.sum((psi - flipped) ** 2 * h))
    )


def _symmetry_purify(w, U, h):
    """Disentangle a nearly degenerate pair inside its converged subspace.

    If the solver returns mixed parity vectors, diagonalize the 2x2
    restriction of the (diagonal) eigenvalue matrix in the symmetrized
    basis; this is exact linear algebra on the converged span.
    """
    even = 0.5 * (U + U[::-1, :])
    odd = 0.5 * (U - U[::-1, :])
    ne = np.sqrt(np.sum(even**2, axis=0) * h)
    no = np.sqrt(np.sum(odd**2, axis=0) * h)
    # pick the dominant-parity representative of each symmetry class
    ie = int(np.argmax(ne))
    io = int(np.argmax(no))
    psi_e = even[:, ie] / ne[ie]
    psi_o = odd[:, io] / no[io]
    # Rayleigh quotients under the pair's eigen decomposition
    we = float(w @ ((U.T @ psi_e) * h) ** 2 / np.sum(((U.T @ psi_e) * h) ** 2))
    wo = float(w @ ((U.T @ psi_o) * h) ** 2 / np.sum(((U.T @ psi_o) * h) ** 2))
    return we, psi_e, wo, psi_o


def eigensolve(
    spec: PotentialSpec, L: float, n: int, m: int = 2, order: int = 8
) -> ModeBasis:
    """Lowest m double-well eigenpairs; the first two become the ModeBasis.

    Requires L comfortably beyond ell so the Dirichlet walls sit under the
    exponential tails, and at least two bound states below zero.
    """
    if m < 1:
        raise DomainError("need at least one eigenpair")
    if n < 256:
        raise DomainError("grid too coarse: n >= 256 required")
    x, h = interior_grid(L, n)
    V = spec.double(x)
    if abs(spec.double(np.array([L]))[0]) > 1e-10:
        raise DomainError(f"potential tail at the wall exceeds 1e-10; increase L={L!r}")
    w, U = eigensolve_grid(x, V, max(m, 2), order)
    if np.sum(w < 0.0) < min(m, 2):
        raise SpectrumError(
            f"found only {int(np.sum(w < 0.0))} bound states below zero"
        )
    psi0, psi1 = U[:, 0], U[:, 1]
    r0 = _parity_residual(psi0, h, odd=False)
    r1 = _parity_residual(psi1, h, odd=True)
    if max(r0, r1) > 1e-8:
        w0, psi0, w1, psi1 = _symmetry_purify(w[:2], U[:, :2], h)
    else:
        w0, w1 = float(w[0]), float(w[1])
    # deterministic sign conventions: psi0 positive at the center,
    # psi1 rising through it
    mid = len(x) // 2
    if psi0[mid] < 0:
        psi0 = -psi0
    if psi1[mid + 1] - psi1[mid - 1] < 0:
        psi1 = -psi1
    higher = [(float(w[j]), U[:, j]) for j in range(2, len(w))]
    return ModeBasis(
        grid=x,
        h=h,
        omega0=w0,
        omega1=w1,
        psi0=psi0,
        psi1=psi1,
        potential=V,
        spec=spec,
        higher=higher,
    )


def eigensolve_spectral(spec: PotentialSpec, L: float, n: int, m: int = 2) -> ModeBasis:
    """ModeBasis from the sine-spectral discrete Hamiltonian.

    Diagonalizes exactly the operator the split-step integrator applies
    (DST-I kinetic phase plus the pointwise potential), so mode
    frequencies and the evolution are consistent to roundoff.  Dense
    solve: intended for moderate n.
    """
    from scipy import fft as sfft

    if m < 2:
        raise DomainError("spectral basis solve returns a mode pair; m >= 2")
    x, h = interior_grid(L, n)
    V = spec.double(x)
    k = np.pi * np.arange(1, n + 1) / (2.0 * L)
    S = sfft.dst(np.eye(n), type=1, norm="ortho", axis=0)
    H = S.T @ (k[:, None] ** 2 * S) + np.diag(V)
    w, U = np.linalg.eigh(0.5 * (H + H.T))
    if np.sum(w < 0.0) < m:
        raise SpectrumError(f"found only {int(np.sum(w < 0.0))} bound states below zero")
    U = U[:, :m] / math.sqrt(h)
    psi0, psi1 = U[:, 0].copy(), U[:, 1].copy()
    mid = n // 2
    if psi0[mid] < 0:
        psi0 = -psi0
    if psi1[mid + 1] - psi1[mid - 1] < 0:
        psi1 = -psi1
    higher = [(float(w[j]), U[:, j]) for j in range(2, m)]
    return ModeBasis(
        grid=x,
        h=h,
        omega0=float(w[0]),
        omega1=float(w[1]),
        psi0=psi0,
        psi1=psi1,
        potential=V,
        spec=spec,
        higher=higher,
    )


def single_well_mode(
    spec: PotentialSpec, L: float, n: int, order: int = 8
) -> tuple[float, np.ndarray, np.ndarray]:
    """Ground eigenpair (omega_star, phi_star) of the single well V0."""
    x, h = interior_grid(L, n)
    w, U = eigensolve_grid(x, spec.single(x), 1, order)
    if w[0] >= 0.0:
        raise SpectrumError("single well has no bound state")
    phi = U[:, 0]
    mid = len(x) // 2
    if phi[mid] < 0:
        phi = -phi
    return float(w[0]), phi, x


@dataclass(frozen=True)
class SplittingFit:
    pairs: list  # (ell, omega10)
    slope: float
    intercept: float
    r_squared: float


def splitting_curve(
    spec: PotentialSpec, ells, L: float, n: int, order: int = 8
) -> SplittingFit:
    """Mode splitting versus separation with a log-linear fit."""
    pairs = []
    for ell in ells:
        basis = eigensolve(
            PotentialSpec(spec.kind, spec.depth, spec.width, float(ell)), L, n, order=order
        )
        pairs.append((float(ell), basis.omega10))
    ellv = np.array([p[0] for p in pairs])
    logs = np.log([p[1] for p in pairs])
    slope, intercept = np.polyfit(ellv, logs, 1)
    fit = slope * ellv + intercept
    ss_res = float(np.sum((logs - fit) ** 2))
    ss_tot = float(np.sum((logs - np.mean(logs)) ** 2))
    return SplittingFit(
        pairs=pairs,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=1.0 - ss_res / ss_tot,
    )


def bimodal_check(basis: ModeBasis, spec: PotentialSpec = None) -> tuple[float, float]:
    """Residuals of the two modes against shifted single-well combinations.

    r_j = || psi_j - (phi(x - ell) + (-1)^j phi(x + ell)) / sqrt 2 ||.
    """
    spec = spec or basis.spec
    L = basis.box_length / 2.0
    _, phi, x = single_well_mode(spec, L, len(basis.grid))
    interp = CubicSpline(x, phi, extrapolate=False)

    def shifted(offset):
        vals = interp(basis.grid - offset)
        return np.nan_to_num(vals, nan=0.0)

    out = []
    for j, psi in enumerate((basis.psi0, basis.psi1)):
        combo = (shifted(spec.ell) + (-1) ** j * shifted(-spec.ell)) / math.sqrt(2.0)
        out.append(float(np.sqrt(np.sum((psi - combo) ** 2 * basis.h))))
    return out[0], out[1]


def overlap_integrals(basis: ModeBasis) -> tuple[float, float, float]:
    """Quartic mode overlaps (I00, I01, I11) by grid quadrature."""
    h = basis.h
    p0, p1 = basis.psi0, basis.psi1
    return (
        float(np.sum(p0**4) * h),
        float(np.sum(p0**2 * p1**2) * h),
        float(np.sum(p1**4) * h),
    )


def rayleigh_quotient(basis: ModeBasis, psi: np.ndarray, order: int = 8) -> float:
    """<psi, H psi> / <psi, psi> with the same stencil as the solver."""
    H = hamiltonian_matrix(basis.potential, basis.h, order)
    num = float(psi @ (H @ psi))
    den = float(psi @ psi)
    return num / den
