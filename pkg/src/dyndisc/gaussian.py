"""Zero-mean Gaussian states, phase-insensitive channels and the fidelity kernel.

Covariance matrices are real, symmetric, mode-ordered (x1, p1, x2, p2, ...)
and dimensionless with vacuum variance 1/2.  All states have zero first
moments; displacements are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import schur

from .errors import InvalidArgument

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-10
EIG_CLIP = 1e-14
PURITY_TOL = 1e-10


@lru_cache(maxsize=64)
def symplectic_form(modes: int) -> np.ndarray:
    """The 2m x 2m symplectic form, block-diagonal in [[0, 1], [-1, 0]]."""
    O = np.zeros((2 * modes, 2 * modes))
    for j in range(modes):
        O[2 * j, 2 * j + 1] = 1.0
        O[2 * j + 1, 2 * j] = -1.0
    O.setflags(write=False)
    return O


@dataclass(frozen=True)
class ProbeEnergy:
    """Mean photon number per signal mode; mu = n_s + 1/2 is the quadrature variance."""

    n_s: float

    def __post_init__(self):
        if not np.isfinite(self.n_s) or self.n_s < 0:
            raise InvalidArgument(f"mean photon number must be >= 0, got {self.n_s}")

    @property
    def mu(self) -> float:
        return self.n_s + 0.5


@dataclass(frozen=True)
class GpiChannelParams:
    """Gaussian phase-insensitive channel, V -> tau*V + nu*I per mode."""

    tau: float
    nu: float

    def __post_init__(self):
        # tau = 0 is admitted: it replaces the mode with a thermal state
        if self.tau < 0 or self.nu < 0:
            raise InvalidArgument(f"need tau >= 0 and nu >= 0, got ({self.tau}, {self.nu})")
        if self.nu + 1e-12 < abs(1.0 - self.tau) / 2.0:
            raise InvalidArgument(
                f"unphysical channel ({self.tau}, {self.nu}): nu < |1 - tau|/2"
            )

    @classmethod
    def pure_loss(cls, eta: float) -> "GpiChannelParams":
        if not 0 <= eta <= 1:
            raise InvalidArgument(f"loss transmissivity must be in [0, 1], got {eta}")
        return cls(tau=eta, nu=(1.0 - eta) / 2.0)

    @classmethod
    def additive(cls, nu: float) -> "GpiChannelParams":
        if nu < 0:
            raise InvalidArgument(f"added noise must be >= 0, got {nu}")
        return cls(tau=1.0, nu=nu)


class CovarianceMatrix:
    """Validated covariance matrix of an m-mode zero-mean Gaussian state."""

    __slots__ = ("modes", "matrix")

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
            raise InvalidArgument(f"covariance matrix must be 2m x 2m, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise InvalidArgument("covariance matrix has non-finite entries")
        asym = np.abs(matrix - matrix.T).max()
        if asym > SYMMETRY_TOL:
            raise InvalidArgument(f"covariance matrix asymmetric by {asym:.3e}")
        modes = matrix.shape[0] // 2
        sym = 0.5 * (matrix + matrix.T)
        # positive definiteness and the uncertainty relation V + i*Omega/2 >= 0
        if np.linalg.eigvalsh(sym).min() <= 0:
            raise InvalidArgument("covariance matrix is not positive definite")
        herm = sym + 0.5j * symplectic_form(modes)
        if np.linalg.eigvalsh(herm).min() < -UNCERTAINTY_TOL:
            raise InvalidArgument("covariance matrix violates the uncertainty relation")
        sym.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "matrix", sym)

    def __setattr__(self, *_):
        raise AttributeError("CovarianceMatrix is immutable")

    def __repr__(self):
        return f"CovarianceMatrix(modes={self.modes})"

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Williamson spectrum, ascending; all >= 1/2 for physical states."""
        nus, _ = williamson(self.matrix)
        return nus

    def is_pure(self, tol: float = UNCERTAINTY_TOL) -> bool:
        return bool(np.all(np.abs(self.symplectic_eigenvalues() - 0.5) <= tol))

    def permute_modes(self, order) -> "CovarianceMatrix":
        idx = np.ravel([[2 * k, 2 * k + 1] for k in order])
        if sorted(order) != list(range(self.modes)):
            raise InvalidArgument("permutation must reorder all modes exactly once")
        return CovarianceMatrix(self.matrix[np.ix_(idx, idx)])


def direct_sum(*cms: CovarianceMatrix) -> CovarianceMatrix:
    """Tensor product of states = direct sum of covariance matrices."""
    mats = [cm.matrix for cm in cms]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n))
    at = 0
    for m in mats:
        out[at:at + m.shape[0], at:at + m.shape[0]] = m
        at += m.shape[0]
    return CovarianceMatrix(out)


def tmsv_cm(energy: ProbeEnergy) -> CovarianceMatrix:
    """Two-mode squeezed vacuum at the given per-mode energy."""
    return cvghz_cm(2, energy)


def cvghz_cm(m: int, energy: ProbeEnergy) -> CovarianceMatrix:
    """Fully symmetric m-mode entangled state with maximal pairwise correlation.

    Diagonal blocks are mu*I; every off-diagonal block is diag(c, -c) with
    c = sqrt(mu^2 - 1/4)/(m - 1), which keeps the global state pure.
    """
    if m < 2:
        raise InvalidArgument(f"entangled probe needs at least 2 modes, got {m}")
    mu = energy.mu
    c = np.sqrt(mu * mu - 0.25) / (m - 1)
    V = np.zeros((2 * m, 2 * m))
    for i in range(m):
        V[2 * i, 2 * i] = V[2 * i + 1, 2 * i + 1] = mu
        for j in range(m):
            if i != j:
                V[2 * i, 2 * j] = c
                V[2 * i + 1, 2 * j + 1] = -c
    return CovarianceMatrix(V)


def single_mode_thermal_cm(energy: ProbeEnergy) -> CovarianceMatrix:
    """Single-mode thermal state mu*I: the reduced state of any CV-GHZ mode."""
    return CovarianceMatrix(energy.mu * np.eye(2))


def apply_gpi_pattern(cm: CovarianceMatrix, params_per_mode) -> CovarianceMatrix:
    """Push a state through one GPI channel per mode.

    Blockwise this is V -> tau_i V_ii + nu_i I on diagonal blocks and
    V_ij -> sqrt(tau_i tau_j) V_ij off the diagonal.
    """
    params = list(params_per_mode)
    if len(params) != cm.modes:
        raise InvalidArgument(
            f"pattern length {len(params)} does not match {cm.modes} modes"
        )
    g = np.ravel([[np.sqrt(p.tau)] * 2 for p in params])
    out = cm.matrix * np.outer(g, g)
    out[np.diag_indices(2 * cm.modes)] += np.ravel([[p.nu] * 2 for p in params])
    return CovarianceMatrix(out)


def williamson(matrix: np.ndarray):
    """Williamson decomposition V = S D S^T.

    Returns (nus, S) with D = oplus nu_k I_2 and S symplectic.  Built from a
    symmetric eigendecomposition and a real Schur form of an antisymmetric
    matrix, so it stays accurate for nearly pure states.
    """
    n = matrix.shape[0] // 2
    w, U = np.linalg.eigh(matrix)
    w = np.clip(w, EIG_CLIP, None)
    root = (U * np.sqrt(w)) @ U.T
    iroot = (U / np.sqrt(w)) @ U.T
    A = iroot @ symplectic_form(n) @ iroot
    A = 0.5 * (A - A.T)
    T, Q = schur(A)
    lam = np.empty(n)
    for k in range(n):
        b = T[2 * k, 2 * k + 1]
        if b < 0:
            Q[:, [2 * k, 2 * k + 1]] = Q[:, [2 * k + 1, 2 * k]]
            b = -b
        lam[k] = b  # = 1/nu_k
    nus = 1.0 / lam
    order = np.argsort(nus)
    cols = np.ravel([[2 * k, 2 * k + 1] for k in order])
    Q = Q[:, cols]
    nus = nus[order]
    S = root @ Q * np.ravel([[1.0 / np.sqrt(nu)] * 2 for nu in nus])
    return nus, S


def _symplectic_inverse(S: np.ndarray) -> np.ndarray:
    O = symplectic_form(S.shape[0] // 2)
    return O.T @ S.T @ O


def _mode_indices(modes) -> np.ndarray:
    return np.ravel([[2 * k, 2 * k + 1] for k in modes]).astype(int)


def _mixed_fidelity_fourth(V1: np.ndarray, V2: np.ndarray) -> float:
    """F^4 for a pair of strictly mixed states (eigenvalue-product formula)."""
    n = V1.shape[0] // 2
    O = symplectic_form(n)
    ssum = V1 + V2
    vaux = O.T @ np.linalg.solve(ssum, 0.25 * O + V2 @ O @ V1)
    t = np.linalg.eigvals(vaux @ O)
    terms = 2.0 * t * (np.sqrt(1.0 + 1.0 / (4.0 * t * t)) + 1.0)
    _, logdet = np.linalg.slogdet(ssum)
    return float(np.exp(np.sum(np.log(terms)).real - logdet))


def gaussian_fidelity(a: CovarianceMatrix, b: CovarianceMatrix) -> float:
    """Bures fidelity F = Tr sqrt(sqrt(rho) sigma sqrt(rho)) of two zero-mean states.

    Pure modes of either state are split off exactly: in the Williamson frame
    of one state its pure modes are vacua, and sandwiching the other state
    between vacuum projectors is a Schur complement.  The leftover strictly
    mixed pair goes through the determinant formula, which is only
    ill-conditioned near purity, precisely where it is no longer used.
    """
    if a.modes != b.modes:
        raise InvalidArgument(f"mode mismatch: {a.modes} vs {b.modes}")
    V1 = a.matrix.copy()
    V2 = b.matrix.copy()
    log_f = 0.0
    for _ in range(2 * a.modes + 2):
        if V1.shape[0] == 0:
            return min(float(np.exp(log_f)), 1.0)
        nus1, S1 = williamson(V1)
        pure1 = [k for k, nu in enumerate(nus1) if nu < 0.5 + PURITY_TOL]
        if not pure1:
            nus2, _ = williamson(V2)
            if not np.any(nus2 < 0.5 + PURITY_TOL):
                break
            V1, V2 = V2, V1
            nus1, S1 = williamson(V1)
            pure1 = [k for k, nu in enumerate(nus1) if nu < 0.5 + PURITY_TOL]
        mixed1 = [k for k in range(len(nus1)) if k not in pure1]
        Si = _symplectic_inverse(S1)
        W2 = Si @ V2 @ Si.T
        iP = _mode_indices(pure1)
        A = W2[np.ix_(iP, iP)] + 0.5 * np.eye(len(iP))
        _, logdet = np.linalg.slogdet(A)
        log_f += -0.25 * logdet
        if not mixed1:
            return min(float(np.exp(log_f)), 1.0)
        iM = _mode_indices(mixed1)
        C = W2[np.ix_(iP, iM)]
        B = W2[np.ix_(iM, iM)]
        V2 = B - C.T @ np.linalg.solve(A, C)
        V2 = 0.5 * (V2 + V2.T)
        V1 = np.diag(np.ravel([[nus1[k]] * 2 for k in mixed1]))
    f4 = abs(_mixed_fidelity_fourth(V1, V2))
    return min(float(np.exp(log_f) * f4 ** 0.25), 1.0)
