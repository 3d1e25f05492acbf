"""Cross-check the Gaussian sub-fidelity oracle against a truncated Fock-basis
density-matrix computation, a fully independent formalism."""

from math import comb

import numpy as np
import pytest
from scipy.linalg import expm

from dyndisc.channels import AdditiveNoise, PureLoss, subfidelity
from dyndisc.gaussian import ProbeEnergy

NMAX = 20
N_S = 0.4
# TMSV amplitude lambda = sqrt(N_S/(N_S+1)); photon-number tail ~ lambda^(2*NMAX)
TRUNCATION_TOL = 2e-5

SUB_PATTERNS = {
    "01": ((0, 0), (0, 1)),
    "11": ((0, 1), (1, 0)),
    "02": ((0, 0), (1, 1)),
    "12": ((0, 1), (1, 1)),
}


def tmsv_coefficients(n_s):
    lam = np.sqrt(n_s / (n_s + 1.0))
    psi = np.zeros((NMAX, NMAX))
    for n in range(NMAX):
        psi[n, n] = np.sqrt(1 - lam ** 2) * lam ** n
    return psi


def loss_kraus(eta):
    ops = []
    for loss in range(NMAX):
        K = np.zeros((NMAX, NMAX))
        for n in range(loss, NMAX):
            K[n - loss, n] = np.sqrt(comb(n, loss) * eta ** (n - loss) * (1 - eta) ** loss)
        ops.append(K)
    return ops


def additive_kraus(nu, nodes=14):
    """Random-displacement channel, discretised on a Gauss-Hermite grid."""
    from numpy.polynomial.hermite_e import hermegauss

    a = np.diag(np.sqrt(np.arange(1, NMAX)), 1)
    ad = a.T
    xs, ws = hermegauss(nodes)
    ops = []
    for xr, wr in zip(xs, ws):
        for xi, wi in zip(xs, ws):
            alpha = np.sqrt(nu / 2.0) * (xr + 1j * xi)
            D = expm(alpha * ad - np.conj(alpha) * a)
            ops.append(np.sqrt(wr * wi / (2 * np.pi)) * D)
    return ops


def apply_mode_channel(rho, kraus, mode):
    """Kraus action on one mode of rho with indices (n1, n2, n1', n2')."""
    out = np.zeros_like(rho, dtype=complex)
    bra_axis = mode + 2
    for K in kraus:
        tmp = np.moveaxis(np.tensordot(K, rho, axes=(1, mode)), 0, mode)
        out += np.moveaxis(
            np.tensordot(tmp, K.conj(), axes=(bra_axis, 1)), -1, bra_axis
        )
    return out


def fock_output(psi, channels):
    rho = np.einsum("ab,cd->abcd", psi, psi.conj()).astype(complex)
    for mode, kraus in enumerate(channels):
        rho = apply_mode_channel(rho, kraus, mode)
    return rho.reshape(NMAX * NMAX, NMAX * NMAX)


def bures_fidelity_matrix(rho_a, rho_b):
    w, U = np.linalg.eigh(rho_a)
    w = np.clip(w, 0, None)
    root = (U * np.sqrt(w)) @ U.conj().T
    ev = np.clip(np.linalg.eigvalsh(root @ rho_b @ root), 0, None)
    return float(np.sum(np.sqrt(ev)))


@pytest.mark.parametrize("label", ["01", "11", "02", "12"])
def test_loss_subfidelity_matches_fock(label):
    model = PureLoss(eta_b=0.9, eta_t=0.6)
    kraus = {0: loss_kraus(0.9), 1: loss_kraus(0.6)}
    psi = tmsv_coefficients(N_S)
    pat_a, pat_b = SUB_PATTERNS[label]
    rho_a = fock_output(psi, [kraus[b] for b in pat_a])
    rho_b = fock_output(psi, [kraus[b] for b in pat_b])
    reference = bures_fidelity_matrix(rho_a, rho_b)
    gaussian = subfidelity(label, model, ProbeEnergy(N_S), "oracle")
    assert gaussian == pytest.approx(reference, abs=TRUNCATION_TOL)


@pytest.mark.parametrize("label", ["01", "11"])
def test_additive_subfidelity_matches_fock(label):
    model = AdditiveNoise(nu_b=0.05, nu_t=0.3)
    kraus = {0: additive_kraus(0.05), 1: additive_kraus(0.3)}
    psi = tmsv_coefficients(N_S)
    pat_a, pat_b = SUB_PATTERNS[label]
    rho_a = fock_output(psi, [kraus[b] for b in pat_a])
    rho_b = fock_output(psi, [kraus[b] for b in pat_b])
    reference = bures_fidelity_matrix(rho_a, rho_b)
    gaussian = subfidelity(label, model, ProbeEnergy(N_S), "oracle")
    assert gaussian == pytest.approx(reference, abs=5e-4)
