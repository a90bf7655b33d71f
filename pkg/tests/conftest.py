"""Shared helpers and independent oracles for the test suite."""

import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from gbscorr import GaussianState

R_ONE = math.log(1 + math.sqrt(2))  # squeezing with mean photon number 1


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_unitary(M, rng):
    """Haar unitary from scipy, independent of the package sampler."""
    return unitary_group.rvs(M, random_state=rng) if M > 1 else np.exp(2j * np.pi * rng.random((1, 1)))


def beamsplitter():
    return np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def ladder_from_covariance(V, xi):
    """(<da da>, <da^dag da>, alpha) of a state, off-diagonal entries only.

    Uses a = (q + i p) / 2 as a linear map on the quadrature vector, so for
    j != k the moments are plain congruences of V.
    """
    M = V.shape[0] // 2
    W = np.hstack([np.eye(M), 1j * np.eye(M)]) / 2
    aa = W @ V @ W.T
    adag_a = W.conj() @ V @ W.T
    return aa, adag_a, W @ xi


def oracle_correlator(state, j, k):
    """C_{j,k}, j != k, of a Gaussian state from Wick's theorem with displacement."""
    aa, n, alpha = ladder_from_covariance(state.covariance, state.displacement)
    A, N = aa[j, k], n[j, k]
    aj, ak = alpha[j], alpha[k]
    c = (
        abs(A) ** 2
        + abs(N) ** 2
        + 2 * (np.conj(aj) * ak * np.conj(N)).real
        + 2 * (np.conj(aj) * np.conj(ak) * A).real
    )
    return float(np.real(c))


def random_two_mode_state(rng, max_nbar=0.3, max_r=0.55):
    """Random zero-mean two-mode Gaussian state: thermal -> passive -> squeeze -> passive."""
    nbar = rng.uniform(0, max_nbar, size=2)
    r = rng.uniform(0, max_r, size=2)
    V = np.diag(np.concatenate([2 * nbar + 1, 2 * nbar + 1]))

    def passive(U):
        return np.block([[U.real, -U.imag], [U.imag, U.real]])

    S = np.diag(np.concatenate([np.exp(r), np.exp(-r)]))
    O1 = passive(random_unitary(2, rng))
    O2 = passive(random_unitary(2, rng))
    T = O2 @ S @ O1
    V = T @ V @ T.T
    return GaussianState(np.zeros(4), (V + V.T) / 2)


ACCEPTANCE_LINES = []


def record_criterion(label, passed, detail):
    line = f"{label}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
