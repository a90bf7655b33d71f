"""Photon-number statistics of a reduced two-mode Gaussian state.

Joint probabilities P(n1, n2) are the diagonal Fock elements of the density
operator. For a zero-mean state with covariance V (vacuum = identity) they are

    <n|rho|m> = lhaf(A_(n, m)) / sqrt(n! m! det Q),

where Q is the complex (a, a^dag) covariance shifted by the identity and
A = X (I - Q^{-1})^*. The repeated-index hafnians are generated by the
recurrence G_{k+e_i} sqrt(k_i + 1) = sum_j A_ij sqrt(k_j) G_{k-e_j} over the
four indices (n1, n2, m1, m2), which is numerically stable in the
sqrt(k!)-normalized form used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numba
import numpy as np

from .errors import NumericalDomainError, ParameterError, UnsupportedFeatureError
from .gaussian import GaussianState, ladder_moment_matrices
from .interferometer import ReducedTwoModeState

NEGATIVE_CLAMP_TOL = 1e-12
RELATIVE_DISTANCE_BOUND = 1e-3


@dataclass(frozen=True)
class JointPhotonDistribution:
    """P(n1, n2) for 0 <= n1, n2 <= max_photon."""

    max_photon: int
    probabilities: np.ndarray

    def __post_init__(self):
        P = np.array(self.probabilities, dtype=float, copy=True)
        if P.shape != (self.max_photon + 1, self.max_photon + 1):
            raise ParameterError("probability grid does not match max_photon")
        P.setflags(write=False)
        object.__setattr__(self, "probabilities", P)

    @property
    def captured_mass(self) -> float:
        return float(self.probabilities.sum())

    def truncate(self, n_max: int) -> "JointPhotonDistribution":
        if not 0 <= n_max <= self.max_photon:
            raise ParameterError(f"cannot truncate a grid of {self.max_photon} photons to {n_max}")
        return JointPhotonDistribution(n_max, self.probabilities[: n_max + 1, : n_max + 1])

    def marginals(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.probabilities.sum(axis=1), self.probabilities.sum(axis=0)


@dataclass(frozen=True)
class ConvergenceProfile:
    """Truncated-correlator estimates against the exact value, per cutoff."""

    exact_value: float
    n_max: Tuple[int, ...]
    estimates: Tuple[float, ...]
    relative_distance: Tuple[float, ...]
    threshold_n_max: Optional[int]

    def rows(self) -> List[Tuple[int, float, float]]:
        return list(zip(self.n_max, self.estimates, self.relative_distance))


@numba.njit(cache=True)
def _hafnian_grid(A, cutoff):
    G = np.zeros((cutoff, cutoff, cutoff, cutoff), dtype=np.complex128)
    G[0, 0, 0, 0] = 1.0
    k = np.zeros(4, dtype=np.int64)
    for a in range(cutoff):
        for b in range(cutoff):
            for c in range(cutoff):
                for d in range(cutoff):
                    if a + b + c + d == 0:
                        continue
                    k[0] = a
                    k[1] = b
                    k[2] = c
                    k[3] = d
                    i = 0
                    while k[i] == 0:
                        i += 1
                    k[i] -= 1
                    acc = 0j
                    for j in range(4):
                        if k[j] > 0:
                            k[j] -= 1
                            acc += A[i, j] * math.sqrt(k[j] + 1) * G[k[0], k[1], k[2], k[3]]
                            k[j] += 1
                    G[a, b, c, d] = acc / math.sqrt(k[i] + 1)
                    k[i] += 1
    return G


def _kernel(cov: np.ndarray):
    """Return (A, det Q) for a zero-mean Gaussian state with covariance ``cov``."""
    M = cov.shape[0] // 2
    eye = np.eye(M)
    x, xp, p = cov[:M, :M], cov[:M, M:], cov[M:, M:]
    adag_a = (x + p + 1j * (xp - xp.T) - 2 * eye) / 4
    aa = (x - p + 1j * (xp + xp.T)) / 4
    Q = np.block([[adag_a, aa.conj()], [aa, adag_a.conj()]]) + np.eye(2 * M)
    X = np.block([[np.zeros((M, M)), eye], [eye, np.zeros((M, M))]])
    A = X @ (np.eye(2 * M) - np.linalg.inv(Q)).conj()
    return A, np.linalg.det(Q)


def joint_photon_distribution(reduced: ReducedTwoModeState, n_max: int) -> JointPhotonDistribution:
    """Photon-number probabilities of both modes up to ``n_max`` photons each.

    Raises:
        UnsupportedFeatureError: if the reduced state is displaced.
    """
    if int(n_max) != n_max or n_max < 0:
        raise ParameterError(f"n_max must be a non-negative integer, got {n_max}")
    if np.any(reduced.displacement != 0):
        raise UnsupportedFeatureError("photon statistics of displaced states are not supported")
    A, detQ = _kernel(np.asarray(reduced.covariance, dtype=float))
    if detQ.real <= 0:
        raise NumericalDomainError("non-positive normalization determinant")
    G = _hafnian_grid(np.ascontiguousarray(A), int(n_max) + 1)
    idx = np.arange(n_max + 1)
    P = G[idx[:, None], idx[None, :], idx[:, None], idx[None, :]].real / math.sqrt(detQ.real)
    if P.min() < -NEGATIVE_CLAMP_TOL:
        raise NumericalDomainError(f"negative probability {P.min():.3e} from the recurrence")
    P = np.clip(P, 0.0, None)
    return JointPhotonDistribution(int(n_max), P)


def correlator_from_distribution(dist: JointPhotonDistribution) -> float:
    """sum n1 n2 P - (sum n1 P)(sum n2 P) over the truncated grid."""
    P = dist.probabilities
    if not P.sum() > 0:
        raise ParameterError("distribution carries no probability mass")
    n = np.arange(dist.max_photon + 1, dtype=float)
    p1, p2 = dist.marginals()
    return float(n @ P @ n - (n @ p1) * (n @ p2))


def variance_from_distribution(dist: JointPhotonDistribution, mode: int) -> float:
    """Photon-number variance of one mode (0 or 1) from the truncated grid, i.e. C_{j,j}."""
    if mode not in (0, 1):
        raise ParameterError(f"mode must be 0 or 1, got {mode}")
    p = dist.marginals()[mode]
    n = np.arange(dist.max_photon + 1, dtype=float)
    mean = n @ p
    return float((n * n) @ p - mean * mean)


def convergence_profile(
    reduced: ReducedTwoModeState, exact_value: float, n_max_list: Iterable[int]
) -> ConvergenceProfile:
    """Truncated correlators for each cutoff and the first cutoff within 1e-3 relative."""
    if exact_value == 0:
        raise NumericalDomainError("relative distance is undefined for an exact value of 0")
    cutoffs = sorted(int(n) for n in n_max_list)
    if not cutoffs:
        raise ParameterError("need at least one cutoff")
    full = joint_photon_distribution(reduced, cutoffs[-1])
    estimates, distances = [], []
    threshold = None
    for n in cutoffs:
        est = correlator_from_distribution(full.truncate(n))
        rel = (exact_value - est) / exact_value
        estimates.append(est)
        distances.append(rel)
        if threshold is None and abs(rel) < RELATIVE_DISTANCE_BOUND:
            threshold = n
    return ConvergenceProfile(float(exact_value), tuple(cutoffs), tuple(estimates), tuple(distances), threshold)


def gaussian_fourth_moment(adag_adag, a_a, adag_a, a_adag, r: int, s: int, t: int, u: int) -> complex:
    """<da_r^dag da_t da_s^dag da_u> for a Gaussian state from its second moments.

    All four arguments are M x M matrices of central second moments:
    ``adag_adag[x, y] = <da_x^dag da_y^dag>``, ``a_a[x, y] = <da_x da_y>``,
    ``adag_a[x, y] = <da_x^dag da_y>``, ``a_adag[x, y] = <da_x da_y^dag>``.
    """
    return complex(
        adag_adag[r, s] * a_a[t, u]
        + adag_a[r, t] * adag_a[s, u]
        + adag_a[r, u] * a_adag[t, s]
    )


def wick_correlator(state: GaussianState, j: int, k: int) -> float:
    """C_{j,k} of an undisplaced Gaussian state from the fourth-moment factorization."""
    if np.any(state.displacement != 0):
        raise UnsupportedFeatureError("the Wick route here assumes zero displacement")
    aa, adag_a = ladder_moment_matrices(state)
    adag_adag = aa.conj()
    a_adag = adag_a.conj() + np.eye(state.mode_count)
    fourth = gaussian_fourth_moment(adag_adag, aa, adag_a, a_adag, j, k, j, k)
    C = fourth - adag_a[j, j] * adag_a[k, k]
    if abs(C.imag) > 1e-12 * max(1.0, abs(C.real)):
        raise NumericalDomainError("fourth-moment correlator is not real")
    return float(C.real)
