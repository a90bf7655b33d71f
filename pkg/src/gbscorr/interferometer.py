"""Haar-random linear-optical networks and their action on Gaussian states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np
from scipy.special import ndtri

from .errors import ParameterError
from .gaussian import GaussianState, check_covariance, symplectic_form

UNITARITY_TOL = 1e-10

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class UnitaryMatrix:
    """An M x M unitary. Construction checks ``U^dag U = I`` to 1e-10."""

    entries: np.ndarray

    def __post_init__(self):
        U = np.array(self.entries, dtype=complex, copy=True)
        if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] == 0:
            raise ParameterError(f"unitary must be a non-empty square matrix, got shape {U.shape}")
        dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
        if dev > UNITARITY_TOL:
            raise ParameterError(f"matrix is not unitary (max deviation {dev:.3e})")
        U.setflags(write=False)
        object.__setattr__(self, "entries", U)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class SymplecticOrthogonal:
    """Real 2M x 2M block matrix [[Re U, -Im U], [Im U, Re U]]."""

    entries: np.ndarray

    def __post_init__(self):
        O = np.array(self.entries, dtype=float, copy=True)
        n = O.shape[0]
        if O.shape != (n, n) or n % 2:
            raise ParameterError(f"expected a 2M x 2M matrix, got shape {O.shape}")
        omega = symplectic_form(n // 2)
        if np.max(np.abs(O @ O.T - np.eye(n))) > UNITARITY_TOL:
            raise ParameterError("matrix is not orthogonal")
        if np.max(np.abs(O @ omega @ O.T - omega)) > UNITARITY_TOL:
            raise ParameterError("matrix is not symplectic")
        O.setflags(write=False)
        object.__setattr__(self, "entries", O)


@dataclass(frozen=True)
class ReducedTwoModeState:
    """Marginal Gaussian state of output modes (j, k), ordered (q_j, q_k, p_j, p_k)."""

    covariance: np.ndarray
    displacement: np.ndarray
    source_modes: Tuple[int, int]

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float, copy=True)
        disp = np.array(self.displacement, dtype=float, copy=True)
        if cov.shape != (4, 4) or disp.shape != (4,):
            raise ParameterError("reduced state needs a 4x4 covariance and a 4-vector displacement")
        check_covariance(cov)
        cov.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "displacement", disp)

    def as_state(self) -> GaussianState:
        return GaussianState(self.displacement, self.covariance)


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream for one Monte Carlo trial.

    Trial ``t`` reads a fixed block of the Philox stream keyed by
    ``master_seed``, so its draws do not depend on which other trials were
    generated, in which order, or in which batch.
    """

    master_seed: int
    trial_index: int

    def __post_init__(self):
        if self.trial_index < 0:
            raise ParameterError("trial index must be non-negative")

    def ginibre(self, M: int) -> np.ndarray:
        """M x M complex Gaussian matrix with E|z|^2 = 1."""
        return ginibre_batch(M, self.master_seed, [self.trial_index])[0]


def _philox_key(master_seed: int) -> int:
    return int(master_seed) & _MASK64


def _blocks_per_trial(M: int) -> int:
    # Philox4x64 yields 4 uint64 per counter step; each trial needs 2*M*M doubles.
    return -(-2 * M * M // 4)


def ginibre_batch(M: int, master_seed: int, trial_indices: Iterable[int]) -> np.ndarray:
    """Complex Gaussian matrices for the given trials, shape (T, M, M).

    Contiguous runs of trial indices are drawn in one call; the result for each
    trial is identical to drawing it on its own.
    """
    if M < 1:
        raise ParameterError(f"mode count must be >= 1, got {M}")
    trials = np.asarray(list(trial_indices), dtype=np.int64)
    K = _blocks_per_trial(M)
    width = 4 * K
    need = 2 * M * M
    raw = np.empty((len(trials), width), dtype=np.uint64)
    start = 0
    while start < len(trials):
        stop = start + 1
        while stop < len(trials) and trials[stop] == trials[stop - 1] + 1:
            stop += 1
        bitgen = np.random.Philox(counter=int(trials[start]) * K, key=_philox_key(master_seed))
        raw[start:stop] = bitgen.random_raw((stop - start) * width).reshape(stop - start, width)
        start = stop
    # 53-bit uniforms on the open interval (0, 1)
    u = ((raw[:, :need] >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)
    g = ndtri(u).reshape(len(trials), 2, M, M)
    return (g[:, 0] + 1j * g[:, 1]) / np.sqrt(2.0)


def haar_from_ginibre(Z: np.ndarray) -> np.ndarray:
    """Map Ginibre matrices (..., M, M) to Haar unitaries via QR with phase fix.

    Columns of Q are multiplied by the phases of diag(R) so that the implied
    triangular factor has a positive diagonal; that makes the decomposition
    unique and the result Haar distributed.
    """
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    return Q * (d / np.abs(d))[..., None, :]


def sample_haar_unitary(M: int, rng: RngStream) -> UnitaryMatrix:
    if int(M) != M or M < 1:
        raise ParameterError(f"mode count must be a positive integer, got {M}")
    return UnitaryMatrix(haar_from_ginibre(rng.ginibre(M)))


def sample_haar_unitaries(M: int, master_seed: int, trial_indices: Iterable[int]) -> np.ndarray:
    """Batch version of :func:`sample_haar_unitary` returning a raw (T, M, M) array."""
    if int(M) != M or M < 1:
        raise ParameterError(f"mode count must be a positive integer, got {M}")
    return haar_from_ginibre(ginibre_batch(M, master_seed, trial_indices))


def _unitary_array(U: Union[UnitaryMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(U, UnitaryMatrix):
        return U.entries
    return UnitaryMatrix(U).entries


def embed_symplectic(U: Union[UnitaryMatrix, np.ndarray]) -> SymplecticOrthogonal:
    U = _unitary_array(U)
    return SymplecticOrthogonal(np.block([[U.real, -U.imag], [U.imag, U.real]]))


def evolve(state: GaussianState, U: Union[UnitaryMatrix, np.ndarray]) -> GaussianState:
    """Send ``state`` through the network: V -> O V O^T, xi -> O xi."""
    U = _unitary_array(U)
    if U.shape[0] != state.mode_count:
        raise ParameterError(
            f"unitary is {U.shape[0]}x{U.shape[0]} but state has {state.mode_count} modes"
        )
    O = embed_symplectic(U).entries
    cov = O @ state.covariance @ O.T
    cov = (cov + cov.T) / 2
    return GaussianState(O @ state.displacement, cov)


def reduce_two_modes(state: GaussianState, j: int, k: int) -> ReducedTwoModeState:
    M = state.mode_count
    if j == k:
        raise ParameterError("reduction needs two distinct modes")
    for idx in (j, k):
        if int(idx) != idx or not 0 <= idx < M:
            raise ParameterError(f"mode index {idx} out of range for {M} modes")
    idx = [j, k, j + M, k + M]
    return ReducedTwoModeState(
        state.covariance[np.ix_(idx, idx)], state.displacement[idx], (int(j), int(k))
    )
