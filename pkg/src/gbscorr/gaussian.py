"""Gaussian states in the (q_1..q_M, p_1..p_M) quadrature ordering.

Conventions used everywhere in the package:

* quadratures ``q = a + a^dag`` and ``p = (a - a^dag)/i``, so the vacuum has
  covariance equal to the identity;
* the displacement vector and covariance matrix are ordered
  ``(q_1, ..., q_M, p_1, ..., p_M)``;
* mode indices are zero-based and the occupied modes of an input are always
  modes ``0 .. N-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import NumericalDomainError, ParameterError

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9

FAMILIES = ("squeezed", "thermal", "coherent", "classical", "vacuum")


def symplectic_form(M: int) -> np.ndarray:
    """Return the 2M x 2M symplectic form [[0, I], [-I, 0]]."""
    eye = np.eye(M)
    zero = np.zeros((M, M))
    return np.block([[zero, eye], [-eye, zero]])


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def check_covariance(cov: np.ndarray, tol: float = PHYSICALITY_TOL) -> None:
    """Raise ParameterError unless ``cov`` is symmetric and satisfies V + i*Omega >= 0."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ParameterError(f"covariance must be 2M x 2M, got shape {cov.shape}")
    scale = max(np.max(np.abs(cov)), 1.0)
    if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
        raise ParameterError("covariance matrix is not symmetric")
    M = cov.shape[0] // 2
    eig = np.linalg.eigvalsh(cov + 1j * symplectic_form(M))
    if eig.min() < -tol:
        raise ParameterError(
            f"covariance violates the uncertainty relation (min eigenvalue {eig.min():.3e})"
        )


@dataclass(frozen=True)
class GaussianState:
    """An M-mode Gaussian state given by its displacement and covariance.

    Args:
        displacement: real vector of length 2M, ``(q_1..q_M, p_1..p_M)``.
        covariance: real symmetric 2M x 2M matrix.
        validate: check symmetry and the uncertainty relation on construction.
    """

    displacement: np.ndarray
    covariance: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        cov = _frozen(self.covariance)
        disp = _frozen(self.displacement)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ParameterError(f"covariance must be 2M x 2M, got shape {cov.shape}")
        if disp.shape != (cov.shape[0],):
            raise ParameterError(
                f"displacement has shape {disp.shape}, expected ({cov.shape[0]},)"
            )
        if self.validate:
            check_covariance(cov)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "displacement", disp)

    @property
    def mode_count(self) -> int:
        return self.covariance.shape[0] // 2

    @classmethod
    def vacuum(cls, M: int) -> "GaussianState":
        _check_modes(M, M)
        return cls(np.zeros(2 * M), np.eye(2 * M))

    @property
    def complex_displacement(self) -> np.ndarray:
        """Complex amplitudes alpha_j = <a_j> for every mode."""
        M = self.mode_count
        return (self.displacement[:M] + 1j * self.displacement[M:]) / 2

    def is_product_diagonal(self, tol: float = 1e-12) -> bool:
        """True if the covariance is diagonal, i.e. uncorrelated and locally diagonalized."""
        off = self.covariance - np.diag(np.diag(self.covariance))
        return bool(np.max(np.abs(off), initial=0.0) <= tol * max(1.0, np.max(np.abs(self.covariance))))

    def quadrature_variances(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per-mode ``(v_q, v_p)`` of a diagonal product state."""
        if not self.is_product_diagonal():
            raise ParameterError("state is not a diagonal product state")
        d = np.diag(self.covariance)
        M = self.mode_count
        return d[:M].copy(), d[M:].copy()


@dataclass(frozen=True)
class InputSpec:
    """Description of a product input: N identical occupied modes, rest vacuum.

    ``params`` depends on ``family``:

    ========== ==========================
    squeezed   ``(r,)`` squeezing along p
    thermal    ``(nbar,)``
    coherent   ``(alpha,)`` complex amplitude
    classical  ``(v_q, v_p)`` both >= 1
    vacuum     ``()``
    ========== ==========================
    """

    mode_count: int
    occupied_count: int
    family: str
    params: tuple = ()

    def __post_init__(self):
        _check_modes(self.mode_count, self.occupied_count)
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        params = tuple(self.params)
        expected = {"squeezed": 1, "thermal": 1, "coherent": 1, "classical": 2, "vacuum": 0}
        if len(params) != expected[self.family]:
            raise ParameterError(
                f"family {self.family!r} takes {expected[self.family]} parameter(s), got {len(params)}"
            )
        if self.family == "squeezed" and not params[0] >= 0:
            raise ParameterError(f"squeezing parameter must be >= 0, got {params[0]}")
        if self.family == "thermal" and not params[0] >= 0:
            raise ParameterError(f"thermal mean photon number must be >= 0, got {params[0]}")
        if self.family == "classical" and not (params[0] >= 1 and params[1] >= 1):
            raise ParameterError(
                f"classical asymmetric variances must both be >= 1, got {params}"
            )
        object.__setattr__(self, "params", params)

    # constructors for the standard input families
    @classmethod
    def squeezed(cls, r: float, M: int, N: int, phi: float = 0.0) -> "InputSpec":
        if phi != 0:
            raise ParameterError("only phi = 0 (squeezing along p) is supported")
        return cls(M, N, "squeezed", (float(r),))

    @classmethod
    def thermal(cls, nbar: float, M: int, N: int) -> "InputSpec":
        return cls(M, N, "thermal", (float(nbar),))

    @classmethod
    def coherent(cls, alpha: complex, M: int, N: int) -> "InputSpec":
        return cls(M, N, "coherent", (complex(alpha),))

    @classmethod
    def classical(cls, v_q: float, v_p: float, M: int, N: int) -> "InputSpec":
        return cls(M, N, "classical", (float(v_q), float(v_p)))

    def occupied_variances(self) -> Tuple[float, float]:
        """``(v_q, v_p)`` of one occupied mode."""
        if self.family == "squeezed":
            r = self.params[0]
            return float(np.exp(2 * r)), float(np.exp(-2 * r))
        if self.family == "thermal":
            v = 2 * self.params[0] + 1
            return float(v), float(v)
        if self.family == "classical":
            return float(self.params[0]), float(self.params[1])
        return 1.0, 1.0

    def variances(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per-mode ``(v_q, v_p)`` arrays with vacuum on modes N..M-1."""
        vq = np.ones(self.mode_count)
        vp = np.ones(self.mode_count)
        vq[: self.occupied_count], vp[: self.occupied_count] = self.occupied_variances()
        return vq, vp

    def alphas(self) -> np.ndarray:
        alpha = np.zeros(self.mode_count, dtype=complex)
        if self.family == "coherent":
            alpha[: self.occupied_count] = self.params[0]
        return alpha

    def to_state(self) -> GaussianState:
        vq, vp = self.variances()
        alpha = self.alphas()
        disp = np.concatenate([2 * alpha.real, 2 * alpha.imag])
        return GaussianState(disp, np.diag(np.concatenate([vq, vp])))


def _check_modes(M: int, N: int) -> None:
    if int(M) != M or M < 1:
        raise ParameterError(f"mode count must be a positive integer, got {M}")
    if int(N) != N or not 1 <= N <= M:
        raise ParameterError(f"occupied count must satisfy 1 <= N <= M, got N={N}, M={M}")


def make_squeezed_vacuum(r: float, M: int, N: int, phi: float = 0.0) -> GaussianState:
    """Squeezed vacuum on modes 0..N-1 with ``v_q = e^{2r}``, ``v_p = e^{-2r}``."""
    return InputSpec.squeezed(r, M, N, phi).to_state()


def make_thermal(nbar: float, M: int, N: int) -> GaussianState:
    return InputSpec.thermal(nbar, M, N).to_state()


def make_coherent(alpha, M: int, N: int) -> GaussianState:
    """Coherent states on the occupied modes.

    ``alpha`` is either one complex amplitude shared by all occupied modes or
    a sequence of N amplitudes.
    """
    _check_modes(M, N)
    amps = np.broadcast_to(np.asarray(alpha, dtype=complex), (N,))
    full = np.zeros(M, dtype=complex)
    full[:N] = amps
    disp = np.concatenate([2 * full.real, 2 * full.imag])
    return GaussianState(disp, np.eye(2 * M))


def make_classical_asymmetric(v_q: float, v_p: float, M: int, N: int) -> GaussianState:
    return InputSpec.classical(v_q, v_p, M, N).to_state()


def _mode_variances(spec: InputSpec, mode: int) -> Tuple[float, float]:
    if int(mode) != mode or not 0 <= mode < spec.mode_count:
        raise ParameterError(f"mode index {mode} out of range for {spec.mode_count} modes")
    if mode >= spec.occupied_count:
        return 1.0, 1.0
    return spec.occupied_variances()


def mean_photon(spec: InputSpec, mode: int) -> float:
    """Mean photon number ``(v_q + v_p - 2)/4`` of one input mode (excluding displacement)."""
    vq, vp = _mode_variances(spec, mode)
    return (vq + vp - 2) / 4


def eccentricity(spec: InputSpec, mode: int) -> float:
    """Eccentricity ``(v_q - v_p)/4`` of the uncertainty ellipse of one input mode."""
    vq, vp = _mode_variances(spec, mode)
    return (vq - vp) / 4


def purity(state: GaussianState) -> float:
    """Tr(rho^2) = 1/sqrt(det V)."""
    sign, logdet = np.linalg.slogdet(state.covariance)
    if sign <= 0:
        raise NumericalDomainError("covariance determinant is not positive")
    return float(np.exp(-0.5 * logdet))


@dataclass(frozen=True)
class LadderCovariances:
    """Central second moments of the ladder operators for a pair of modes (j, k)."""

    j: int
    k: int
    aa: complex  # <da_j da_k>
    adag_a: complex  # <da_j^dag da_k>
    displacement_alpha: Tuple[complex, complex]  # (alpha_j, alpha_k)

    @property
    def adag_adag(self) -> complex:
        """<da_j^dag da_k^dag> = conj(<da_k da_j>) = conj(<da_j da_k>)."""
        return complex(np.conj(self.aa))

    @property
    def a_adag(self) -> complex:
        """<da_j da_k^dag> = conj(<da_k^dag da_j>) + delta_jk."""
        return complex(np.conj(self.adag_a)) + (1.0 if self.j == self.k else 0.0)


def ladder_moment_matrices(state: GaussianState):
    """All central ladder moments as M x M matrices.

    Returns:
        tuple ``(aa, adag_a)`` with ``aa[j, k] = <da_j da_k>`` and
        ``adag_a[j, k] = <da_j^dag da_k>``.
    """
    V = state.covariance
    M = state.mode_count
    qq, qp = V[:M, :M], V[:M, M:]
    pq, pp = V[M:, :M], V[M:, M:]
    aa = (qq + 1j * qp + 1j * pq - pp) / 4
    adag_a = (qq + 1j * qp - 1j * pq + pp) / 4 - np.eye(M) / 2
    return aa, adag_a


def ladder_covariances(state: GaussianState, j: int, k: int) -> LadderCovariances:
    M = state.mode_count
    for idx in (j, k):
        if int(idx) != idx or not 0 <= idx < M:
            raise ParameterError(f"mode index {idx} out of range for {M} modes")
    aa, adag_a = ladder_moment_matrices(state)
    alpha = state.complex_displacement
    return LadderCovariances(
        j=int(j),
        k=int(k),
        aa=complex(aa[j, k]),
        adag_a=complex(adag_a[j, k]),
        displacement_alpha=(complex(alpha[j]), complex(alpha[k])),
    )


def variances_from_ladder(aa: complex, adag_a: complex) -> Tuple[float, float]:
    """Invert the single-mode relations back to ``(v_q, v_p)`` for a diagonal mode."""
    total = 4 * (adag_a.real + 0.5)
    diff = 4 * aa.real
    return (total + diff) / 2, (total - diff) / 2
