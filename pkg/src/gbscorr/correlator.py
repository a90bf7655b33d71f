"""Photon-number two-point correlators and their Haar-randomized statistics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import NumericalDomainError, ParameterError
from .gaussian import GaussianState
from .interferometer import UnitaryMatrix

IMAG_RESIDUE_TOL = 1e-12

ArrayOrUnitary = Union[UnitaryMatrix, np.ndarray]


def _as_array(U: ArrayOrUnitary) -> np.ndarray:
    if isinstance(U, UnitaryMatrix):
        return U.entries
    return UnitaryMatrix(U).entries


def _excess(vq, vp):
    """Mean photon number per input, (v_q + v_p - 2) / 4, without forming v_q + v_p."""
    return ((vq - 1.0) + (vp - 1.0)) / 4


def _check_index(M: int, *idx: int) -> None:
    for i in idx:
        if int(i) != i or not 0 <= i < M:
            raise ParameterError(f"mode index {i} out of range for {M} modes")


def _realize(value, scale=1.0):
    """Drop the imaginary part after checking it is round-off."""
    value = np.asarray(value)
    limit = IMAG_RESIDUE_TOL * np.maximum(1.0, np.maximum(np.abs(value.real), scale))
    if np.any(np.abs(value.imag) > limit):
        worst = float(np.max(np.abs(value.imag)))
        raise NumericalDomainError(f"correlator has a non-negligible imaginary part ({worst:.3e})")
    real = value.real
    return float(real) if real.ndim == 0 else real


@dataclass(frozen=True)
class CorrelatorInputs:
    """Per-mode parameters of N identical occupied inputs (rest vacuum)."""

    mean_photon: float
    eccentricity: float
    occupied_count: int
    mode_count: int

    def __post_init__(self):
        if not self.mean_photon >= 0:
            raise ParameterError(f"mean photon number must be >= 0, got {self.mean_photon}")
        n, e = self.mean_photon, self.eccentricity
        if e * e > n * (n + 1) * (1 + 1e-12) + 1e-15:
            raise ParameterError(
                f"eccentricity {e} exceeds the physical bound sqrt(n(n+1)) for n={n}"
            )
        if not 1 <= self.occupied_count <= self.mode_count:
            raise ParameterError("occupied count must satisfy 1 <= N <= M")

    @classmethod
    def from_variances(cls, v_q: float, v_p: float, N: int, M: int) -> "CorrelatorInputs":
        return cls((v_q + v_p - 2) / 4, (v_q - v_p) / 4, N, M)


@dataclass(frozen=True)
class CorrelatorSampleSet:
    """Correlator values, one per Haar trial, with where they came from."""

    values: np.ndarray
    fingerprint: str = ""
    master_seed: Optional[int] = None
    first_trial: int = 0

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    @property
    def trial_indices(self) -> np.ndarray:
        return np.arange(self.first_trial, self.first_trial + len(self.values))


@dataclass(frozen=True)
class SignatureSummary:
    """NM, CV and Sk together with the raw moments they were built from.

    Undefined quantities are NaN with the matching ``*_defined`` flag False.
    Standard errors are zero for analytic summaries.
    """

    nm: float
    cv: float
    sk: float
    m1: float
    m2: float
    m3: float
    stderr_nm: float = 0.0
    stderr_cv: float = 0.0
    stderr_sk: float = 0.0
    stderr_m1: float = 0.0
    stderr_m2: float = 0.0
    stderr_m3: float = 0.0
    cv_defined: bool = True
    sk_defined: bool = True
    method: str = "analytic"
    n_samples: int = 0

    def value(self, name: str) -> float:
        return getattr(self, name)

    def stderr(self, name: str) -> float:
        return getattr(self, f"stderr_{name}")

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(self).items()}


# ---------------------------------------------------------------------------
# exact correlators for a given network


def _pair_correlator(vq, vp, alpha, U, j, k):
    """General input-output relation, vectorized over leading axes of U.

    ``vq``, ``vp``, ``alpha`` are per-input-mode arrays of length M. The
    vacuum part of each input is summed analytically using unitarity, so
    weakly excited inputs do not lose precision to cancellation.
    """
    n = _excess(vq, vp)
    d = (vq - vp) / 4
    Uj = U[..., j, :]
    Uk = U[..., k, :]
    excess = np.sum(np.conj(Uj) * Uk * n, axis=-1)
    D = np.sum(Uj * Uk * d, axis=-1)
    delta = 0.5 if j == k else 0.0
    S = excess + delta
    C = (np.conj(excess) + 2 * delta) * excess + D * np.conj(D)
    if np.any(alpha != 0):
        aj = Uj @ alpha
        ak = Uk @ alpha
        C = C + (
            np.conj(aj) * ak * np.conj(S)
            + aj * np.conj(ak) * S
            + np.conj(aj) * np.conj(ak) * D
            + aj * ak * np.conj(D)
        )
    return C


def correlator_general(state: GaussianState, U: ArrayOrUnitary, j: int, k: int) -> float:
    """C_{j,k} at the output for a diagonal product input, displacement included.

    Args:
        state: uncorrelated input with diagonal covariance; any displacement.
        U: network unitary acting on the annihilation operators.
        j, k: output modes (zero-based); ``j == k`` gives the photon-number variance.
    """
    U = _as_array(U)
    M = state.mode_count
    if U.shape != (M, M):
        raise ParameterError(f"unitary shape {U.shape} does not match {M} modes")
    _check_index(M, j, k)
    vq, vp = state.quadrature_variances()
    C = _pair_correlator(vq, vp, state.complex_displacement, U, j, k)
    return _realize(C)


def _split_variances(variances) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(variances, GaussianState):
        if np.any(variances.displacement != 0):
            raise ParameterError("state has a nonzero displacement")
        return variances.quadrature_variances()
    vq, vp = variances
    return np.asarray(vq, dtype=float), np.asarray(vp, dtype=float)


def correlator_no_displacement(variances, U: ArrayOrUnitary, j: int, k: int) -> float:
    """C_{j,k} for undisplaced product inputs written as explicit double sums over inputs.

    ``variances`` is ``(v_q, v_p)`` (two length-M arrays) or an undisplaced
    diagonal :class:`GaussianState`.
    """
    vq, vp = _split_variances(variances)
    U = _as_array(U)
    M = len(vq)
    if U.shape != (M, M) or len(vp) != M:
        raise ParameterError("variances and unitary dimensions disagree")
    _check_index(M, j, k)
    n = _excess(vq, vp)
    plus = np.outer(n, n)
    minus = np.outer(vq - vp, vq - vp) / 16
    Uj, Uk = U[j], U[k]
    # first sum: U_jw U_kw' U*_jw' U*_kw ; second: U_jw U_kw U*_jw' U*_kw'
    # Vacuum terms of the first sum are summed by unitarity: they cancel the
    # -1/4 on the diagonal and leave sum_w n_w |U_jw|^2 when j == k.
    first = np.einsum("ab,a,b,b,a->", plus, Uj, Uk, Uj.conj(), Uk.conj())
    second = np.einsum("ab,a,a,b,b->", minus, Uj, Uk, Uj.conj(), Uk.conj())
    C = first + second
    if j == k:
        C = C + np.sum(n * np.abs(Uj) ** 2)
    return _realize(C)


def correlator_identical_inputs(inputs: CorrelatorInputs, U: ArrayOrUnitary, j: int, k: int) -> float:
    """C_{j,k}, j != k, for N identical undisplaced inputs in modes 0..N-1."""
    U = _as_array(U)
    M, N = inputs.mode_count, inputs.occupied_count
    if U.shape != (M, M):
        raise ParameterError(f"unitary shape {U.shape} does not match {M} modes")
    _check_index(M, j, k)
    if j == k:
        raise ParameterError("the identical-input form is only defined for distinct outputs")
    Uj, Uk = U[j, :N], U[k, :N]
    first = np.einsum("a,b,b,a->", Uj, Uk, Uj.conj(), Uk.conj())
    second = np.einsum("a,a,b,b->", Uj, Uk, Uj.conj(), Uk.conj())
    C = inputs.mean_photon**2 * first + inputs.eccentricity**2 * second
    return _realize(C)


def pair_correlators(vq, vp, Us: np.ndarray, j: int = 0, k: int = 1, alpha=None) -> np.ndarray:
    """Vectorized C_{j,k} over a stack of unitaries of shape (T, M, M)."""
    vq = np.asarray(vq, dtype=float)
    vp = np.asarray(vp, dtype=float)
    alpha = np.zeros(len(vq), dtype=complex) if alpha is None else np.asarray(alpha, dtype=complex)
    C = _pair_correlator(vq, vp, alpha, np.asarray(Us), j, k)
    return np.atleast_1d(_realize(C))


# ---------------------------------------------------------------------------
# Haar averages


def analytic_moments(M: int, N: int, n: float, eps: float) -> Tuple[float, float, float]:
    """Closed-form E_U(C), E_U(C^2), E_U(C^3) over Haar-random M-mode networks.

    Args:
        M: number of modes (>= 2).
        N: number of identical occupied inputs.
        n: mean photon number per occupied input.
        eps: eccentricity per occupied input (enters squared).
    """
    if int(M) != M or M < 2:
        raise ParameterError(f"analytic moments need M >= 2, got {M}")
    if int(N) != N or not 1 <= N <= M:
        raise ParameterError(f"occupied count must satisfy 1 <= N <= M, got {N}")
    M = float(M)
    N = float(N)
    n2 = n * n
    e2 = eps * eps

    m1 = N * (M - N) / ((M - 1) * M * (M + 1)) * n2 + N / (M * (M + 1)) * e2

    den2 = (M - 1) * M**2 * (M + 1) * (M + 2) * (M + 3)
    m2 = (
        2 * N * (N + 1) * (M - N + 1) * (M - N) * n2**2
        + 2 * N * (M - N) * (M * N + 3 * M - N + 1) * n2 * e2
        + 2 * N * (M**2 * N + M**2 + N * M - 3 * M + 2 * N - 2) * e2**2
    ) / den2

    den3 = (M - 1) * M**2 * (M + 1) ** 2 * (M + 2) * (M + 3) * (M + 4) * (M + 5)
    den3e = (M - 1) * M**2 * (M + 1) * (M + 2) * (M + 3) * (M + 4) * (M + 5)
    m3 = (
        6 * (N + 1) * N * (N + 2) * (M - N + 2) * (M - N + 1) * (M - N) * n2**3
        + 6 * N * (N + 2) * (M - N) * (M - N + 1) * (M * N + 5 * M - N + 7) * n2**2 * e2
        + 6 * N * (N + 2) * (M - N) * (M**2 * N + M * N + 5 * M**2 + 5 * M + 4 * N - 4) * n2 * e2**2
    ) / den3 + 6 * N * (N + 2) * (M**2 * N + 5 * M * N + M**2 - 7 * M + 12 * N - 12) / den3e * e2**3
    return float(m1), float(m2), float(m3)


def _signatures_central(m1, var, mu3, M, N):
    """NM, CV, Sk and definedness flags from the mean and central moments (vectorized)."""
    m1 = np.asarray(m1, dtype=float)
    var = np.asarray(var, dtype=float)
    mu3 = np.asarray(mu3, dtype=float)
    nm = m1 * M * M / N
    cv_ok = (m1 != 0) & (var >= 0)
    sk_ok = var > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        cv = np.where(cv_ok, np.sqrt(np.where(var > 0, var, 0.0)) / m1, np.nan)
        sk = np.where(sk_ok, mu3 / np.where(sk_ok, var, 1.0) ** 1.5, np.nan)
    return nm, cv, sk, cv_ok, sk_ok


def signatures_from_moments(m1: float, m2: float, m3: float, M: int, N: int) -> SignatureSummary:
    """NM = m1 M^2/N, CV = sqrt(m2 - m1^2)/m1, Sk = (m3 - 3 m1 m2 + 2 m1^3)/(m2 - m1^2)^{3/2}."""
    var = m2 - m1 * m1
    mu3 = m3 - 3 * m1 * m2 + 2 * m1**3
    nm, cv, sk, cv_ok, sk_ok = _signatures_central(m1, var, mu3, M, N)
    return SignatureSummary(
        nm=float(nm), cv=float(cv), sk=float(sk),
        m1=float(m1), m2=float(m2), m3=float(m3),
        cv_defined=bool(cv_ok), sk_defined=bool(sk_ok),
    )


def analytic_signatures(M: int, N: int, n: float, eps: float) -> SignatureSummary:
    return signatures_from_moments(*analytic_moments(M, N, n, eps), M, N)


def _sample_stats(c: np.ndarray, axis=-1):
    m1 = c.mean(axis=axis)
    dev = c - np.expand_dims(m1, axis)
    var = (dev * dev).mean(axis=axis)
    mu3 = (dev * dev * dev).mean(axis=axis)
    m2 = (c * c).mean(axis=axis)
    m3 = (c * c * c).mean(axis=axis)
    return m1, m2, m3, var, mu3


def _bootstrap_errors(c, M, N, rounds, seed):
    rng = np.random.default_rng(seed)
    n = len(c)
    chunk = max(1, min(rounds, 4_000_000 // n))
    out = np.empty((rounds, 6))
    done = 0
    while done < rounds:
        b = min(chunk, rounds - done)
        x = c[rng.integers(0, n, size=(b, n))]
        m1, m2, m3, var, mu3 = _sample_stats(x)
        nm, cv, sk, _, _ = _signatures_central(m1, var, mu3, M, N)
        out[done:done + b] = np.column_stack([nm, cv, sk, m1, m2, m3])
        done += b
    with np.errstate(invalid="ignore"):
        errs = []
        for col in out.T:
            finite = col[np.isfinite(col)]
            errs.append(float(np.std(finite, ddof=1)) if len(finite) > 1 else math.nan)
    return errs


def _delta_errors(c, M, N):
    n = len(c)
    m1, m2, m3, var, mu3 = (float(v) for v in _sample_stats(c))
    cov = np.cov(np.vstack([c, c * c, c * c * c])) / n
    grads = [np.array([M * M / N, 0.0, 0.0])]
    if m1 != 0 and var > 0:
        sd = math.sqrt(var)
        grads.append(np.array([-1 / sd - sd / m1**2, 1 / (2 * sd * m1), 0.0]))
    else:
        grads.append(None)
    if var > 0:
        dmu = np.array([-3 * m2 + 6 * m1**2, -3 * m1, 1.0])
        dvar = np.array([-2 * m1, 1.0, 0.0])
        grads.append(dmu / var**1.5 - 1.5 * mu3 * var**-2.5 * dvar)
    else:
        grads.append(None)
    errs = [math.sqrt(max(float(g @ cov @ g), 0.0)) if g is not None else math.nan for g in grads]
    errs += [math.sqrt(max(cov[i, i], 0.0)) for i in range(3)]
    return errs


def estimate_signatures(
    samples: Union[CorrelatorSampleSet, Sequence[float]],
    M: int,
    N: int,
    bootstrap_rounds: int = 1000,
    seed: int = 0,
    method: str = "bootstrap",
) -> SignatureSummary:
    """Plug-in NM, CV, Sk from correlator samples with standard errors.

    Args:
        samples: correlator values, at least 10.
        M, N: mode and occupied-mode counts used for the NM normalization.
        bootstrap_rounds: nonparametric bootstrap resamples (>= 100).
        seed: seed for the bootstrap resampling.
        method: ``"bootstrap"`` or ``"delta"`` (first-order error propagation).
    """
    c = np.asarray(samples.values if isinstance(samples, CorrelatorSampleSet) else samples, dtype=float)
    if c.ndim != 1 or len(c) < 10:
        raise ParameterError(f"need at least 10 samples, got {c.size}")
    if method not in ("bootstrap", "delta"):
        raise ParameterError(f"unknown error method {method!r}")
    if method == "bootstrap" and bootstrap_rounds < 100:
        raise ParameterError(f"need at least 100 bootstrap rounds, got {bootstrap_rounds}")
    m1, m2, m3, var, mu3 = (float(v) for v in _sample_stats(c))
    nm, cv, sk, cv_ok, sk_ok = _signatures_central(m1, var, mu3, M, N)
    if method == "bootstrap":
        errs = _bootstrap_errors(c, M, N, bootstrap_rounds, seed)
    else:
        errs = _delta_errors(c, M, N)
    if not sk_ok:
        errs[2] = math.nan
    return SignatureSummary(
        nm=float(nm), cv=float(cv), sk=float(sk), m1=m1, m2=m2, m3=m3,
        stderr_nm=errs[0], stderr_cv=errs[1], stderr_sk=errs[2],
        stderr_m1=errs[3], stderr_m2=errs[4], stderr_m3=errs[5],
        cv_defined=bool(cv_ok), sk_defined=bool(sk_ok),
        method=method, n_samples=len(c),
    )
