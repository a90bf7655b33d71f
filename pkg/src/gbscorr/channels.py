"""Uniform loss and additive-noise channels on Gaussian states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .errors import ParameterError
from .gaussian import GaussianState


@dataclass(frozen=True)
class LossParameter:
    """Overall quantum efficiency eta in [0, 1]; eta = 1 is lossless."""

    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ParameterError(f"efficiency must lie in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class NoiseParameter:
    """Additive quadrature noise nu >= 0 added to each affected variance."""

    nu: float

    def __post_init__(self):
        if not self.nu >= 0.0:
            raise ParameterError(f"noise must be >= 0, got {self.nu}")


def _eta(eta) -> float:
    return (eta if isinstance(eta, LossParameter) else LossParameter(float(eta))).eta


def _nu(nu) -> float:
    return (nu if isinstance(nu, NoiseParameter) else NoiseParameter(float(nu))).nu


def apply_loss(state: GaussianState, eta: Union[float, LossParameter]) -> GaussianState:
    """V -> eta V + (1 - eta) I and xi -> sqrt(eta) xi on every mode."""
    eta = _eta(eta)
    cov = eta * state.covariance + (1 - eta) * np.eye(state.covariance.shape[0])
    return GaussianState(math.sqrt(eta) * state.displacement, cov)


def apply_noise(
    state: GaussianState,
    nu: Union[float, NoiseParameter],
    modes: Optional[Iterable[int]] = None,
) -> GaussianState:
    """V -> V + nu I on the quadratures of ``modes`` (default: every mode).

    Noise added identically to all modes shifts every output photon-number
    variance but leaves C_{j,k}, j != k, untouched. Restricting it to the
    occupied inputs reproduces n -> n + nu/2 in the identical-input formulas.
    """
    nu = _nu(nu)
    M = state.mode_count
    mask = np.ones(M) if modes is None else np.zeros(M)
    if modes is not None:
        for m in modes:
            if not 0 <= m < M:
                raise ParameterError(f"mode index {m} out of range for {M} modes")
            mask[m] = 1.0
    cov = state.covariance + nu * np.diag(np.concatenate([mask, mask]))
    return GaussianState(state.displacement, cov)


def squeezing_threshold(nu: Union[float, NoiseParameter]) -> float:
    """Smallest r for which v_p = e^{-2r} + nu stays below vacuum; inf if nu >= 1."""
    nu = _nu(nu)
    if nu >= 1.0:
        return math.inf
    return -0.5 * math.log1p(-nu)


def lossy_correlator_scale(eta: Union[float, LossParameter]) -> float:
    """Factor eta^2 by which uniform loss rescales every C_{j,k}."""
    eta = _eta(eta)
    return eta * eta


def transform_moments(n: float, eps: float, eta: float = 1.0, nu: float = 0.0):
    """Per-mode (n, eps) after loss eta followed by source noise nu."""
    eta = _eta(eta)
    nu = _nu(nu)
    return eta * n + nu / 2, eta * eps


def transform_variances(v_q, v_p, eta: float = 1.0, nu: float = 0.0):
    eta = _eta(eta)
    nu = _nu(nu)
    return eta * np.asarray(v_q) + (1 - eta) + nu, eta * np.asarray(v_p) + (1 - eta) + nu
