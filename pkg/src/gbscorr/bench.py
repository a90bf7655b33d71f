"""Monte Carlo experiments built on the correlator, channel and Fock modules.

Every experiment is driven by an :class:`ExperimentConfig`. Trial ``t`` always
uses the unitary drawn from ``RngStream(master_seed, t)``, so results are
reproducible and independent of batching or worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._version import __version__
from .channels import apply_loss, apply_noise, squeezing_threshold, transform_moments
from .correlator import (
    CorrelatorInputs,
    CorrelatorSampleSet,
    SignatureSummary,
    analytic_signatures,
    correlator_no_displacement,
    estimate_signatures,
    pair_correlators,
)
from .errors import GBSCorrError, ParameterError
from .fock import convergence_profile
from .gaussian import FAMILIES, GaussianState, InputSpec
from .interferometer import (
    RngStream,
    evolve,
    reduce_two_modes,
    sample_haar_unitaries,
    sample_haar_unitary,
)

KINDS = ("sweep", "signatures", "analytic", "discriminate", "dilution", "heatmap", "truncation", "allpairs")


def squeezing_for_mean_photon(n: float) -> float:
    """Squeezing parameter r with sinh^2 r = n."""
    return math.asinh(math.sqrt(n))


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment.

    ``param`` holds the family parameters: ``(r,)`` for squeezed, ``(nbar,)``
    for thermal, ``(re,)`` or ``(re, im)`` for coherent, ``(v_q, v_p)`` for
    classical and ``()`` for vacuum. Loss acts on every input mode; noise acts
    on the occupied inputs.
    """

    modes: int = 8
    occupied: int = 2
    family: str = "squeezed"
    param: Tuple[float, ...] = (math.log(1 + math.sqrt(2)),)
    eta: float = 1.0
    nu: float = 0.0
    trials: int = 10_000
    master_seed: int = 0
    n_max: Optional[int] = None
    kind: str = "sweep"
    first_trial: int = 0

    def __post_init__(self):
        object.__setattr__(self, "param", tuple(float(p) for p in self.param))
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.kind not in KINDS:
            raise ParameterError(f"unknown experiment kind {self.kind!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ParameterError(f"trials must be a positive integer, got {self.trials}")
        if self.first_trial < 0:
            raise ParameterError("first_trial must be non-negative")
        if self.n_max is not None and self.n_max < 0:
            raise ParameterError("n_max must be non-negative")
        if not 0 <= self.eta <= 1:
            raise ParameterError(f"efficiency must lie in [0, 1], got {self.eta}")
        if not self.nu >= 0:
            raise ParameterError(f"noise must be >= 0, got {self.nu}")
        self.input_spec()  # validates modes, occupied and family parameters

    @classmethod
    def matched(cls, family: str, mean_photon: float, **kwargs) -> "ExperimentConfig":
        """Config for a squeezed or thermal input with the given mean photon number per mode."""
        if family == "squeezed":
            param = (squeezing_for_mean_photon(mean_photon),)
        elif family == "thermal":
            param = (mean_photon,)
        else:
            raise ParameterError("matched configs exist for 'squeezed' and 'thermal' only")
        return cls(family=family, param=param, **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "param" in data and not isinstance(data["param"], (list, tuple)):
            data["param"] = (data["param"],)
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["param"] = list(self.param)
        return d

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]

    def replace(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs)

    def input_spec(self) -> InputSpec:
        p = self.param
        if self.family == "coherent":
            if len(p) not in (1, 2):
                raise ParameterError("coherent family takes (re,) or (re, im)")
            return InputSpec(self.modes, self.occupied, "coherent", (complex(*p),))
        return InputSpec(self.modes, self.occupied, self.family, p)

    def input_state(self) -> GaussianState:
        """Input state after loss and source noise."""
        state = apply_loss(self.input_spec().to_state(), self.eta)
        if self.nu:
            state = apply_noise(state, self.nu, modes=range(self.occupied))
        return state

    def effective_inputs(self) -> CorrelatorInputs:
        """Per-mode (n, eps) of the occupied inputs after the channels."""
        vq, vp = self.input_spec().occupied_variances()
        n, eps = transform_moments((vq + vp - 2) / 4, (vq - vp) / 4, self.eta, self.nu)
        return CorrelatorInputs(n, eps, self.occupied, self.modes)


def _chunks(first: int, count: int, size: int):
    for start in range(first, first + count, size):
        yield range(start, min(start + size, first + count))


def run_correlator_sweep(
    config: ExperimentConfig, chunk_size: Optional[int] = None, workers: int = 1
) -> CorrelatorSampleSet:
    """C_{0,1} for ``config.trials`` Haar-random networks.

    Args:
        config: experiment parameters.
        chunk_size: trials per vectorized batch (default keeps batches near 32 MB).
        workers: threads evaluating batches; the output does not depend on it.
    """
    state = config.input_state()
    vq, vp = state.quadrature_variances()
    alpha = state.complex_displacement
    M = config.modes
    size = chunk_size or max(1, 2_000_000 // (M * M))

    def work(trials: range) -> np.ndarray:
        try:
            Us = sample_haar_unitaries(M, config.master_seed, trials)
            return pair_correlators(vq, vp, Us, 0, 1, alpha)
        except GBSCorrError as exc:
            raise type(exc)(f"trials {trials.start}..{trials.stop - 1}: {exc}") from exc

    batches = list(_chunks(config.first_trial, config.trials, size))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, batches))
    else:
        parts = [work(b) for b in batches]
    values = np.concatenate(parts)
    return CorrelatorSampleSet(values, config.fingerprint(), config.master_seed, config.first_trial)


def write_samples_csv(samples: CorrelatorSampleSet, path) -> None:
    with open(path, "w") as fh:
        fh.write("trial,C12\n")
        for t, c in zip(samples.trial_indices, samples.values):
            fh.write(f"{t},{c:.17g}\n")


def read_samples_csv(path) -> CorrelatorSampleSet:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    first = int(data[0, 0]) if len(data) else 0
    return CorrelatorSampleSet(data[:, 1], first_trial=first)


def _signature_block(summary: SignatureSummary) -> dict:
    d = summary.to_dict()
    return {
        "raw_moments": {k: d[k] for k in ("m1", "m2", "m3")},
        "raw_moment_stderr": {k: d[f"stderr_{k}"] for k in ("m1", "m2", "m3")},
        "signatures": {k: {"value": d[k], "stderr": d[f"stderr_{k}"]} for k in ("nm", "cv", "sk")},
        "cv_defined": d["cv_defined"],
        "sk_defined": d["sk_defined"],
        "method": d["method"],
        "n_samples": d["n_samples"],
    }


@dataclass(frozen=True)
class SignatureExperiment:
    config: ExperimentConfig
    samples: CorrelatorSampleSet
    estimate: SignatureSummary
    analytic: SignatureSummary
    bootstrap_seed: int = 0

    def to_json(self) -> dict:
        return {
            "software_version": __version__,
            "config": self.config.to_dict(),
            "fingerprint": self.config.fingerprint(),
            "seeds": {
                "master_seed": self.config.master_seed,
                "first_trial": self.config.first_trial,
                "bootstrap_seed": self.bootstrap_seed,
            },
            "estimate": _signature_block(self.estimate),
            "analytic": _signature_block(self.analytic),
        }


def analytic_reference(config: ExperimentConfig) -> SignatureSummary:
    inp = config.effective_inputs()
    return analytic_signatures(config.modes, config.occupied, inp.mean_photon, inp.eccentricity)


def run_signature_experiment(
    config: ExperimentConfig,
    bootstrap_rounds: int = 1000,
    bootstrap_seed: int = 0,
    method: str = "bootstrap",
    workers: int = 1,
) -> SignatureExperiment:
    samples = run_correlator_sweep(config, workers=workers)
    estimate = estimate_signatures(
        samples, config.modes, config.occupied, bootstrap_rounds, bootstrap_seed, method
    )
    return SignatureExperiment(config, samples, estimate, analytic_reference(config), bootstrap_seed)


@dataclass(frozen=True)
class DiscriminationReport:
    """Difference of one signature between two input families with its 3-sigma verdict."""

    statistic: str
    delta: float
    sigma_delta: float
    summary_a: SignatureSummary
    summary_b: SignatureSummary
    analytic_delta: float
    trials: int

    @property
    def delta_nm(self) -> float:
        return self.summary_a.nm - self.summary_b.nm

    @property
    def significance(self) -> float:
        return self.delta / self.sigma_delta if self.sigma_delta > 0 else math.inf

    @property
    def distinguishable(self) -> bool:
        return abs(self.delta) > 3 * self.sigma_delta

    def to_json(self) -> dict:
        return {
            "software_version": __version__,
            "statistic": self.statistic,
            "trials": self.trials,
            "delta": self.delta,
            "sigma_delta": self.sigma_delta,
            "significance": self.significance,
            "distinguishable": self.distinguishable,
            "analytic_delta": self.analytic_delta,
            "family_a": _signature_block(self.summary_a),
            "family_b": _signature_block(self.summary_b),
        }


def run_discrimination(
    config_a: ExperimentConfig,
    config_b: ExperimentConfig,
    trials: Optional[int] = None,
    statistic: str = "nm",
    bootstrap_rounds: int = 1000,
    bootstrap_seed: int = 0,
    paired: bool = False,
) -> DiscriminationReport:
    """Compare two families (e.g. squeezed vs thermal) at equal mean photon number.

    Unless ``paired`` is set the two families see independent networks: when
    both configs share a seed, family B reads the trial block right after A's.
    """
    if statistic not in ("nm", "cv", "sk"):
        raise ParameterError(f"unknown statistic {statistic!r}")
    if (config_a.modes, config_a.occupied, config_a.eta) != (config_b.modes, config_b.occupied, config_b.eta):
        raise ParameterError("both families need the same modes, occupied count and efficiency")
    na = config_a.effective_inputs().mean_photon
    nb = config_b.effective_inputs().mean_photon
    if not math.isclose(na, nb, rel_tol=1e-9, abs_tol=1e-12):
        raise ParameterError(f"mean photon numbers differ: {na} vs {nb}")
    if trials is not None:
        config_a = config_a.replace(trials=trials)
        config_b = config_b.replace(trials=trials)
    # Trial blocks and bootstrap seeds follow the family, not the argument
    # order, so swapping A and B only flips the sign of delta.
    swap = (config_b.family, config_b.param) < (config_a.family, config_a.param)
    first, second = (config_b, config_a) if swap else (config_a, config_b)
    if paired:
        second = second.replace(master_seed=first.master_seed, first_trial=first.first_trial)
    elif first.master_seed == second.master_seed and first.first_trial == second.first_trial:
        second = second.replace(first_trial=first.first_trial + first.trials)

    summaries = []
    for offset, cfg in enumerate((first, second)):
        samples = run_correlator_sweep(cfg)
        summaries.append(
            estimate_signatures(samples, cfg.modes, cfg.occupied, bootstrap_rounds, bootstrap_seed + offset)
        )
    if swap:
        summaries.reverse()
    sa, sb = summaries
    delta = sa.value(statistic) - sb.value(statistic)
    sigma = math.hypot(sa.stderr(statistic), sb.stderr(statistic))
    analytic = analytic_reference(config_a).value(statistic) - analytic_reference(config_b).value(statistic)
    return DiscriminationReport(statistic, delta, sigma, sa, sb, analytic, config_a.trials)


def repeated_discrimination(
    config_a: ExperimentConfig,
    config_b: ExperimentConfig,
    trials: int,
    repeats: int = 20,
    statistic: str = "nm",
    bootstrap_rounds: int = 1000,
) -> List[DiscriminationReport]:
    """Independent repetitions of :func:`run_discrimination` on disjoint trial blocks."""
    reports = []
    for rep in range(repeats):
        a = config_a.replace(first_trial=2 * rep * trials)
        b = config_b.replace(master_seed=config_a.master_seed, first_trial=2 * rep * trials)
        reports.append(
            run_discrimination(a, b, trials, statistic, bootstrap_rounds, bootstrap_seed=2 * rep)
        )
    return reports


def histogram(values, bins="fd"):
    """Counts and edges; Freedman-Diaconis bins by default, one bin for constant data."""
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return np.zeros(0, dtype=int), np.zeros(1)
    if np.ptp(values) == 0:
        edges = np.array([values[0] - 0.5, values[0] + 0.5])
        return np.array([len(values)]), edges
    return np.histogram(values, bins=bins)


def occupied_moments(family: str, n: float) -> Tuple[float, float]:
    """(n, eps) for a squeezed or thermal input with mean photon number n."""
    if family == "squeezed":
        return n, math.sqrt(n * (n + 1))
    if family == "thermal":
        return n, 0.0
    raise ParameterError("moments by mean photon number exist for 'squeezed' and 'thermal' only")


@dataclass(frozen=True)
class DilutionReport:
    """Analytic NM over (total photon number, occupied modes) and optional histograms."""

    family: str
    modes: int
    n_totals: Tuple[float, ...]
    occupied: Tuple[int, ...]
    nm: np.ndarray  # shape (len(n_totals), len(occupied))
    histograms: Dict[Tuple[float, int], Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "software_version": __version__,
            "family": self.family,
            "modes": self.modes,
            "n_totals": list(self.n_totals),
            "occupied": list(self.occupied),
            "nm": self.nm.tolist(),
            "histograms": [
                {"n_total": nt, "occupied": N, "counts": c.tolist(), "edges": e.tolist()}
                for (nt, N), (c, e) in self.histograms.items()
            ],
        }


def run_dilution_study(
    modes: int,
    family: str,
    n_totals: Sequence[float],
    occupied: Sequence[int],
    eta: float = 1.0,
    nu: float = 0.0,
    trials: int = 0,
    master_seed: int = 0,
) -> DilutionReport:
    """Spread a fixed total mean photon number over N occupied inputs (n = n_total / N)."""
    occupied = tuple(int(N) for N in occupied)
    for N in occupied:
        if not 1 <= N <= modes:
            raise ParameterError(f"occupied count {N} must lie in 1..{modes}")
    nm = np.empty((len(n_totals), len(occupied)))
    hists = {}
    for a, nt in enumerate(n_totals):
        for b, N in enumerate(occupied):
            n, eps = occupied_moments(family, nt / N)
            n, eps = transform_moments(n, eps, eta, nu)
            nm[a, b] = analytic_signatures(modes, N, n, eps).nm
            if trials:
                cfg = ExperimentConfig.matched(
                    family, nt / N, modes=modes, occupied=N, eta=eta, nu=nu,
                    trials=trials, master_seed=master_seed, kind="dilution",
                )
                hists[(float(nt), N)] = histogram(run_correlator_sweep(cfg).values)
    return DilutionReport(family, modes, tuple(float(x) for x in n_totals), occupied, nm, hists)


@dataclass(frozen=True)
class HeatmapResult:
    """Analytic signatures on a grid of squeezing r against loss or noise."""

    axis: str  # "eta" or "nu"
    r_values: np.ndarray
    channel_values: np.ndarray
    nm: np.ndarray
    cv: np.ndarray
    sk: np.ndarray
    boundary: Optional[np.ndarray] = None  # r_min per nu for noise grids

    def to_json(self) -> dict:
        def clean(a):
            return [[None if not np.isfinite(x) else float(x) for x in row] for row in a]

        out = {
            "software_version": __version__,
            "axis": self.axis,
            "r": self.r_values.tolist(),
            self.axis: self.channel_values.tolist(),
            "nm": clean(self.nm),
            "cv": clean(self.cv),
            "sk": clean(self.sk),
        }
        if self.boundary is not None:
            out["boundary_r"] = [None if not np.isfinite(x) else float(x) for x in self.boundary]
        return out


def run_heatmap(
    modes: int,
    occupied: int,
    r_values: Sequence[float],
    eta_values: Optional[Sequence[float]] = None,
    nu_values: Optional[Sequence[float]] = None,
) -> HeatmapResult:
    """NM, CV, Sk for squeezed inputs over (r, eta) or (r, nu). Rows index r."""
    if (eta_values is None) == (nu_values is None):
        raise ParameterError("give exactly one of eta_values or nu_values")
    r_values = np.asarray(r_values, dtype=float)
    if np.any(r_values < 0):
        raise ParameterError("squeezing values must be >= 0")
    axis = "eta" if eta_values is not None else "nu"
    chan = np.asarray(eta_values if eta_values is not None else nu_values, dtype=float)
    grids = {k: np.full((len(r_values), len(chan)), np.nan) for k in ("nm", "cv", "sk")}
    for a, r in enumerate(r_values):
        n0, e0 = math.sinh(r) ** 2, math.sinh(2 * r) / 2
        for b, x in enumerate(chan):
            n, eps = transform_moments(n0, e0, eta=x) if axis == "eta" else transform_moments(n0, e0, nu=x)
            summary = analytic_signatures(modes, occupied, n, eps)
            for key in grids:
                grids[key][a, b] = summary.value(key)
    boundary = np.array([squeezing_threshold(x) for x in chan]) if axis == "nu" else None
    return HeatmapResult(axis, r_values, chan, grids["nm"], grids["cv"], grids["sk"], boundary)


@dataclass(frozen=True)
class TruncationReport:
    """Cutoffs needed for the truncated correlator to reach 1e-3 relative accuracy."""

    config: ExperimentConfig
    n_max: int
    thresholds: np.ndarray  # -1 where no cutoff up to n_max converged
    excluded_zero: int
    max_relative_error: float  # worst |relative distance| at the full cutoff

    @property
    def converged(self) -> np.ndarray:
        return self.thresholds[self.thresholds >= 0]

    @property
    def mean_threshold(self) -> float:
        c = self.converged
        return float(c.mean()) if len(c) else math.nan

    @property
    def median_threshold(self) -> float:
        c = self.converged
        return float(np.median(c)) if len(c) else math.nan

    def histogram(self):
        c = self.converged
        if len(c) == 0:
            return np.zeros(0, dtype=int), np.zeros(1)
        edges = np.arange(c.min(), c.max() + 2) - 0.5
        return np.histogram(c, bins=edges)

    def to_json(self) -> dict:
        counts, edges = self.histogram()
        return {
            "software_version": __version__,
            "config": self.config.to_dict(),
            "n_max": self.n_max,
            "thresholds": self.thresholds.tolist(),
            "excluded_zero": self.excluded_zero,
            "unconverged": int(np.sum(self.thresholds < 0)),
            "mean_threshold": self.mean_threshold,
            "median_threshold": self.median_threshold,
            "max_relative_error": self.max_relative_error,
            "histogram": {"counts": counts.tolist(), "edges": edges.tolist()},
        }


def run_truncation_study(config: ExperimentConfig, n_max: Optional[int] = None) -> TruncationReport:
    """Per trial: evolve, keep modes (0, 1), and find the first cutoff within 1e-3 of the exact C."""
    if config.trials < 100:
        raise ParameterError("the truncation study needs at least 100 trials")
    n_max = config.n_max if n_max is None else n_max
    n_max = 40 if n_max is None else int(n_max)
    state = config.input_state()
    if np.any(state.displacement != 0):
        raise ParameterError("the truncation study needs undisplaced inputs")
    variances = state.quadrature_variances()
    # round-off floor for the exact correlator; below it the trial counts as C = 0
    zero_tol = 1e-12 * max(1.0, float(np.max(variances)) ** 2)
    thresholds = []
    excluded = 0
    worst = 0.0
    for t in range(config.first_trial, config.first_trial + config.trials):
        U = sample_haar_unitary(config.modes, RngStream(config.master_seed, t))
        exact = correlator_no_displacement(variances, U, 0, 1)
        if abs(exact) <= zero_tol:
            excluded += 1
            continue
        reduced = reduce_two_modes(evolve(state, U), 0, 1)
        profile = convergence_profile(reduced, exact, range(n_max + 1))
        thresholds.append(-1 if profile.threshold_n_max is None else profile.threshold_n_max)
        worst = max(worst, abs(profile.relative_distance[-1]))
    return TruncationReport(config, n_max, np.array(thresholds, dtype=int), excluded, worst)


@dataclass(frozen=True)
class AllPairsResult:
    """C_{j,k} for every output pair j < k of a single network."""

    pairs: np.ndarray  # shape (P, 2)
    values: np.ndarray
    trial: int


def run_all_pairs(config: ExperimentConfig) -> AllPairsResult:
    """Fixed-network variant: one unitary (trial ``first_trial``), all output pairs."""
    state = config.input_state()
    vq, vp = state.quadrature_variances()
    U = sample_haar_unitaries(config.modes, config.master_seed, [config.first_trial])
    pairs = [(j, k) for j in range(config.modes) for k in range(j + 1, config.modes)]
    values = np.array(
        [pair_correlators(vq, vp, U, j, k, state.complex_displacement)[0] for j, k in pairs]
    )
    return AllPairsResult(np.array(pairs, dtype=int).reshape(-1, 2), values, config.first_trial)
