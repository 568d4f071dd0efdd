"""Information-theoretic bounds on reduced-order model error and KL-based
parameter fitting.

The bounds relate the mutual information between a truth variable and its
model prediction to the smallest achievable error probability (a
generalized Fano inequality), the expected error magnitude (via Markov's
inequality), and the L1 distance between their distributions (Pinsker).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import infocore
from .descent import OptimizationTrace, minimize
from .discretization import PartitionSpec, SymbolSeries, discretize, estimate_joint_pmf
from .pmf import JointPMF
from .signals import SignalMatrix

__all__ = [
    "ModelAssessment",
    "ModelParams",
    "fano_error_probability_bound",
    "expected_error_lower_bound",
    "pinsker_statistical_bound",
    "kl_fit",
    "ml_equivalence_check",
    "MLEquivalenceReport",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ModelAssessment:
    """Inputs to the error bounds: entropy of the truth variable, mutual
    information between truth and model prediction, error tolerance epsilon,
    partition cell size delta_q, and state count n_states."""

    truth_entropy: float
    model_mutual_info: float
    epsilon: float
    delta_q: float
    n_states: int

    def __post_init__(self):
        if self.epsilon <= 0 or self.delta_q <= 0:
            raise ValueError("epsilon and delta_q must be positive")
        if self.n_states < 2:
            raise ValueError("need at least 2 states")
        if self.epsilon / self.delta_q >= self.n_states:
            raise ValueError("tolerance exceeds state space")


@dataclass(frozen=True)
class ModelParams:
    """Coefficient vector of a parametric model with per-coefficient
    closed-interval bounds."""

    theta: np.ndarray
    bounds: np.ndarray | None = None

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.theta, dtype=float))
        b = None
        if self.bounds is not None:
            b = np.asarray(self.bounds, dtype=float).reshape(-1, 2)
            if b.shape[0] != t.size:
                raise ValueError("bounds shape does not match theta")
            if np.any(t < b[:, 0]) or np.any(t > b[:, 1]):
                raise ValueError("theta outside bounds")
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "bounds", b)


def _fano_raw(a: ModelAssessment) -> float:
    log_ratio = math.log2(a.epsilon / a.delta_q)
    denom = math.log2(a.n_states) - log_ratio
    if denom <= 0:
        raise ValueError("tolerance exceeds state space")
    return (a.truth_entropy - a.model_mutual_info - log_ratio - 1.0) / denom


def fano_error_probability_bound(a: ModelAssessment) -> float:
    """Lower bound on the probability that the model errs by more than
    epsilon, clamped into [0, 1]."""
    return min(1.0, max(0.0, _fano_raw(a)))


def expected_error_lower_bound(a: ModelAssessment) -> float:
    """Lower bound on E[|truth - prediction|] in state units: epsilon times
    the unclamped-above Fano bound (Markov's inequality)."""
    return a.epsilon * max(0.0, _fano_raw(a))


def pinsker_statistical_bound(p: JointPMF, q: JointPMF) -> float:
    """sqrt(2 ln2 * KL(p, q)); an upper bound on the L1 distance |p - q|_1.
    Infinite when the KL divergence is (support mismatch)."""
    kl = infocore.kl_divergence(p, q)
    if math.isinf(kl):
        return float("inf")
    return math.sqrt(2.0 * LN2 * kl)


def kl_fit(simulate, reference: JointPMF, observable_spec: PartitionSpec, init: ModelParams, options=None):
    """Fit model parameters by descending KL(reference, pmf(simulate(theta))).

    simulate maps ModelParams to a SignalMatrix and must be deterministic
    for fixed theta (seed any noise internally: common random numbers keep
    the finite-difference gradient meaningful). The simulated observables
    are discretized by observable_spec and compared against `reference` on
    the same partition.

    options: tol (default 1e-6 bits), max_iters (200), epsilon (KL floor
    for off-support cells, default None = infinite KL propagates),
    initial_step. Returns (ModelParams at the best-seen theta, trace).
    """
    opts = {"tol": 1e-6, "max_iters": 200, "epsilon": None, "initial_step": 0.05}
    opts.update(options or {})

    def objective(theta):
        signal = simulate(ModelParams(theta, init.bounds))
        symbols = discretize(signal, observable_spec)
        model_pmf = estimate_joint_pmf(symbols, [(v, 0) for v in range(symbols.n_variables)])
        return infocore.kl_divergence(reference, model_pmf, epsilon=opts["epsilon"])

    best_theta, _, trace = minimize(
        objective,
        init.theta,
        bounds=init.bounds,
        tol=opts["tol"],
        max_iters=opts["max_iters"],
        initial_step=opts["initial_step"],
    )
    return ModelParams(best_theta, init.bounds), trace


@dataclass(frozen=True)
class MLEquivalenceReport:
    kl_argmin_index: int
    likelihood_argmax_index: int
    kl_values: np.ndarray
    log_likelihoods: np.ndarray

    @property
    def agree(self) -> bool:
        return self.kl_argmin_index == self.likelihood_argmax_index

    @property
    def discrepancy(self) -> int:
        return abs(self.kl_argmin_index - self.likelihood_argmax_index)


def ml_equivalence_check(samples: SymbolSeries, family, theta_grid) -> MLEquivalenceReport:
    """Verify that minimizing KL(empirical, family(theta)) over the grid
    picks the same theta as maximizing the sample log-likelihood.

    The two criteria differ by the (theta-independent) empirical entropy,
    so they agree exactly; with equal-frequency samples the KL reference
    reduces to the uniform distribution. family maps a ModelParams (or
    plain theta vector) to a JointPMF on the sample alphabet.
    """
    theta_grid = list(theta_grid)
    if len(theta_grid) < 1:
        raise ValueError("empty theta grid")
    selection = [(v, 0) for v in range(samples.n_variables)]
    empirical = estimate_joint_pmf(samples, selection)
    kl_values = np.empty(len(theta_grid))
    log_liks = np.empty(len(theta_grid))
    for k, theta in enumerate(theta_grid):
        pmf = family(theta)
        if pmf.dims != tuple(samples.alphabet):
            raise ValueError("family PMF dims do not match sample alphabet")
        kl_values[k] = infocore.kl_divergence(empirical, pmf)
        dense = pmf.to_dense()
        cell_p = dense[tuple(samples.codes.T)]
        log_liks[k] = np.sum(np.log(cell_p)) if np.all(cell_p > 0) else -np.inf
    if np.ptp(log_liks) == 0 and len(theta_grid) > 1:
        raise ValueError("degenerate family: constant over the grid")
    return MLEquivalenceReport(
        kl_argmin_index=int(np.argmin(kl_values)),
        likelihood_argmax_index=int(np.argmax(log_liks)),
        kl_values=kl_values,
        log_likelihoods=log_liks,
    )
