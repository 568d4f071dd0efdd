"""Information fluxes among observable variables.

The flux from a subset of past variables to a future target is the
alternating-sign sum of conditional entropies of the target given every
reduced conditioning set. All terms are marginals of one joint PMF over
(target at +lag, all variables at lag 0), which makes the decomposition
identity  sum(fluxes) + leak = H(target future)  hold by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from . import infocore
from .discretization import SymbolSeries, estimate_joint_pmf
from .pmf import JointPMF
from .signals import SignalMatrix

__all__ = [
    "FluxQuery",
    "FluxReport",
    "CausalityMap",
    "information_flux",
    "information_leak",
    "flux_report",
    "flux_report_from_pmf",
    "causality_map",
    "correlation_map",
]

SUBSET_CAP = 2**20


@dataclass(frozen=True)
class FluxQuery:
    """Target variable, lag (in samples), and maximum subset order."""

    symbols: SymbolSeries
    target: int
    lag: int = 1
    max_order: int | None = None

    def __post_init__(self):
        if not 0 <= self.target < self.symbols.n_variables:
            raise ValueError(f"invalid target index {self.target}")
        if self.lag < 1:
            raise ValueError("lag must be >= 1")
        order = self.max_order if self.max_order is not None else self.symbols.n_variables
        if not 1 <= order <= self.symbols.n_variables:
            raise ValueError("max_order out of range")
        object.__setattr__(self, "max_order", order)


@dataclass
class FluxReport:
    """All subset fluxes to one target, plus leak and normalizations."""

    target: int
    lag: int
    fluxes: dict[tuple[int, ...], float]
    leak: float
    target_entropy: float

    @property
    def normalized(self) -> dict[tuple[int, ...], float]:
        return {s: t / self.target_entropy for s, t in self.fluxes.items()}

    @property
    def normalized_leak(self) -> float:
        return self.leak / self.target_entropy


class _FluxEngine:
    """Caches conditional entropies H(target_future | conditioning set)
    computed from the single (N_v + 1)-dimensional joint PMF."""

    def __init__(self, query: FluxQuery = None, joint: JointPMF = None):
        if joint is None:
            self.n_vars = query.symbols.n_variables
            selection = [(query.target, query.lag)] + [(v, 0) for v in range(self.n_vars)]
            joint = estimate_joint_pmf(query.symbols, selection)
        else:
            self.n_vars = joint.ndim - 1
        self.joint = joint
        self._cache: dict[frozenset, float] = {}

    def cond_entropy(self, cond_vars) -> float:
        """H(target future | past variables in cond_vars); dim 0 is the
        future target, past variable v lives at dim v + 1."""
        key = frozenset(cond_vars)
        if key not in self._cache:
            dims = [v + 1 for v in sorted(cond_vars)]
            self._cache[key] = infocore.conditional_entropy(self.joint, [0], dims)
        return self._cache[key]

    def flux(self, subset) -> float:
        subset = tuple(sorted(subset))
        everything = set(range(self.n_vars))
        total = 0.0
        for k in range(len(subset) + 1):
            for removed in combinations(subset, k):
                cond = everything - (set(subset) - set(removed))
                total += (-1) ** k * self.cond_entropy(cond)
        return total

    def leak(self) -> float:
        return self.cond_entropy(range(self.n_vars))

    def target_entropy(self) -> float:
        return infocore.entropy(self.joint, [0])


def information_flux(query: FluxQuery, subset) -> float:
    """Information flux T (bits) from the past of `subset` to the target's
    future: the information exclusively contributed by the joint effect of
    all subset variables. May be negative for odd subset sizes >= 3."""
    subset = list(subset)
    if not subset:
        raise ValueError("subset must be non-empty")
    if len(set(subset)) != len(subset):
        raise ValueError("subset indices must be distinct")
    for v in subset:
        if not 0 <= v < query.symbols.n_variables:
            raise ValueError(f"invalid variable index {v}")
    return _FluxEngine(query).flux(subset)


def information_leak(query: FluxQuery) -> float:
    """H(target future | all present variables): information in the target's
    future unexplained by every observed variable."""
    return _FluxEngine(query).leak()


def flux_report(query: FluxQuery) -> FluxReport:
    """Fluxes from every subset up to max_order, leak, and normalizations.

    With max_order == n_variables the report satisfies
    sum(fluxes) + leak == target entropy to machine precision.
    """
    n = query.symbols.n_variables
    n_subsets = sum(comb(n, k) for k in range(1, query.max_order + 1))
    if n_subsets > SUBSET_CAP:
        raise ValueError(f"subset enumeration ({n_subsets}) exceeds cap {SUBSET_CAP}")
    engine = _FluxEngine(query)
    fluxes = {}
    for size in range(1, query.max_order + 1):
        for subset in combinations(range(n), size):
            fluxes[subset] = engine.flux(subset)
    return FluxReport(
        target=query.target,
        lag=query.lag,
        fluxes=fluxes,
        leak=engine.leak(),
        target_entropy=engine.target_entropy(),
    )


def flux_report_from_pmf(joint: JointPMF, target: int = 0, lag: int = 1, max_order: int | None = None) -> FluxReport:
    """Flux report computed from an exact joint PMF whose dimension 0 is
    the target's future and dimensions 1..N are the present variables.
    `target` and `lag` only label the report."""
    engine = _FluxEngine(joint=joint)
    n = engine.n_vars
    order = n if max_order is None else max_order
    fluxes = {}
    for size in range(1, order + 1):
        for subset in combinations(range(n), size):
            fluxes[subset] = engine.flux(subset)
    return FluxReport(
        target=target,
        lag=lag,
        fluxes=fluxes,
        leak=engine.leak(),
        target_entropy=engine.target_entropy(),
    )


@dataclass
class CausalityMap:
    """Subset-to-target flux values for every target.

    values[s, j] is the flux from subsets[s] to target j. self_flux marks
    entries whose subset contains the target; they are computed and stored,
    masking is purely a display concern.
    """

    order: int
    lag: int
    subsets: list[tuple[int, ...]]
    values: np.ndarray
    self_flux: np.ndarray

    def to_matrix(self) -> np.ndarray:
        """(n_vars, n_vars) matrix of singleton fluxes T_{i -> j}."""
        n = self.values.shape[1]
        out = np.full((n, n), np.nan)
        for s, subset in enumerate(self.subsets):
            if len(subset) == 1:
                out[subset[0], :] = self.values[s, :]
        return out


def causality_map(symbols: SymbolSeries, lag: int = 1, order: int = 1) -> CausalityMap:
    """Flux from every subset of size <= order to every target variable."""
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2, or 3")
    n = symbols.n_variables
    subsets = [s for k in range(1, order + 1) for s in combinations(range(n), k)]
    values = np.zeros((len(subsets), n))
    for j in range(n):
        engine = _FluxEngine(FluxQuery(symbols, target=j, lag=lag, max_order=order))
        for s, subset in enumerate(subsets):
            values[s, j] = engine.flux(subset)
    self_flux = np.array([[j in subset for j in range(n)] for subset in subsets])
    return CausalityMap(order=order, lag=lag, subsets=subsets, values=values, self_flux=self_flux)


def correlation_map(signal: SignalMatrix, lag: int = 1) -> np.ndarray:
    """Non-centered lagged cross-correlation baseline C[i, j] from variable i
    at time t to variable j at time t + lag; the legacy 'causality' measure
    the flux map is contrasted against."""
    if lag < 0:
        raise ValueError("lag must be >= 0")
    x = signal.values
    norms = np.sqrt((x**2).sum(axis=0))
    if np.any(norms == 0):
        raise ValueError("zero-norm column")
    head = x[: x.shape[0] - lag if lag else None]
    tail = x[lag:]
    return (head.T @ tail) / np.outer(norms, norms)
