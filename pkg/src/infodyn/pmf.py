"""Sparse joint probability mass functions over discrete symbol tuples.

A PMF is stored as (support indices, probabilities) rather than a dense
array because downstream subset enumeration builds joints of dimension
M+1, where dense storage (bins**(M+1)) blows up quickly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["JointPMF", "marginalize", "condition"]

MASS_TOL = 1e-12


@dataclass(frozen=True)
class JointPMF:
    """Joint PMF over a tuple of discrete variables.

    dims     -- alphabet size per dimension
    indices  -- (n_support, ndim) integer symbol tuples with nonzero mass
    probs    -- (n_support,) probabilities, strictly positive, summing to 1
    edges    -- optional per-dimension bin edges (kept when the PMF came
                from binning a real-valued signal; needed for rescaling)
    """

    dims: tuple[int, ...]
    indices: np.ndarray
    probs: np.ndarray
    edges: tuple[np.ndarray, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        idx = np.atleast_2d(np.asarray(self.indices, dtype=np.int64))
        p = np.asarray(self.probs, dtype=float)
        if idx.shape[0] != p.shape[0]:
            raise ValueError("indices/probs length mismatch")
        if idx.shape[1] != len(self.dims):
            raise ValueError("indices width does not match dims")
        if np.any(p <= 0):
            raise ValueError("stored masses must be strictly positive")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"total mass {p.sum()} not 1")
        # exact-ish renormalization so the 1e-12 invariant holds downstream
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "probs", p / p.sum())

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def support_count(self) -> int:
        return self.indices.shape[0]

    @property
    def mass(self) -> dict[tuple[int, ...], float]:
        """Mapping symbol tuple -> probability (zeros omitted)."""
        return {tuple(row): float(p) for row, p in zip(self.indices, self.probs)}

    @classmethod
    def from_mapping(cls, mapping, dims, edges=None) -> "JointPMF":
        items = sorted(mapping.items())
        idx = np.array([k for k, _ in items], dtype=np.int64)
        if idx.ndim == 1:
            idx = idx[:, None]
        p = np.array([v for _, v in items], dtype=float)
        keep = p > 0
        return cls(tuple(dims), idx[keep], p[keep], edges)

    @classmethod
    def from_dense(cls, array, edges=None) -> "JointPMF":
        a = np.asarray(array, dtype=float)
        idx = np.argwhere(a > 0)
        return cls(tuple(a.shape), idx, a[a > 0], edges)

    @classmethod
    def from_counts(cls, indices, counts, dims, edges=None) -> "JointPMF":
        counts = np.asarray(counts, dtype=float)
        return cls(tuple(dims), indices, counts / counts.sum(), edges)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dims)
        out[tuple(self.indices.T)] = self.probs
        return out

    def prob(self, symbol) -> float:
        """Mass at one symbol tuple (0 if off-support)."""
        symbol = np.asarray(symbol, dtype=np.int64)
        hit = np.all(self.indices == symbol, axis=1)
        return float(self.probs[hit].sum())


def marginalize(pmf: JointPMF, keep) -> JointPMF:
    """Sum out every dimension not listed in `keep` (order preserved)."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep must be non-empty")
    if len(set(keep)) != len(keep):
        raise ValueError("keep indices must be distinct")
    for k in keep:
        if not 0 <= k < pmf.ndim:
            raise ValueError(f"invalid dimension index {k}")
    sub = pmf.indices[:, keep]
    uniq, inv = np.unique(sub, axis=0, return_inverse=True)
    p = np.bincount(inv, weights=pmf.probs, minlength=uniq.shape[0])
    edges = None
    if pmf.edges is not None:
        edges = tuple(pmf.edges[k] for k in keep)
    return JointPMF(tuple(pmf.dims[k] for k in keep), uniq, p, edges)


def condition(pmf: JointPMF, given) -> JointPMF:
    """Restrict to the event {dim_k = symbol_k for (k, symbol_k) in given},
    renormalize, and drop the conditioned dimensions."""
    given = list(given)
    if not given:
        raise ValueError("given must be non-empty")
    cond_dims = [d for d, _ in given]
    if len(set(cond_dims)) != len(cond_dims):
        raise ValueError("duplicate conditioning dimension")
    mask = np.ones(pmf.support_count, dtype=bool)
    for d, s in given:
        if not 0 <= d < pmf.ndim:
            raise ValueError(f"invalid dimension index {d}")
        mask &= pmf.indices[:, d] == s
    total = pmf.probs[mask].sum()
    if total <= 0:
        raise ValueError("impossible condition: event has zero probability")
    rest = [d for d in range(pmf.ndim) if d not in cond_dims]
    if not rest:
        raise ValueError("cannot condition on every dimension")
    edges = None
    if pmf.edges is not None:
        edges = tuple(pmf.edges[d] for d in rest)
    return JointPMF(
        tuple(pmf.dims[d] for d in rest),
        pmf.indices[mask][:, rest],
        pmf.probs[mask] / total,
        edges,
    )
