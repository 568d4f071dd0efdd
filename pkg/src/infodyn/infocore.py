"""Exact information-theoretic functionals over joint PMFs.

Everything is computed in log base 2 (bits). All conditional and mutual
quantities are derived from marginals of one shared JointPMF, so the
algebraic identities among them (chain rule, flux decompositions) hold to
machine precision rather than up to estimator noise.
"""

from __future__ import annotations

import warnings

import numpy as np

from .pmf import JointPMF, marginalize

__all__ = [
    "entropy",
    "conditional_entropy",
    "mutual_information",
    "conditional_mutual_information",
    "co_information",
    "kl_divergence",
    "cross_entropy",
    "binned_pmf",
    "rescale_pmf",
]


def _as_dims(over) -> list[int]:
    dims = [int(d) for d in over]
    if len(set(dims)) != len(dims):
        raise ValueError("variable set contains repeated dimensions")
    return dims


def _check_disjoint(*sets):
    seen = set()
    for s in sets:
        for d in s:
            if d in seen:
                raise ValueError(f"variable sets overlap at dimension {d}")
            seen.add(d)


def entropy(pmf: JointPMF, over=None) -> float:
    """Shannon entropy H (bits) of the marginal on `over` (default: all)."""
    if over is None:
        p = pmf.probs
    else:
        dims = _as_dims(over)
        p = marginalize(pmf, dims).probs
    return float(-(p * np.log2(p)).sum())


def conditional_entropy(pmf: JointPMF, target, given) -> float:
    """H(target | given) = H(target, given) - H(given); empty given allowed."""
    target = _as_dims(target)
    given = _as_dims(given)
    _check_disjoint(target, given)
    if not given:
        return entropy(pmf, target)
    return entropy(pmf, target + given) - entropy(pmf, given)


def mutual_information(pmf: JointPMF, a, b) -> float:
    """I(a;b) = H(a) - H(a|b); symmetric and nonnegative."""
    a, b = _as_dims(a), _as_dims(b)
    _check_disjoint(a, b)
    return entropy(pmf, a) - conditional_entropy(pmf, a, b)


def conditional_mutual_information(pmf: JointPMF, a, b, given=()) -> float:
    """I(a;b|given) = H(a|given) - H(a|b,given)."""
    a, b, given = _as_dims(a), _as_dims(b), _as_dims(given)
    _check_disjoint(a, b, given)
    return conditional_entropy(pmf, a, given) - conditional_entropy(pmf, a, b + given)


def co_information(pmf: JointPMF, parts, given=()) -> float:
    """Conditional co-information I(p1; p2; ...; pM | given).

    Defined by the recursion
        I(p1;...;pM | g) = I(p1;...;p(M-1) | g) - I(p1;...;p(M-1) | [pM, g])
    down to the pairwise conditional mutual information. May be negative
    for three or more parts.
    """
    parts = [_as_dims(p) for p in parts]
    given = _as_dims(given)
    if len(parts) < 2:
        raise ValueError("co-information needs at least 2 parts")
    _check_disjoint(*parts, given)
    if len(parts) == 2:
        return conditional_mutual_information(pmf, parts[0], parts[1], given)
    head, last = parts[:-1], parts[-1]
    return co_information(pmf, head, given) - co_information(pmf, head, last + given)


def _aligned_masses(p: JointPMF, q: JointPMF):
    if p.dims != q.dims:
        raise ValueError(f"dimension mismatch: {p.dims} vs {q.dims}")
    q_map = {tuple(row): float(m) for row, m in zip(q.indices, q.probs)}
    qs = np.array([q_map.get(tuple(row), 0.0) for row in p.indices])
    return p.probs, qs


def kl_divergence(p: JointPMF, q: JointPMF, epsilon: float | None = None) -> float:
    """KL(p||q) in bits: sum p log2(p/q).

    Returns inf when p has mass on cells where q has none, with a warning
    listing the offending cells. Passing `epsilon` floors the missing q
    masses instead, keeping the value (and gradients) finite.
    """
    ps, qs = _aligned_masses(p, q)
    missing = qs == 0
    if missing.any():
        if epsilon is None:
            cells = [tuple(row) for row in p.indices[missing]][:10]
            warnings.warn(
                f"KL divergence infinite: q has zero mass on {missing.sum()} "
                f"cells of p's support, e.g. {cells}",
                stacklevel=2,
            )
            return float("inf")
        qs = np.maximum(qs, epsilon)
    return float((ps * np.log2(ps / qs)).sum())


def cross_entropy(p: JointPMF, q: JointPMF, epsilon: float | None = None) -> float:
    """H(p) + KL(p, q); infinite on support mismatch unless floored."""
    kl = kl_divergence(p, q, epsilon)
    return entropy(p) + kl


def binned_pmf(x: np.ndarray, edges: np.ndarray) -> JointPMF:
    """Histogram PMF of a real sample on explicit edges, carrying the edges.

    Out-of-range samples are clipped into the end bins so mass totals 1.
    """
    edges = np.asarray(edges, dtype=float)
    codes = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(edges) - 2)
    counts = np.bincount(codes, minlength=len(edges) - 1)
    support = np.flatnonzero(counts)
    return JointPMF.from_counts(
        support[:, None], counts[support], (len(edges) - 1,), (edges,)
    )


def rescale_pmf(pmf: JointPMF, gamma: float, reference_edges=None) -> JointPMF:
    """PMF of the scaled variable gamma * X on a reference partition.

    The source bin edges are relabeled e -> gamma * e and the mass of each
    scaled cell is spread over the reference cells in proportion to overlap
    length; mass beyond the reference range is clipped into the end bins.
    Requires a single-variable PMF carrying its edge metadata.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if pmf.ndim != 1:
        raise ValueError("rescale_pmf needs a single-variable PMF")
    if pmf.edges is None:
        raise ValueError("PMF carries no bin-edge metadata")
    src = np.asarray(pmf.edges[0], dtype=float)
    ref = src if reference_edges is None else np.asarray(reference_edges, dtype=float)
    n_ref = len(ref) - 1
    out = np.zeros(n_ref)
    for (k,), mass in zip(pmf.indices, pmf.probs):
        lo, hi = gamma * src[k], gamma * src[k + 1]
        # clip into range, then distribute by overlap fraction
        span = hi - lo
        lo_c, hi_c = np.clip([lo, hi], ref[0], ref[-1])
        out[0] += mass * max(0.0, (min(hi, ref[0]) - lo)) / span
        out[-1] += mass * max(0.0, (hi - max(lo, ref[-1]))) / span
        if hi_c > lo_c:
            left = np.clip(ref[:-1], lo_c, hi_c)
            right = np.clip(ref[1:], lo_c, hi_c)
            out += mass * (right - left) / span
    support = np.flatnonzero(out > 0)
    return JointPMF(tuple([n_ref]), support[:, None], out[support], (ref,))
