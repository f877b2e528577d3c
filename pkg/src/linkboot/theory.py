"""
Closed-form predictions for copied networks.

All functions are pure. Degree distributions are numpy arrays indexed by
degree (``pmf[k]``); joint distributions are 2-D arrays indexed by
``(in_degree, out_degree)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .errors import BadMoments, BadProbability

logger = logging.getLogger(__name__)


def _check_prob(p_e):
    if not 0.0 <= p_e <= 1.0 or math.isnan(p_e):
        raise BadProbability(f"p_e={p_e} outside [0, 1]")


def as_pmf_array(pmf) -> np.ndarray:
    """Accept an array indexed by degree or a ``{degree: prob}`` mapping."""
    if isinstance(pmf, Mapping):
        if not pmf:
            return np.zeros(1)
        out = np.zeros(max(pmf) + 1)
        for k, p in pmf.items():
            out[int(k)] += p
        return out
    return np.asarray(pmf, dtype=np.float64)


def thinning_matrix(k0_max: int, p_e: float, k_max_out: int | None = None) -> np.ndarray:
    """``M[k0, k] = C(k0, k) p_e^k (1 - p_e)^(k0 - k)``."""
    _check_prob(p_e)
    if k_max_out is None:
        k_max_out = k0_max
    k0 = np.arange(k0_max + 1, dtype=np.float64)[:, None]
    k = np.arange(k_max_out + 1, dtype=np.float64)[None, :]
    rest = np.maximum(k0 - k, 0.0)
    # log space stays finite for tiny or subnormal p_e, where scipy.stats.binom overflows
    with np.errstate(divide="ignore", invalid="ignore"):
        log_m = (gammaln(k0 + 1) - gammaln(k + 1) - gammaln(rest + 1)
                 + xlogy(k, p_e) + xlog1py(rest, -p_e))
    return np.where(k <= k0, np.exp(log_m), 0.0)


def thinned_degree_pmf(source_pmf, p_e: float, k_max_out: int | None = None) -> np.ndarray:
    """
    Degree distribution after keeping each incident edge with probability ``p_e``.

    Parameters
    ----------
    source_pmf : array or mapping
        Source degree distribution with finite support.
    p_e : float
        Link copy probability.
    k_max_out : int, optional
        Largest output degree. Defaults to the source support; mass above a
        smaller cap is left out and shows up as ``1 - result.sum()``.
    """
    pmf = as_pmf_array(source_pmf)
    return pmf @ thinning_matrix(len(pmf) - 1, p_e, k_max_out)


def thinned_joint_pmf(source_joint, p_e: float, caps: tuple[int, int] | None = None) -> np.ndarray:
    """Independent binomial thinning of both coordinates of a joint ``(j, k)`` pmf."""
    joint = _as_joint_array(source_joint)
    j_cap, k_cap = caps if caps is not None else (joint.shape[0] - 1, joint.shape[1] - 1)
    mj = thinning_matrix(joint.shape[0] - 1, p_e, j_cap)
    mk = thinning_matrix(joint.shape[1] - 1, p_e, k_cap)
    return mj.T @ joint @ mk


def _as_joint_array(joint) -> np.ndarray:
    if isinstance(joint, Mapping):
        jm = max(j for j, _ in joint) + 1
        km = max(k for _, k in joint) + 1
        out = np.zeros((jm, km))
        for (j, k), p in joint.items():
            out[j, k] += p
        return out
    return np.asarray(joint, dtype=np.float64)


def pmf_moments(pmf) -> tuple[float, float]:
    pmf = as_pmf_array(pmf)
    k = np.arange(len(pmf), dtype=np.float64)
    return float(pmf @ k), float(pmf @ (k * k))


def _check_moments(mean_k, mean_k2):
    if not (mean_k > 0 and mean_k2 > 0):
        raise BadMoments(f"moments must be positive, got {mean_k}, {mean_k2}")


def gcc_threshold_raw(mean_k: float, mean_k2_or_jk: float) -> float:
    """``<k>' / <k^2>'`` without clamping; values above 1 mean no GCC is reachable."""
    _check_moments(mean_k, mean_k2_or_jk)
    return mean_k / mean_k2_or_jk


def gcc_threshold(mean_k: float, mean_k2_or_jk: float) -> float:
    """
    Smallest link copy probability at which a giant component appears.

    Clamped to 1. When the raw ratio exceeds 1 no rate achieves a giant
    component; this is logged and reported by :func:`gcc_achievable`.
    """
    raw = gcc_threshold_raw(mean_k, mean_k2_or_jk)
    if raw > 1.0:
        logger.warning("threshold %.4g > 1: no giant component achievable by copying", raw)
        return 1.0
    return raw


def gcc_achievable(mean_k: float, mean_k2_or_jk: float) -> bool:
    return gcc_threshold_raw(mean_k, mean_k2_or_jk) <= 1.0


def gcc_predicate(mean_k: float, mean_jk: float, p_e: float) -> bool:
    """True when ``p_e >= <k>' / <jk>'``."""
    _check_prob(p_e)
    return p_e >= gcc_threshold_raw(mean_k, mean_jk)


def predict_moments(mean_k_src: float, mean_k2_src: float, p_e: float) -> tuple[float, float]:
    _check_prob(p_e)
    if mean_k_src < 0 or mean_k2_src < 0:
        raise BadMoments("moments must be non-negative")
    return p_e * mean_k_src, p_e ** 2 * mean_k2_src + p_e * (1 - p_e) * mean_k_src


def predict_reciprocity(p2: float) -> float:
    _check_prob(p2)
    return p2


def predict_clustering_uncorrelated(n: int, mean_k: float, mean_k2: float) -> float:
    """
    Clustering of an uncorrelated network with the given moments.

    ``(<k^2> - <k>)^2 / (n <k>^3)``. The value can exceed 1 for heavy tails
    on small graphs and is returned unclamped; see :func:`clamp_unit`.
    """
    if n <= 0 or mean_k <= 0:
        raise BadMoments("need n > 0 and mean_k > 0")
    return (mean_k2 - mean_k) ** 2 / (n * mean_k ** 3)


def clamp_unit(x: float) -> float:
    return min(1.0, max(0.0, x))


def predict_copied_clustering(p2: float, clustering_src: float) -> float:
    _check_prob(p2)
    return p2 * clustering_src


def predict_copied_clustering_uncorrelated(source_n: int, mean_k_src: float,
                                           mean_k2_src: float, p1: float, p2: float) -> float:
    """
    Copied-network clustering from the uncorrelated formula.

    Thins the source moments by ``p_e`` and uses the expected sample size
    ``p1 * source_n`` for the number of copied nodes.
    """
    p_e = p1 * p2
    n = p1 * source_n
    mk, mk2 = predict_moments(mean_k_src, mean_k2_src, p_e)
    return predict_clustering_uncorrelated(n, mk, mk2)


@dataclass(frozen=True)
class TheoryPrediction:
    kind: str
    inputs_digest: dict
    value: Any
    truncation_remainder: float = 0.0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        v = self.value
        if isinstance(v, np.ndarray):
            v = v.tolist()
        return {"kind": self.kind, "inputs": self.inputs_digest, "value": v,
                "truncation_remainder": self.truncation_remainder, "notes": list(self.notes)}


def predict_all(p1: float, p2: float, mean_k: float | None = None, mean_k2: float | None = None,
                pmf=None, n: int | None = None, clustering_src: float | None = None,
                k_max_out: int | None = None) -> list[TheoryPrediction]:
    """
    Every available prediction for one ``(p1, p2)`` setting.

    Moments are taken from ``pmf`` when given. Predictions needing missing
    inputs are skipped.
    """
    _check_prob(p1)
    _check_prob(p2)
    p_e = p1 * p2
    digest = {"p1": p1, "p2": p2, "p_e": p_e, "n": n}
    out = []
    if pmf is not None:
        arr = as_pmf_array(pmf)
        remainder = max(0.0, 1.0 - float(arr.sum()))
        mean_k, mean_k2 = pmf_moments(arr)
        thinned = thinned_degree_pmf(arr, p_e, k_max_out)
        out.append(TheoryPrediction(
            "degree_pmf", {**digest, "source_support": len(arr) - 1}, thinned,
            truncation_remainder=remainder + max(0.0, float(arr.sum() - thinned.sum()))))
    digest.update(mean_k=mean_k, mean_k2=mean_k2)
    out.append(TheoryPrediction("reciprocity", digest, predict_reciprocity(p2)))
    if mean_k is not None and mean_k2 is not None:
        raw = gcc_threshold_raw(mean_k, mean_k2)
        notes = [] if raw <= 1 else ["no giant component achievable under link bootstrapping"]
        out.append(TheoryPrediction("gcc_threshold", digest, {
            "threshold": min(raw, 1.0), "threshold_raw": raw,
            "achievable": raw <= 1.0, "gcc_expected": gcc_predicate(mean_k, mean_k2, p_e),
        }, notes=notes))
        mk, mk2 = predict_moments(mean_k, mean_k2, p_e)
        out.append(TheoryPrediction("moments", digest, {"mean_k": mk, "mean_k2": mk2}))
        if n and mk > 0 and p1 > 0:
            raw_c = predict_copied_clustering_uncorrelated(n, mean_k, mean_k2, p1, p2)
            out.append(TheoryPrediction("clustering", digest, {
                "uncorrelated_raw": raw_c, "uncorrelated_clamped": clamp_unit(raw_c),
                "scaled": None if clustering_src is None else predict_copied_clustering(p2, clustering_src),
            }, notes=["copied node count approximated by p1 * n"]))
    elif clustering_src is not None:
        out.append(TheoryPrediction("clustering", digest, {
            "scaled": predict_copied_clustering(p2, clustering_src)}))
    return out
