"""Omission and occlusion explainers over N-gram windows.

For each token, every length-N window containing it is perturbed one at a
time: omission deletes the window from the embedding sequence, occlusion
replaces it with all-zero embedding rows. The token's relevance is the mean
drop in the unnormalized class score over its N windows. Windows reaching
past a sequence end are clipped to the valid span (the divisor stays N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..models import NetworkParams, embed, empty_sequence_scores, \
    forward_embedded
from ..relevance import RelevanceMap


@dataclass
class PerturbConfig:
    mode: str = "omit"      # "omit" | "occlude"
    n: int = 1              # window length

    def validate(self) -> None:
        if self.mode not in ("omit", "occlude"):
            raise ValueError(f"unknown perturbation mode {self.mode!r}")
        if self.n < 1:
            raise ValueError("window length must be >= 1")

    @property
    def name(self) -> str:
        return f"{'omit' if self.mode == 'omit' else 'occ'}_{self.n}"


def _perturbed_score(params: NetworkParams, emb: np.ndarray, k: int,
                     span: tuple[int, int], mode: str) -> float:
    """Score with tokens in [span) (0-based, half-open) removed or zeroed."""
    lo, hi = span
    if lo >= hi:
        return float(forward_embedded(params, emb).scores[k])
    if mode == "omit":
        kept = np.concatenate([emb[:lo], emb[hi:]])
        if kept.shape[0] == 0:
            return float(empty_sequence_scores(params)[k])
        return float(forward_embedded(params, kept).scores[k])
    masked = emb.copy()
    masked[lo:hi] = 0.0
    return float(forward_embedded(params, masked).scores[k])


def perturb_explain(params: NetworkParams, ids, k: int,
                    cfg: PerturbConfig) -> RelevanceMap:
    cfg.validate()
    emb = embed(params, ids)
    t_len = emb.shape[0]
    if t_len == 0:
        raise ValueError("empty input sequence")
    s_full = float(forward_embedded(params, emb).scores[k])

    cache: dict[tuple[int, int], float] = {}

    def score_without(span):
        if span not in cache:
            cache[span] = _perturbed_score(params, emb, k, span, cfg.mode)
        return cache[span]

    scores = np.zeros(t_len)
    for t in range(t_len):
        drop = 0.0
        # windows of length n starting at t-n+1 .. t, clipped to the sequence
        for start in range(t - cfg.n + 1, t + 1):
            span = (max(start, 0), min(start + cfg.n, t_len))
            drop += s_full - score_without(span)
        scores[t] = drop / cfg.n
    return RelevanceMap(scores=scores, k=k, method=cfg.name)
