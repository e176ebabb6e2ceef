"""Gradient-based explainers: {plain, integrated} x {score, prob} x {L2, dot}."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..models import NetworkParams, embed, embedding_gradients
from ..relevance import RelevanceMap


@dataclass
class GradConfig:
    variant: str = "grad1"      # "grad1" | "gradint"
    output: str = "s"           # "s" | "p"
    reduction: str = "dot"      # "l2" | "dot"
    steps: int = 50             # interpolation points for "gradint"

    def validate(self) -> None:
        if self.variant not in ("grad1", "gradint"):
            raise ValueError(f"unknown gradient variant {self.variant!r}")
        if self.output not in ("s", "p"):
            raise ValueError(f"unknown output {self.output!r}")
        if self.reduction not in ("l2", "dot"):
            raise ValueError(f"unknown reduction {self.reduction!r}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")

    @property
    def name(self) -> str:
        return f"{self.variant}_{self.output}_{self.reduction}"


def integrated_gradients(params: NetworkParams, ids, output: str, k: int,
                         steps: int = 50) -> np.ndarray:
    """Average gradient over the scaled inputs (m/M) * E, m = 1..M.

    The baseline is the all-zero embedding matrix, so the interpolation is a
    pure scaling of the actual embeddings.
    """
    emb = embed(params, ids)
    total = np.zeros_like(emb)
    for m in range(1, steps + 1):
        total += embedding_gradients(params, output=output, k=k,
                                     emb=emb * (m / steps))
    return total / steps


def reduce_gradients(grads: np.ndarray, emb: np.ndarray,
                     reduction: str) -> np.ndarray:
    """Per-token reduction of a (T, d_e) gradient matrix to a (T,) vector."""
    if grads.shape != emb.shape:
        raise ValueError("gradient/embedding shape mismatch")
    if reduction == "l2":
        return np.linalg.norm(grads, axis=1)
    if reduction == "dot":
        return np.einsum("td,td->t", emb, grads)
    raise ValueError(f"unknown reduction {reduction!r}")


def explain_gradient(params: NetworkParams, ids, k: int,
                     cfg: GradConfig) -> RelevanceMap:
    cfg.validate()
    emb = embed(params, ids)
    if cfg.variant == "grad1":
        grads = embedding_gradients(params, output=cfg.output, k=k, emb=emb)
    else:
        grads = integrated_gradients(params, ids, cfg.output, k, cfg.steps)
    return RelevanceMap(scores=reduce_gradients(grads, emb, cfg.reduction),
                        k=k, method=cfg.name)
