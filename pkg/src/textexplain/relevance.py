"""The universal explainer output: one real score per input token."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class RelevanceMap:
    scores: np.ndarray      # (T,)
    k: int                  # target class
    method: str

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 1:
            raise ValueError("relevance scores must be one-dimensional")
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("relevance scores must be finite")

    def __len__(self) -> int:
        return self.scores.shape[0]


def rmax(map_or_scores) -> int:
    """0-based index of the maximum score; ties break to the lowest index."""
    scores = getattr(map_or_scores, "scores", map_or_scores)
    scores = np.asarray(scores)
    if scores.size == 0:
        raise ValueError("empty relevance map")
    return int(np.argmax(scores))
