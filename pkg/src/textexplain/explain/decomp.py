"""Cell-decomposition explainer for gated (Q)RNNs.

Scores each timestep by how much of its state survives all future gating and
reaches the class score. For the LSTM family the surviving quantity is

    nl(t) = w_k . (o_T * tanh(prod_{j=t+1..T} f_j * c_t))

and for the GRU family

    nl(t) = w_k . (prod_{j=t+1..T} z_j * h_t)

with elementwise products. A token's relevance is the first difference
nl(t) - nl(t-1). The Q-variants use the same formulas over their
convolutionally computed gates. Not defined for the CNN.
"""

from __future__ import annotations

import numpy as np

from ..models import DirectionTrace, ForwardTrace, NetworkParams, forward
from ..relevance import RelevanceMap

_DECOMP_ARCHS = ("LSTM", "QLSTM", "GRU", "QGRU")


def _suffix_gate_products(gates: np.ndarray, t_len: int) -> np.ndarray:
    """prod[t] = elementwise product of gates[t+1..T]; prod[T] = ones."""
    prod = np.ones((t_len + 1, gates.shape[1]))
    for t in range(t_len - 1, -1, -1):
        prod[t] = prod[t + 1] * gates[t + 1]
    return prod


def net_load_series(trace: ForwardTrace, params: NetworkParams, k: int,
                    dname: str) -> np.ndarray:
    """nl(t) for t = 0..T in one direction; nl(0) = 0 under zero init."""
    if params.arch not in _DECOMP_ARCHS:
        raise ValueError(f"decomposition undefined for {params.arch}")
    tr: DirectionTrace = trace.dirs[dname]
    t_len = tr.emb.shape[0]
    pos = params.directions.index(dname)
    d = params.d_hidden
    w_k = params.w_cls[k, pos * d:(pos + 1) * d]
    if params.arch in ("LSTM", "QLSTM"):
        prod = _suffix_gate_products(tr.gates["f"], t_len)
        o_last = tr.gates["o"][t_len]
        return np.array([w_k @ (o_last * np.tanh(prod[t] * tr.cell[t]))
                         for t in range(t_len + 1)])
    prod = _suffix_gate_products(tr.gates["z"], t_len)
    return np.array([w_k @ (prod[t] * tr.hidden[t])
                     for t in range(t_len + 1)])


def net_load(trace: ForwardTrace, params: NetworkParams, k: int,
             t: int, dname: str = "fwd") -> float:
    """Net load of step t (0 <= t <= T) for class k in one direction."""
    series = net_load_series(trace, params, k, dname)
    if not 0 <= t < series.shape[0]:
        raise ValueError(f"t={t} outside [0, {series.shape[0] - 1}]")
    return float(series[t])


def decomp_explain(params: NetworkParams, ids, k: int) -> RelevanceMap:
    """First difference of the net-load series; bidirectional models sum the
    per-direction decompositions at the original token positions."""
    trace = forward(params, ids)
    t_len = trace.length
    total = np.zeros(t_len)
    for dname in params.directions:
        series = net_load_series(trace, params, k, dname)
        phi = np.diff(series)
        if dname == "bwd":
            phi = phi[::-1]
        total += phi
    return RelevanceMap(scores=total, k=k, method="decomp")
