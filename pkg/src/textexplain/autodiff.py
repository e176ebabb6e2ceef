"""Minimal tape-based reverse-mode differentiation over numpy arrays.

The network forward passes are small (vectors of a few hundred entries,
sequences of a few hundred steps), so a plain Wengert list with Python-level
ops is plenty fast and keeps gradient code in one place. Values are float64
ndarrays; scalars are 0-d arrays.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Node", "Tape"]


class Node:
    __slots__ = ("value", "grad", "_vjp")

    def __init__(self, value, vjp=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self._vjp = vjp


def _acc(node: Node, g: np.ndarray) -> None:
    if node.grad is None:
        node.grad = np.zeros_like(node.value)
    node.grad += g


class Tape:
    """Records operations in execution order; backward() replays them reversed."""

    def __init__(self):
        self._nodes: list[Node] = []

    def _rec(self, node: Node) -> Node:
        self._nodes.append(node)
        return node

    def leaf(self, value) -> Node:
        return self._rec(Node(value))

    # -- elementwise ---------------------------------------------------

    def add(self, a: Node, b: Node) -> Node:
        def vjp(g):
            _acc(a, g)
            _acc(b, g)
        return self._rec(Node(a.value + b.value, vjp))

    def sub(self, a: Node, b: Node) -> Node:
        def vjp(g):
            _acc(a, g)
            _acc(b, -g)
        return self._rec(Node(a.value - b.value, vjp))

    def mul(self, a: Node, b: Node) -> Node:
        def vjp(g):
            _acc(a, g * b.value)
            _acc(b, g * a.value)
        return self._rec(Node(a.value * b.value, vjp))

    def scale(self, a: Node, c: float) -> Node:
        def vjp(g):
            _acc(a, g * c)
        return self._rec(Node(a.value * c, vjp))

    def sigmoid(self, a: Node) -> Node:
        from .numerics import sigmoid
        y = sigmoid(a.value)

        def vjp(g):
            _acc(a, g * y * (1.0 - y))
        return self._rec(Node(y, vjp))

    def tanh(self, a: Node) -> Node:
        y = np.tanh(a.value)

        def vjp(g):
            _acc(a, g * (1.0 - y * y))
        return self._rec(Node(y, vjp))

    def relu(self, a: Node) -> Node:
        mask = a.value > 0

        def vjp(g):
            _acc(a, g * mask)
        return self._rec(Node(np.where(mask, a.value, 0.0), vjp))

    # -- linear algebra ------------------------------------------------

    def matvec(self, w: Node, v: Node) -> Node:
        def vjp(g):
            _acc(w, np.outer(g, v.value))
            _acc(v, w.value.T @ g)
        return self._rec(Node(w.value @ v.value, vjp))

    def kernel_matvec(self, k: Node, idx: int, v: Node) -> Node:
        """Apply slice ``idx`` of a stacked kernel (F, out, in) to a vector."""
        w = k.value[idx]

        def vjp(g):
            if k.grad is None:
                k.grad = np.zeros_like(k.value)
            k.grad[idx] += np.outer(g, v.value)
            _acc(v, w.T @ g)
        return self._rec(Node(w @ v.value, vjp))

    def dot(self, a: Node, b: Node) -> Node:
        def vjp(g):
            _acc(a, g * b.value)
            _acc(b, g * a.value)
        return self._rec(Node(np.dot(a.value, b.value), vjp))

    def concat(self, a: Node, b: Node) -> Node:
        na = a.value.shape[0]

        def vjp(g):
            _acc(a, g[:na])
            _acc(b, g[na:])
        return self._rec(Node(np.concatenate([a.value, b.value]), vjp))

    def pick(self, v: Node, i: int) -> Node:
        def vjp(g):
            if v.grad is None:
                v.grad = np.zeros_like(v.value)
            v.grad[i] += g
        return self._rec(Node(v.value[i], vjp))

    # -- reductions / structured ops ------------------------------------

    def channel_max(self, rows: list[Node]) -> Node:
        """Per-channel max over a list of equal-length vectors.

        Gradient is routed to the argmax row only; ties go to the earliest row.
        """
        stacked = np.stack([r.value for r in rows])
        arg = np.argmax(stacked, axis=0)
        val = stacked[arg, np.arange(stacked.shape[1])]

        def vjp(g):
            for i, r in enumerate(rows):
                mask = arg == i
                if mask.any():
                    _acc(r, np.where(mask, g, 0.0))
        return self._rec(Node(val, vjp))

    def softmax(self, v: Node) -> Node:
        from .numerics import softmax
        p = softmax(v.value)

        def vjp(g):
            _acc(v, p * (g - np.dot(p, g)))
        return self._rec(Node(p, vjp))

    def cross_entropy(self, scores: Node, label: int) -> Node:
        """Categorical crossentropy of a logit vector against an integer label."""
        s = scores.value
        m = np.max(s)
        lse = m + np.log(np.sum(np.exp(s - m)))

        def vjp(g):
            p = np.exp(s - lse)
            p[label] -= 1.0
            _acc(scores, g * p)
        return self._rec(Node(lse - s[label], vjp))

    # -- driver ----------------------------------------------------------

    def backward(self, root: Node) -> None:
        """Accumulate gradients of ``root`` (a scalar) into every node's .grad."""
        for n in self._nodes:
            n.grad = None
        root.grad = np.ones_like(root.value)
        for n in reversed(self._nodes):
            if n.grad is not None and n._vjp is not None:
                n._vjp(n.grad)
