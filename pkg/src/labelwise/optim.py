"""Adam optimizer over named parameter tensors.

Parameters are the single mutable state in a run: tensors are immutable
inside a forward pass, and the optimizer rewrites ``param.data`` between
tapes (single writer).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .numerics import Tensor


class Adam:
    def __init__(self, params: list[tuple[str, Tensor]], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = {name: np.zeros_like(p.data) for name, p in params}
        self._v = {name: np.zeros_like(p.data) for name, p in params}

    def step(self, grads: dict[Tensor, np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1 ** self.t
        bias2 = 1.0 - b2 ** self.t
        for name, p in self.params:
            g = grads.get(p)
            if g is None:
                continue  # frozen or unused this step
            if g.shape != p.data.shape:
                raise DimensionError(
                    f"{name}: gradient shape {g.shape} != parameter shape {p.data.shape}"
                )
            m = self._m[name]
            v = self._v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            p.data -= self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)
