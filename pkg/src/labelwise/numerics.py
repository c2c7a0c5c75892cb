"""Dense float64 tensors with reverse-mode automatic differentiation.

A :class:`Tensor` wraps a row-major float64 numpy array and is treated as
immutable once created.  Gradients are recorded on an explicit
:class:`Tape`: while a tape is active (``with Tape() as tape:``), every op
whose operands are tracked appends one node holding the local backward
rule.  Creation order is already a topological order, so
``tape.backward(loss)`` is a single reverse sweep that visits each node
exactly once.  A tape is single-use and single-threaded; independent tapes
may run on separate threads.

Outside a tape the same ops run without recording anything, which is the
inference path.
"""

from __future__ import annotations

import threading
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateMaskError,
    DimensionError,
    RankError,
    TapeConsumedError,
)

Array = np.ndarray

_tls = threading.local()


def _active_tape() -> "Tape | None":
    return getattr(_tls, "tape", None)


class Tensor:
    """Immutable dense float64 value, optionally tracked on the active tape.

    ``requires_grad`` marks a trainable leaf: after ``tape.backward(loss)``
    the accumulated gradient (same shape as ``data``) is exposed on
    ``.grad`` and returned in the gradient map.
    """

    __slots__ = ("data", "requires_grad", "grad", "_node")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim and not arr.flags["C_CONTIGUOUS"]:
            arr = np.ascontiguousarray(arr)  # ascontiguousarray would promote 0-d to 1-d
        self.data: Array = arr
        self.requires_grad = bool(requires_grad)
        self.grad: Array | None = None
        self._node: "_Node | None" = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # arithmetic sugar; scalars go through the affine op
    def __add__(self, other):
        if isinstance(other, Tensor):
            return add(self, other)
        return affine(self, 1.0, float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Tensor):
            return sub(self, other)
        return affine(self, 1.0, -float(other))

    def __rsub__(self, other):
        return affine(self, -1.0, float(other))

    def __mul__(self, other):
        if isinstance(other, Tensor):
            return mul(self, other)
        return scale(self, float(other))

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def sum(self, axis: int | None = None) -> "Tensor":
        return reduce_sum(self, axis)

    def mean(self, axis: int | None = None) -> "Tensor":
        return reduce_mean(self, axis)

    def reshape(self, shape: Sequence[int]) -> "Tensor":
        return reshape(self, shape)

    def transpose(self, axes: Sequence[int]) -> "Tensor":
        return transpose(self, axes)


class _Node:
    __slots__ = ("tape", "parents", "backward_fn", "grad", "leaf")

    def __init__(self, tape, parents, backward_fn, leaf=None):
        self.tape = tape
        self.parents: tuple["_Node | None", ...] = parents
        # backward_fn(out_grad) -> per-parent gradient arrays (None = skip)
        self.backward_fn: Callable[[Array], tuple[Array | None, ...]] | None = backward_fn
        self.grad: Array | None = None
        self.leaf: Tensor | None = leaf


class Tape:
    """Append-only record of one forward pass; consumed by one backward."""

    def __init__(self):
        self._nodes: list[_Node] = []
        self._consumed = False

    def __enter__(self) -> "Tape":
        if _active_tape() is not None:
            raise RuntimeError("a Tape is already active on this thread; tapes do not nest")
        _tls.tape = self
        return self

    def __exit__(self, *exc) -> None:
        _tls.tape = None

    def _leaf_node(self, t: Tensor) -> _Node:
        node = _Node(self, (), None, leaf=t)
        self._nodes.append(node)
        t._node = node
        return node

    def _record(self, out: Tensor, parents: Sequence[Tensor], backward_fn) -> None:
        pnodes: list[_Node | None] = []
        tracked = False
        for p in parents:
            node = p._node if (p._node is not None and p._node.tape is self) else None
            if node is None and p.requires_grad:
                node = self._leaf_node(p)
            pnodes.append(node)
            tracked = tracked or node is not None
        if not tracked:
            return
        node = _Node(self, tuple(pnodes), backward_fn)
        self._nodes.append(node)
        out._node = node

    def backward(self, loss: Tensor) -> dict[Tensor, Array]:
        """Propagate d(loss)=1 back to every trainable leaf.

        Returns a map from leaf Tensor to its gradient array and also sets
        ``leaf.grad``.  Leaves that did not influence the loss get zeros.
        """
        if self._consumed:
            raise TapeConsumedError("this tape has already been consumed by backward()")
        if loss.data.ndim != 0:
            raise RankError(f"backward() needs a scalar loss, got shape {loss.shape}")
        node = loss._node
        if node is None or node.tape is not self:
            raise ValueError("loss was not recorded on this tape")
        self._consumed = True

        node.grad = np.ones((), dtype=np.float64)
        for n in reversed(self._nodes):
            if n.grad is None or n.backward_fn is None:
                continue
            for parent, g in zip(n.parents, n.backward_fn(n.grad)):
                if parent is None or g is None:
                    continue
                parent.grad = g if parent.grad is None else parent.grad + g

        grads: dict[Tensor, Array] = {}
        for n in self._nodes:
            if n.leaf is not None:
                g = n.grad if n.grad is not None else np.zeros_like(n.leaf.data)
                n.leaf.grad = g
                grads[n.leaf] = g
        return grads


def _emit(data: Array, parents: Sequence[Tensor], backward_fn) -> Tensor:
    out = Tensor(data)
    tape = _active_tape()
    if tape is not None:
        tape._record(out, parents, backward_fn)
    return out


def _broadcast_check(a: Tensor, b: Tensor, opname: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(
            f"{opname}: shapes {a.shape} and {b.shape} do not broadcast"
        ) from None


def _unbroadcast(g: Array, shape: tuple[int, ...]) -> Array:
    """Sum a gradient down to the shape of a broadcast operand."""
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# elementwise ops


def add(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_check(a, b, "add")
    sa, sb = a.shape, b.shape
    return _emit(a.data + b.data, (a, b),
                 lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_check(a, b, "sub")
    sa, sb = a.shape, b.shape
    return _emit(a.data - b.data, (a, b),
                 lambda g: (_unbroadcast(g, sa), _unbroadcast(-g, sb)))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_check(a, b, "mul")
    sa, sb = a.shape, b.shape
    da, db = a.data, b.data
    return _emit(da * db, (a, b),
                 lambda g: (_unbroadcast(g * db, sa), _unbroadcast(g * da, sb)))


def affine(a: Tensor, mult: float, shift: float) -> Tensor:
    return _emit(a.data * mult + shift, (a,), lambda g: (g * mult,))


def scale(a: Tensor, c: float) -> Tensor:
    return affine(a, c, 0.0)


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)
    return _emit(y, (a,), lambda g: (g * (1.0 - y * y),))


def sigmoid(a: Tensor) -> Tensor:
    y = sigmoid_array(a.data)
    return _emit(y, (a,), lambda g: (g * y * (1.0 - y),))


def sigmoid_array(x: Array) -> Array:
    """Numerically safe logistic function on raw arrays."""
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def relu(a: Tensor) -> Tensor:
    keep = a.data > 0
    return _emit(np.where(keep, a.data, 0.0), (a,), lambda g: (g * keep,))


def exp(a: Tensor) -> Tensor:
    y = np.exp(a.data)
    return _emit(y, (a,), lambda g: (g * y,))


def log(a: Tensor) -> Tensor:
    da = a.data
    return _emit(np.log(da), (a,), lambda g: (g / da,))


def clamp(a: Tensor, lo: float, hi: float) -> Tensor:
    # subgradient 1 inside [lo, hi], 0 where the clamp binds
    inside = (a.data >= lo) & (a.data <= hi)
    return _emit(np.clip(a.data, lo, hi), (a,), lambda g: (g * inside,))


# ---------------------------------------------------------------------------
# shape ops


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    old = a.shape
    return _emit(a.data.reshape(shape), (a,), lambda g: (g.reshape(old),))


def transpose(a: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    axes = tuple(axes) if axes is not None else tuple(reversed(range(a.ndim)))
    inverse = tuple(np.argsort(axes))
    return _emit(np.ascontiguousarray(a.data.transpose(axes)), (a,),
                 lambda g: (g.transpose(inverse),))


def reduce_sum(a: Tensor, axis: int | None = None) -> Tensor:
    if axis is None:
        shape = a.shape
        return _emit(a.data.sum(), (a,),
                     lambda g: (np.broadcast_to(g, shape).copy(),))
    shape = a.shape
    ax = axis % a.ndim

    def backward(g: Array):
        return (np.broadcast_to(np.expand_dims(g, ax), shape).copy(),)

    return _emit(a.data.sum(axis=ax), (a,), backward)


def reduce_mean(a: Tensor, axis: int | None = None) -> Tensor:
    n = a.size if axis is None else a.shape[axis % a.ndim]
    return scale(reduce_sum(a, axis), 1.0 / n)


# ---------------------------------------------------------------------------
# linear algebra


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product.

    Supported shapes: (m,k)@(k,p), (B,m,k)@(k,p) and (B,m,k)@(B,k,p).
    """
    da, db = a.data, b.data
    if da.ndim < 2 or db.ndim < 2 or da.ndim > 3 or db.ndim > 3 or db.ndim > da.ndim:
        raise DimensionError(f"matmul: unsupported ranks for shapes {a.shape} x {b.shape}")
    if da.shape[-1] != db.shape[-2]:
        raise DimensionError(f"matmul: inner extents differ: {a.shape} x {b.shape}")
    if da.ndim == 3 and db.ndim == 3 and da.shape[0] != db.shape[0]:
        raise DimensionError(f"matmul: batch extents differ: {a.shape} x {b.shape}")

    if da.ndim == 2:
        backward = lambda g: (g @ db.T, da.T @ g)
    elif db.ndim == 2:
        backward = lambda g: (g @ db.T, np.tensordot(da, g, axes=([0, 1], [0, 1])))
    else:
        backward = lambda g: (g @ db.transpose(0, 2, 1), da.transpose(0, 2, 1) @ g)
    return _emit(da @ db, (a, b), backward)


def softmax(x: Tensor, mask: Array | None = None) -> Tensor:
    """Softmax over the last axis; masked positions get exactly 0.

    ``mask`` is boolean, True = valid position, broadcastable to ``x``.
    A row with no valid position raises :class:`DegenerateMaskError`.
    """
    d = x.data
    if mask is None:
        z = d - d.max(axis=-1, keepdims=True)
        e = np.exp(z)
    else:
        m = np.broadcast_to(np.asarray(mask, dtype=bool), d.shape)
        if not m.any(axis=-1).all():
            raise DegenerateMaskError("softmax: a row is fully masked")
        z = d - np.where(m, d, -np.inf).max(axis=-1, keepdims=True)
        e = np.where(m, np.exp(np.where(m, z, 0.0)), 0.0)
    y = e / e.sum(axis=-1, keepdims=True)

    def backward(g: Array):
        return ((g - (g * y).sum(axis=-1, keepdims=True)) * y,)

    return _emit(y, (x,), backward)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then affine."""
    d = x.shape[-1]
    if d < 2:
        raise DimensionError(f"layer_norm: last extent must be >= 2, got {x.shape}")
    if gain.shape != (d,) or bias.shape != (d,):
        raise DimensionError(
            f"layer_norm: gain/bias must have shape ({d},), got {gain.shape} and {bias.shape}"
        )
    xd = x.data
    mu = xd.mean(axis=-1, keepdims=True)
    var = ((xd - mu) ** 2).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (xd - mu) * inv
    gd = gain.data

    def backward(g: Array):
        lead = tuple(range(g.ndim - 1))
        dxhat = g * gd
        dx = inv * (
            dxhat
            - dxhat.mean(axis=-1, keepdims=True)
            - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
        )
        return (dx, (g * xhat).sum(axis=lead), g.sum(axis=lead))

    return _emit(xhat * gd + bias.data, (x, gain, bias), backward)


def dropout(x: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout; call only on the training path."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return x
    keep = rng.random(x.shape) >= rate
    factor = keep / (1.0 - rate)
    return _emit(x.data * factor, (x,), lambda g: (g * factor,))


def embedding_lookup(table: Tensor, ids) -> Tensor:
    """Gather rows of a (V, d) table; gradient scatter-adds by row id."""
    idx = np.asarray(ids, dtype=np.intp)
    v = table.shape[0]
    if idx.size and (idx.min() < 0 or idx.max() >= v):
        raise IndexError(f"embedding id out of range [0, {v})")
    vshape = table.shape

    def backward(g: Array):
        gt = np.zeros(vshape, dtype=np.float64)
        np.add.at(gt, idx.reshape(-1), g.reshape(-1, vshape[1]))
        return (gt,)

    return _emit(table.data[idx], (table,), backward)


def concat_rows(tensors: Sequence[Tensor]) -> Tensor:
    """Stack 1-D tensors of equal length into a matrix (one per row)."""
    n = len(tensors)
    data = np.stack([t.data for t in tensors])

    def backward(g: Array):
        return tuple(g[i] for i in range(n))

    out = Tensor(data)
    tape = _active_tape()
    if tape is not None:
        tape._record(out, tuple(tensors), backward)
    return out
