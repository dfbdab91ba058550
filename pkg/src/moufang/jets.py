"""Second-order forward-mode jets and a central finite-difference oracle.

A :class:`Jet2` carries a value array together with its gradient and Hessian
with respect to ``d`` seed directions.  Functions written with ``+``, ``-``,
``*``, ``/``, :func:`sqrt`, :func:`concat`, :func:`bilinear` and indexing run
unchanged on plain ``ndarray`` inputs and on jets, which is how the loop and
action maps are differentiated exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class Jet2:
    """Value, gradient and Hessian of an array-valued quantity.

    Shapes: ``val`` is ``S``, ``grad`` is ``S + (d,)``, ``hess`` is
    ``S + (d, d)``.  The Hessian is symmetrised on construction.
    """

    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 100.0

    def __init__(self, val, grad, hess, *, symmetric=False):
        self.val = np.asarray(val, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        hess = np.asarray(hess, dtype=float)
        if not symmetric:
            hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
        self.hess = hess

    @property
    def nseed(self) -> int:
        return self.grad.shape[-1]

    @property
    def shape(self):
        return self.val.shape

    def __len__(self):
        return len(self.val)

    def __repr__(self):
        return f"Jet2(val={self.val!r}, nseed={self.nseed})"

    @classmethod
    def constant(cls, val, nseed: int) -> "Jet2":
        val = np.asarray(val, dtype=float)
        return cls(val, np.zeros(val.shape + (nseed,)),
                   np.zeros(val.shape + (nseed, nseed)), symmetric=True)

    @classmethod
    def seed(cls, base, offset: int, nseed: int) -> "Jet2":
        """Independent variables ``base`` occupying seeds ``offset..offset+len``."""
        base = np.asarray(base, dtype=float)
        m = base.shape[0]
        grad = np.zeros((m, nseed))
        grad[np.arange(m), offset + np.arange(m)] = 1.0
        return cls(base, grad, np.zeros((m, nseed, nseed)), symmetric=True)

    def _lift(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other, self.nseed)

    def __getitem__(self, idx):
        return Jet2(self.val[idx], self.grad[idx], self.hess[idx], symmetric=True)

    def __neg__(self):
        return Jet2(-self.val, -self.grad, -self.hess, symmetric=True)

    def __add__(self, other):
        o = self._lift(other)
        v = self.val + o.val
        return Jet2(v, _bcast(self.grad, v, 1) + _bcast(o.grad, v, 1),
                    _bcast(self.hess, v, 2) + _bcast(o.hess, v, 2), symmetric=True)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            c = np.asarray(other, dtype=float)
            return Jet2(self.val * c, self.grad * c[..., None],
                        self.hess * c[..., None, None], symmetric=True)
        a, b = self, other
        cross = a.grad[..., :, None] * b.grad[..., None, :]
        return Jet2(a.val * b.val,
                    a.grad * b.val[..., None] + a.val[..., None] * b.grad,
                    a.hess * b.val[..., None, None] + a.val[..., None, None] * b.hess
                    + cross + np.swapaxes(cross, -1, -2), symmetric=True)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.val
        if np.any(v == 0.0):
            raise ZeroDivisionError("Jet2 reciprocal of zero")
        return self._unary(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def sqrt(self) -> "Jet2":
        s = np.sqrt(self.val)
        return self._unary(s, 0.5 / s, -0.25 / s**3)

    def _unary(self, f0, f1, f2) -> "Jet2":
        g = self.grad
        return Jet2(f0, f1[..., None] * g,
                    f1[..., None, None] * self.hess
                    + f2[..., None, None] * g[..., :, None] * g[..., None, :],
                    symmetric=True)

    def sum(self) -> "Jet2":
        return Jet2(self.val.sum(axis=0), self.grad.sum(axis=0),
                    self.hess.sum(axis=0), symmetric=True)


def _bcast(x, val, extra):
    return np.broadcast_to(x, val.shape + x.shape[x.ndim - extra:])


def is_jet(x) -> bool:
    return isinstance(x, Jet2)


def value(x) -> np.ndarray:
    return x.val if isinstance(x, Jet2) else np.asarray(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Jet2) else np.sqrt(x)


def sumsq(x):
    """Sum of squares over the last axis (first axis for jets)."""
    if isinstance(x, Jet2):
        return (x * x).sum()
    return np.sum(x * x, axis=-1)


def concat(parts: Sequence) -> object:
    """Concatenate 1-d pieces; scalars count as length-one pieces."""
    if not any(isinstance(p, Jet2) for p in parts):
        arrs = [np.asarray(p, dtype=float) for p in parts]
        # batched plain arrays: scalars of shape (N,) become (N, 1)
        if any(a.ndim > 1 for a in arrs):
            arrs = [a[..., None] if a.ndim == 1 else a for a in arrs]
            return np.concatenate(arrs, axis=-1)
        return np.concatenate([np.atleast_1d(a) for a in arrs])
    d = next(p.nseed for p in parts if isinstance(p, Jet2))
    jets = []
    for p in parts:
        p = p if isinstance(p, Jet2) else Jet2.constant(p, d)
        if p.val.ndim == 0:
            p = Jet2(p.val[None], p.grad[None], p.hess[None], symmetric=True)
        jets.append(p)
    return Jet2(np.concatenate([j.val for j in jets]),
                np.concatenate([j.grad for j in jets]),
                np.concatenate([j.hess for j in jets]), symmetric=True)


def bilinear(table: np.ndarray, a, b):
    """``out_k = table[i, j, k] a_i b_j`` for arrays (batched) or jets."""
    if not isinstance(a, Jet2) and not isinstance(b, Jet2):
        return np.einsum("...i,...j,ijk->...k", a, b, table)
    d = a.nseed if isinstance(a, Jet2) else b.nseed
    a = a if isinstance(a, Jet2) else Jet2.constant(a, d)
    b = b if isinstance(b, Jet2) else Jet2.constant(b, d)
    left = np.einsum("i,ijk->kj", a.val, table)    # out = left @ b
    right = np.einsum("j,ijk->ki", b.val, table)   # out = right @ a
    tab_a = np.einsum("ijk,id->jkd", table, a.grad)
    cross = np.einsum("jkd,je->kde", tab_a, b.grad)
    n = left.shape[0]
    hess = (left @ b.hess.reshape(b.val.shape[0], -1)
            + right @ a.hess.reshape(a.val.shape[0], -1)).reshape(n, d, d)
    return Jet2(left @ b.val, left @ b.grad + right @ a.grad,
                hess + cross + np.swapaxes(cross, -1, -2), symmetric=True)


# ---------------------------------------------------------------------------
# derivative extraction

@dataclass(frozen=True)
class JetResult:
    value: np.ndarray
    jacobian: np.ndarray   # (m, d)
    hessian: np.ndarray    # (m, d, d)


def jet_eval(f: Callable, *bases) -> JetResult:
    """Evaluate ``f(*bases)`` on jets seeded in every coordinate of every base.

    Seeds are laid out base after base, so ``jacobian[:, :len(bases[0])]`` is
    the derivative in the first argument and so on.
    """
    bases = [np.atleast_1d(np.asarray(b, dtype=float)) for b in bases]
    d = sum(b.shape[0] for b in bases)
    args, off = [], 0
    for b in bases:
        args.append(Jet2.seed(b, off, d))
        off += b.shape[0]
    out = f(*args)
    if not isinstance(out, Jet2):
        out = Jet2.constant(out, d)
    if out.val.ndim == 0:
        out = Jet2(out.val[None], out.grad[None], out.hess[None], symmetric=True)
    hess = out.hess
    # reductions inside f need not preserve bitwise symmetry; restore it
    return JetResult(out.val, out.grad, 0.5 * (hess + np.swapaxes(hess, -1, -2)))


def jacobian(f: Callable, base) -> np.ndarray:
    return jet_eval(f, base).jacobian


def hessian(f: Callable, base) -> np.ndarray:
    return jet_eval(f, base).hessian


def mixed_second(f: Callable, base1, base2) -> np.ndarray:
    """Tensor ``d^2 f^i / d arg1^j d arg2^k`` at ``(base1, base2)``."""
    r = jet_eval(f, base1, base2)
    n1 = np.atleast_1d(base1).shape[0]
    return r.hessian[:, :n1, n1:]


# ---------------------------------------------------------------------------
# finite-difference oracle

@dataclass(frozen=True)
class FDConfig:
    step: float = 1e-5
    scheme: str = "central"

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"finite-difference step must be positive, got {self.step}")
        if self.scheme != "central":
            raise ValueError(f"unsupported scheme {self.scheme!r}")


def fd_jacobian(f: Callable, base, config: FDConfig = FDConfig()) -> np.ndarray:
    """Central-difference Jacobian of ``f`` (plain float evaluation).

    On a domain error the step is halved once before giving up.
    """
    from .algebra import ChartDomainError

    base = np.atleast_1d(np.asarray(base, dtype=float))
    step = config.step
    for attempt in range(2):
        try:
            cols = []
            for j in range(base.shape[0]):
                e = np.zeros_like(base)
                e[j] = step
                fp = np.atleast_1d(np.asarray(f(base + e), dtype=float))
                fm = np.atleast_1d(np.asarray(f(base - e), dtype=float))
                cols.append((fp - fm) / (2.0 * step))
            return np.stack(cols, axis=-1)
        except ChartDomainError:
            if attempt == 1:
                raise
            step *= 0.5


def fd_mixed_second(f: Callable, base1, base2, step: float = 1e-4) -> np.ndarray:
    """Nested central differences for ``d^2 f / d arg1 d arg2``."""
    base1 = np.atleast_1d(np.asarray(base1, dtype=float))
    base2 = np.atleast_1d(np.asarray(base2, dtype=float))
    n1, n2 = base1.shape[0], base2.shape[0]
    out = None
    for j in range(n1):
        for k in range(n2):
            ej = np.zeros(n1)
            ej[j] = step
            ek = np.zeros(n2)
            ek[k] = step
            val = (np.asarray(f(base1 + ej, base2 + ek)) - np.asarray(f(base1 + ej, base2 - ek))
                   - np.asarray(f(base1 - ej, base2 + ek)) + np.asarray(f(base1 - ej, base2 - ek))
                   ) / (4.0 * step * step)
            val = np.atleast_1d(val)
            if out is None:
                out = np.zeros(val.shape + (n1, n2))
            out[..., j, k] = val
    return out


def fd_hessian(f: Callable, base, step: float = 1e-4) -> np.ndarray:
    return fd_mixed_second(lambda x, y: f(x + y - np.asarray(base, dtype=float)),
                           base, base, step)
