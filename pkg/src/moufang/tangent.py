"""Taylor data of a loop at the unit and its tangent Mal'tsev algebra."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .algebra import LoopModel


class ModelViolation(ValueError):
    """The loop model breaks a structural requirement (e.g. singular u, v)."""


DET_FLOOR = 1e-10


def aux_u(model: LoopModel, h) -> np.ndarray:
    """``u^i_j(h) = d(gh)^i / dg^j`` at ``g = e``."""
    h = np.asarray(h, dtype=float)
    u = jets.jacobian(lambda g: model.multiply(g, h), model.unit)
    _check_invertible(u, "u")
    return u


def aux_v(model: LoopModel, g) -> np.ndarray:
    """``v^i_j(g) = d(gh)^i / dh^j`` at ``h = e``."""
    g = np.asarray(g, dtype=float)
    v = jets.jacobian(lambda h: model.multiply(g, h), model.unit)
    _check_invertible(v, "v")
    return v


def _check_invertible(m: np.ndarray, label: str):
    if abs(np.linalg.det(m)) < DET_FLOOR:
        raise ModelViolation(f"auxiliary matrix {label} is singular")


def aux_w(model: LoopModel, g) -> np.ndarray:
    """``w = -u - v``, so that ``u + v + w = 0``."""
    return -aux_u(model, g) - aux_v(model, g)


@dataclass(frozen=True)
class LoopTaylorData:
    model: LoopModel
    a: np.ndarray    # a[i, j, k]: coefficient of g^j h^k in (gh)^i
    c: np.ndarray    # c[i, j, k] = a[i, j, k] - a[i, k, j]

    @property
    def dim(self) -> int:
        return self.model.dim

    def u(self, h) -> np.ndarray:
        return aux_u(self.model, h)

    def v(self, g) -> np.ndarray:
        return aux_v(self.model, g)

    def w(self, g) -> np.ndarray:
        return aux_w(self.model, g)

    def algebra(self) -> "MaltsevAlgebra":
        return MaltsevAlgebra(self.c)


def structure_tensors(model: LoopModel) -> LoopTaylorData:
    e = model.unit
    a = jets.mixed_second(model.multiply, e, e)
    return LoopTaylorData(model, a, a - np.swapaxes(a, 1, 2))


class MaltsevAlgebra:
    """Tangent algebra ``[x, y]^i = c^i_jk x^j y^k``."""

    def __init__(self, c: np.ndarray):
        self.c = np.asarray(c, dtype=float)
        self.dim = self.c.shape[0]

    def bracket(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape[-1] != self.dim or y.shape[-1] != self.dim:
            raise ValueError(f"expected tangent vectors of dimension {self.dim}")
        return np.einsum("ijk,...j,...k->...i", self.c, x, y)

    def jacobiator(self, x, y, z) -> np.ndarray:
        b = self.bracket
        return b(x, b(y, z)) + b(y, b(z, x)) + b(z, b(x, y))

    def maltsev_residual(self, x, y, z) -> np.ndarray:
        """``[J(x,y,z), x] - J(x, y, [x, z])``."""
        return self.bracket(self.jacobiator(x, y, z), x) - self.jacobiator(x, y, self.bracket(x, z))

    def maltsev_quartic(self, x, y, z) -> np.ndarray:
        """``[[x,y],[z,x]] + [[[x,y],z],x] + [[[y,z],x],x] + [[[z,x],x],y]``."""
        b = self.bracket
        return (b(b(x, y), b(z, x)) + b(b(b(x, y), z), x)
                + b(b(b(y, z), x), x) + b(b(b(z, x), x), y))

    def maltsev_xx_variant(self, x, y, z) -> np.ndarray:
        """``[J(x,y,x), x] - J(x, y, [x, z])``.

        ``J(x, y, x)`` vanishes, so this is not an identity; a negative control.
        """
        return self.bracket(self.jacobiator(x, y, x), x) - self.jacobiator(x, y, self.bracket(x, z))

    def basis_jacobiator_max(self) -> float:
        eye = np.eye(self.dim)
        best = 0.0
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    best = max(best, float(np.max(np.abs(self.jacobiator(eye[i], eye[j], eye[k])))))
        return best
