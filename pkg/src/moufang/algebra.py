"""Concrete Moufang loops: unit octonions, unit quaternions and Chein doubles.

The sphere loops are handled in the graph chart over the imaginary part,
``x -> (sqrt(1 - |x|^2), x)``, which puts the unit at the origin.  Products
are taken with a structure tensor generated from one fixed Cayley-Dickson
doubling rule::

    (a, b)(c, d) = (ac - d* b, da + b c*)

applied to complex pairs (quaternions) and then quaternion pairs
(octonions).  The resulting octonion table is listed in the README.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets


class ChartDomainError(ValueError):
    """A point or product left the chart domain."""


class SamplingError(RuntimeError):
    def __init__(self, msg: str, retries: int):
        super().__init__(f"{msg} (after {retries} retries)")
        self.retries = retries


class ConstructionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Cayley-Dickson arithmetic

def cd_conj(a: np.ndarray) -> np.ndarray:
    out = -np.asarray(a, dtype=float)
    out[..., 0] *= -1
    return out


def cd_mul(a, b) -> np.ndarray:
    """Recursive Cayley-Dickson product of two length-2^k vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[-1]
    if n == 1:
        return a * b
    h = n // 2
    p, q = a[..., :h], a[..., h:]
    r, s = b[..., :h], b[..., h:]
    return np.concatenate([cd_mul(p, r) - cd_mul(cd_conj(s), q),
                           cd_mul(s, p) + cd_mul(q, cd_conj(r))], axis=-1)


def structure_table(dim: int) -> np.ndarray:
    """``T[i, j, k]``: coefficient of ``e_k`` in ``e_i e_j``."""
    eye = np.eye(dim)
    table = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            table[i, j] = cd_mul(eye[i], eye[j])
    return table


OCT_TABLE = structure_table(8)
QUAT_TABLE = structure_table(4)


def oct_mul(a, b):
    """Octonion product; bilinear, works on batches and on jets."""
    return jets.bilinear(OCT_TABLE, a, b)


def oct_conj(a):
    return cd_conj(a)


def oct_norm(a) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2, axis=-1))


def oct_inv(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    n2 = np.sum(a * a, axis=-1)
    if np.any(n2 == 0.0):
        raise ZeroDivisionError("zero-norm octonion has no inverse")
    return cd_conj(a) / n2[..., None]


def basis(dim: int, i: int) -> np.ndarray:
    e = np.zeros(dim)
    e[i] = 1.0
    return e


# ---------------------------------------------------------------------------
# charts and loop models

@dataclass(frozen=True)
class ChartPoint:
    coords: np.ndarray
    model: str

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))


def chart_embed(x):
    """Chart point (imaginary part) to unit algebra element, positive real part."""
    s = 1.0 - jets.sumsq(x)
    if np.any(jets.value(s) <= 0.0):
        raise ChartDomainError("chart point has norm >= 1")
    return jets.concat([jets.sqrt(s), x])


def chart_project(o):
    re = jets.value(o)[..., 0]
    if np.any(re <= 0.0):
        raise ChartDomainError("product left the chart (non-positive real part)")
    if jets.is_jet(o):
        return o[1:]
    return np.asarray(o)[..., 1:]


@dataclass(frozen=True)
class LoopModel:
    """A local analytic Moufang loop in a chart with the unit at the origin."""

    name: str
    dim: int
    multiply: Callable
    invert: Callable
    radius: float = 0.3
    associative: bool = False

    @property
    def unit(self) -> np.ndarray:
        return np.zeros(self.dim)

    def point(self, coords) -> ChartPoint:
        return ChartPoint(coords, self.name)


def _sphere_model(name: str, table: np.ndarray, associative: bool) -> LoopModel:
    def multiply(g, h):
        return chart_project(jets.bilinear(table, chart_embed(g), chart_embed(h)))

    def invert(g):
        return -g

    return LoopModel(name, table.shape[0] - 1, multiply, invert, 0.3, associative)


OCTONIONS = _sphere_model("octonion", OCT_TABLE, associative=False)
QUATERNIONS = _sphere_model("quaternion", QUAT_TABLE, associative=True)


def coord_mul(model: LoopModel, g, h):
    return model.multiply(g, h)


def sample_ball(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    """Uniform samples from the closed ball of the given radius."""
    x = rng.standard_normal((count, dim))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * (radius * rng.random((count, 1)) ** (1.0 / dim))


# ---------------------------------------------------------------------------
# finite loops

@dataclass(frozen=True)
class FiniteLoop:
    cayley: np.ndarray
    unit: int = 0
    name: str = "finite"
    order: int = field(init=False)

    def __post_init__(self):
        tab = np.asarray(self.cayley, dtype=int)
        object.__setattr__(self, "cayley", tab)
        object.__setattr__(self, "order", tab.shape[0])

    def mul(self, a, b):
        return self.cayley[a, b]

    def inverse(self, a: int) -> int:
        return int(np.flatnonzero(self.cayley[a] == self.unit)[0])

    def is_quasigroup(self) -> bool:
        want = np.arange(self.order)
        return all((np.sort(self.cayley[i]) == want).all()
                   and (np.sort(self.cayley[:, i]) == want).all()
                   for i in range(self.order))

    def has_unit(self) -> bool:
        idx = np.arange(self.order)
        return bool((self.cayley[self.unit] == idx).all()
                    and (self.cayley[:, self.unit] == idx).all())

    def _triples(self):
        g, h, k = np.meshgrid(*(np.arange(self.order),) * 3, indexing="ij")
        return g.ravel(), h.ravel(), k.ravel()

    def moufang_failures(self) -> int:
        m = self.mul
        g, h, k = self._triples()
        return int(np.count_nonzero(m(m(g, h), m(k, g)) != m(g, m(m(h, k), g))))

    def associativity_failures(self) -> int:
        m = self.mul
        g, h, k = self._triples()
        return int(np.count_nonzero(m(m(g, h), k) != m(g, m(h, k))))

    def is_associative(self) -> bool:
        return self.associativity_failures() == 0


def permutation_group(n: int) -> FiniteLoop:
    """Symmetric group S_n; composition ``(p q)(i) = p(q(i))``, identity first."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    tab = [[index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return FiniteLoop(np.array(tab), 0, f"S{n}")


def cyclic_group(n: int) -> FiniteLoop:
    i = np.arange(n)
    return FiniteLoop((i[:, None] + i[None, :]) % n, 0, f"Z{n}")


def chein_double(group: FiniteLoop) -> FiniteLoop:
    """Chein loop M(G, 2) on ``G x {0, 1}``; element ``(g, s)`` has index ``g + s|G|``.

    (g,0)(h,0) = (gh, 0)          (g,0)(h,1) = (hg, 1)
    (g,1)(h,0) = (g h^-1, 1)      (g,1)(h,1) = (h^-1 g, 0)
    """
    if not (group.is_quasigroup() and group.has_unit()):
        raise ConstructionError("input table is not a loop")
    if not group.is_associative():
        raise ConstructionError("input table is not a group (associativity fails)")
    n = group.order
    m = group.cayley
    inv = np.array([group.inverse(a) for a in range(n)])
    tab = np.zeros((2 * n, 2 * n), dtype=int)
    for g in range(n):
        for h in range(n):
            tab[g, h] = m[g, h]
            tab[g, n + h] = n + m[h, g]
            tab[n + g, h] = n + m[g, inv[h]]
            tab[n + g, n + h] = m[inv[h], g]
    return FiniteLoop(tab, group.unit, f"M({group.name},2)")


# ---------------------------------------------------------------------------
# identity suite

@dataclass(frozen=True)
class LoopResiduals:
    samples: int
    residuals: dict


def _sphere_residuals(model: LoopModel, g, h, k) -> dict:
    m = model.multiply
    gg = m(g, g)
    gh = m(g, h)
    hg = m(h, g)
    out = {
        "left_alternative": m(g, gh) - m(gg, h),
        "right_alternative": m(hg, g) - m(h, gg),
        "flexible": m(gh, g) - m(g, hg),
        "moufang": m(gh, m(k, g)) - m(g, m(m(h, k), g)),
        "inverse_left": m(model.invert(g), g),
        "inverse_right": m(g, model.invert(g)),
        "unit": np.maximum(np.abs(m(np.zeros_like(g), g) - g), np.abs(m(g, np.zeros_like(g)) - g)),
    }
    if model.associative:
        out["associative"] = m(gh, k) - m(g, m(h, k))
    return {name: float(np.max(np.abs(v))) for name, v in out.items()}


def identity_suite(model, samples: int = 1000, seed: int = 0,
                   radius: float | None = None, max_retries: int = 10) -> LoopResiduals:
    """Maximum residuals of the Moufang-loop identities.

    Sphere models are sampled uniformly in the chart ball; a
    :class:`FiniteLoop` is checked exhaustively and ``samples`` is ignored.
    Finite residuals are failure counts.
    """
    if isinstance(model, FiniteLoop):
        res = {
            "quasigroup": float(not model.is_quasigroup()),
            "unit": float(not model.has_unit()),
            "moufang": float(model.moufang_failures()),
        }
        return LoopResiduals(model.order ** 3, res)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    radius = model.radius if radius is None else radius
    for _attempt in range(max_retries + 1):
        g, h, k = (sample_ball(rng, samples, model.dim, radius) for _ in range(3))
        try:
            return LoopResiduals(samples, _sphere_residuals(model, g, h, k))
        except ChartDomainError:
            continue
    raise SamplingError("sampled products kept leaving the chart", max_retries)


MODELS = {"octonion": OCTONIONS, "quaternion": QUATERNIONS}


def get_model(name: str):
    if name in MODELS:
        return MODELS[name]
    if name == "chein-s3":
        return chein_double(permutation_group(3))
    raise KeyError(f"unknown model {name!r}")
