"""Actions (S, T) of a loop on a manifold, their Taylor fields and associators.

Index layout used throughout: first-order fields are ``(n, r)`` arrays
``F[mu, j]``; second-order tensors are ``(n, r, r)`` arrays ``F[mu, j, k]``;
A-derivatives of a field are ``(n, r, n)`` arrays ``dF[mu, j, nu]``.

Associators::

    l(A; g, h) = S_gh A - S_g S_h A
    r(A; g, h) = T_gh A - T_h T_g A
    m(A; g, h) = T_h S_g A - S_g T_h A

Un-hatted first-order associators differentiate in ``g`` at ``g = e`` (then
rename ``h -> g``); hatted ones differentiate in ``h`` at ``h = e``.  The
hatted ``m`` is oriented as ``S_g T_h A - T_h S_g A`` so that its closed form
reads ``-T_j(S_g A) + T^nu_j(A) d(S_g A)/dA^nu``.  Second-order tensors are
``X_jk = dX_j(A; g)/dg^k`` at ``g = e``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import jets
from .algebra import ChartDomainError, LoopModel, SamplingError, sample_ball
from .records import ResidualRecord
from .tangent import LoopTaylorData, structure_tensors

ASSOCIATOR_NAMES = ("l", "lhat", "r", "rhat", "m", "mhat")


@dataclass(frozen=True)
class Action:
    """Black-box action: ``S(g, A)`` and ``T(g, A)`` return points of X.

    Both maps must accept jets and batched arrays (leading sample axis).
    """

    model: LoopModel
    n: int
    S: Callable
    T: Callable
    name: str = "action"
    associative: bool = False

    @property
    def r(self) -> int:
        return self.model.dim


def regular_birep(model: LoopModel) -> Action:
    """X = G with S_g = L_g (A -> gA) and T_g = R_g (A -> Ag)."""
    mul = model.multiply
    return Action(model, model.dim, lambda g, A: mul(g, A), lambda g, A: mul(A, g),
                  f"regular({model.name})", model.associative)


def twisted_birep(model: LoopModel) -> Action:
    """X = G with S_g = R_g and T_g = L_{g^-1} R_{g^-1}.

    Also an action of any Moufang loop, but with fewer coincidences among its
    associators than the regular one, so it separates relations that hold for
    every action from accidents of the regular action.
    """
    mul, inv = model.multiply, model.invert
    return Action(model, model.dim, lambda g, A: mul(A, g),
                  lambda g, A: mul(inv(g), mul(A, inv(g))), f"twisted({model.name})")


def corrupted_birep(model: LoopModel) -> Action:
    """Negative control: S_g replaced by S_{g^-1}."""
    mul, inv = model.multiply, model.invert
    return Action(model, model.dim, lambda g, A: mul(inv(g), A), lambda g, A: mul(A, g),
                  f"corrupted({model.name})")


# ---------------------------------------------------------------------------
# defining relations

def _relation_values(act: Action, g, h, A, associativity: bool) -> dict:
    S, T, mul = act.S, act.T, act.model.multiply
    e = np.zeros_like(g)
    out = {
        "unit-action": np.maximum(np.abs(S(e, A) - A), np.abs(T(e, A) - A)),
        "SgTgSh=SghTg": S(g, T(g, S(h, A))) - S(mul(g, h), T(g, A)),
        "SgTgTh=ThgSg": S(g, T(g, T(h, A))) - T(mul(h, g), S(g, A)),
        "ShTgSg=TgShg": S(h, T(g, S(g, A))) - T(g, S(mul(h, g), A)),
        "ThTgSg=SgTgh": T(h, T(g, S(g, A))) - S(g, T(mul(g, h), A)),
    }
    if associativity:
        out["SgSh=Sgh"] = S(g, S(h, A)) - S(mul(g, h), A)
        out["TgTh=Thg"] = T(g, T(h, A)) - T(mul(h, g), A)
        out["SgTh=ThSg"] = S(g, T(h, A)) - T(h, S(g, A))
    return {k: np.max(np.abs(v), axis=-1) for k, v in out.items()}


def defining_relations_residual(act: Action, samples: int = 1000, seed: int = 0,
                                radius: float = 0.3, tolerance: float = 1e-12,
                                associativity: bool | None = None,
                                max_retries: int = 10) -> dict[str, ResidualRecord]:
    """Max residuals of the action axioms over sampled ``(g, h, A)``.

    With ``associativity`` (default: the action is associative) the three
    associativity conditions are included as well.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if associativity is None:
        associativity = act.associative
    rng = np.random.default_rng(seed)
    for _ in range(max_retries + 1):
        g = sample_ball(rng, samples, act.r, radius)
        h = sample_ball(rng, samples, act.r, radius)
        A = sample_ball(rng, samples, act.n, radius)
        try:
            vals = _relation_values(act, g, h, A, associativity)
        except ChartDomainError:
            continue
        return {k: ResidualRecord(k, float(np.max(v)), samples, tolerance)
                for k, v in vals.items()}
    raise SamplingError("action relations kept leaving the chart", max_retries)


# ---------------------------------------------------------------------------
# Taylor fields

@dataclass(frozen=True)
class PointTaylor:
    """Taylor data of the action at one point A (expansion in g at e)."""

    S: np.ndarray        # (n, r)
    T: np.ndarray
    dS: np.ndarray       # (n, r, n)
    dT: np.ndarray
    Stilde: np.ndarray   # (n, r, r)
    Ttilde: np.ndarray


class BirepFields:
    """Auxiliary fields S^mu_j, T^mu_j, P^mu_j, w^s_j and S~, T~ of an action."""

    def __init__(self, act: Action, loop: LoopTaylorData | None = None):
        self.act = act
        self.loop = loop if loop is not None else structure_tensors(act.model)
        self._at = lru_cache(maxsize=4096)(self._compute)

    def _compute(self, key: bytes) -> PointTaylor:
        A = np.frombuffer(key, dtype=float)
        r = self.act.r
        e = np.zeros(r)
        out = []
        for f in (self.act.S, self.act.T):
            res = jets.jet_eval(f, e, A)
            out.append((res.jacobian[:, :r], res.hessian[:, :r, r:], res.hessian[:, :r, :r]))
        (S, dS, St), (T, dT, Tt) = out
        return PointTaylor(S, T, dS, dT, St, Tt)

    def at(self, A) -> PointTaylor:
        return self._at(np.ascontiguousarray(A, dtype=float).tobytes())

    def S(self, A) -> np.ndarray:
        return self.at(A).S

    def T(self, A) -> np.ndarray:
        return self.at(A).T

    def P(self, A) -> np.ndarray:
        pt = self.at(A)
        return -pt.S - pt.T

    def w(self, g) -> np.ndarray:
        return self.loop.w(g)

    def Stilde(self, A) -> np.ndarray:
        return self.at(A).Stilde

    def Ttilde(self, A) -> np.ndarray:
        return self.at(A).Ttilde

    def dS(self, A) -> np.ndarray:
        return self.at(A).dS

    def dT(self, A) -> np.ndarray:
        return self.at(A).dT


def action_taylor(act: Action, loop: LoopTaylorData | None = None) -> BirepFields:
    return BirepFields(act, loop)


# ---------------------------------------------------------------------------
# associators

def associators(act: Action, A, g, h) -> tuple:
    """``(l, r, m)`` at one point; raises ChartDomainError on chart exit."""
    S, T, mul = act.S, act.T, act.model.multiply
    gh = mul(g, h)
    l = S(gh, A) - S(g, S(h, A))
    r = T(gh, A) - T(h, T(g, A))
    m = T(h, S(g, A)) - S(g, T(h, A))
    return l, r, m


def _assoc_fn(act: Action, which: str, A):
    idx = {"l": 0, "r": 1, "m": 2}[which]
    return lambda g, h: associators(act, A, g, h)[idx]


@dataclass(frozen=True)
class FirstOrder:
    """Six first-order associators at (A, g), by two independent routes."""

    direct: dict      # differentiated associators
    closed: dict      # closed forms
    alternate: dict   # m, mhat closed forms with the field factor taken at the moved point

    def discrepancy(self) -> dict:
        return {k: float(np.max(np.abs(self.direct[k] - self.closed[k]))) for k in ASSOCIATOR_NAMES}

    def alternate_discrepancy(self) -> dict:
        return {k: float(np.max(np.abs(self.direct[k] - v))) for k, v in self.alternate.items()}


def first_order_direct(act: Action, A, g) -> dict:
    A = np.asarray(A, dtype=float)
    g = np.asarray(g, dtype=float)
    e = np.zeros(act.r)
    out = {}
    for name in ("l", "r", "m"):
        f = _assoc_fn(act, name, A)
        out[name] = jets.jacobian(lambda x: f(x, g), e)
        out[name + "hat"] = jets.jacobian(lambda x: f(g, x), e)
    out["mhat"] = -out["mhat"]
    return out


def first_order_closed(act: Action, A, g, fields: BirepFields | None = None) -> tuple[dict, dict]:
    fields = fields if fields is not None else action_taylor(act)
    A = np.asarray(A, dtype=float)
    g = np.asarray(g, dtype=float)
    r = act.r
    loop = fields.loop
    u, v = loop.u(g), loop.v(g)
    sj = jets.jet_eval(act.S, g, A)
    tj = jets.jet_eval(act.T, g, A)
    SgA, TgA = sj.value, tj.value
    dSg, dSA = sj.jacobian[:, :r], sj.jacobian[:, r:]
    dTg, dTA = tj.jacobian[:, :r], tj.jacobian[:, r:]
    SA, TA = fields.S(A), fields.T(A)
    closed = {
        "l": dSg @ u - fields.S(SgA),
        "lhat": dSg @ v - dSA @ SA,
        "r": dTg @ u - dTA @ TA,
        "rhat": dTg @ v - fields.T(TgA),
        "m": -fields.S(TgA) + dTA @ SA,
        "mhat": -fields.T(SgA) + dSA @ TA,
    }
    alternate = {
        "m": -fields.S(TgA) + dTA @ fields.S(SgA),
        "mhat": -fields.T(SgA) + dSA @ fields.T(SgA),
    }
    return closed, alternate


def first_order_associators(act: Action, A, g, fields: BirepFields | None = None) -> FirstOrder:
    closed, alternate = first_order_closed(act, A, g, fields)
    return FirstOrder(first_order_direct(act, A, g), closed, alternate)


@dataclass(frozen=True)
class SecondOrder:
    direct: dict    # six (n, r, r) tensors from the associators
    closed: dict    # derivation-consistent closed forms for l, r, m
    alternate: dict  # l with flipped a- and derivative-term signs; r and m expressions exchanged

    def closed_discrepancy(self) -> dict:
        return {k: float(np.max(np.abs(self.direct[k] - v))) for k, v in self.closed.items()}

    def alternate_discrepancy(self) -> dict:
        return {k: float(np.max(np.abs(self.direct[k] - v))) for k, v in self.alternate.items()}

    def pairings(self) -> dict:
        d = self.direct
        sw = lambda t: np.swapaxes(t, 1, 2)
        return {
            "l_jk=mhat_kj": float(np.max(np.abs(d["l"] - sw(d["mhat"])))),
            "m_jk=rhat_kj": float(np.max(np.abs(d["m"] - sw(d["rhat"])))),
            "r_jk=-mhat_kj": float(np.max(np.abs(d["r"] + sw(d["mhat"])))),
        }


def second_order_direct(act: Action, A) -> dict:
    A = np.asarray(A, dtype=float)
    e = np.zeros(act.r)
    out = {}
    for name in ("l", "r", "m"):
        mixed = jets.mixed_second(_assoc_fn(act, name, A), e, e)   # [mu, j(g), k(h)]
        out[name] = mixed
        out[name + "hat"] = np.swapaxes(mixed, 1, 2)
    out["mhat"] = -out["mhat"]
    return out


def second_order_closed(fields: BirepFields, A) -> tuple[dict, dict]:
    pt = fields.at(A)
    a = fields.loop.a
    S, T, dS, dT = pt.S, pt.T, pt.dS, pt.dT
    aS = np.einsum("sjk,ms->mjk", a, S)
    aT = np.einsum("sjk,ms->mjk", a, T)
    Sk_dSj = np.einsum("mjn,nk->mjk", dS, S)    # S^nu_k d_nu S^mu_j
    Tj_dTk = np.einsum("mkn,nj->mjk", dT, T)    # T^nu_j d_nu T^mu_k
    Sj_dTk = np.einsum("mkn,nj->mjk", dT, S)    # S^nu_j d_nu T^mu_k
    Tk_dSj = np.einsum("mjn,nk->mjk", dS, T)    # T^nu_k d_nu S^mu_j
    closed = {
        "l": pt.Stilde + aS - Sk_dSj,
        "r": pt.Ttilde + aT - Tj_dTk,
        "m": Sj_dTk - Tk_dSj,
    }
    alternate = {
        "l": np.swapaxes(pt.Stilde, 1, 2) - aS + Sk_dSj,
        "m": pt.Ttilde + aT - Tj_dTk,
        "r": Sj_dTk - Tk_dSj,
    }
    return closed, alternate


def second_order_associators(act: Action, A, fields: BirepFields | None = None) -> SecondOrder:
    fields = fields if fields is not None else action_taylor(act)
    closed, alternate = second_order_closed(fields, A)
    return SecondOrder(second_order_direct(act, A), closed, alternate)
