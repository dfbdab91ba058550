"""Minimality conditions, generalized Lie equations and Maurer-Cartan relations.

Every identity is checked as a residual of concrete vectors at sampled
points.  Tolerances follow the number of differentiation levels involved:
1e-10 for none, 1e-8 for one, 1e-6 for two.

Operator brackets.  :func:`vf_commutator` is the Jacobi-Lie bracket
``[V, W] = DW.V - DV.W``.  Under it ``x -> S_x`` reverses the tangent
bracket (``[S_x, S_y] = -S_[x,y]`` for a group acting on the left), so the
operator-form relations are stated with :func:`operator_bracket`, the
opposite ordering ``DV.W - DW.V``, which makes ``x -> S_x`` bracket
preserving in the associative case.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import jets
from .algebra import ChartDomainError, SamplingError, sample_ball
from .birep import (ASSOCIATOR_NAMES, Action, BirepFields, action_taylor,
                    first_order_direct, second_order_direct)
from .records import ResidualRecord, record

TOL_NONE = 1e-10
TOL_ONE = 1e-8
TOL_TWO = 1e-6
TOL_MINIMALITY = 1e-7
TOL_GLE_SUM = 1e-9

# (x, sign, y) means x = sign * y
FIRST_ORDER_PATTERN = (
    ("lhat", 1, "mhat"),
    ("mhat", -1, "l"),
    ("r", 1, "m"),
    ("m", -1, "rhat"),
)


def _relation_name(rel) -> str:
    x, s, y = rel
    return f"{x}={'' if s > 0 else '-'}{y}"


def _sample_points(act: Action, samples: int, seed: int, radius: float):
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    A = sample_ball(rng, samples, act.n, radius)
    g = sample_ball(rng, samples, act.r, radius)
    return rng, A, g


def _robust(fn: Callable, rng, act: Action, A, g, radius: float, max_retries: int = 10):
    """Evaluate ``fn(A, g)``, redrawing the pair if it leaves the chart."""
    for _ in range(max_retries + 1):
        try:
            return fn(A, g)
        except ChartDomainError:
            A = sample_ball(rng, 1, act.n, radius)[0]
            g = sample_ball(rng, 1, act.r, radius)[0]
    raise SamplingError("evaluation kept leaving the chart", max_retries)


# ---------------------------------------------------------------------------
# first-order minimality

def sign_prepass(actions: Iterable[Action], samples: int = 5, seed: int = 0,
                 radius: float = 0.3, tol: float = TOL_MINIMALITY) -> set:
    """All relations ``x = +-y`` among first-order associators holding on every action."""
    held = None
    for act in actions:
        _, A, g = _sample_points(act, samples, seed, radius)
        for a, b in zip(A, g):
            d = first_order_direct(act, a, b)
            cur = {(x, s, y) for x, y in itertools.combinations(ASSOCIATOR_NAMES, 2)
                   for s in (1, -1) if np.max(np.abs(d[x] - s * d[y])) < tol}
            held = cur if held is None else held & cur
    return held if held is not None else set()


def pattern_closure(pattern=FIRST_ORDER_PATTERN) -> set:
    """Every pairwise relation implied by the chained pattern, in canonical order."""
    # chains are linked through shared names; assumes each relation touches an existing chain at most once
    groups = []
    for x, s, y in pattern:
        for grp in groups:
            if x in grp:
                grp[y] = grp[x] * s
                break
            if y in grp:
                grp[x] = grp[y] * s
                break
        else:
            groups.append({x: 1, y: s})
    out = set()
    order = {n: i for i, n in enumerate(ASSOCIATOR_NAMES)}
    for grp in groups:
        for x, y in itertools.combinations(sorted(grp, key=order.get), 2):
            out.add((x, grp[x] * grp[y], y))
    return out


def minimality_first_order(act: Action, samples: int = 100, seed: int = 0,
                           radius: float = 0.3, tol: float = TOL_MINIMALITY,
                           pattern=FIRST_ORDER_PATTERN) -> list[ResidualRecord]:
    rng, A, g = _sample_points(act, samples, seed, radius)
    res = {rel: [] for rel in pattern}
    for a, b in zip(A, g):
        d = _robust(lambda a_, b_: first_order_direct(act, a_, b_), rng, act, a, b, radius)
        for rel in pattern:
            x, s, y = rel
            res[rel].append(np.max(np.abs(d[x] - s * d[y])))
    return [record(f"minimality-1:{_relation_name(rel)}", v, samples, tol)
            for rel, v in res.items()]


def classical_lie_residuals(act: Action, samples: int = 100, seed: int = 0,
                            radius: float = 0.3, tol: float = TOL_ONE) -> list[ResidualRecord]:
    """Vanishing of each first-order associator (the Lie equations of an associative action)."""
    rng, A, g = _sample_points(act, samples, seed, radius)
    res = {k: [] for k in ASSOCIATOR_NAMES}
    for a, b in zip(A, g):
        d = _robust(lambda a_, b_: first_order_direct(act, a_, b_), rng, act, a, b, radius)
        for k in ASSOCIATOR_NAMES:
            res[k].append(np.max(np.abs(d[k])))
    return [record(f"lie-classical:{k}", v, samples, tol) for k, v in res.items()]


# ---------------------------------------------------------------------------
# generalized Lie equations

def gle_terms(act: Action, fields: BirepFields, A, g) -> dict:
    """Left-hand sides of the six generalized Lie equations at ``(A, g)``.

    S-side, with D_g, D_A the derivatives of S_g A in g and A::

        a: D_g.u + D_A.T(A) + P(S_g A)
        b: D_g.v + D_A.P(A) + T(S_g A)
        c: D_g.w + D_A.S(A) + S(S_g A)

    T-side, with D_g, D_A now those of T_g A::

        a: D_g.v + D_A.S(A) + P(T_g A)
        b: D_g.u + D_A.P(A) + S(T_g A)
        c: D_g.w + D_A.T(A) + T(T_g A)
    """
    A = np.asarray(A, dtype=float)
    g = np.asarray(g, dtype=float)
    r = act.r
    loop = fields.loop
    u, v = loop.u(g), loop.v(g)
    w = -u - v
    SA, TA, PA = fields.S(A), fields.T(A), fields.P(A)
    out = {}
    for side, fn in (("S", act.S), ("T", act.T)):
        jr = jets.jet_eval(fn, g, A)
        Dg, DA, moved = jr.jacobian[:, :r], jr.jacobian[:, r:], jr.value
        Sm, Tm, Pm = fields.S(moved), fields.T(moved), fields.P(moved)
        if side == "S":
            out["S-a"] = Dg @ u + DA @ TA + Pm
            out["S-b"] = Dg @ v + DA @ PA + Tm
            out["S-c"] = Dg @ w + DA @ SA + Sm
        else:
            out["T-a"] = Dg @ v + DA @ SA + Pm
            out["T-b"] = Dg @ u + DA @ PA + Sm
            out["T-c"] = Dg @ w + DA @ TA + Tm
    return out


def gle_residuals(act: Action, samples: int = 100, seed: int = 0, radius: float = 0.3,
                  tol: float = TOL_TWO, sum_tol: float = TOL_GLE_SUM,
                  fields: BirepFields | None = None) -> list[ResidualRecord]:
    fields = fields if fields is not None else action_taylor(act)
    rng, A, g = _sample_points(act, samples, seed, radius)
    names = ("S-a", "S-b", "S-c", "T-a", "T-b", "T-c")
    res = {k: [] for k in names + ("S-sum", "T-sum")}
    for a, b in zip(A, g):
        t = _robust(lambda a_, b_: gle_terms(act, fields, a_, b_), rng, act, a, b, radius)
        for k in names:
            res[k].append(np.max(np.abs(t[k])))
        res["S-sum"].append(np.max(np.abs(t["S-a"] + t["S-b"] + t["S-c"])))
        res["T-sum"].append(np.max(np.abs(t["T-a"] + t["T-b"] + t["T-c"])))
    return [record(f"gle:{k}", v, samples, sum_tol if k.endswith("sum") else tol)
            for k, v in res.items()]


# ---------------------------------------------------------------------------
# second-order minimality

def symmetrized_terms(fields: BirepFields, A) -> dict:
    """``2 F~_jk - (F_k dF_j + F_j dF_k - (a_jk + a_kj) F_s)`` for F = S, T."""
    pt = fields.at(A)
    a = fields.loop.a
    asym = a + np.swapaxes(a, 1, 2)
    out = {}
    for key, F, dF, Ft in (("S", pt.S, pt.dS, pt.Stilde), ("T", pt.T, pt.dT, pt.Ttilde)):
        Fk_dFj = np.einsum("mjn,nk->mjk", dF, F)
        rhs = Fk_dFj + np.swapaxes(Fk_dFj, 1, 2) - np.einsum("sjk,ms->mjk", asym, F)
        out[key] = 2.0 * Ft - rhs
    return out


def second_order_minimality(act: Action, samples: int = 100, seed: int = 0,
                            radius: float = 0.3, tol: float = TOL_TWO,
                            fields: BirepFields | None = None) -> list[ResidualRecord]:
    fields = fields if fields is not None else action_taylor(act)
    rng = np.random.default_rng(seed)
    A = sample_ball(rng, samples, act.n, radius)
    names = ("lhat=r", "r=m", "m=-m^T", "symmetrized-S~", "symmetrized-T~")
    res = {k: [] for k in names}
    for a in A:
        d = second_order_direct(act, a)
        st = symmetrized_terms(fields, a)
        res["lhat=r"].append(np.max(np.abs(d["lhat"] - d["r"])))
        res["r=m"].append(np.max(np.abs(d["r"] - d["m"])))
        res["m=-m^T"].append(np.max(np.abs(d["m"] + np.swapaxes(d["m"], 1, 2))))
        res["symmetrized-S~"].append(np.max(np.abs(st["S"])))
        res["symmetrized-T~"].append(np.max(np.abs(st["T"])))
    return [record(f"minimality-2:{k}", v, samples, tol) for k, v in res.items()]


# ---------------------------------------------------------------------------
# vector fields and commutators

@dataclass(frozen=True)
class VectorField:
    n: int
    evaluate: Callable
    jacobian: Callable

    def __call__(self, A):
        return self.evaluate(A)


def _fd_field_jacobian(f: Callable) -> Callable:
    return lambda A: jets.fd_jacobian(f, A)


def infinitesimal_op(fields: BirepFields, x, which: str = "S") -> VectorField:
    """``A -> x^j F^mu_j(A)`` for F = S or T."""
    x = np.asarray(x, dtype=float)
    if x.shape != (fields.act.r,):
        raise ValueError(f"tangent vector must have shape ({fields.act.r},)")
    if which == "S":
        F, dF = fields.S, fields.dS
    elif which == "T":
        F, dF = fields.T, fields.dT
    else:
        raise ValueError(f"which must be 'S' or 'T', got {which!r}")
    return VectorField(fields.act.n, lambda A: F(A) @ x,
                       lambda A: np.einsum("mjn,j->mn", dF(A), x))


def vf_commutator(V: VectorField, W: VectorField) -> VectorField:
    """Jacobi-Lie bracket ``[V, W](A) = DW(A) V(A) - DV(A) W(A)``."""
    if V.n != W.n:
        raise ValueError("vector fields live on spaces of different dimension")

    def ev(A):
        return W.jacobian(A) @ V(A) - V.jacobian(A) @ W(A)

    return VectorField(V.n, ev, _fd_field_jacobian(ev))


def operator_bracket(V: VectorField, W: VectorField) -> VectorField:
    """``DV.W - DW.V``; the ordering under which ``x -> S_x`` keeps the tangent bracket."""
    return vf_commutator(W, V)


# ---------------------------------------------------------------------------
# generalized Maurer-Cartan equations

def gmc_coordinate_terms(fields: BirepFields, A) -> dict:
    """Residual tensors ``[mu, j, k]`` of the coordinate-form equations.

    S: S_k dS_j - S_j dS_k - c^s_jk S_s - 2 (T_j dS_k - S_k dT_j)
    T: T_k dT_j - T_j dT_k - c^s_kj T_s - 2 (S_j dT_k - T_k dS_j)
    """
    pt = fields.at(A)
    c = fields.loop.c
    S, T, dS, dT = pt.S, pt.T, pt.dS, pt.dT
    sw = lambda t: np.swapaxes(t, 1, 2)
    Sk_dSj = np.einsum("mjn,nk->mjk", dS, S)
    Tk_dTj = np.einsum("mjn,nk->mjk", dT, T)
    Tj_dSk = np.einsum("mkn,nj->mjk", dS, T)
    Sk_dTj = np.einsum("mjn,nk->mjk", dT, S)
    Sj_dTk = sw(Sk_dTj)
    Tk_dSj = sw(Tj_dSk)
    return {
        "S": Sk_dSj - sw(Sk_dSj) - np.einsum("sjk,ms->mjk", c, S) - 2.0 * (Tj_dSk - Sk_dTj),
        "T": Tk_dTj - sw(Tk_dTj) - np.einsum("skj,ms->mjk", c, T) - 2.0 * (Sj_dTk - Tk_dSj),
    }


def gmc_operator_terms(fields: BirepFields, x, y, A) -> dict:
    """Operator-form quantities at one ``(x, y, A)``."""
    br = fields.loop.algebra().bracket
    Sx, Sy = infinitesimal_op(fields, x, "S"), infinitesimal_op(fields, y, "S")
    Tx, Ty = infinitesimal_op(fields, x, "T"), infinitesimal_op(fields, y, "T")
    SxSy = operator_bracket(Sx, Sy)(A)
    TxTy = operator_bracket(Tx, Ty)(A)
    SxTy = operator_bracket(Sx, Ty)(A)
    TxSy = operator_bracket(Tx, Sy)(A)
    S_xy = infinitesimal_op(fields, br(x, y), "S")(A)
    T_yx = infinitesimal_op(fields, br(y, x), "T")(A)
    chain = [2.0 * SxTy, S_xy - SxSy, T_yx - TxTy, 2.0 * TxSy]
    return {
        "a": SxSy - S_xy + 2.0 * SxTy,
        "b": TxTy - T_yx + 2.0 * TxSy,
        "c": SxTy - TxSy,
        "chain": max(np.max(np.abs(p - q)) for p, q in zip(chain, chain[1:])),
        "SxSy": SxSy, "TxTy": TxTy, "SxTy": SxTy, "TxSy": TxSy,
        "S[x,y]": S_xy, "T[y,x]": T_yx,
    }


def _unit_vectors(rng, count: int, dim: int, scale: float) -> np.ndarray:
    x = rng.standard_normal((count, dim))
    return scale * x / np.linalg.norm(x, axis=1, keepdims=True)


def gmc_residuals(act: Action, samples: int = 100, seed: int = 0, radius: float = 0.3,
                  scale: float = 1.0, tol: float = TOL_TWO, agree_tol: float = TOL_ONE,
                  fields: BirepFields | None = None) -> list[ResidualRecord]:
    """Coordinate and operator forms of the generalized Maurer-Cartan equations.

    For associative actions the classical reduction is appended:
    ``[S_x, S_y] = S_[x,y]`` and ``[S_x, T_y] = 0``.
    """
    fields = fields if fields is not None else action_taylor(act)
    rng = np.random.default_rng(seed)
    A = sample_ball(rng, samples, act.n, radius)
    X = _unit_vectors(rng, samples, act.r, scale)
    Y = _unit_vectors(rng, samples, act.r, scale)
    names = ["mc-coord:S", "mc-coord:T", "mc-op:[Sx,Sy]", "mc-op:[Tx,Ty]", "mc-op:[Sx,Ty]=[Tx,Sy]",
             "mc-op:chain", "mc-agree:S", "mc-agree:T"]
    if act.associative:
        names += ["mc-classical:S", "mc-classical:T", "mc-classical:[Sx,Ty]"]
    res = {k: [] for k in names}
    for a, x, y in zip(A, X, Y):
        co = gmc_coordinate_terms(fields, a)
        op = gmc_operator_terms(fields, x, y, a)
        cS = np.einsum("mjk,j,k->m", co["S"], x, y)
        cT = np.einsum("mjk,j,k->m", co["T"], x, y)
        res["mc-coord:S"].append(np.max(np.abs(co["S"])))
        res["mc-coord:T"].append(np.max(np.abs(co["T"])))
        res["mc-op:[Sx,Sy]"].append(np.max(np.abs(op["a"])))
        res["mc-op:[Tx,Ty]"].append(np.max(np.abs(op["b"])))
        res["mc-op:[Sx,Ty]=[Tx,Sy]"].append(np.max(np.abs(op["c"])))
        res["mc-op:chain"].append(op["chain"])
        res["mc-agree:S"].append(np.max(np.abs(cS - op["a"])))
        res["mc-agree:T"].append(np.max(np.abs(cT - op["b"])))
        if act.associative:
            res["mc-classical:S"].append(np.max(np.abs(op["SxSy"] - op["S[x,y]"])))
            res["mc-classical:T"].append(np.max(np.abs(op["TxTy"] - op["T[y,x]"])))
            res["mc-classical:[Sx,Ty]"].append(np.max(np.abs(op["SxTy"])))
    tols = {"mc-agree:S": agree_tol, "mc-agree:T": agree_tol,
            "mc-classical:S": TOL_ONE, "mc-classical:T": TOL_ONE,
            "mc-classical:[Sx,Ty]": TOL_NONE}
    return [record(k, v, samples, tols.get(k, tol)) for k, v in res.items()]


def cross_commutator_magnitude(act: Action, samples: int = 20, seed: int = 0,
                               radius: float = 0.3, fields: BirepFields | None = None) -> float:
    """``max |[S_x, T_y](A)|``; zero exactly when the terminal ``= 0`` would hold."""
    fields = fields if fields is not None else action_taylor(act)
    rng = np.random.default_rng(seed)
    A = sample_ball(rng, samples, act.n, radius)
    X = _unit_vectors(rng, samples, act.r, 1.0)
    Y = _unit_vectors(rng, samples, act.r, 1.0)
    best = 0.0
    for a, x, y in zip(A, X, Y):
        val = operator_bracket(infinitesimal_op(fields, x, "S"), infinitesimal_op(fields, y, "T"))(a)
        best = max(best, float(np.max(np.abs(val))))
    return best
