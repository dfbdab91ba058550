"""Acceptance criteria, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL`` line (also when run as a
script: ``python3 tests/test_acceptance.py``).
"""
import json
import subprocess
import sys

import numpy as np
import pytest

from moufang import jets
from moufang.algebra import (OCTONIONS, QUATERNIONS, chein_double, identity_suite,
                             permutation_group, sample_ball)
from moufang.birep import (action_taylor, associators, defining_relations_residual,
                           first_order_associators, regular_birep, second_order_associators,
                           twisted_birep)
from moufang.mc import (classical_lie_residuals, gle_residuals, gmc_residuals,
                        minimality_first_order, sign_prepass, pattern_closure)
from moufang.tangent import structure_tensors

REL, FLOOR = 1e-5, 1e-8


def announce(n: int, title: str, ok: bool, detail: str = ""):
    line = f"[criterion {n}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    capman = getattr(announce, "capsys", None)
    if capman is not None:
        with capman.disabled():
            print(line)
    else:
        print(line)
    return ok


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    announce.capsys = capsys
    yield
    announce.capsys = None


def check(n, title, items):
    """``items``: (label, value, tol). Prints the verdict and asserts it."""
    bad = [(k, v, t) for k, v, t in items if not v < t]
    worst = max(items, key=lambda it: it[1] / it[2] if it[2] > 0 else np.inf * it[1])
    detail = f"worst {worst[0]}={worst[1]:.2e} vs {worst[2]:.0e}" if not bad else \
        "; ".join(f"{k}={v:.2e}>={t:.0e}" for k, v, t in bad)
    announce(n, title, not bad, detail)
    assert not bad, detail


def test_criterion_1_loop_axioms():
    items = []
    for model in (OCTONIONS, QUATERNIONS):
        res = identity_suite(model, samples=10_000, seed=0, radius=0.3).residuals
        keys = ["moufang", "left_alternative", "right_alternative", "flexible"]
        if model.associative:
            keys.append("associative")
        items += [(f"{model.name}:{k}", res[k], 1e-12) for k in keys]
    check(1, "loop axioms on 10^4 triples", items)


def test_criterion_2_chein_double():
    L = chein_double(permutation_group(3))
    res = identity_suite(L).residuals
    items = [("quasigroup", float(not L.is_quasigroup()), 0.5),
             ("unit", float(not L.has_unit()), 0.5),
             ("moufang-failures", float(res["moufang"]), 0.5),
             ("triples", float(abs(L.order ** 3 - 1728)), 0.5),
             ("associative-everywhere", float(L.associativity_failures() == 0), 0.5)]
    check(2, "M(S3,2) exhaustive", items)


def test_criterion_3_tangent_algebra():
    rng = np.random.default_rng(0)
    oct_data, quat_data = structure_tensors(OCTONIONS), structure_tensors(QUATERNIONS)
    x, y, z = rng.standard_normal((3, 100, 3))
    jac_q = np.max(np.abs(quat_data.algebra().jacobiator(x, y, z)))
    x, y, z = rng.standard_normal((3, 100, 7))
    alg = oct_data.algebra()
    items = [
        ("c-antisymmetry", float(np.max(np.abs(oct_data.c + np.swapaxes(oct_data.c, 1, 2)))), 1e-300),
        ("quaternion-jacobi", jac_q, 1e-10),
        ("octonion-jacobiator(neg)", 0.5 / alg.basis_jacobiator_max(), 1.0),
        ("maltsev-concise", float(np.max(np.abs(alg.maltsev_residual(x, y, z)))), 1e-8),
        ("maltsev-quartic", float(np.max(np.abs(alg.maltsev_quartic(x, y, z)))), 1e-8),
    ]
    check(3, "tangent Mal'tsev algebra", items)


def test_criterion_4_birep_axioms():
    items = []
    for model in (OCTONIONS, QUATERNIONS):
        res = defining_relations_residual(regular_birep(model), samples=1000, seed=0)
        items += [(f"{model.name}:{k}", r.max_residual, 1e-12) for k, r in res.items()]
    assert any(k.startswith("quaternion:SgSh") for k, _, _ in items)
    check(4, "regular birepresentation axioms on 1000 samples", items)


def test_criterion_5_associator_closed_forms():
    act = regular_birep(OCTONIONS)
    fields = action_taylor(act)
    rng = np.random.default_rng(0)
    A = sample_ball(rng, 100, 7, 0.3)
    g = sample_ball(rng, 100, 7, 0.3)
    first, pair = 0.0, 0.0
    for a, b in zip(A, g):
        first = max(first, max(first_order_associators(act, a, b, fields).discrepancy().values()))
        pair = max(pair, max(second_order_associators(act, a, fields).pairings().values()))
    qact = regular_birep(QUATERNIONS)
    q = 0.0
    for a, b in zip(A[:20, :3], g[:20, :3]):
        fo = first_order_associators(qact, a, b)
        so = second_order_associators(qact, a)
        q = max(q, *(np.max(np.abs(t)) for t in list(fo.direct.values()) + list(so.direct.values())))
        q = max(q, *(np.max(np.abs(t)) for t in associators(qact, a, b, b[::-1])))
    check(5, "associator closed forms", [("first-order routes", first, 1e-8),
                                         ("second-order pairings", pair, 1e-6),
                                         ("quaternion associators", q, 1e-10)])


def test_criterion_6_minimality_and_gle():
    oct_act = regular_birep(OCTONIONS)
    items = []
    held = sign_prepass([oct_act, twisted_birep(OCTONIONS)])
    items.append(("prepass==pattern", float(held != pattern_closure()), 0.5))
    items += [(r.name, r.max_residual, r.tolerance)
              for r in minimality_first_order(oct_act, samples=100)]
    items += [(r.name, r.max_residual, r.tolerance) for r in gle_residuals(oct_act, samples=100)]
    items += [(r.name, r.max_residual, r.tolerance)
              for r in classical_lie_residuals(regular_birep(QUATERNIONS), samples=100)]
    check(6, "minimality pattern and generalized Lie equations", items)


def test_criterion_7_maurer_cartan():
    recs = gmc_residuals(regular_birep(OCTONIONS), samples=100, seed=0)
    recs += [r for r in gmc_residuals(regular_birep(QUATERNIONS), samples=100, seed=0)
             if r.name.startswith("mc-classical")]
    check(7, "generalized Maurer-Cartan equations",
          [(r.name, r.max_residual, r.tolerance) for r in recs])


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), FLOOR))


def test_criterion_8_oracle_consistency():
    rng = np.random.default_rng(1)
    e = np.zeros(7)
    items = []
    # tangent data (criterion 3)
    a = jets.mixed_second(OCTONIONS.multiply, e, e)
    items.append(("a=d2(gh)", _rel(a, jets.fd_mixed_second(OCTONIONS.multiply, e, e)), REL))
    act = regular_birep(OCTONIONS)
    fields = action_taylor(act)
    worst = {}
    for A, g in zip(sample_ball(rng, 5, 7, 0.3), sample_ball(rng, 5, 7, 0.3)):
        def upd(k, v):
            worst[k] = max(worst.get(k, 0.0), v)
        upd("u", _rel(fields.loop.u(g), jets.fd_jacobian(lambda q: OCTONIONS.multiply(q, g), e)))
        upd("v", _rel(fields.loop.v(g), jets.fd_jacobian(lambda q: OCTONIONS.multiply(g, q), e)))
        pt = fields.at(A)
        # action fields (criteria 4-7)
        upd("S", _rel(pt.S, jets.fd_jacobian(lambda q: act.S(q, A), e)))
        upd("T", _rel(pt.T, jets.fd_jacobian(lambda q: act.T(q, A), e)))
        upd("dS", _rel(pt.dS, jets.fd_mixed_second(act.S, e, A)))
        upd("dT", _rel(pt.dT, jets.fd_mixed_second(act.T, e, A)))
        upd("S~", _rel(pt.Stilde, jets.fd_hessian(lambda q: act.S(q, A), e)))
        upd("T~", _rel(pt.Ttilde, jets.fd_hessian(lambda q: act.T(q, A), e)))
        # associators (criteria 5-6)
        fo = first_order_associators(act, A, g, fields)
        so = second_order_associators(act, A, fields)
        for i, name in enumerate(("l", "r", "m")):
            f = lambda x, y, i=i: associators(act, A, x, y)[i]
            upd(f"{name}", _rel(fo.direct[name], jets.fd_jacobian(lambda x: f(x, g), e)))
            upd(f"{name}hat", _rel(fo.direct[name + "hat"] * (-1 if name == "m" else 1),
                                   jets.fd_jacobian(lambda y: f(g, y), e)))
            upd(f"{name}_jk", _rel(so.direct[name], jets.fd_mixed_second(f, e, e)))
        # GLE derivatives of the moved point (criterion 6)
        jr = jets.jet_eval(act.S, g, A)
        upd("DgS", _rel(jr.jacobian[:, :7], jets.fd_jacobian(lambda q: act.S(q, A), g)))
        upd("DAS", _rel(jr.jacobian[:, 7:], jets.fd_jacobian(lambda q: act.S(g, q), A)))
    items += [(k, v, REL) for k, v in worst.items()]
    check(8, "jet derivatives vs central finite differences", items)


def _cli_json(args):
    out = subprocess.run([sys.executable, "-m", "moufang", "verify", *args, "--format", "json"],
                         capture_output=True, check=False)
    return out.returncode, out.stdout


def test_criterion_9_determinism():
    items = []
    for args in (["--model", "octonion", "--suite", "associators", "--samples", "5", "--seed", "11"],
                 ["--model", "chein-s3", "--suite", "loop-axioms"]):
        (c1, o1), (c2, o2) = _cli_json(args), _cli_json(args)
        json.loads(o1)
        items.append((args[1], float(o1 != o2 or c1 != c2 or c1 != 0), 0.5))
    check(9, "byte-identical JSON reports", items)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
