"""Seeded verification campaigns and their reports.

All sampling goes through ``numpy.random.default_rng(seed)`` (PCG64), so a
report is a pure function of (model, suite, samples, seed).  JSON output
uses a fixed field order and Python's shortest round-trip float repr
(at most 17 significant digits), which keeps reports byte-identical.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, jets
from .algebra import FiniteLoop, get_model, identity_suite, sample_ball
from .birep import (ASSOCIATOR_NAMES, action_taylor, defining_relations_residual,
                    first_order_associators, regular_birep, second_order_associators)
from .mc import (TOL_ONE, TOL_TWO, classical_lie_residuals, gle_residuals, gmc_residuals,
                 minimality_first_order, second_order_minimality)
from .records import ResidualRecord, record
from .tangent import structure_tensors

MODEL_NAMES = ("octonion", "quaternion", "chein-s3")
SUITE_NAMES = ("loop-axioms", "tangent", "birep", "associators", "minimality", "gle",
               "maurer-cartan", "all")
DIFFERENTIAL_SUITES = SUITE_NAMES[1:-1]


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    model: str
    suite: str
    samples: int = 100
    seed: int = 0
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODEL_NAMES:
            raise UsageError(f"unknown model {self.model!r}; choose from {', '.join(MODEL_NAMES)}")
        if self.suite not in SUITE_NAMES:
            raise UsageError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITE_NAMES)}")
        if self.samples < 1:
            raise UsageError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        if self.model == "chein-s3" and self.suite in DIFFERENTIAL_SUITES:
            raise UsageError(f"suite {self.suite!r} needs a differentiable model")


@dataclass
class VerificationReport:
    model: str
    suite: str
    seed: int
    samples: int
    records: list = field(default_factory=list)
    wall_ms: float | None = None
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "model": self.model,
            "suite": self.suite,
            "seed": self.seed,
            "samples": self.samples,
            "records": [r.to_dict() for r in self.records],
            "pass": self.passed,
            "wall_ms": self.wall_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(d["model"], d["suite"], int(d["seed"]), int(d["samples"]),
                   [ResidualRecord.from_dict(r) for r in d["records"]],
                   d["wall_ms"], d["version"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        width = max([len(r.name) for r in self.records] + [8])
        lines = [f"moufang {self.version}  model={self.model}  suite={self.suite}  "
                 f"samples={self.samples}  seed={self.seed}",
                 f"{'identity':<{width}}  {'max residual':>13}  {'tolerance':>9}  {'n':>6}  status",
                 "-" * (width + 46)]
        for r in self.records:
            lines.append(f"{r.name:<{width}}  {r.max_residual:13.3e}  {r.tolerance:9.1e}  "
                         f"{r.samples:6d}  {'pass' if r.passed else 'FAIL'}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        if self.wall_ms is not None:
            lines.append(f"wall time: {self.wall_ms:.0f} ms")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# suites

def _loop_axioms(model, cfg: SuiteConfig) -> list:
    res = identity_suite(model, cfg.samples, cfg.seed)
    tol = 0.0 if isinstance(model, FiniteLoop) else 1e-12
    return [ResidualRecord(f"loop:{k}", v, res.samples, tol) for k, v in res.residuals.items()]


def _tangent(model, cfg: SuiteConfig) -> list:
    data = structure_tensors(model)
    alg = data.algebra()
    rng = np.random.default_rng(cfg.seed)
    x, y, z = (rng.standard_normal((cfg.samples, model.dim)) for _ in range(3))
    e = model.unit
    recs = [
        ResidualRecord("tangent:c-antisymmetry",
                       float(np.max(np.abs(data.c + np.swapaxes(data.c, 1, 2)))), 1, 0.0),
        ResidualRecord("tangent:u(e)=I", float(np.max(np.abs(data.u(e) - np.eye(model.dim)))), 1, 1e-12),
        ResidualRecord("tangent:v(e)=I", float(np.max(np.abs(data.v(e) - np.eye(model.dim)))), 1, 1e-12),
        record("tangent:maltsev", np.max(np.abs(alg.maltsev_residual(x, y, z)), axis=-1),
               cfg.samples, TOL_ONE),
        record("tangent:maltsev-quartic", np.max(np.abs(alg.maltsev_quartic(x, y, z)), axis=-1),
               cfg.samples, TOL_ONE),
    ]
    if model.associative:
        recs.append(record("tangent:jacobi", np.max(np.abs(alg.jacobiator(x, y, z)), axis=-1),
                           cfg.samples, 1e-10))
    g = sample_ball(rng, cfg.samples, model.dim, model.radius)
    recs.append(record("oracle:u", (_rel_err(data.u(p), jets.fd_jacobian(
        lambda q, p=p: model.multiply(q, p), e)) for p in g), cfg.samples, 1e-5))
    recs.append(record("oracle:v", (_rel_err(data.v(p), jets.fd_jacobian(
        lambda q, p=p: model.multiply(p, q), e)) for p in g), cfg.samples, 1e-5))
    return recs


def _rel_err(a, b, floor: float = 1e-8) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), floor))


def _birep(model, cfg: SuiteConfig) -> list:
    act = regular_birep(model)
    recs = list(defining_relations_residual(act, cfg.samples, cfg.seed).values())
    recs = [ResidualRecord(f"birep:{r.name}", r.max_residual, r.samples, r.tolerance) for r in recs]
    fields = action_taylor(act)
    rng = np.random.default_rng(cfg.seed)
    A = sample_ball(rng, cfg.samples, act.n, model.radius)
    sym, zero = [], []
    for a in A:
        pt = fields.at(a)
        sym.append(max(np.max(np.abs(pt.Stilde - np.swapaxes(pt.Stilde, 1, 2))),
                       np.max(np.abs(pt.Ttilde - np.swapaxes(pt.Ttilde, 1, 2)))))
        zero.append(np.max(np.abs(pt.S + pt.T + fields.P(a))))
    recs.append(record("birep:tilde-symmetry", sym, cfg.samples, 1e-10))
    recs.append(record("birep:S+T+P=0", zero, cfg.samples, 0.0))
    return recs


def _associators(model, cfg: SuiteConfig) -> list:
    act = regular_birep(model)
    fields = action_taylor(act)
    rng = np.random.default_rng(cfg.seed)
    A = sample_ball(rng, cfg.samples, act.n, model.radius)
    g = sample_ball(rng, cfg.samples, act.r, model.radius)
    first = {k: [] for k in ASSOCIATOR_NAMES}
    closed = {k: [] for k in ("l", "r", "m")}
    pair = {}
    size = []
    for a, b in zip(A, g):
        fo = first_order_associators(act, a, b, fields)
        for k, v in fo.discrepancy().items():
            first[k].append(v)
        so = second_order_associators(act, a, fields)
        for k, v in so.closed_discrepancy().items():
            closed[k].append(v)
        for k, v in so.pairings().items():
            pair.setdefault(k, []).append(v)
        if act.associative:
            size.append(max(max(np.max(np.abs(t)) for t in fo.direct.values()),
                            max(np.max(np.abs(t)) for t in so.direct.values())))
    n = cfg.samples
    recs = [record(f"assoc-1:{k}", v, n, TOL_ONE) for k, v in first.items()]
    recs += [record(f"assoc-2:{k}", v, n, TOL_TWO) for k, v in closed.items()]
    recs += [record(f"assoc-2:{k}", v, n, TOL_TWO) for k, v in pair.items()]
    if act.associative:
        recs.append(record("assoc:vanish", size, n, 1e-10))
    return recs


def _minimality(model, cfg: SuiteConfig) -> list:
    act = regular_birep(model)
    return (minimality_first_order(act, cfg.samples, cfg.seed)
            + second_order_minimality(act, cfg.samples, cfg.seed))


def _gle(model, cfg: SuiteConfig) -> list:
    act = regular_birep(model)
    recs = gle_residuals(act, cfg.samples, cfg.seed)
    if act.associative:
        recs += classical_lie_residuals(act, cfg.samples, cfg.seed)
    return recs


def _maurer_cartan(model, cfg: SuiteConfig) -> list:
    return gmc_residuals(regular_birep(model), cfg.samples, cfg.seed)


SUITES = {
    "loop-axioms": _loop_axioms,
    "tangent": _tangent,
    "birep": _birep,
    "associators": _associators,
    "minimality": _minimality,
    "gle": _gle,
    "maurer-cartan": _maurer_cartan,
}


def run_suite(cfg: SuiteConfig, timing: bool = False) -> VerificationReport:
    """Run the selected suites; deterministic given the config.

    Wall time is only recorded with ``timing=True`` (it would break
    byte-identical reports otherwise).
    """
    start = time.perf_counter()
    model = get_model(cfg.model)
    if cfg.suite == "all":
        names = ["loop-axioms"] if isinstance(model, FiniteLoop) else list(SUITES)
    else:
        names = [cfg.suite]
    records = []
    for name in names:
        records.extend(SUITES[name](model, cfg))
    known = {r.name for r in records}
    unknown = sorted(set(cfg.tolerances) - known)
    if unknown:
        raise UsageError(f"tolerance override for unknown identity: {', '.join(unknown)}")
    records = [r.with_tolerance(cfg.tolerances[r.name]) if r.name in cfg.tolerances else r
               for r in records]
    samples = records[0].samples if isinstance(model, FiniteLoop) else cfg.samples
    wall = round((time.perf_counter() - start) * 1000.0, 3) if timing else None
    return VerificationReport(cfg.model, cfg.suite, cfg.seed, samples, records, wall)


def emit_report(report: VerificationReport, fmt: str = "text", destination=None) -> str:
    """Render the report; write it to ``destination`` (a path) if given."""
    if fmt == "json":
        text = report.to_json()
    elif fmt == "text":
        text = report.to_text()
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if destination is not None:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
