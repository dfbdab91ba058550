from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ResidualRecord:
    """Maximum residual of one identity over a sample campaign."""

    name: str
    max_residual: float
    samples: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def with_tolerance(self, tol: float) -> "ResidualRecord":
        return ResidualRecord(self.name, self.max_residual, self.samples, float(tol))

    def merge(self, other: "ResidualRecord") -> "ResidualRecord":
        if other.name != self.name:
            raise ValueError(f"cannot merge {self.name!r} with {other.name!r}")
        return ResidualRecord(self.name, max(self.max_residual, other.max_residual),
                              self.samples + other.samples, min(self.tolerance, other.tolerance))

    def to_dict(self) -> dict:
        return {"name": self.name, "max_residual": self.max_residual,
                "tolerance": self.tolerance, "samples": self.samples, "pass": self.passed}

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualRecord":
        return cls(d["name"], float(d["max_residual"]), int(d["samples"]), float(d["tolerance"]))


def record(name: str, values, samples: int, tolerance: float) -> ResidualRecord:
    """Build a record from an iterable of per-sample residual magnitudes."""
    values = [float(v) for v in values]
    return ResidualRecord(name, max(values) if values else 0.0, samples, tolerance)
