"""Run configuration, read from and written to JSON."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from .errors import ApproximationDegreeError, PreconditionError

GENUS0 = "genus0"
MIN_CAP = 4


def _pair(x):
    if isinstance(x, (list, tuple)) and len(x) == 2 and not isinstance(x[0], (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float, complex)):
        return complex(x)
    raise PreconditionError(f"cannot read a complex number from {x!r}")


@dataclass(frozen=True)
class RunConfig:
    lattice: object = ((1.0, 0.0), (0.0, 1.0))  # two [re, im] pairs or "genus0"
    quad_tol: float = 1e-13
    fit_tol: float = 1e-13  # singular-value cutoff of the boundary least squares
    solve_tol: float = 1e-9
    period_tol: float = 1e-8
    path_tol: float = 1e-7
    fit_pole_order: int = 10
    dual_pole_order: int = 8
    fit_samples: int = 512
    check_samples: int = 2048
    cycle_samples: int = 256
    phi_samples: int = 1024
    seed: int = 0

    def __post_init__(self):
        lat = self.lattice
        if isinstance(lat, str):
            if lat != GENUS0:
                raise PreconditionError(f"unknown lattice token {lat!r}")
        else:
            w1, w2 = (_pair(x) for x in lat)
            object.__setattr__(self, "lattice", ((w1.real, w1.imag), (w2.real, w2.imag)))
        for name in ("quad_tol", "fit_tol", "solve_tol", "period_tol", "path_tol"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"{name} must be positive")
        for name in ("fit_samples", "check_samples", "cycle_samples", "phi_samples"):
            if int(getattr(self, name)) < 16:
                raise PreconditionError(f"{name} must be at least 16")
        if self.check_samples < 4 * self.fit_samples:
            raise PreconditionError("check grid must be at least 4x the fitting grid")
        for name in ("fit_pole_order", "dual_pole_order"):
            if int(getattr(self, name)) < MIN_CAP:
                # a too-small cap is the "raise the cap" failure, not a malformed file
                raise ApproximationDegreeError(
                    f"{name} = {getattr(self, name)} is below {MIN_CAP}; raise the cap")

    @property
    def genus(self):
        return 0 if self.lattice == GENUS0 else 1

    @property
    def periods(self):
        if self.genus == 0:
            return None
        return tuple(complex(*x) for x in self.lattice)

    def to_dict(self):
        d = asdict(self)
        d["lattice"] = self.lattice if self.genus == 0 else [list(x) for x in self.lattice]
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise PreconditionError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
