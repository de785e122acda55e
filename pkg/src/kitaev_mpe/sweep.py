"""Two-axis parameter sweeps with deterministic, order-independent output."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from kitaev_mpe.analysis import fisher_density_scaling, fisher_density_value, susceptibility
from kitaev_mpe.correlators import ALL_KINDS, OperatorKind
from kitaev_mpe.errors import KitaevError, NumericalError, ParameterError
from kitaev_mpe.model import ModelParams, parse_alpha, solve, winding

AXIS_NAMES = ("mu", "delta", "alpha")
OBSERVABLES = (
    "fisher_density_best",
    *(f"fisher_density_{kind.name}" for kind in ALL_KINDS),
    "b_exponent", "c_prefactor", "winding", "chi_mu", "chi_delta", "chi_alpha", "gap",
)
STATUS_OK = "ok"


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ParameterError(f"axis parameter must be one of {AXIS_NAMES}, got {self.name!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ParameterError(f"axis {self.name} bounds must be finite")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ParameterError(f"axis {self.name} needs steps >= 2, got {self.steps}")
        if self.start == self.stop:
            raise ParameterError(f"axis {self.name} is degenerate ({self.start} .. {self.stop})")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.steps))

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``name:start:stop:steps``, e.g. ``mu:-2:2:21``; ``inf`` is accepted for alpha."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ParameterError(f"axis spec {text!r} is not name:start:stop:steps")
        name = parts[0].strip()
        conv = parse_alpha if name == "alpha" else float
        try:
            return cls(name, conv(parts[1]), conv(parts[2]), int(parts[3]))
        except ValueError as exc:
            raise ParameterError(f"bad axis spec {text!r}: {exc}") from exc

    def __str__(self):
        return f"{self.name}:{self.start!r}:{self.stop!r}:{self.steps}"


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    fixed: ModelParams
    observable: str = "fisher_density_best"
    sizes: tuple = ()

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ParameterError("sweep axes must name distinct parameters")
        if self.observable not in OBSERVABLES:
            raise ParameterError(f"observable must be one of {OBSERVABLES}, got {self.observable!r}")
        if self.observable in ("b_exponent", "c_prefactor") and len(set(self.sizes)) < 4:
            raise ParameterError(f"{self.observable} needs >= 4 distinct sizes")

    def points(self):
        """Grid points in row-major order (axis1 outer, axis2 inner)."""
        return [(float(u), float(v)) for u in self.axis1.values for v in self.axis2.values]


@dataclass(frozen=True)
class SweepRow:
    value1: float
    value2: float
    value: float | None
    status: str
    message: str = ""


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple = field(default_factory=tuple)

    @property
    def failures(self) -> int:
        return sum(row.status != STATUS_OK for row in self.rows)


def evaluate_observable(params: ModelParams, observable: str, sizes=()) -> float:
    if observable == "fisher_density_best":
        return fisher_density_value(params)
    if observable.startswith("fisher_density_"):
        return fisher_density_value(params, OperatorKind.parse(observable[len("fisher_density_"):]))
    if observable == "b_exponent":
        return fisher_density_scaling(params, sizes).b
    if observable == "c_prefactor":
        return fisher_density_scaling(params, sizes).c
    if observable == "winding":
        return float(winding(params).snapped)
    if observable in ("chi_mu", "chi_delta", "chi_alpha"):
        return getattr(susceptibility(params), observable)
    if observable == "gap":
        return solve(params).gap
    raise ParameterError(f"unknown observable {observable!r}")


def _evaluate_point(task):
    spec, (u, v) = task
    try:
        params = spec.fixed.replace(**{spec.axis1.name: u, spec.axis2.name: v})
        value = evaluate_observable(params, spec.observable, spec.sizes)
        if not math.isfinite(value):
            return SweepRow(u, v, None, "nonfinite", repr(value))
        return SweepRow(u, v, value, STATUS_OK)
    except ParameterError as exc:
        return SweepRow(u, v, None, "invalid", str(exc))
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return SweepRow(u, v, None, "numerical_error", str(exc))
    except KitaevError as exc:
        return SweepRow(u, v, None, "error", str(exc))


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every grid point; rows come back in row-major order."""
    if int(workers) != workers or workers < 1:
        raise ParameterError(f"workers must be a positive integer, got {workers}")
    tasks = [(spec, point) for point in spec.points()]
    if workers == 1:
        rows = [_evaluate_point(task) for task in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_point, tasks, chunksize=chunk))
    return SweepResult(spec=spec, rows=tuple(rows))
