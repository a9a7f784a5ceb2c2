"""Block-diagonal SDP data model.

Variables are symmetric PSD blocks, free scalars and nonnegative scalars.
A linear expression is a mapping from *keys* to coefficients, where a key is
either a scalar name (``str``) or a block entry ``(block_name, i, j)`` with
``i <= j``.  A block entry key stands for the single matrix entry
``X[i, j]``; it is not doubled for off-diagonal positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from types import MappingProxyType
from typing import Mapping, Union

import numpy as np

Key = Union[str, tuple]

STATUSES = ("optimal", "infeasible", "unbounded", "inaccurate", "failed")


def normalize_key(key: Key) -> Key:
    if isinstance(key, str):
        return key
    name, i, j = key
    i, j = int(i), int(j)
    return (name, i, j) if i <= j else (name, j, i)


def _freeze(coeffs: Mapping[Key, float]) -> Mapping[Key, float]:
    out: dict[Key, float] = {}
    for k, v in coeffs.items():
        k = normalize_key(k)
        out[k] = out.get(k, 0.0) + float(v)
    return MappingProxyType({k: v for k, v in out.items() if v != 0.0})


@dataclass(frozen=True)
class LinearConstraint:
    """``sum coeffs[k] * v[k]  (== or >=)  rhs``."""

    coeffs: Mapping[Key, float]
    rhs: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _freeze(self.coeffs))
        object.__setattr__(self, "rhs", float(self.rhs))


@dataclass(frozen=True)
class SdpProblem:
    psd_blocks: tuple[tuple[str, int], ...]
    free_vars: tuple[str, ...] = ()
    nonneg_vars: tuple[str, ...] = ()
    equalities: tuple[LinearConstraint, ...] = ()
    inequalities: tuple[LinearConstraint, ...] = ()  # each means expr >= rhs
    objective: Mapping[Key, float] = field(default_factory=dict)
    objective_constant: float = 0.0
    sense: str = "min"

    def __post_init__(self):
        object.__setattr__(self, "psd_blocks", tuple((str(n), int(d)) for n, d in self.psd_blocks))
        object.__setattr__(self, "free_vars", tuple(self.free_vars))
        object.__setattr__(self, "nonneg_vars", tuple(self.nonneg_vars))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "objective", _freeze(self.objective))
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        names = [n for n, _ in self.psd_blocks] + list(self.free_vars) + list(self.nonneg_vars)
        if len(set(names)) != len(names):
            raise ValueError("block and scalar names must be unique")
        for name, dim in self.psd_blocks:
            if dim < 1:
                raise ValueError(f"block {name!r} has nonpositive dimension {dim}")
        dims = dict(self.psd_blocks)
        scalars = set(self.free_vars) | set(self.nonneg_vars)
        for expr in [self.objective] + [c.coeffs for c in self.equalities + self.inequalities]:
            for key in expr:
                if isinstance(key, str):
                    if key not in scalars:
                        raise ValueError(f"unknown scalar {key!r}")
                else:
                    name, i, j = key
                    if name not in dims or not 0 <= i <= j < dims[name]:
                        raise ValueError(f"invalid block entry {key!r}")

    @property
    def block_dims(self) -> dict[str, int]:
        return dict(self.psd_blocks)

    def size_summary(self) -> dict:
        return {
            "blocks": [d for _, d in self.psd_blocks],
            "free": len(self.free_vars),
            "nonneg": len(self.nonneg_vars),
            "equalities": len(self.equalities),
            "inequalities": len(self.inequalities),
        }


class SdpBuilder:
    """Incremental construction of an :class:`SdpProblem`."""

    def __init__(self):
        self._blocks: list[tuple[str, int]] = []
        self._free: list[str] = []
        self._nonneg: list[str] = []
        self._eqs: list[LinearConstraint] = []
        self._ineqs: list[LinearConstraint] = []
        self._objective: dict[Key, float] = {}
        self._constant = 0.0
        self._sense = "min"

    def add_block(self, name: str, dim: int) -> str:
        self._blocks.append((name, int(dim)))
        return name

    def add_free(self, name: str) -> str:
        self._free.append(name)
        return name

    def add_nonneg(self, name: str) -> str:
        self._nonneg.append(name)
        return name

    def add_eq(self, coeffs: Mapping[Key, float], rhs: float = 0.0) -> None:
        self._eqs.append(LinearConstraint(coeffs, rhs))

    def add_ge(self, coeffs: Mapping[Key, float], rhs: float = 0.0) -> None:
        self._ineqs.append(LinearConstraint(coeffs, rhs))

    def add_le(self, coeffs: Mapping[Key, float], rhs: float = 0.0) -> None:
        self._ineqs.append(LinearConstraint({k: -v for k, v in coeffs.items()}, -rhs))

    def set_objective(self, coeffs: Mapping[Key, float], constant: float = 0.0,
                      sense: str = "min") -> None:
        self._objective = dict(coeffs)
        self._constant = float(constant)
        self._sense = sense

    def build(self) -> SdpProblem:
        return SdpProblem(
            psd_blocks=tuple(self._blocks),
            free_vars=tuple(self._free),
            nonneg_vars=tuple(self._nonneg),
            equalities=tuple(self._eqs),
            inequalities=tuple(self._ineqs),
            objective=self._objective,
            objective_constant=self._constant,
            sense=self._sense,
        )


@dataclass(frozen=True)
class Settings:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    infeas_tol: float = 1e-8
    inaccurate_tol: float = 1e-6
    step_fraction: float = 0.99
    verbose: bool = False

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "Settings":
        """Build from flat ``key -> value`` pairs; string values are converted."""
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise KeyError(f"unknown solver setting {key!r}")
            default = getattr(cls, key)
            if isinstance(default, bool):
                kwargs[key] = raw if isinstance(raw, bool) else str(raw).lower() in ("1", "true", "yes")
            else:
                kwargs[key] = type(default)(raw)
        return cls(**kwargs)


@dataclass
class SolveReport:
    status: str
    primal_value: float
    dual_value: float
    block_values: dict[str, np.ndarray] = field(default_factory=dict)
    scalar_values: dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    residuals: dict[str, float] = field(default_factory=dict)
    equality_duals: np.ndarray | None = None
    inequality_duals: np.ndarray | None = None
    dual_blocks: dict[str, np.ndarray] = field(default_factory=dict)
    message: str = ""

    @property
    def ok(self) -> bool:
        """True for optimal and for inaccurate-but-usable solutions."""
        return self.status in ("optimal", "inaccurate")

    def value(self, key: Key) -> float:
        key = normalize_key(key)
        if isinstance(key, str):
            return self.scalar_values[key]
        name, i, j = key
        return float(self.block_values[name][i, j])

    def evaluate(self, expr: Mapping[Key, float]) -> float:
        return float(sum(c * self.value(k) for k, c in expr.items()))

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "iterations": self.iterations,
            "residuals": dict(self.residuals),
            "message": self.message,
        }
