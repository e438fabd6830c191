"""Deterministic verification harness: configs, case reports, suite runner.

Reports must be byte-identical across runs with the same config, so every
case draws from its own counter-based generator whose key is derived by
hashing the root seed together with the case id (never the execution
order: adding cases must not perturb existing ones).  Wall-time is the one
honest nondeterminism; the ``ms`` field stays 0 unless timings are
explicitly requested, and requesting them forfeits byte-identity.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import UsageError

__all__ = [
    "SuiteConfig",
    "CaseReport",
    "CaseFamily",
    "SuiteResult",
    "case_rng",
    "derive_key",
    "run_suite",
    "suite_names",
    "family_ids",
]

DEFAULT_SEED = 20260818

PARAM_RANGES = {
    "m": (1, 3),          # base-space dimension
    "n": (1, 3),          # generators per functional
    "mesh_level": (0, 6),  # refinement level for h = 1/32-type cases
    "ensemble": (1, 8),    # measures per ensemble
    "size": (2, 6),        # labels in a mapping space
}

DEFAULT_PARAMS = {"m": 2, "n": 2, "mesh_level": 5, "ensemble": 3, "size": 3}


def derive_key(root_seed: int, case_id: str) -> np.ndarray:
    """Two uint64 words from SHA-256(root seed, case id): the per-case
    counter-based generator key."""
    digest = hashlib.sha256(f"{root_seed}:{case_id}".encode()).digest()
    return np.frombuffer(digest[:16], dtype=np.uint64).copy()


def case_rng(root_seed: int, case_id: str) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=derive_key(root_seed, case_id)))


@dataclass
class CaseFamily:
    """A parametrized batch of cases: ``count`` draws of one residual check."""

    name: str                      # short family name, unique inside a suite
    desc: str                      # what identity the residual measures
    anchor: str                    # stable identity tag carried into reports
    tolerance: float
    count: int
    fn: Callable[[np.random.Generator, Mapping], float | None]


@dataclass
class CaseReport:
    id: str
    desc: str
    anchor: str
    status: str
    residual: float
    tolerance: float
    ms: int
    seed: int  # derived seed (first key word); kept off the wire format

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "desc": self.desc,
            "anchor": self.anchor,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "ms": self.ms,
        }


@dataclass
class SuiteConfig:
    suite: str = "all"
    seed: int = DEFAULT_SEED
    counts: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    report: str | None = None
    timings: bool = False

    _KEYS = {"suite", "seed", "counts", "tolerances", "params", "report",
             "timings"}

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        seed = self.seed
        if not isinstance(seed, int) or isinstance(seed, bool) \
                or not 0 <= seed < 2 ** 64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        for key, val in dict(self.tolerances).items():
            if not isinstance(val, (int, float)) or isinstance(val, bool) \
                    or val < 0:
                raise UsageError(f"tolerance override {key!r} must be >= 0")
            self.tolerances[key] = float(val)
        for key, val in self.counts.items():
            if not isinstance(val, int) or isinstance(val, bool) or val < 0:
                raise UsageError(f"count override {key!r} must be a "
                                 "nonnegative integer")
        for key, val in self.params.items():
            if key not in PARAM_RANGES:
                raise UsageError(f"unknown instance parameter {key!r}")
            lo, hi = PARAM_RANGES[key]
            if not isinstance(val, int) or isinstance(val, bool) \
                    or not lo <= val <= hi:
                raise UsageError(
                    f"parameter {key!r} must be an integer in [{lo}, {hi}]")

    @classmethod
    def from_file(cls, path: str, **overrides) -> "SuiteConfig":
        try:
            with open(path, "r") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(raw) - cls._KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)

    def effective_params(self) -> dict:
        out = dict(DEFAULT_PARAMS)
        out.update(self.params)
        return out


@dataclass
class SuiteResult:
    suite: str
    seed: int
    cases: list

    @property
    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "skip": 0}
        for c in self.cases:
            out[c.status] += 1
        return out

    @property
    def failed(self) -> bool:
        return self.summary["fail"] > 0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "cases": [c.to_dict() for c in self.cases],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _registry() -> dict:
    from .suites import SUITES
    return SUITES


def suite_names() -> list[str]:
    return sorted(_registry())


def family_ids() -> list[str]:
    out = []
    for suite, families in _registry().items():
        for fam in families:
            out.append(f"{suite}/{fam.name}")
    return sorted(out)


def _run_families(suite: str, families: Sequence[CaseFamily],
                  config: SuiteConfig) -> list[CaseReport]:
    params = config.effective_params()
    reports = []
    for fam in families:
        fam_id = f"{suite}/{fam.name}"
        count = config.counts.get(fam_id, fam.count)
        tol = config.tolerances.get(fam_id, fam.tolerance)
        for k in range(count):
            case_id = f"{fam_id}/{k:02d}"
            rng = case_rng(config.seed, case_id)
            seed_word = int(derive_key(config.seed, case_id)[0])
            start = time.perf_counter()
            residual = fam.fn(rng, params)
            elapsed = int(round(1000 * (time.perf_counter() - start)))
            if residual is None:
                status, residual = "skip", 0.0
            else:
                residual = float(residual)
                status = "pass" if residual <= tol else "fail"
            reports.append(CaseReport(
                id=case_id, desc=fam.desc, anchor=fam.anchor, status=status,
                residual=residual, tolerance=tol,
                ms=elapsed if config.timings else 0, seed=seed_word))
    return reports


def run_suite(config: SuiteConfig) -> SuiteResult:
    """Run one named suite (or ``all``); cases are ordered by case id and
    independent of execution order by construction."""
    registry = _registry()
    unknown_refs = [k for k in list(config.counts) + list(config.tolerances)
                    if k not in set(family_ids())]
    if unknown_refs:
        raise UsageError(f"unknown case families: {sorted(set(unknown_refs))}")
    if config.suite == "all":
        chosen = [(name, registry[name]) for name in sorted(registry)]
    elif config.suite in registry:
        chosen = [(config.suite, registry[config.suite])]
    else:
        raise UsageError(
            f"unknown suite {config.suite!r}; available: "
            f"{', '.join(sorted(registry))} or 'all'")
    reports: list[CaseReport] = []
    for name, families in chosen:
        reports.extend(_run_families(name, families, config))
    reports.sort(key=lambda c: c.id)
    return SuiteResult(suite=config.suite, seed=config.seed, cases=reports)
