"""Experiment configuration: flat key=value files plus CLI overrides."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path


@dataclass
class ExperimentConfig:
    family: str = "urt"
    alpha: float = 0.0
    b: int = 2
    ds: tuple[int, ...] = ()
    m: float | None = None
    d: int = 2
    h: int = 1
    n: tuple[int, ...] = (1000,)
    replicas: int = 10
    samples_per_tree: int = 10
    pairs_per_tree: int = 10
    k: int = 4
    j_max: int = 5
    seed: int = 1
    workers: int = 1
    checks: tuple[str, ...] = ()
    out: str = "out"
    thresholds: dict = field(default_factory=dict)
    n_max: int = 2000
    z: tuple[float, ...] = (0.25, 0.5)
    grid_n: tuple[int, ...] = (100, 500)
    mc_replicas: int = 100000

    def validate(self) -> None:
        for name in ("replicas", "samples_per_tree", "pairs_per_tree", "k", "j_max", "workers", "n_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.n or any(v < 1 for v in self.n):
            raise ValueError("n values must be >= 1")

    def family_params(self) -> dict:
        return {
            "alpha": self.alpha,
            "b": self.b,
            "ds": self.ds,
            "m": self.m,
            "d": self.d,
            "h": self.h,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ds"] = list(self.ds)
        d["n"] = list(self.n)
        d["checks"] = list(self.checks)
        d["z"] = list(self.z)
        d["grid_n"] = list(self.grid_n)
        return d


def _parse_value(name: str, raw: str):
    raw = raw.strip()
    if name in ("family", "out"):
        return raw
    if name == "checks":
        return tuple(s.strip() for s in raw.split(",") if s.strip())
    if name in ("n", "grid_n"):
        return tuple(int(float(s)) for s in raw.split(",") if s.strip())
    if name == "ds":
        return tuple(int(s) for s in raw.split(",") if s.strip())
    if name == "z":
        return tuple(float(s) for s in raw.split(",") if s.strip())
    if name in ("alpha", "m"):
        return float(raw)
    return int(float(raw))


def load_config(path: str | Path) -> dict:
    """Parse a flat key=value file ('#' starts a comment) into raw fields."""
    out: dict = {}
    valid = {f.name for f in fields(ExperimentConfig)}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in valid:
            raise ValueError(f"unknown config key: {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def load_thresholds(path: str | Path) -> dict:
    out: dict = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, raw = line.split("=", 1)
        out[key.strip()] = float(raw)
    return out
