"""Experiment configuration: line-oriented `key = value` files.

Unknown keys are rejected; parse -> echo -> parse is idempotent.  The cache
directory may also come from the TWISTLAB_CACHE_DIR environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace

from .ringarith import ConfigurationError

ENV_CACHE_DIR = "TWISTLAB_CACHE_DIR"


@dataclass(frozen=True)
class ExperimentConfig:
    field_kind: str = "rational"
    system: str = "sym2-delta"
    coeff_cache: str = ""
    s_primes: tuple = (2,)
    precision_bits: int = 53
    tau_table: int = 100_000
    x_ladder: tuple = (1000, 3000, 10000)
    y_ladder: tuple = (500, 1000, 2000, 4000)
    x_d: int = 2000
    x_n: int = 2000
    d_cutoff: int = 25_000
    n_smoothing: int = 20_000
    tolerance: float = 1e-9
    workers: int = 1
    e_class: int = 0
    output_dir: str = "out"
    cache_dir: str = ""

    def resolved_cache_dir(self) -> str:
        return self.cache_dir or os.environ.get(ENV_CACHE_DIR, "")


_TUPLE_KEYS = {"x_ladder", "y_ladder", "s_primes"}
_INT_KEYS = {
    "precision_bits",
    "tau_table",
    "x_d",
    "x_n",
    "d_cutoff",
    "n_smoothing",
    "workers",
    "e_class",
}
_FLOAT_KEYS = {"tolerance"}


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = base or ExperimentConfig()
    valid = {f.name for f in fields(ExperimentConfig)}
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in valid:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in _TUPLE_KEYS:
            updates[key] = tuple(int(x) for x in val.split(",") if x.strip())
        elif key in _INT_KEYS:
            updates[key] = int(val)
        elif key in _FLOAT_KEYS:
            updates[key] = float(val)
        else:
            updates[key] = val
    return replace(cfg, **updates)


def echo_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(ExperimentConfig):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())
