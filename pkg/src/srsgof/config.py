"""JSON experiment configs: model and order specs, observation files.

Model specs are objects with a ``family`` field, for example::

    {"model": "crp", "N": 10, "a": 0.52, "b": 0.52}
    {"model": "bits", "k": 8, "kind": "ind"}
    {"model": "mixture", "weights": [0.5, 0.5], "components": [...]}

``"family"`` is accepted as a synonym of ``"model"``.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import numpy as np

from .distributions.base import DiscreteModel, FinitePmf, MixtureModel
from .distributions.bitstrings import BitStringFamily, bitstring_alternative
from .distributions.crp import CRP, crp_mixture_p
from .distributions.ising import IsingModel
from .distributions.poisson import BimodalPoisson
from .domains import BitString, Partition, SpinLattice
from .orderings import ORDER_NAMES, get_order
from .ranking import TotalOrder

SCHEMA_VERSION = 1
OBSERVATION_FORMATS = ("int", "bits", "partition", "lattice")


class ConfigError(ValueError):
    """Malformed or incomplete configuration."""


def require(cfg: Mapping, key: str, where: str = "config") -> Any:
    if key not in cfg:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return cfg[key]


def load_config(path: str | Path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"config needs \"schema\": {SCHEMA_VERSION}, got {cfg.get('schema')!r}")
    return cfg


def build_model(spec: Mapping) -> DiscreteModel:
    if not isinstance(spec, Mapping):
        raise ConfigError(f"model spec must be an object, got {spec!r}")
    family = spec.get("model", spec.get("family"))
    if family is None:
        raise ConfigError("model: missing required field 'model'")
    try:
        if family == "finite":
            return FinitePmf(require(spec, "probs", "finite"), spec.get("elements"))
        if family == "bimodal_poisson":
            return BimodalPoisson(require(spec, "lam1", family), require(spec, "lam2", family))
        if family == "bits":
            return BitStringFamily(int(require(spec, "k", family)), spec.get("kind", "ind"))
        if family == "bits_mix":
            return bitstring_alternative(int(require(spec, "k", family)), require(spec, "kind", family), float(require(spec, "w", family)))
        if family == "crp":
            return CRP(int(require(spec, "N", family)), float(require(spec, "a", family)), float(require(spec, "b", family)))
        if family == "crp_mixture_p":
            return crp_mixture_p(int(spec.get("N", 20)))
        if family == "ising":
            return IsingModel(
                int(require(spec, "k", family)),
                float(require(spec, "T", family)),
                spec.get("method", "gibbs"),
                int(spec.get("steps", 0)),
                int(spec.get("coupling", 1)),
            )
        if family == "mixture":
            comps = [build_model(c) for c in require(spec, "components", family)]
            return MixtureModel(require(spec, "weights", family), comps)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {family} model: {exc}") from exc
    raise ConfigError(f"unknown model family {family!r}")


def build_order(spec, p: DiscreteModel | None = None, q: DiscreteModel | None = None) -> TotalOrder:
    """Order from a name or ``{"name": ...}``; ``optimal`` uses the p and q tables."""
    name = spec if isinstance(spec, str) else require(spec, "name", "order")
    if name not in ORDER_NAMES:
        raise ConfigError(f"unknown order {name!r}; choose from {ORDER_NAMES}")
    if name != "optimal":
        return get_order(name)
    if p is None or q is None or not (p.is_enumerable and p.has_pmf and q.has_pmf):
        raise ConfigError("order 'optimal' needs enumerable p and q with pmfs")
    elements = p.enumerate()
    return get_order("optimal", p=p.pmf_table(elements), q=q.pmf_table(elements), elements=elements)


# --- observation files ----------------------------------------------------


def _parse_lattice(line: str) -> SpinLattice:
    spins = [int(v) for v in line.split(",")]
    k = int(round(len(spins) ** 0.5))
    if k * k != len(spins):
        raise ValueError(f"{len(spins)} spins do not form a square lattice")
    return SpinLattice(np.array(spins).reshape(k, k))


def read_observations(path: str | Path, fmt: str):
    """Integers one per line; bit strings as 0/1 rows; partitions as JSON
    arrays of arrays; lattices as row-major comma-separated +1/-1 rows."""
    if fmt not in OBSERVATION_FORMATS:
        raise ConfigError(f"observation format must be one of {OBSERVATION_FORMATS}, got {fmt!r}")
    try:
        lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    except OSError as exc:
        raise ConfigError(f"cannot read observations {path}: {exc}") from exc
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    out = []
    for lineno, line in enumerate(lines, 1):
        try:
            if fmt == "int":
                out.append(int(line))
            elif fmt == "bits":
                out.append(BitString.from_str(line))
            elif fmt == "partition":
                out.append(Partition(json.loads(line)))
            else:
                out.append(_parse_lattice(line))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{path}:{lineno}: cannot parse {fmt} observation: {exc}") from exc
    if not out:
        raise ConfigError(f"{path}: no observations")
    return np.array(out, dtype=np.int64) if fmt == "int" else out


def format_observation(x) -> str:
    if isinstance(x, BitString):
        return str(x)
    if isinstance(x, Partition):
        return json.dumps(x.to_json(), separators=(",", ":"))
    if isinstance(x, SpinLattice):
        return ",".join(str(int(v)) for v in x.spins.ravel())
    return str(int(x))


def write_observations(path: str | Path, xs) -> None:
    Path(path).write_text("".join(format_observation(x) + "\n" for x in xs))


def write_csv(path: str | Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
