"""Surface description files and command-line vectors."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .lattice import DivisorClass, LatticeError, MukaiVector, PicardLattice

BUNDLED = ("generic", "nodal_fixture", "reflexive_nodal")


class ConfigError(ValueError):
    """Malformed input; the message names the offending location."""


@dataclass(frozen=True)
class SurfaceConfig:
    source: str
    lattice: PicardLattice
    H: DivisorClass
    ell: DivisorClass | None

    @property
    def labels(self):
        return self.lattice.labels


def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list of integers")
    for k, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, int):
            raise ConfigError(f"{where}[{k}]: expected an integer, got {x!r}")
    return value


def parse_config(text: str, source: str = "<string>") -> SurfaceConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    unknown = set(data) - {"rank", "gram", "H", "ell", "labels"}
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")
    for key in ("rank", "gram", "H"):
        if key not in data:
            raise ConfigError(f"{source}: missing key '{key}'")
    rank = data["rank"]
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
        raise ConfigError(f"{source}: rank: expected a positive integer, got {rank!r}")
    gram = data["gram"]
    if not isinstance(gram, list) or len(gram) != rank:
        raise ConfigError(f"{source}: gram: expected {rank} rows")
    rows = [_int_list(row, f"{source}: gram[{i}]") for i, row in enumerate(gram)]
    labels = data.get("labels")
    if labels is not None and (not isinstance(labels, list) or not all(isinstance(s, str) for s in labels)):
        raise ConfigError(f"{source}: labels: expected a list of strings")
    try:
        lattice = PicardLattice(rows, labels)
    except LatticeError as exc:
        raise ConfigError(f"{source}: gram: {exc}") from None
    classes = {}
    for key in ("H", "ell"):
        if key not in data:
            continue
        coords = _int_list(data[key], f"{source}: {key}")
        if len(coords) != rank:
            raise ConfigError(f"{source}: {key}: expected {rank} coordinates, got {len(coords)}")
        classes[key] = DivisorClass(tuple(coords), lattice)
    return SurfaceConfig(source, lattice, classes["H"], classes.get("ell"))


def load_config(path: str | None) -> SurfaceConfig:
    """Read a config file; ``None`` or a bundled name selects a shipped surface."""
    if path is None:
        path = "generic"
    p = Path(path)
    if not p.exists() and path in BUNDLED:
        text = resources.files("k3fm").joinpath("surfaces", f"{path}.toml").read_text()
        return parse_config(text, f"<bundled:{path}>")
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(text, str(path))


def parse_vector(spec: str, lattice: PicardLattice) -> MukaiVector:
    """Parse ``"r;c1,c2,...;s"``.  A lone ``0`` stands for the zero class."""
    parts = spec.split(";")
    if len(parts) != 3:
        raise ConfigError(f"vector {spec!r}: expected 'r;c1,...;s'")
    try:
        r = int(parts[0])
        s = int(parts[2])
        coords = [int(x) for x in parts[1].split(",")]
    except ValueError:
        raise ConfigError(f"vector {spec!r}: components must be integers") from None
    if coords == [0]:
        coords = [0] * lattice.rank
    if len(coords) != lattice.rank:
        raise ConfigError(f"vector {spec!r}: c1 needs {lattice.rank} coordinates, got {len(coords)}")
    return MukaiVector(r, DivisorClass(tuple(coords), lattice), s)
