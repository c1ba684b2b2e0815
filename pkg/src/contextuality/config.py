"""Run configuration, geometry selectors and artifact helpers."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .geometry import (
    ConfigurationError,
    IncidenceGeometry,
    QuadricSpec,
    build_doily,
    build_mermin_square,
    build_quadric,
    build_symplectic_space,
)
from .pauli import PauliOperator
from .quantum import NoiseParams

COMMANDS = ("geometry", "degree", "rio-negro", "game", "report")
OUT_ENV = "CONTEXTUALITY_OUT"


@dataclass
class RunConfig:
    command: str
    geometry: str | None = None
    seed: int = 0
    noise: NoiseParams = field(default_factory=NoiseParams)
    shots: int = 10_000
    rounds: int = 10_000
    out_dir: Path = field(default_factory=lambda: Path(os.environ.get(OUT_ENV, "results")))
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}")
        self.out_dir = Path(self.out_dir)

    def hash(self) -> str:
        data = asdict(self)
        data.pop("out_dir")
        blob = json.dumps(data, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_W_RE = re.compile(r"^w(\d+)2$", re.IGNORECASE)


def resolve_geometry(selector: str) -> IncidenceGeometry:
    """Named builtin (square, doily, w52, elliptic:<center>, hyperbolic:<center>) or JSON path."""
    sel = selector.strip()
    if sel == "square":
        return build_mermin_square()
    if sel == "doily":
        return build_doily()
    m = _W_RE.match(sel)
    if m:
        dim = int(m.group(1))
        if dim % 2 == 0:
            raise ConfigurationError(f"W({dim},2) is not a symplectic polar space of qubits")
        return build_symplectic_space((dim + 1) // 2)
    if ":" in sel and sel.split(":", 1)[0] in ("elliptic", "hyperbolic"):
        kind, center = sel.split(":", 1)
        try:
            op = PauliOperator.from_string(center)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        spec = QuadricSpec(op)
        if spec.kind != kind:
            wanted = "symmetric" if kind == "hyperbolic" else "skew (odd number of Y)"
            raise ConfigurationError(f"{kind} quadrics need a {wanted} center, got {center}")
        return build_quadric(spec, build_symplectic_space(op.n_qubits))
    path = Path(sel)
    if path.suffix == ".json" and path.exists():
        return IncidenceGeometry.load(path)
    raise ConfigurationError(
        f"cannot resolve geometry {selector!r}; use square, doily, w32, w52, "
        "elliptic:<center>, hyperbolic:<center> or a JSON dump"
    )


def slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]+", "-", name).strip("-")


def geometry_hash(geom: IncidenceGeometry) -> str:
    return hashlib.sha256(json.dumps(geom.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def provenance(config: RunConfig, geom: IncidenceGeometry | None = None) -> dict:
    out = {
        "version": __version__,
        "command": config.command,
        "seed": config.seed,
        "config_hash": config.hash(),
    }
    if geom is not None:
        out["geometry_hash"] = geometry_hash(geom)
    return out


def write_json(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())
    return path

