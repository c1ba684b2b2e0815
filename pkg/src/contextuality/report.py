"""Merge run artifacts into the two summary tables (Rio Negro chi, game win rates)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .geometry import ConfigurationError

FAMILY_ORDER = ["W(5,2)", "square", "doily", "elliptic", "hyperbolic"]
GAME_ORDER = [("pl", "square"), ("pl", "doily"), ("ll", "square"), ("ll", "doily"), ("ll", "elliptic"), ("llll", "elliptic")]


def published_reference() -> dict:
    return json.loads(resources.files("contextuality").joinpath("data/published_reference.json").read_text())


@dataclass
class ReportBundle:
    chi_rows: list[dict] = field(default_factory=list)
    game_rows: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    sources: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chi_table": self.chi_rows,
            "game_table": self.game_rows,
            "warnings": self.warnings,
            "sources": self.sources,
            "reference_note": published_reference()["note"],
        }

    def markdown(self) -> str:
        def fmt(v):
            if v is None:
                return "-"
            if isinstance(v, float):
                return f"{v:.4f}"
            return str(v)

        lines = []
        if self.chi_rows:
            lines.append("| geometry | d | L | chi (noiseless) | chi (noisy) | L-2d | published chi_sim | published chi_NISQ* |")
            lines.append("|---|---|---|---|---|---|---|---|")
            for r in self.chi_rows:
                lines.append(
                    "| " + " | ".join(fmt(r.get(k)) for k in (
                        "geometry", "d", "L", "chi_sim", "chi_noisy", "nchv_bound", "published_chi_sim", "published_chi_nisq"
                    )) + " |"
                )
        if self.game_rows:
            if lines:
                lines.append("")
            lines.append("| game | geometry | sigma (noiseless) | sigma (noisy) | classical value | published omega | published sigma_NISQ* |")
            lines.append("|---|---|---|---|---|---|---|")
            for r in self.game_rows:
                lines.append(
                    "| " + " | ".join(fmt(r.get(k)) for k in (
                        "kind", "geometry", "sigma_sim", "sigma_noisy", "classical_value", "published_omega", "published_sigma_nisq"
                    )) + " |"
                )
        if lines:
            lines.append("")
            lines.append("*" + published_reference()["note"])
        return "\n".join(lines) + ("\n" if lines else "")


def _family(name: str) -> str:
    if name.startswith("E_"):
        return "elliptic"
    if name.startswith("H_"):
        return "hyperbolic"
    return name


def _collect(paths) -> list[tuple[Path, dict]]:
    files = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        elif p.exists():
            files.append(p)
        else:
            raise ConfigurationError(f"{p} does not exist")
    out = []
    for f in files:
        try:
            data = json.loads(f.read_text())
        except json.JSONDecodeError:
            continue
        if isinstance(data, dict) and data.get("artifact") in ("rio-negro", "game"):
            out.append((f, data))
    return out


def build_report(paths) -> ReportBundle:
    """Merge rio-negro and game artifacts; published values are attached as labelled reference data."""
    bundle = ReportBundle()
    ref = published_reference()
    hashes: dict[str, str] = {}
    chi: dict[str, dict] = {}
    games: dict[tuple[str, str], dict] = {}
    for path, data in _collect(paths):
        bundle.sources.append(path.name)
        prov = data.get("provenance", {})
        name = data.get("geometry")
        gh = prov.get("geometry_hash")
        if name and gh:
            if hashes.setdefault(name, gh) != gh:
                raise ConfigurationError(f"artifacts disagree on the geometry {name!r}; refusing to merge")
        noiseless = data.get("noise", {}).get("p_depolarize", 0) == 0 and data.get("noise", {}).get("p_readout", 0) == 0
        if data["artifact"] == "rio-negro":
            rep = data.get("report")
            if rep is None:
                bundle.warnings.append(f"{path.name}: missing report block")
                continue
            entries = [(_family(rep["geometry"]), rep["L"], rep["d"], rep["chi"], 0)]
            for sub in data.get("subgeometries", []):
                entries.append((sub["family"], sub["L"], sub["d"], sub["best"], 1))
            for fam, L, d, value, derived in entries:
                row = chi.setdefault(fam, {"geometry": fam, "L": L, "d": d, "nchv_bound": L - 2 * d})
                col = "chi_sim" if noiseless else "chi_noisy"
                # dedicated runs take precedence over extracted best representatives
                if col not in row or row.get(col + "_derived", 1) > derived:
                    row[col] = value
                    row[col + "_derived"] = derived
        else:
            key = (data["kind"], _family(data["geometry"]))
            row = games.setdefault(key, {"kind": key[0], "geometry": key[1]})
            if data.get("strategy") == "quantum":
                row["sigma_sim" if noiseless else "sigma_noisy"] = data.get("rate")
            elif data.get("classical_value") is not None:
                row["classical_value"] = data["classical_value"]
            elif data.get("status") == "refused":
                row.setdefault("classical_value", "not computed")
            else:
                bundle.warnings.append(f"{path.name}: no usable rate")
    ref1 = {r["geometry"]: r for r in ref["table1"]}
    for fam in sorted(chi, key=lambda f: (FAMILY_ORDER.index(f) if f in FAMILY_ORDER else 99, f)):
        row = chi[fam]
        for k in [k for k in row if k.endswith("_derived")]:
            row.pop(k)
        if fam in ref1:
            row["published_chi_sim"] = ref1[fam]["chi_sim"]
            row["published_chi_nisq"] = ref1[fam]["chi_nisq"]
        if "chi_sim" not in row and "chi_noisy" not in row:
            bundle.warnings.append(f"{fam}: no chi values")
        bundle.chi_rows.append(row)
    ref2 = {(r["kind"], r["geometry"]): r for r in ref["table2"]}
    for key in sorted(games, key=lambda k: (GAME_ORDER.index(k) if k in GAME_ORDER else 99, k)):
        row = games[key]
        if key in ref2:
            row["published_omega"] = ref2[key]["omega"]
            row["published_sigma_nisq"] = ref2[key]["sigma_nisq"]
            cv = row.get("classical_value")
            if cv not in (None, "not computed") and Fraction(cv) > Fraction(ref2[key]["omega"]):
                bundle.warnings.append(f"{key}: classical value {cv} above the reference omega")
        bundle.game_rows.append(row)
    return bundle
