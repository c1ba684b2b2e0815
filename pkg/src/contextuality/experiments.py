"""Rio Negro inequality runs.

Every context (line) is estimated from its own shots as the mean product of
the three measured outcomes; chi sums the positive-line means and subtracts
the negative-line means. Noncontextual models obey chi <= L - 2d, quantum
mechanics chi <= L.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .degree import SolverConfig, incidence_rank, rank_reduced_degree
from .geometry import IncidenceGeometry, subgeometry_line_indices
from .pauli import PauliOperator
from .quantum import NoiseParams, ZERO_NOISE, StateVector, context_products

DEFAULT_SHOTS = 10_000

# degrees used when exact computation is not run
REFERENCE_DEGREES = {"W(5,2)": 63, "square": 1, "doily": 3, "elliptic": 9, "hyperbolic": 21}


class InvariantViolation(RuntimeError):
    """A simulated result is impossible under quantum mechanics."""


class ConsistencyError(ValueError):
    """Subgeometry lines are missing from a run."""


@dataclass(frozen=True)
class ContextEstimate:
    line: int
    shots: int
    mean_product: float
    stderr: float


@dataclass(frozen=True)
class ChiReport:
    geometry: str
    chi: float
    stderr: float
    L: int
    d: int
    d_source: str
    verdict: str
    sigma: float

    @property
    def nchv_bound(self) -> int:
        return self.L - 2 * self.d

    @property
    def qm_bound(self) -> int:
        return self.L

    @property
    def violated(self) -> bool:
        return self.verdict == "violates_nchv"

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "chi": self.chi,
            "stderr": self.stderr,
            "L": self.L,
            "d": self.d,
            "d_source": self.d_source,
            "nchv_bound": self.nchv_bound,
            "qm_bound": self.qm_bound,
            "violated": self.violated,
            "sigma": _finite(self.sigma),
            "verdict": self.verdict,
        }


def _finite(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def geometry_family(geom: IncidenceGeometry) -> str:
    if geom.name.startswith("E_"):
        return "elliptic"
    if geom.name.startswith("H_"):
        return "hyperbolic"
    return geom.name


def degree_for(geom: IncidenceGeometry, max_rank: int = 24) -> tuple[int, str]:
    """Exact degree when the coset search is cheap, else the reference value."""
    if geom.n_lines == 0:
        return 0, "exact"
    if incidence_rank(geom) <= max_rank:
        return rank_reduced_degree(geom, SolverConfig("rank_reduced")).degree, "exact"
    family = geometry_family(geom)
    if family not in REFERENCE_DEGREES:
        raise KeyError(f"no reference degree for {geom.name}; pass d explicitly")
    return REFERENCE_DEGREES[family], "reference"


def bound_check(chi: float, L: int, d: int, stderr: float = 0.0) -> tuple[str, float]:
    """Classify ``chi`` against the NCHV bound ``L - 2d`` and the quantum bound ``L``.

    Returns ``(verdict, sigma)`` where sigma is the distance above the NCHV
    bound in standard errors.
    """
    if chi > L + 5 * stderr + 1e-9:
        raise InvariantViolation(f"chi = {chi} exceeds the quantum bound {L} by more than 5 standard errors")
    nchv = L - 2 * d
    diff = chi - nchv
    if stderr > 0:
        sigma = diff / stderr
    else:
        sigma = math.copysign(math.inf, diff) if diff else 0.0
    return ("violates_nchv" if diff > 0 else "consistent_with_nchv"), sigma


def chi_from_estimates(geom: IncidenceGeometry, estimates, lines=None) -> tuple[float, float]:
    """chi and its standard error over ``lines`` (all lines by default)."""
    by_line = {e.line: e for e in estimates}
    lines = range(geom.n_lines) if lines is None else lines
    chi = var = 0.0
    for i in lines:
        if i not in by_line:
            raise ConsistencyError(f"line {i} of {geom.name} was not estimated")
        e = by_line[i]
        chi += geom.lines[i].sign * e.mean_product
        var += e.stderr**2
    return chi, math.sqrt(var)


@dataclass
class RioNegroRun:
    geometry: IncidenceGeometry
    estimates: list[ContextEstimate]
    report: ChiReport
    noise: NoiseParams
    shots: int
    seed: int


def rio_negro_run(
    geom: IncidenceGeometry,
    shots: int = DEFAULT_SHOTS,
    noise: NoiseParams = ZERO_NOISE,
    state: StateVector | str = "zeros",
    seed: int = 0,
    d: int | None = None,
) -> RioNegroRun:
    """Estimate every context expectation and form chi.

    ``state`` is a ``StateVector``, ``"zeros"`` or ``"random"`` (one Haar
    random state shared by all contexts). Each context draws its shots from
    its own child seed of ``seed``.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    streams = np.random.SeedSequence(seed).spawn(geom.n_lines + 1)
    n = geom.n_qubits
    if isinstance(state, str):
        if state == "zeros":
            state = StateVector.zeros(n)
        elif state == "random":
            state = StateVector.random(n, np.random.default_rng(streams[0]))
        else:
            raise ValueError(f"unknown state {state!r}")
    estimates = []
    for i, line in enumerate(geom.lines):
        ops = [PauliOperator.from_id(p, n) for p in line.points]
        prods = context_products(state, ops, noise, shots, np.random.default_rng(streams[i + 1]))
        mean = float(prods.mean())
        se = float(prods.std(ddof=1) / math.sqrt(shots)) if shots > 1 else 0.0
        estimates.append(ContextEstimate(i, shots, mean, se))
    if d is None:
        d, source = degree_for(geom)
    else:
        source = "given"
    chi, se = chi_from_estimates(geom, estimates)
    verdict, sigma = bound_check(chi, geom.n_lines, d, se)
    report = ChiReport(geom.name, chi, se, geom.n_lines, d, source, verdict, sigma)
    return RioNegroRun(geom, estimates, report, noise, shots, seed)


@dataclass
class HistogramData:
    family: str
    L: int
    d: int
    chis: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    @property
    def nchv_bound(self) -> int:
        return self.L - 2 * self.d

    @property
    def best(self) -> float:
        return float(self.chis.max())

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.chis))

    @property
    def worst(self) -> float:
        return float(self.chis.min())

    @property
    def mean(self) -> float:
        return float(self.chis.mean())

    @property
    def violation_fraction(self) -> float:
        return float((self.chis > self.nchv_bound).mean())

    def summary(self) -> dict:
        return {
            "family": self.family,
            "count": int(self.chis.size),
            "L": self.L,
            "d": self.d,
            "nchv_bound": self.nchv_bound,
            "best": self.best,
            "best_index": self.best_index,
            "worst": self.worst,
            "mean": self.mean,
            "violation_fraction": self.violation_fraction,
        }


def histogram_edges(L: int, d: int, bins: int = 20) -> np.ndarray:
    return np.linspace(L - 2 * d - 1, L, bins + 1)


def extract_subgeometry_chi(
    run: RioNegroRun, point_sets, family: str, d: int, bins: int = 20
) -> HistogramData:
    """chi of every embedded subgeometry from the contexts already estimated.

    No re-measurement: each subgeometry sums the run's means over its own lines.
    """
    geom = run.geometry
    chis, L = [], None
    for pts in point_sets:
        lines = subgeometry_line_indices(geom, pts)
        if L is None:
            L = len(lines)
        elif len(lines) != L:
            raise ConsistencyError(f"{family} copies have differing line counts")
        chis.append(chi_from_estimates(geom, run.estimates, lines)[0])
    chis = np.array(chis)
    edges = histogram_edges(L, d, bins)
    counts, _ = np.histogram(np.clip(chis, edges[0], edges[-1]), bins=edges)
    return HistogramData(family, L, d, chis, edges, counts)


def histogram_svg(hist: HistogramData, width: int = 480, height: int = 240) -> str:
    """Minimal SVG bar chart with the NCHV bound as a red vertical rule."""
    pad = 30
    lo, hi = float(hist.edges[0]), float(hist.edges[-1])
    top = max(1, int(hist.counts.max()))

    def xpos(v):
        return pad + (v - lo) / (hi - lo) * (width - 2 * pad)

    def f(v):
        return f"{v:.6f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{hist.family}: chi over {hist.chis.size} copies</title>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
    ]
    for i, c in enumerate(hist.counts):
        x0, x1 = xpos(hist.edges[i]), xpos(hist.edges[i + 1])
        h = (height - 2 * pad) * c / top
        parts.append(
            f'<rect x="{f(x0)}" y="{f(height - pad - h)}" width="{f(x1 - x0)}" height="{f(h)}" '
            'fill="steelblue" stroke="white"/>'
        )
    xb = xpos(hist.nchv_bound)
    parts.append(f'<line x1="{f(xb)}" y1="{pad}" x2="{f(xb)}" y2="{height - pad}" stroke="red" stroke-width="2"/>')
    parts.append(f'<text x="{f(xpos(lo))}" y="{height - 8}" font-size="10">{f(lo)}</text>')
    parts.append(f'<text x="{f(xpos(hi) - 40)}" y="{height - 8}" font-size="10">{f(hi)}</text>')
    parts.append(f'<text x="{f(xb + 3)}" y="{pad + 10}" font-size="10" fill="red">L-2d={hist.nchv_bound}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
