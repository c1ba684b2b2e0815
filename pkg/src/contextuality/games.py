"""Point-line (pl), line-line (ll) and four-player (llll) pseudotelepathy games.

A referee picks a question uniformly: a point and an incident line (pl),
two distinct intersecting lines (ll), or four distinct lines through a
common point (llll). Line players answer a +-1 triple whose product is the
line sign, ordered like the line's sorted points; a point player answers one
value. pl/ll are won when both values at the common point agree, llll when
the four values there multiply to +1.

Lines in a question are dealt to players in increasing line index; in pl
the point goes to player 0 and the line to player 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .degree import Assignment
from .geometry import ConfigurationError, IncidenceGeometry
from .pauli import PauliOperator
from .quantum import NoiseParams, ZERO_NOISE, bell_resource, embed, ghz_resource, sample_sequence

GAME_KINDS = ("pl", "ll", "llll")

# published classical (NCHV) winning probabilities
REFERENCE_CLASSICAL = {
    ("square", "pl"): Fraction(17, 18),
    ("doily", "pl"): Fraction(14, 15),
    ("square", "ll"): Fraction(8, 9),
    ("doily", "ll"): Fraction(13, 15),
    ("elliptic", "ll"): Fraction(13, 15),
    ("elliptic", "llll"): Fraction(11, 15),
}

# a question may be solved by enumerating at most this many tables unless long_running
ENUMERATION_CAP = 1 << 22


class StrategyIntractable(RuntimeError):
    """Exact classical optimisation is out of reach for this game."""

    def __init__(self, message: str, reference: Fraction | None = None):
        super().__init__(message)
        self.reference = reference


def geometry_family(geom: IncidenceGeometry) -> str:
    name = geom.name
    if name.startswith("E_"):
        return "elliptic"
    if name.startswith("H_"):
        return "hyperbolic"
    return name


def n_players(kind: str) -> int:
    return 4 if kind == "llll" else 2


@dataclass(frozen=True)
class Question:
    kind: str
    point: int  # point id shared by every part
    lines: tuple[int, ...]  # line indices in dealing order

    def parts(self) -> list[tuple[str, int]]:
        """What each player receives: ``("point", pid)`` or ``("line", index)``."""
        if self.kind == "pl":
            return [("point", self.point), ("line", self.lines[0])]
        return [("line", l) for l in self.lines]

    def describe(self, geom: IncidenceGeometry) -> str:
        out = []
        for what, v in self.parts():
            if what == "point":
                out.append(geom.label(v))
            else:
                out.append("{" + " ".join(geom.label(p) for p in geom.lines[v].points) + "}")
        return "|".join(out)


def _check_kind(kind: str):
    if kind not in GAME_KINDS:
        raise ConfigurationError(f"unknown game kind {kind!r}; choose from {GAME_KINDS}")


def enumerate_questions(geom: IncidenceGeometry, kind: str, ordered: bool = False) -> list[Question]:
    """All questions of a game in canonical order.

    With ``ordered`` the ll game also asks each pair in swapped dealing order.
    """
    _check_kind(kind)
    through = geom.lines_through
    out = []
    if kind == "llll" and any(len(t) != 5 for t in through):
        raise ConfigurationError(f"llll needs 5 lines through every point of {geom.name}")
    for j, pid in enumerate(geom.points):
        if kind == "pl":
            out.extend(Question("pl", pid, (l,)) for l in through[j])
        elif kind == "llll":
            out.extend(Question("llll", pid, c) for c in itertools.combinations(through[j], 4))
    if kind == "ll":
        pairs = []
        for j, pid in enumerate(geom.points):
            for a, b in itertools.combinations(through[j], 2):
                pairs.append((a, b, pid))
                if ordered:
                    pairs.append((b, a, pid))
        pairs.sort()
        out = [Question("ll", pid, (a, b)) for a, b, pid in pairs]
    return out


def valid_triples(sign: int) -> list[tuple[int, int, int]]:
    """The four +-1 triples with product ``sign``; option ``o`` fixes the first two bits."""
    out = []
    for o in range(4):
        a, b = 1 - 2 * (o & 1), 1 - 2 * ((o >> 1) & 1)
        out.append((a, b, sign * a * b))
    return out


@dataclass
class StrategyTable:
    """Deterministic answers of one player."""

    lines: dict[int, tuple[int, int, int]] = field(default_factory=dict)
    points: dict[int, int] = field(default_factory=dict)

    def check(self, geom: IncidenceGeometry) -> None:
        for li, triple in self.lines.items():
            if int(np.prod(triple)) != geom.lines[li].sign or any(v not in (1, -1) for v in triple):
                raise ValueError(f"answer {triple} breaks line {li}")

    def answer(self, what: str, key: int):
        return self.points[key] if what == "point" else self.lines[key]


@dataclass
class GameResult:
    kind: str
    geometry: str
    strategy: str
    rounds: int
    wins: int
    valid_rounds: int | None = None
    transcript: list = field(default_factory=list, repr=False)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.wins, self.rounds) if self.rounds else Fraction(0)

    @property
    def valid_rate(self) -> float | None:
        if self.valid_rounds is None or not self.rounds:
            return None
        return self.valid_rounds / self.rounds

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "geometry": self.geometry,
            "strategy": self.strategy,
            "rounds": self.rounds,
            "wins": self.wins,
            "rate": float(self.rate),
            "rate_fraction": str(self.rate),
            "valid_answer_rate": self.valid_rate,
        }


def _value_at(geom: IncidenceGeometry, what: str, key: int, answer, point: int) -> int:
    if what == "point":
        return answer
    return answer[geom.lines[key].points.index(point)]


def wins_question(geom: IncidenceGeometry, q: Question, answers) -> bool:
    vals = [_value_at(geom, what, key, ans, q.point) for (what, key), ans in zip(q.parts(), answers)]
    if q.kind == "llll":
        return int(np.prod(vals)) == 1
    return vals[0] == vals[1]


# ---------------------------------------------------------------- classical


def classical_from_assignment(geom: IncidenceGeometry, a: Assignment) -> StrategyTable:
    """Answers read off a valuation; on a broken line the highest-indexed point is flipped."""
    if len(a) != geom.n_points:
        raise ValueError("assignment length does not match the geometry")
    vals = a.values
    table = StrategyTable(points={p: int(vals[j]) for j, p in enumerate(geom.points)})
    for li, line in enumerate(geom.lines):
        triple = [int(vals[geom.point_index(p)]) for p in line.points]
        if int(np.prod(triple)) != line.sign:
            triple[2] = -triple[2]  # points are sorted, so index 2 is the highest
        table.lines[li] = tuple(triple)
    return table


def play_classical(
    geom: IncidenceGeometry,
    kind: str,
    strategies,
    rounds: int | None = None,
    seed: int = 0,
    questions=None,
    transcript: bool = False,
) -> GameResult:
    """Play deterministic tables, exhaustively over every question by default."""
    questions = enumerate_questions(geom, kind) if questions is None else questions
    if isinstance(strategies, StrategyTable):
        strategies = [strategies] * n_players(kind)
    for s in strategies:
        s.check(geom)
    if rounds is None:
        schedule = list(range(len(questions)))
    else:
        schedule = np.random.default_rng(seed).integers(len(questions), size=rounds).tolist()
    wins = 0
    rows = []
    for r, qi in enumerate(schedule):
        q = questions[qi]
        answers = [s.answer(what, key) for s, (what, key) in zip(strategies, q.parts())]
        won = wins_question(geom, q, answers)
        wins += won
        if transcript:
            rows.append((r, q.describe(geom), answers, won))
    return GameResult(kind, geom.name, "classical", len(schedule), wins, len(schedule), rows)


class _Tables:
    """Vectorised view of a game under one shared answer table.

    Items are the question parts (points and lines) that can be asked;
    each has 2 (point) or 4 (line) answer options. For every question the
    arrays record which item each player receives and the value each option
    puts on the question point.
    """

    def __init__(self, geom: IncidenceGeometry, questions):
        self.geom = geom
        self.questions = questions
        self.items: list[tuple[str, int]] = []
        index: dict[tuple[str, int], int] = {}
        self.slot = []
        self.value = []
        for q in questions:
            slots, values = [], []
            for what, key in q.parts():
                if (what, key) not in index:
                    index[(what, key)] = len(self.items)
                    self.items.append((what, key))
                slots.append(index[(what, key)])
                values.append(self._option_values(what, key, q.point))
            self.slot.append(slots)
            self.value.append(values)
        self.players = len(questions[0].parts())
        self.options = np.array([2 if w == "point" else 4 for w, _ in self.items])

    def _option_values(self, what, key, point):
        if what == "point":
            return np.array([1, -1])
        line = self.geom.lines[key]
        pos = line.points.index(point)
        return np.array([t[pos] for t in valid_triples(line.sign)])

    def table(self, choice) -> StrategyTable:
        t = StrategyTable()
        for (what, key), o in zip(self.items, choice):
            if what == "point":
                t.points[key] = (1, -1)[int(o)]
            else:
                t.lines[key] = valid_triples(self.geom.lines[key].sign)[int(o)]
        return t

    def wins(self, choice: np.ndarray) -> np.ndarray:
        """Wins of a batch of tables, ``choice`` of shape (batch, n_items)."""
        wins = np.zeros(choice.shape[0], dtype=np.int64)
        for slots, values in zip(self.slot, self.value):
            vals = [values[k][choice[:, slots[k]]] for k in range(self.players)]
            if self.players == 4:
                wins += (vals[0] * vals[1] * vals[2] * vals[3]) == 1
            else:
                wins += vals[0] == vals[1]
        return wins

    def responders(self) -> list[int]:
        """Items no two of which share a question, chosen to shrink the enumeration most."""
        import networkx as nx

        # complement of the co-occurrence graph: cliques there are independent sets here
        g = nx.complete_graph(len(self.items))
        for slots in self.slot:
            for a, b in itertools.combinations(set(slots), 2):
                if g.has_edge(a, b):
                    g.remove_edge(a, b)
        for i, opts in enumerate(self.options):
            g.nodes[i]["w"] = int(opts).bit_length() - 1
        clique, _ = nx.max_weight_clique(g, weight="w")
        return sorted(clique)


def _exact_shared(tab: _Tables, long_running: bool, chunk: int = 1 << 14):
    """Enumerate every non-responder item, best-respond each responder.

    A responder item never shares a question with another responder, so
    with the rest of the table fixed its best answer is chosen
    independently from the questions that contain it.
    """
    resp = tab.responders()
    rset = set(resp)
    enum = [i for i in range(len(tab.items)) if i not in rset]
    radices = [int(tab.options[i]) for i in enum]
    total = int(np.prod(radices, dtype=object))
    cap = ENUMERATION_CAP if not long_running else ENUMERATION_CAP << 12
    if total > cap:
        raise StrategyIntractable(f"{total} partial tables to enumerate exceed the cap {cap}")
    pos = {item: k for k, item in enumerate(enum)}
    rpos = {item: k for k, item in enumerate(resp)}
    best_wins, best_choice = -1, None
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        choice = np.zeros((idx.size, len(tab.items)), dtype=np.int64)
        rem = idx.copy()
        for item, r in zip(enum, radices):
            choice[:, item] = rem % r
            rem //= r
        base = np.zeros(idx.size, dtype=np.int64)
        score = [np.zeros((idx.size, tab.options[i]), dtype=np.int64) for i in resp]
        for slots, values in zip(tab.slot, tab.value):
            mine = [k for k in range(tab.players) if slots[k] in rset]
            fixed = [values[k][choice[:, slots[k]]] for k in range(tab.players) if slots[k] not in rset]
            if not mine:
                if tab.players == 4:
                    base += np.prod(fixed, axis=0) == 1
                else:
                    base += fixed[0] == fixed[1]
                continue
            k = mine[0]  # at most one responder per question
            rest = np.prod(fixed, axis=0) if tab.players == 4 else fixed[0]
            if tab.players == 4:
                score[rpos[slots[k]]] += (rest[:, None] * values[k][None, :]) == 1
            else:
                score[rpos[slots[k]]] += rest[:, None] == values[k][None, :]
        wins = base + sum((s.max(axis=1) for s in score), np.zeros(idx.size, dtype=np.int64))
        i = int(np.argmax(wins))
        if wins[i] > best_wins:
            best_wins = int(wins[i])
            best_choice = choice[i].copy()
            for item, s in zip(resp, score):
                best_choice[item] = int(np.argmax(s[i]))
    return best_wins, best_choice


def optimal_classical(
    geom: IncidenceGeometry, kind: str, long_running: bool = False, ordered: bool = False
) -> tuple[Fraction, StrategyTable]:
    """Exact value of the best deterministic shared answer table.

    Every player answers from the same table (one triple per line, one value
    per point), i.e. a noncontextual assignment of answers to contexts.
    Items that never meet in a question are best-responded, the rest are
    enumerated; the search refuses when that enumeration is too large.
    """
    _check_kind(kind)
    reference = REFERENCE_CLASSICAL.get((geometry_family(geom), kind))
    if kind == "llll":
        raise StrategyIntractable("the four-player classical value is not computed exactly", reference)
    questions = enumerate_questions(geom, kind, ordered=ordered)
    tab = _Tables(geom, questions)
    try:
        wins, choice = _exact_shared(tab, long_running)
    except StrategyIntractable as exc:
        raise StrategyIntractable(str(exc), reference) from None
    table = tab.table(choice)
    assert int(tab.wins(choice[None, :])[0]) == wins
    return Fraction(wins, len(questions)), table


def random_strategy_search(
    geom: IncidenceGeometry, kind: str, samples: int = 10**6, seed: int = 0, batch: int = 20_000
) -> Fraction:
    """Best value among uniformly random shared answer tables."""
    tab = _Tables(geom, enumerate_questions(geom, kind))
    rng = np.random.default_rng(seed)
    best = done = 0
    while done < samples:
        b = min(batch, samples - done)
        choice = rng.integers(0, tab.options, size=(b, len(tab.items)))
        best = max(best, int(tab.wins(choice).max()))
        done += b
    return Fraction(best, len(tab.questions))


def local_search(
    geom: IncidenceGeometry, kind: str, restarts: int = 100, sweeps: int = 50, seed: int = 0
) -> tuple[Fraction, StrategyTable]:
    """Steepest single-item improvement of shared tables from random starts."""
    tab = _Tables(geom, enumerate_questions(geom, kind))
    rng = np.random.default_rng(seed)
    n = len(tab.items)
    best, best_choice = -1, None
    for _ in range(restarts):
        choice = rng.integers(0, tab.options)
        current = int(tab.wins(choice[None, :])[0])
        for _ in range(sweeps):
            # every single-item change at once
            cands = np.repeat(choice[None, :], int(tab.options.sum()), axis=0)
            row = 0
            for i in range(n):
                for o in range(tab.options[i]):
                    cands[row, i] = o
                    row += 1
            w = tab.wins(cands)
            j = int(np.argmax(w))
            if w[j] <= current:
                break
            current, choice = int(w[j]), cands[j]
        if current > best:
            best, best_choice = current, choice.copy()
    return Fraction(best, len(tab.questions)), tab.table(best_choice)


# ---------------------------------------------------------------- quantum


def _party_sign(op: PauliOperator, party: int, parties: int) -> int:
    """Sign party ``party`` attaches to its outcome of ``op``.

    On GHZ blocks shared by ``parties`` players, ``<Y ... Y>`` is
    ``(-1)**(parties // 2)`` while X and Z give +1. The last party absorbs
    the sign so that all parties' values agree (two players) or multiply
    to +1 (four players).
    """
    if party != parties - 1 or (parties // 2) % 2 == 0:
        return 1
    return -1 if op.y_count % 2 else 1


def play_quantum(
    geom: IncidenceGeometry,
    kind: str,
    noise: NoiseParams = ZERO_NOISE,
    rounds: int | None = None,
    seed: int = 0,
    transcript: bool = False,
) -> GameResult:
    """Players measure their observables on shared GHZ blocks.

    ``rounds=None`` plays every question exactly once (exhaustive);
    otherwise questions are drawn uniformly. Noise is injected on the
    measuring player's qubits before each observable, then readout flips
    are applied. Noisy answers are kept as measured; ``valid_rounds``
    counts rounds in which every line answer respected its sign.
    """
    questions = enumerate_questions(geom, kind)
    parties = n_players(kind)
    n = geom.n_qubits
    resource = bell_resource(n) if parties == 2 else ghz_resource(n, parties)
    total = n * parties
    if resource.n_qubits != total:
        raise ConfigurationError("resource size mismatch")
    if rounds is None:
        schedule = np.arange(len(questions))
    else:
        schedule = np.random.default_rng(seed).integers(len(questions), size=rounds)
    answers_of = {}
    for qi in np.unique(schedule):
        count = int((schedule == qi).sum())
        q = questions[qi]
        ops, owner, signs = [], [], []
        for k, (what, key) in enumerate(q.parts()):
            pids = (key,) if what == "point" else geom.lines[key].points
            for pid in pids:
                op = PauliOperator.from_id(pid, n)
                ops.append(embed(op, k * n, total))
                owner.append(k)
                signs.append(_party_sign(op, k, parties))
        rng = np.random.default_rng((seed, int(qi)))
        psi = np.broadcast_to(resource.amplitudes, (count, resource.amplitudes.size)).copy()
        outs = np.empty((count, len(ops)), dtype=np.int64)
        for j, op in enumerate(ops):
            qubits = range(owner[j] * n, owner[j] * n + n)
            o, psi = sample_sequence(psi, [op], noise, rng, noisy_qubits=qubits)
            outs[:, j] = o[:, 0] * signs[j]
        answers_of[int(qi)] = (outs, owner)
    seen = {int(qi): 0 for qi in answers_of}
    wins = valid = 0
    rows = []
    for r, qi in enumerate(schedule.tolist()):
        q = questions[qi]
        outs, owner = answers_of[qi]
        row = outs[seen[qi]]
        seen[qi] += 1
        answers = []
        ok = True
        for k, (what, key) in enumerate(q.parts()):
            vals = tuple(int(v) for v, o in zip(row, owner) if o == k)
            if what == "point":
                answers.append(vals[0])
            else:
                answers.append(vals)
                ok &= int(np.prod(vals)) == geom.lines[key].sign
        won = wins_question(geom, q, answers)
        wins += won
        valid += ok
        if transcript:
            rows.append((r, q.describe(geom), answers, won))
    return GameResult(kind, geom.name, "quantum", len(schedule), wins, valid, rows)
