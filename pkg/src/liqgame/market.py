"""Market-composition analysis: prior-weighted volume tables and aggregates.

Two modes. Constructive mode weights caller-supplied per-type-pair payoff
tables by the type priors on each side. As-published mode loads the bundled
composition tables verbatim; several of their entries are not derivable
from any single weighting rule, so they ship as data, and the aggregates
(quadrant sums, system total, hit ratio) are computed from the table.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Optional, Sequence

from .bayes import ConditionalGame
from .core import LiquidityGameError
from .fixtures import fixture_path

PUBLISHED_TABLES = {
    "final_4x4": "market_final_4x4.csv",
    "intermediate_2x4": "market_intermediate_2x4.csv",
}

Label = tuple[Optional[str], str]


class MissingTypePairMatrix(LiquidityGameError):
    pass


class UnknownTable(LiquidityGameError):
    pass


class NotTwoTypes(LiquidityGameError):
    pass


def round1(value: float) -> float:
    """Half-up rounding to one decimal, the precision used at serialization."""
    return float(Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _fmt1(value: float) -> str:
    quantized = Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)
    text = str(quantized)
    return text[:-2] if text.endswith(".0") else text


def label_text(label: Label) -> str:
    kind, strategy = label
    return strategy if kind is None else f"{kind}+{strategy}"


def parse_label(text: str) -> Label:
    if "+" in text:
        kind, strategy = text.split("+", 1)
        return (kind, strategy)
    return (None, text)


@dataclass(frozen=True)
class CompositionMatrix:
    """Real-valued bimatrix whose rows and columns are (type, strategy) pairs."""

    row_labels: tuple[Label, ...]
    col_labels: tuple[Label, ...]
    entries: tuple[tuple[tuple[float, float], ...], ...]
    prior_i: Optional[tuple[float, ...]] = None
    prior_j: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if len(self.entries) != len(self.row_labels):
            raise ValueError("row count does not match row_labels")
        for row in self.entries:
            if len(row) != len(self.col_labels):
                raise ValueError("column count does not match col_labels")

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["row_label", "col_label", "u_i", "u_j"])
        for label_r, row in zip(self.row_labels, self.entries):
            for label_c, (u, v) in zip(self.col_labels, row):
                writer.writerow([label_text(label_r), label_text(label_c), _fmt1(u), _fmt1(v)])
        return out.getvalue()

    def cells_csv(self) -> str:
        """Plot-ready long format: one line per cell with the summed volume."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["row_label", "col_label", "volume"])
        for label_r, row in zip(self.row_labels, self.entries):
            for label_c, (u, v) in zip(self.col_labels, row):
                writer.writerow([label_text(label_r), label_text(label_c), _fmt1(u + v)])
        return out.getvalue()


def composition_from_csv(doc: str) -> CompositionMatrix:
    """Parse the long-format CSV written by ``CompositionMatrix.to_csv``."""
    reader = csv.reader(io.StringIO(doc))
    header = next(reader, None)
    if header != ["row_label", "col_label", "u_i", "u_j"]:
        raise ValueError("expected header row_label,col_label,u_i,u_j")
    row_labels: list[Label] = []
    col_labels: list[Label] = []
    cells: dict[tuple[Label, Label], tuple[float, float]] = {}
    for record in reader:
        if not record:
            continue
        label_r = parse_label(record[0])
        label_c = parse_label(record[1])
        if label_r not in row_labels:
            row_labels.append(label_r)
        if label_c not in col_labels:
            col_labels.append(label_c)
        cells[(label_r, label_c)] = (float(record[2]), float(record[3]))
    entries = []
    for label_r in row_labels:
        row = []
        for label_c in col_labels:
            if (label_r, label_c) not in cells:
                raise ValueError(f"missing cell {label_text(label_r)},{label_text(label_c)}")
            row.append(cells[(label_r, label_c)])
        entries.append(tuple(row))
    return CompositionMatrix(tuple(row_labels), tuple(col_labels), tuple(entries))


def load_published_matrix(source: str) -> CompositionMatrix:
    """One of the bundled tables, exactly as printed (1-decimal values)."""
    if source not in PUBLISHED_TABLES:
        raise UnknownTable(
            f"unknown table {source!r}, expected one of {sorted(PUBLISHED_TABLES)}"
        )
    doc = fixture_path(PUBLISHED_TABLES[source]).read_text()
    matrix = composition_from_csv(doc)
    return CompositionMatrix(
        matrix.row_labels,
        matrix.col_labels,
        matrix.entries,
        prior_i=(0.35, 0.65),
        prior_j=(0.35, 0.65),
    )


def weight_by_priors(
    types: Sequence[str],
    strategies: Sequence[str],
    matrices: Mapping[tuple[str, str], Sequence[Sequence[tuple[float, float]]]],
    prior_i: Sequence[float],
    prior_j: Sequence[float],
) -> CompositionMatrix:
    """Expected-volume table: each cell is the type-pair payoff scaled by
    the product of the two type weights.

    ``matrices`` must supply a bimatrix for every (row-type, col-type)
    pair, indexed [row strategy][col strategy]. Weights are taken as given
    (callers normally pass probabilities summing to 1); the weighting is
    bilinear in them.
    """
    if len(prior_i) != len(types) or len(prior_j) != len(types):
        raise ValueError("prior length must match number of types")
    if any(w < 0 for w in prior_i) or any(w < 0 for w in prior_j):
        raise ValueError("priors must be non-negative")
    for t_i in types:
        for t_j in types:
            if (t_i, t_j) not in matrices:
                raise MissingTypePairMatrix(f"no matrix for type pair ({t_i}, {t_j})")
    row_labels = tuple((t, s) for t in types for s in strategies)
    col_labels = row_labels
    entries = []
    for t_i, w_i in zip(types, prior_i):
        for s_idx, _ in enumerate(strategies):
            row = []
            for t_j, w_j in zip(types, prior_j):
                grid = matrices[(t_i, t_j)]
                for c_idx, _ in enumerate(strategies):
                    u, v = grid[s_idx][c_idx]
                    row.append((w_i * w_j * u, w_i * w_j * v))
            entries.append(tuple(row))
    return CompositionMatrix(
        row_labels,
        col_labels,
        tuple(entries),
        prior_i=tuple(float(w) for w in prior_i),
        prior_j=tuple(float(w) for w in prior_j),
    )


def pairwise_base_from_conditional(
    game: ConditionalGame,
) -> dict[tuple[str, str], tuple[tuple[tuple[float, float], ...], ...]]:
    """Type-pair tables built from a per-counterparty-type game: the
    counterparty's type selects the table, whatever the row player's type."""
    return {
        (t_i, t_j): game.matrices[t_j] for t_i in game.types for t_j in game.types
    }


@dataclass(frozen=True)
class QuadrantReport:
    """Volume sums per (row-type, col-type) quadrant, in table order."""

    quadrants: Mapping[tuple[str, str], float]
    system_total: float
    hit_ratio: float

    def to_jsonable(self) -> dict:
        return {
            "quadrants": {
                f"{rt},{ct}": round1(total) for (rt, ct), total in self.quadrants.items()
            },
            "system_total": round1(self.system_total),
            "hit_ratio": self.hit_ratio,
        }


def quadrant_analysis(matrix: CompositionMatrix) -> QuadrantReport:
    """Sum both payoff components per type quadrant; volume is the summed
    pair because only that convention reconciles the published totals."""
    row_types = []
    for kind, _ in matrix.row_labels:
        if kind is None:
            raise NotTwoTypes("row labels carry no type component")
        if kind not in row_types:
            row_types.append(kind)
    col_types = []
    for kind, _ in matrix.col_labels:
        if kind is None:
            raise NotTwoTypes("column labels carry no type component")
        if kind not in col_types:
            col_types.append(kind)
    if len(row_types) != 2 or len(col_types) != 2:
        raise NotTwoTypes(
            f"expected exactly two types per side, got {row_types} x {col_types}"
        )
    quadrants = {(rt, ct): 0.0 for rt in row_types for ct in col_types}
    nonzero = 0
    total_cells = 0
    for (row_kind, _), row in zip(matrix.row_labels, matrix.entries):
        for (col_kind, _), (u, v) in zip(matrix.col_labels, row):
            quadrants[(row_kind, col_kind)] += u + v
            total_cells += 1
            if u != 0.0 or v != 0.0:
                nonzero += 1
    return QuadrantReport(
        quadrants=quadrants,
        system_total=sum(quadrants.values()),
        hit_ratio=nonzero / total_cells,
    )


def best_quadrant(report: QuadrantReport) -> tuple[str, str]:
    """Highest-volume quadrant; ties go to the earliest in table order."""
    if not report.quadrants:
        raise ValueError("report has no quadrants")
    best_key = None
    best_total = None
    for key, total in report.quadrants.items():
        if best_total is None or total > best_total:
            best_key, best_total = key, total
    return best_key
