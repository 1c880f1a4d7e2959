"""Two-type incomplete-information layer.

The initiating dealer does not know whether the counterparty is a large or a
small bank, only a prior. Each type has its own payoff table; the solver
finds the counterparty's per-type dominant strategy and the prior weight at
which the initiator is indifferent between its two strategies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from .core import LiquidityGameError
from .fixtures import fixture_path

EQUALITY_TOLERANCE = 1e-12

Bimatrix = tuple[tuple[tuple[float, float], ...], ...]


class UnknownLabel(LiquidityGameError):
    pass


class NoDependenceOnPrior(LiquidityGameError):
    pass


@dataclass(frozen=True)
class TypeSpace:
    """Ordered type labels and a prior over them."""

    types: tuple[str, ...]
    prior: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.types) != len(self.prior):
            raise ValueError("prior length must match number of types")
        if any(p < 0 for p in self.prior):
            raise ValueError("prior entries must be non-negative")
        if abs(sum(self.prior) - 1.0) > EQUALITY_TOLERANCE:
            raise ValueError(f"prior must sum to 1, got {sum(self.prior)}")


@dataclass(frozen=True)
class ConditionalGame:
    """One real-valued bimatrix per counterparty type.

    Rows are the initiator's strategies, columns the counterparty's;
    entries are (initiator payoff, counterparty payoff). Payoffs may be
    asymmetric here: the tables are stylised levels, not transfer counts.
    """

    types: tuple[str, ...]
    strategies_i: tuple[str, ...]
    strategies_j: tuple[str, ...]
    matrices: Mapping[str, Bimatrix]

    def __post_init__(self) -> None:
        for t in self.types:
            if t not in self.matrices:
                raise ValueError(f"missing matrix for type {t!r}")
            grid = self.matrices[t]
            if len(grid) != len(self.strategies_i) or any(
                len(row) != len(self.strategies_j) for row in grid
            ):
                raise ValueError(f"matrix for type {t!r} has wrong dimensions")

    def payoff(self, type_label: str, strategy_i: str, strategy_j: str) -> tuple[float, float]:
        if type_label not in self.matrices:
            raise UnknownLabel(f"unknown type {type_label!r}")
        try:
            r = self.strategies_i.index(strategy_i)
        except ValueError:
            raise UnknownLabel(f"unknown row strategy {strategy_i!r}") from None
        try:
            c = self.strategies_j.index(strategy_j)
        except ValueError:
            raise UnknownLabel(f"unknown column strategy {strategy_j!r}") from None
        return self.matrices[type_label][r][c]

    @classmethod
    def from_jsonable(cls, raw: dict) -> "ConditionalGame":
        types = tuple(raw["types"])
        if "strategies" in raw:
            strategies_i = strategies_j = tuple(raw["strategies"])
        else:
            strategies_i = tuple(raw["strategies_i"])
            strategies_j = tuple(raw["strategies_j"])
        matrices = {
            t: tuple(tuple((float(u), float(v)) for u, v in row) for row in grid)
            for t, grid in raw["matrices"].items()
        }
        return cls(types, strategies_i, strategies_j, matrices)

    @classmethod
    def from_json(cls, doc: str) -> "ConditionalGame":
        return cls.from_jsonable(json.loads(doc))


def load_game_document(path: Path) -> tuple[ConditionalGame, TypeSpace]:
    """Read a game file carrying both the matrices and the prior."""
    raw = json.loads(path.read_text())
    game = ConditionalGame.from_jsonable(raw)
    space = TypeSpace(types=game.types, prior=tuple(float(p) for p in raw["prior"]))
    return game, space


def load_bundled_game() -> tuple[ConditionalGame, TypeSpace]:
    """The large-bank / small-bank game shipped with the package."""
    return load_game_document(fixture_path("bayes_large_small.json"))


@dataclass(frozen=True)
class BayesianSolution:
    """Threshold summary: what the counterparty plays per type, and which
    initiator strategy is preferred on each side of the prior threshold."""

    per_type_strategy_j: Mapping[str, str]
    threshold_p: float
    strategy_i_above: str
    strategy_i_below: str
    interior: bool

    def to_jsonable(self) -> dict:
        return {
            "responses": dict(self.per_type_strategy_j),
            "threshold_p": self.threshold_p,
            "strategy_above": self.strategy_i_above,
            "strategy_below": self.strategy_i_below,
            "interior": self.interior,
        }


def dominant_strategy_per_type(
    game: ConditionalGame, type_index: int
) -> Optional[tuple[str, str]]:
    """The counterparty strategy weakly dominating all others in one type's
    table, with its strictness, or None when no strategy dominates.

    Ties are resolved in favour of the earlier label in ``strategies_j``.
    """
    if not 0 <= type_index < len(game.types):
        raise ValueError(f"type index {type_index} out of range")
    grid = game.matrices[game.types[type_index]]
    n_i = len(game.strategies_i)
    columns = [
        [grid[r][c][1] for r in range(n_i)] for c in range(len(game.strategies_j))
    ]
    for c, col in enumerate(columns):
        others = [col2 for c2, col2 in enumerate(columns) if c2 != c]
        if all(all(v >= w for v, w in zip(col, other)) for other in others):
            strict = all(all(v > w for v, w in zip(col, other)) for other in others)
            return (game.strategies_j[c], "strict" if strict else "weak")
    return None


def expected_payoff(
    game: ConditionalGame,
    space: TypeSpace,
    strategy_i: str,
    response_j: Mapping[str, str],
) -> float:
    """Prior-weighted initiator payoff against a per-type response map."""
    total = 0.0
    for t, weight in zip(space.types, space.prior):
        if t not in response_j:
            raise UnknownLabel(f"no response for type {t!r}")
        total += weight * game.payoff(t, strategy_i, response_j[t])[0]
    return total


def indifference_threshold(
    game: ConditionalGame, space: TypeSpace, response_j: Mapping[str, str]
) -> BayesianSolution:
    """Solve for the weight on the first type at which the initiator's two
    strategies have equal expected payoff.

    When the two expected payoffs never cross inside [0, 1] the threshold
    is clamped (1 when the first strategy is preferred throughout, else 0)
    and the solution is flagged non-interior. Identical payoff lines raise
    NoDependenceOnPrior.
    """
    if len(game.strategies_i) != 2:
        raise ValueError("threshold analysis needs exactly two row strategies")
    if len(game.types) != 2:
        raise ValueError("threshold analysis needs exactly two types")
    s1, s2 = game.strategies_i
    t_first, t_second = game.types
    for t in game.types:
        if t not in response_j:
            raise UnknownLabel(f"no response for type {t!r}")
    a1 = game.payoff(t_first, s1, response_j[t_first])[0]
    a2 = game.payoff(t_first, s2, response_j[t_first])[0]
    b1 = game.payoff(t_second, s1, response_j[t_second])[0]
    b2 = game.payoff(t_second, s2, response_j[t_second])[0]
    # payoff difference f(p) = p*(a1-a2) + (1-p)*(b1-b2), positive favours s1
    slope = (a1 - a2) - (b1 - b2)
    intercept = b1 - b2
    if slope == 0 and intercept == 0:
        raise NoDependenceOnPrior(
            "both strategies have identical expected payoff for every prior"
        )
    if slope != 0:
        root = -intercept / slope
        if 0.0 <= root <= 1.0:
            above, below = (s1, s2) if slope > 0 else (s2, s1)
            return BayesianSolution(
                per_type_strategy_j=dict(response_j),
                threshold_p=root,
                strategy_i_above=above,
                strategy_i_below=below,
                interior=True,
            )
    # No interior crossing: one strategy is preferred on all of [0, 1].
    midpoint_value = slope * 0.5 + intercept
    preferred = s1 if midpoint_value > 0 else s2
    return BayesianSolution(
        per_type_strategy_j=dict(response_j),
        threshold_p=1.0 if preferred == s1 else 0.0,
        strategy_i_above=preferred,
        strategy_i_below=preferred,
        interior=False,
    )
