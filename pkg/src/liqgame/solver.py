"""Equilibrium computation for bimatrix games.

Pure equilibria come from an exhaustive best-response scan. Mixed equilibria
come from support enumeration: for every pair of equal-size candidate
supports the indifference system is solved exactly over rationals, so the
published small-fraction profiles (1/2, 1/3, 1/6, ...) are reproduced with
zero tolerance. A grid-search oracle provides an independent cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import LiquidityGameError, PayoffMatrix, Player

DEFAULT_DIMENSION_CAP = 12
ORACLE_DIMENSION_CAP = 4


class DimensionCapExceeded(LiquidityGameError):
    pass


class DimensionMismatch(LiquidityGameError):
    pass


@dataclass(frozen=True)
class PureEquilibrium:
    """A cell where neither player gains by a unilateral deviation."""

    row_index: int
    col_index: int
    payoffs: tuple[int, int]

    def to_jsonable(self) -> dict:
        return {
            "row": self.row_index,
            "col": self.col_index,
            "payoffs": [self.payoffs[0], self.payoffs[1]],
        }


@dataclass(frozen=True)
class MixedProfile:
    """Per-player probability vectors over the action sets.

    Exact-rational entries when produced by ``solve_mixed``; grid rationals
    (multiples of 1/resolution) when produced by the oracle.
    """

    probs_i: tuple[Fraction, ...]
    probs_j: tuple[Fraction, ...]

    def to_jsonable(self) -> dict:
        return {
            "probs_i": [str(p) for p in self.probs_i],
            "probs_j": [str(q) for q in self.probs_j],
        }

    def support_i(self) -> tuple[int, ...]:
        return tuple(r for r, p in enumerate(self.probs_i) if p > 0)

    def support_j(self) -> tuple[int, ...]:
        return tuple(c for c, q in enumerate(self.probs_j) if q > 0)


@dataclass(frozen=True)
class SupportPair:
    """Candidate supports examined during enumeration."""

    support_i: tuple[int, ...]
    support_j: tuple[int, ...]


def _payoff_arrays(matrix: PayoffMatrix) -> tuple[list[list[int]], list[list[int]]]:
    u_i = [[cell[0] for cell in row] for row in matrix.entries]
    u_j = [[cell[1] for cell in row] for row in matrix.entries]
    return u_i, u_j


def find_pure_equilibria(matrix: PayoffMatrix) -> list[PureEquilibrium]:
    """All cells with the exact best-response property, in row-major order."""
    if matrix.rows == 0 or matrix.cols == 0:
        raise ValueError("matrix must be non-empty")
    u_i, u_j = _payoff_arrays(matrix)
    col_max_i = [max(u_i[r][c] for r in range(matrix.rows)) for c in range(matrix.cols)]
    row_max_j = [max(row) for row in u_j]
    found = []
    for r in range(matrix.rows):
        for c in range(matrix.cols):
            if u_i[r][c] == col_max_i[c] and u_j[r][c] == row_max_j[r]:
                found.append(PureEquilibrium(r, c, matrix.entries[r][c]))
    return found


def _solve_linear_exact(
    a: list[list[Fraction]], b: list[Fraction]
) -> Optional[list[Fraction]]:
    """Gaussian elimination over rationals; None when the system has no
    unique solution (singular or inconsistent)."""
    n = len(a)
    aug = [row[:] + [b[k]] for k, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col]
        for r in range(col + 1, n):
            if aug[r][col] == 0:
                continue
            factor = aug[r][col] / inv
            for c in range(col, n + 1):
                aug[r][c] -= factor * aug[col][c]
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = aug[r][n]
        for c in range(r + 1, n):
            acc -= aug[r][c] * x[c]
        x[r] = acc / aug[r][r]
    return x


def _indifference_solution(
    own_payoffs: list[list[int]], support_own: Sequence[int], support_opp: Sequence[int]
) -> Optional[tuple[list[Fraction], Fraction]]:
    """Probabilities over ``support_opp`` that equalise the owner's payoff
    across ``support_own``, plus the common payoff value."""
    k = len(support_opp)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for r in support_own:
        rows.append([Fraction(own_payoffs[r][c]) for c in support_opp] + [Fraction(-1)])
        rhs.append(Fraction(0))
    rows.append([Fraction(1)] * k + [Fraction(0)])
    rhs.append(Fraction(1))
    solution = _solve_linear_exact(rows, rhs)
    if solution is None:
        return None
    return solution[:k], solution[k]


def solve_mixed(
    matrix: PayoffMatrix, dimension_cap: int = DEFAULT_DIMENSION_CAP
) -> list[MixedProfile]:
    """Enumerate candidate supports of equal size, smallest first, and keep
    every exactly-solved profile that is non-negative and has no better
    reply outside its support.

    Degenerate profiles are kept: a solution may place probability zero on
    part of its candidate support, which is how boundary equilibria of
    weakly dominated games surface. Pure equilibria appear as the size-1
    supports. Singular or inconsistent support systems are skipped.
    """
    m, n = matrix.rows, matrix.cols
    if m == 0 or n == 0:
        raise ValueError("matrix must be non-empty")
    if m > dimension_cap or n > dimension_cap:
        raise DimensionCapExceeded(
            f"matrix is {m}x{n}, enumeration capped at {dimension_cap} per side"
        )
    u_i, u_j = _payoff_arrays(matrix)
    profiles: list[MixedProfile] = []
    seen: set[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]] = set()
    for size in range(1, min(m, n) + 1):
        for support_i in itertools.combinations(range(m), size):
            for support_j in itertools.combinations(range(n), size):
                profile = _profile_for_supports(
                    u_i, u_j, m, n, SupportPair(support_i, support_j)
                )
                if profile is None:
                    continue
                key = (profile.probs_i, profile.probs_j)
                if key not in seen:
                    seen.add(key)
                    profiles.append(profile)
    return profiles


def _profile_for_supports(
    u_i: list[list[int]],
    u_j: list[list[int]],
    m: int,
    n: int,
    supports: SupportPair,
) -> Optional[MixedProfile]:
    si, sj = supports.support_i, supports.support_j
    solved_q = _indifference_solution(u_i, si, sj)
    if solved_q is None:
        return None
    q_support, value_i = solved_q
    if any(q < 0 for q in q_support):
        return None
    # No pure row outside the candidate support may beat the common value.
    for r in range(m):
        if r in si:
            continue
        if sum(Fraction(u_i[r][c]) * q for c, q in zip(sj, q_support)) > value_i:
            return None
    u_j_t = [[u_j[r][c] for r in range(m)] for c in range(n)]
    solved_p = _indifference_solution(u_j_t, sj, si)
    if solved_p is None:
        return None
    p_support, value_j = solved_p
    if any(p < 0 for p in p_support):
        return None
    for c in range(n):
        if c in sj:
            continue
        if sum(Fraction(u_j[r][c]) * p for r, p in zip(si, p_support)) > value_j:
            return None
    probs_i = [Fraction(0)] * m
    for r, p in zip(si, p_support):
        probs_i[r] = p
    probs_j = [Fraction(0)] * n
    for c, q in zip(sj, q_support):
        probs_j[c] = q
    return MixedProfile(tuple(probs_i), tuple(probs_j))


def verify_equilibrium(
    matrix: PayoffMatrix, profile: MixedProfile, tolerance: Fraction = Fraction(0)
) -> bool:
    """True iff no unilateral pure deviation gains more than ``tolerance``.

    Runs in the profile's own arithmetic, so exact-rational profiles are
    checked with zero tolerance and no rounding.
    """
    m, n = matrix.rows, matrix.cols
    if len(profile.probs_i) != m or len(profile.probs_j) != n:
        raise DimensionMismatch(
            f"profile is {len(profile.probs_i)}x{len(profile.probs_j)}, "
            f"matrix is {m}x{n}"
        )
    u_i, u_j = _payoff_arrays(matrix)
    row_payoffs = [
        sum(u_i[r][c] * profile.probs_j[c] for c in range(n)) for r in range(m)
    ]
    col_payoffs = [
        sum(u_j[r][c] * profile.probs_i[r] for r in range(m)) for c in range(n)
    ]
    expected_i = sum(profile.probs_i[r] * row_payoffs[r] for r in range(m))
    expected_j = sum(profile.probs_j[c] * col_payoffs[c] for c in range(n))
    return (
        max(row_payoffs) - expected_i <= tolerance
        and max(col_payoffs) - expected_j <= tolerance
    )


def dominated_actions(
    matrix: PayoffMatrix, player: Player
) -> list[tuple[int, int, str]]:
    """All ordered pairs (dominated, dominating, strictness) for one player.

    ``g`` dominates ``d`` when g's payoff is at least d's against every
    opponent action; "strict" when strictly greater everywhere, "weak"
    otherwise (payoff-equal actions therefore dominate each other weakly).
    """
    if matrix.rows == 0 or matrix.cols == 0:
        raise ValueError("matrix must be non-empty")
    u_i, u_j = _payoff_arrays(matrix)
    if player is Player.I:
        vectors = u_i
    else:
        vectors = [[u_j[r][c] for r in range(matrix.rows)] for c in range(matrix.cols)]
    relations = []
    for d, g in itertools.permutations(range(len(vectors)), 2):
        if all(vg >= vd for vg, vd in zip(vectors[g], vectors[d])):
            strictness = (
                "strict"
                if all(vg > vd for vg, vd in zip(vectors[g], vectors[d]))
                else "weak"
            )
            relations.append((d, g, strictness))
    return relations


def _simplex_grid(parts: int, total: int) -> np.ndarray:
    """All integer compositions of ``total`` into ``parts`` parts."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    combos = itertools.combinations(range(total + parts - 1), parts - 1)
    bars = np.fromiter(
        itertools.chain.from_iterable(combos), dtype=np.int64
    ).reshape(-1, parts - 1)
    padded = np.hstack(
        [
            np.full((bars.shape[0], 1), -1, dtype=np.int64),
            bars,
            np.full((bars.shape[0], 1), total + parts - 1, dtype=np.int64),
        ]
    )
    return np.diff(padded, axis=1) - 1


def _window_grid(
    parts: int, total: int, center: Sequence[Fraction], radius: int
) -> np.ndarray:
    """Compositions of ``total`` whose coordinates all lie within
    ``radius`` grid steps of ``center``."""
    choices = []
    for x in center:
        scaled = x * total
        lo = max(0, int(scaled) - radius)
        hi = min(total, int(scaled) + radius + 1)
        choices.append([k for k in range(lo, hi + 1) if abs(Fraction(k) - scaled) <= radius])
    pts = [p for p in itertools.product(*choices) if sum(p) == total]
    if not pts:
        return np.empty((0, parts), dtype=np.int64)
    return np.array(sorted(set(pts)), dtype=np.int64)


def brute_force_oracle(
    matrix: PayoffMatrix,
    grid_resolution: int,
    around: Optional[MixedProfile] = None,
    radius: int = 1,
) -> list[MixedProfile]:
    """Independent grid-search check: profiles on the 1/resolution lattice
    whose maximum deviation gain is below 1/resolution.

    Every gain test is evaluated in integer arithmetic (scaled by the
    resolution), so acceptance is exact. Without ``around`` the full product
    of both simplex grids is swept, which is combinatorial; pass ``around``
    to restrict both grids to the points within ``radius`` steps of a
    candidate profile (the sweep restricted to that window).
    """
    m, n = matrix.rows, matrix.cols
    if m > ORACLE_DIMENSION_CAP or n > ORACLE_DIMENSION_CAP:
        raise DimensionCapExceeded(
            f"oracle supports at most {ORACLE_DIMENSION_CAP} actions per side"
        )
    if grid_resolution < 1:
        raise ValueError("grid_resolution must be >= 1")
    r_scale = grid_resolution
    u_i_arr = np.array([[cell[0] for cell in row] for row in matrix.entries], dtype=np.float64)
    u_j_arr = np.array([[cell[1] for cell in row] for row in matrix.entries], dtype=np.float64)
    # Integer magnitudes stay below 2**53, so float64 matmuls are exact here.
    max_abs = max(1.0, float(np.max(np.abs(u_i_arr))), float(np.max(np.abs(u_j_arr))))
    if max_abs * r_scale * r_scale >= 2**52:
        raise ValueError("payoffs too large for exact grid evaluation")
    if around is None:
        grid_p = _simplex_grid(m, r_scale)
        grid_q = _simplex_grid(n, r_scale)
    else:
        if len(around.probs_i) != m or len(around.probs_j) != n:
            raise DimensionMismatch("around profile does not match matrix dimensions")
        grid_p = _window_grid(m, r_scale, around.probs_i, radius)
        grid_q = _window_grid(n, r_scale, around.probs_j, radius)
    if grid_p.size == 0 or grid_q.size == 0:
        return []
    kp = grid_p.astype(np.float64)
    kq = grid_q.astype(np.float64)
    best_i_by_q = (kq @ u_i_arr.T).max(axis=1)  # scaled by resolution
    best_j_by_p = (kp @ u_j_arr).max(axis=1)
    accepted: list[tuple[int, int]] = []
    chunk = max(1, int(4e6) // max(1, kp.shape[0]))
    for start in range(0, kq.shape[0], chunk):
        kq_block = kq[start : start + chunk]
        exp_i = kp @ u_i_arr @ kq_block.T
        exp_j = kp @ u_j_arr @ kq_block.T
        gain_i = r_scale * best_i_by_q[start : start + chunk][None, :] - exp_i
        gain_j = r_scale * best_j_by_p[:, None] - exp_j
        hits = np.argwhere((gain_i < r_scale) & (gain_j < r_scale))
        accepted.extend((int(ip), int(iq) + start) for ip, iq in hits)
    profiles = []
    for ip, iq in accepted:
        probs_i = tuple(Fraction(int(k), r_scale) for k in grid_p[ip])
        probs_j = tuple(Fraction(int(k), r_scale) for k in grid_q[iq])
        profiles.append(MixedProfile(probs_i, probs_j))
    return profiles
