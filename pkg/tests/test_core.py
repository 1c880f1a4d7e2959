import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from liqgame.core import (
    Action,
    CapExceeded,
    OverTrade,
    PayoffMatrix,
    SameSignBalances,
    ZeroBalance,
    apply_trade,
    bilateral_payoff,
    build_instance,
    build_payoff_matrix,
    instance_from_json,
    instance_to_json,
)


class TestBuildInstance:
    def test_two_by_two_action_sets(self):
        inst = build_instance(2, -2, 100)
        assert [a.quantity for a in inst.action_set_i] == [2, 1]
        assert [a.quantity for a in inst.action_set_j] == [2, 1]

    def test_minimal_game_is_singleton(self):
        inst = build_instance(1, -1, 100)
        assert [a.quantity for a in inst.action_set_i] == [1]
        assert [a.quantity for a in inst.action_set_j] == [1]

    def test_same_sign_rejected(self):
        with pytest.raises(SameSignBalances):
            build_instance(3, 3, 100)

    def test_zero_balance_rejected(self):
        with pytest.raises(ZeroBalance):
            build_instance(0, -2, 100)

    def test_cap_enforced(self):
        with pytest.raises(CapExceeded):
            build_instance(101, -2, 100)

    def test_orientation_normalised(self):
        inst = build_instance(-4, 7, 100)
        assert inst.balance_i == 7
        assert inst.balance_j == -4

    def test_zero_not_an_action(self):
        inst = build_instance(5, -2, 100)
        assert 0 not in [a.quantity for a in inst.action_set_i]
        assert 0 not in [a.quantity for a in inst.action_set_j]


class TestBilateralPayoff:
    @pytest.mark.parametrize(
        "offer,capacity,expected",
        [
            (2, 2, (2, 2)),
            (2, 1, (0, 0)),
            (1, 2, (1, 1)),
            (0, 5, (0, 0)),
        ],
    )
    def test_published_cells(self, offer, capacity, expected):
        assert bilateral_payoff(Action(offer), Action(capacity)) == expected

    @given(offer=st.integers(0, 200), capacity=st.integers(0, 200))
    def test_matches_indicator_form(self, offer, capacity):
        got = bilateral_payoff(Action(offer), Action(capacity))
        q = offer if 0 < offer <= capacity else 0
        assert got == (q, q)

    def test_negative_quantity_rejected(self):
        with pytest.raises(ValueError):
            Action(-1)


class TestPayoffMatrix:
    def test_two_by_two_table(self):
        matrix = build_payoff_matrix(build_instance(2, -2, 100))
        assert matrix.entries == (((2, 2), (0, 0)), ((1, 1), (1, 1)))

    def test_three_by_three_table(self):
        matrix = build_payoff_matrix(build_instance(3, -3, 100))
        assert matrix.entries == (
            ((3, 3), (0, 0), (0, 0)),
            ((2, 2), (2, 2), (0, 0)),
            ((1, 1), (1, 1), (1, 1)),
        )

    def test_single_cell(self):
        matrix = build_payoff_matrix(build_instance(1, -1, 100))
        assert matrix.entries == (((1, 1),),)

    @given(n_i=st.integers(1, 12), n_j=st.integers(1, 12))
    def test_every_cell_matches_payoff_rule(self, n_i, n_j):
        matrix = build_payoff_matrix(build_instance(n_i, -n_j, 100))
        for r, offer in enumerate(matrix.actions_i):
            for c, capacity in enumerate(matrix.actions_j):
                assert matrix.entries[r][c] == bilateral_payoff(
                    Action(offer), Action(capacity)
                )
                u, v = matrix.entries[r][c]
                assert u == v >= 0

    @given(n=st.integers(1, 30))
    def test_descending_diagonal(self, n):
        matrix = build_payoff_matrix(build_instance(n, -n, 1000))
        for k in range(n):
            assert matrix.entries[k][k] == (n - k, n - k)
            for c in range(k + 1, n):
                assert matrix.entries[k][c] == (0, 0)

    def test_json_round_trip(self):
        matrix = build_payoff_matrix(build_instance(3, -2, 100))
        again = PayoffMatrix.from_json(matrix.to_json())
        assert again.entries == matrix.entries

    def test_csv_layout(self):
        matrix = build_payoff_matrix(build_instance(2, -2, 100))
        assert matrix.to_csv() == "2|2,0|0\n1|1,1|1\n"


class TestApplyTrade:
    def test_acceptor_cleared(self):
        inst = apply_trade(build_instance(5, -3, 100), 3)
        assert (inst.balance_i, inst.balance_j) == (2, 0)

    def test_sign_preservation(self):
        with pytest.raises(OverTrade):
            apply_trade(build_instance(5, -3, 100), 4)

    def test_pure_equilibrium_cell_clears_both(self):
        # replay the (2, 2) cell of the 2x2 table through the trade rule
        inst = build_instance(2, -2, 100)
        matrix = build_payoff_matrix(inst)
        quantity, _ = matrix.entries[0][0]
        after = apply_trade(inst, quantity)
        assert (after.balance_i, after.balance_j) == (0, 0)

    def test_zero_quantity_rejected(self):
        with pytest.raises(ValueError):
            apply_trade(build_instance(2, -2, 100), 0)

    @given(
        b_i=st.integers(1, 500),
        b_j=st.integers(1, 500),
        data=st.data(),
    )
    def test_conserves_total_and_signs(self, b_i, b_j, data):
        inst = build_instance(b_i, -b_j, 1000)
        quantity = data.draw(st.integers(1, min(b_i, b_j)))
        after = apply_trade(inst, quantity)
        assert after.balance_i + after.balance_j == inst.balance_i + inst.balance_j
        assert after.balance_i >= 0
        assert after.balance_j <= 0


class TestInstanceSerialization:
    def test_round_trip(self):
        inst = build_instance(17, -5, 400)
        doc = instance_to_json(inst)
        assert json.loads(doc) == {"balance_i": 17, "balance_j": -5, "issue_cap": 400}
        again = instance_from_json(doc)
        assert (again.balance_i, again.balance_j, again.issue_cap) == (17, -5, 400)

    def test_missing_field_rejected(self):
        with pytest.raises(ZeroBalance):
            instance_from_json('{"balance_i": 2}')

    def test_bad_cap_rejected(self):
        with pytest.raises(CapExceeded):
            instance_from_json('{"balance_i": 2, "balance_j": -2, "issue_cap": 0}')
