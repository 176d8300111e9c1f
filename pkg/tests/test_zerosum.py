from fractions import Fraction

import pytest

from eqdesign.benchmarks import (
    CostDigraph,
    gen_hamiltonian_complement_game,
    gen_random_game,
    gen_random_strategy,
)
from eqdesign.games import StrategyProfile, constant_strategy, mean_payoff, run_profile
from eqdesign.zerosum import (
    best_response_value,
    max_mean_cycle,
    punishment_values,
)


class TestMaxMeanCycle:
    def test_single_self_loop(self):
        assert max_mean_cycle({"a": [("a", 5)]}, "a") == 5

    def test_picks_better_of_two_cycles(self):
        graph = {
            "a": [("b", 1), ("c", 1)],
            "b": [("a", 0)],          # cycle mean 1/2
            "c": [("d", 1)],
            "d": [("c", 1)],          # cycle mean following a->c: 2/3 via c-d? no: c<->d mean 1
        }
        # cycles: (a,b) mean 1/2, (c,d) mean 1; both reachable from a
        assert max_mean_cycle(graph, "a") == 1

    def test_unreachable_cycle_ignored(self):
        graph = {
            "a": [("b", 0)],
            "b": [("a", 0)],
            "z": [("z", 99)],
        }
        assert max_mean_cycle(graph, "a") == 0

    def test_reachable_dead_end_rejected(self):
        with pytest.raises(ValueError):
            max_mean_cycle({"a": [("b", 1)], "b": []}, "a")

    def test_delivery_product_reward_rate(self, example1_products):
        product, _ = example1_products
        graph = {
            s: [(succ, product.weights[0][s]) for _, succ in product.moves(s)]
            for s in range(product.n_states)
        }
        assert max_mean_cycle(graph, product.initial) == Fraction(1, 3)


class TestBestResponse:
    def test_zero_weights_give_zero(self, example1):
        game, _, _ = example1
        empty = StrategyProfile((), ())
        assert best_response_value(game, empty, 0) == 0

    def test_one_player_product(self, example1_products):
        product, _ = example1_products
        assert best_response_value(product, StrategyProfile((), ()), 0) == Fraction(1, 3)

    def test_pennies_tail_with_constant_opponent(self):
        """With the opposing coin fixed, the matching player collects its
        square/triangle weight forever."""
        tri = CostDigraph(("v1", "v2", "v3"),
                          (("v1", "v2"), ("v2", "v3"), ("v3", "v1")))
        game = gen_hamiltonian_complement_game(tri)
        n = game.n_players
        p_square = game.player_names.index("p4")
        others = StrategyProfile(
            tuple(i for i in range(n) if i != p_square),
            tuple(constant_strategy(game, i) for i in range(n) if i != p_square),
        )
        assert best_response_value(game, others, p_square) == 1

    @pytest.mark.parametrize("seed", range(10))
    def test_response_dominates_conforming(self, seed):
        game = gen_random_game(seed, n_players=2, n_states=3)
        profile = StrategyProfile(
            (0, 1),
            (gen_random_strategy(game, 0, seed),
             gen_random_strategy(game, 1, seed + 3)),
        )
        lasso = run_profile(game, profile)
        for i in range(2):
            br = best_response_value(game, profile.without(i), i)
            assert br >= mean_payoff(game.weights[i], lasso)


class TestPunishment:
    def test_one_player_equals_best_achievable(self, example1):
        game, _, _ = example1
        pun = punishment_values(game, 0)
        assert pun.values == (Fraction(0),) * game.n_states

    def test_delivery_product_pun_is_reward_rate(self, example1_products):
        product, _ = example1_products
        pun = punishment_values(product, 0)
        assert set(pun.values) == {Fraction(1, 3)}

    def test_a1_values(self, a1_game):
        for player in range(2):
            pun = punishment_values(a1_game, player)
            assert set(pun.values) == {Fraction(1, 4)}

    def test_bounded_by_weight_range(self, a1_game):
        for player in range(2):
            pun = punishment_values(a1_game, player)
            lo = min(a1_game.weights[player])
            hi = max(a1_game.weights[player])
            assert all(lo <= v <= hi for v in pun.values)

    @pytest.mark.parametrize("seed", range(10))
    def test_backends_agree(self, seed):
        game = gen_random_game(seed, n_players=2, n_states=3)
        for player in range(2):
            enum = punishment_values(game, player, backend="enum")
            improve = punishment_values(game, player, backend="improve")
            assert enum.values == improve.values

    @pytest.mark.parametrize("seed", range(6))
    def test_value_iteration_cross_check(self, seed):
        """Rounded value iteration agrees exactly with enumeration on games
        small enough for its step budget."""
        game = gen_random_game(seed, n_players=2, n_states=3, n_actions=2)
        for player in range(2):
            enum = punishment_values(game, player, backend="enum")
            zp = punishment_values(game, player, backend="zp")
            assert enum.values == zp.values

    @pytest.mark.parametrize("seed", range(8))
    def test_no_commitment_helps_the_target(self, seed):
        """Any concrete coalition commitment gives the deviating player at
        least the punishment value."""
        game = gen_random_game(seed, n_players=2, n_states=3)
        for player in range(2):
            pun = punishment_values(game, player)
            coalition = [i for i in range(2) if i != player]
            for cs in range(3):
                others = StrategyProfile(
                    tuple(coalition),
                    tuple(gen_random_strategy(game, i, seed + 11 * cs) for i in coalition),
                )
                for s in range(game.n_states):
                    br = best_response_value(game, others, player, start=s)
                    assert pun.values[s] <= br

    @pytest.mark.parametrize("seed", range(6))
    def test_denominators_within_bipartite_size(self, seed):
        game = gen_random_game(seed, n_players=3, n_states=3, n_actions=2)
        for player in range(3):
            pun = punishment_values(game, player)
            profiles = 1
            for i in range(3):
                if i != player:
                    profiles = max(profiles, 4)
            bipartite = game.n_states * (1 + 4 * profiles)
            assert all(v.denominator <= bipartite for v in pun.values)

    def test_three_player_backends_agree(self):
        for seed in range(4):
            game = gen_random_game(seed + 50, n_players=3, n_states=3, n_actions=2)
            for player in range(3):
                enum = punishment_values(game, player, backend="enum")
                improve = punishment_values(game, player, backend="improve")
                assert enum.values == improve.values

    @pytest.mark.parametrize("seed", [123, 124, 125])
    def test_all_three_backends_at_full_scale(self, seed):
        game = gen_random_game(seed, n_players=3, n_states=4, n_actions=2)
        for player in range(3):
            enum = punishment_values(game, player, backend="enum")
            improve = punishment_values(game, player, backend="improve")
            zp = punishment_values(game, player, backend="zp")
            assert enum.values == improve.values == zp.values
