from fractions import Fraction

import pytest

from eqdesign.benchmarks import (
    complete_digraph,
    gen_random_game,
    gen_tsp_game,
)
from eqdesign.equilibria import (
    NEG_INF,
    POS_INF,
    NashLassoSolver,
    ThresholdQuery,
    grim_trigger_profile,
    is_ne_outcome,
    ne_threshold,
)
from eqdesign.games import (
    InvalidLassoError,
    StrategyProfile,
    lasso_from_states,
    make_game,
    payoffs,
    run_profile,
)
from eqdesign.zerosum import best_response_value

from conftest import lasso_by_names


def query1(lo, hi, fixed=None):
    return ThresholdQuery((NEG_INF,), (POS_INF,), lo, hi, fixed)


class TestIsNeOutcome:
    def test_all_zero_weights_everything_is_ne(self):
        game = gen_random_game(5, n_players=2, n_states=3, weight_range=(0, 0))
        for seed in range(4):
            from eqdesign.benchmarks import gen_random_strategy

            profile = StrategyProfile(
                (0, 1),
                (gen_random_strategy(game, 0, seed),
                 gen_random_strategy(game, 1, seed + 1)),
            )
            assert is_ne_outcome(game, run_profile(game, profile))

    def test_example1_ping_pong_is_ne(self, example1):
        game, _, _ = example1
        assert is_ne_outcome(game, lasso_by_names(game, ["t", "r"]))

    def test_tsp_lasso_skipping_a_city_rejected(self):
        costs = {e: 1 for e in complete_digraph(3).edges}
        game = gen_tsp_game(complete_digraph(3, costs))
        # Tour v1 -> v2 -> v1 skips v3, who can bail to the sink for payoff 1.
        s12 = game.state_names.index("v1>v2")
        s21 = game.state_names.index("v2>v1")
        lasso = lasso_from_states(game, [s12, s21], 0)
        assert not is_ne_outcome(game, lasso)

    def test_a1_example_cycles_are_ne(self, a1_game):
        assert is_ne_outcome(a1_game, lasso_by_names(a1_game, ["t", "l", "b", "r"]))
        assert is_ne_outcome(
            a1_game, lasso_by_names(a1_game, ["t", "l", "l", "b", "r", "r"]))


class TestGrimTrigger:
    def test_single_state_game(self):
        game = make_game(
            players=["p1"], actions=["a"], states=["s"], initial="s",
            protocol={"s": {"p1": ["a"]}}, transitions={"s": {("a",): "s"}},
            weights={"p1": {"s": 0}}, global_weights={"s": 0},
        )
        lasso = lasso_from_states(game, [0], 0)
        profile = grim_trigger_profile(game, lasso)
        assert run_profile(game, profile).cycle_states == (0,)

    def test_a1_profile_certified_for_both_players(self, a1_game):
        lasso = lasso_by_names(a1_game, ["t", "l", "b", "r"])
        profile = grim_trigger_profile(a1_game, lasso)
        per, glob = payoffs(a1_game, lasso)
        assert glob == Fraction(-1, 4)
        for i in range(2):
            assert best_response_value(a1_game, profile.without(i), i) <= per[i]

    def test_delivery_product_certified(self, example1_products):
        product, _ = example1_products
        lasso = lasso_by_names(product, ["t|q0", "l|q1", "m|q2"])
        profile = grim_trigger_profile(product, lasso)
        per, glob = payoffs(product, lasso)
        assert glob == Fraction(2, 3)
        assert best_response_value(product, profile.without(0), 0) <= per[0]

    def test_rejects_non_equilibrium_lasso(self, example1_products):
        product, _ = example1_products
        # Ping-pong in the product forfeits the delivery reward rate.
        names = [n for n in product.state_names if n.startswith(("t|", "r|"))]
        t0 = product.state_names.index("t|q0")
        r1 = product.state_names.index("r|q1")
        lasso = lasso_from_states(product, [t0, r1], 0)
        assert not is_ne_outcome(product, lasso)
        with pytest.raises(InvalidLassoError):
            grim_trigger_profile(product, lasso)


class TestNeThreshold:
    def test_example1_zero_window(self, example1):
        game, _, _ = example1
        witness = ne_threshold(game, query1(Fraction(0), Fraction(0)))
        assert witness is not None
        assert witness.global_payoff == 0
        assert [game.state_names[s] for s in witness.lasso.cycle_states] == ["t", "r"]

    def test_example1_high_window(self, example1):
        game, _, _ = example1
        witness = ne_threshold(game, query1(Fraction(1), POS_INF))
        assert witness is not None
        assert witness.global_payoff == 1
        assert set(witness.lasso.cycle_states) == {
            game.state_names.index(n) for n in ("t", "l", "m")
        }

    def test_window_above_max_weight_is_empty(self, example1_products):
        product, _ = example1_products
        assert ne_threshold(product, query1(Fraction(3), POS_INF)) is None

    def test_infeasible_bounds_rejected(self, example1):
        with pytest.raises(ValueError):
            query1(Fraction(1), Fraction(0))

    def test_pennies_has_no_equilibrium(self, pennies_game):
        solver = NashLassoSolver(pennies_game)
        assert not solver.has_equilibrium()
        for lo, hi in [(NEG_INF, POS_INF), (Fraction(0), Fraction(1))]:
            q = ThresholdQuery((NEG_INF, NEG_INF), (POS_INF, POS_INF), lo, hi)
            assert solver.query_oracle(q) is None
            assert not solver.lp_feasible(q)

    def test_witness_passes_exact_certificates(self, a1_game):
        q = ThresholdQuery((NEG_INF, NEG_INF), (POS_INF, POS_INF),
                           Fraction(-1, 4), Fraction(-1, 4))
        witness = ne_threshold(a1_game, q)
        assert witness is not None
        for i in range(2):
            br = best_response_value(a1_game, witness.profile.without(i), i)
            assert br <= witness.player_payoffs[i]

    @pytest.mark.parametrize("seed", range(20))
    def test_monotone_in_window_width(self, seed):
        game = gen_random_game(seed, n_players=2, n_states=3)
        solver = NashLassoSolver(game)
        import random

        rng = random.Random(seed)
        c = Fraction(rng.randint(-2, 2), rng.choice([1, 2]))
        w = Fraction(rng.choice([1, 2]), 2)
        narrow = ThresholdQuery((NEG_INF,) * 2, (POS_INF,) * 2, c, c + w)
        wide = ThresholdQuery((NEG_INF,) * 2, (POS_INF,) * 2, c - 1, c + w + 1)
        if solver.query_oracle(narrow) is not None:
            assert solver.query_oracle(wide) is not None

    @pytest.mark.parametrize("seed", range(40))
    def test_lp_and_oracle_backends_agree(self, seed):
        import random

        rng = random.Random(("agree", seed).__repr__())
        game = gen_random_game(seed + 300, n_players=2,
                               n_states=rng.choice([2, 3, 4]))
        c = Fraction(rng.randint(-4, 4), rng.choice([1, 2]))
        style = rng.random()
        if style < 0.4:
            lo, hi = NEG_INF, c
        elif style < 0.8:
            lo, hi = c, POS_INF
        else:
            lo, hi = c, c + 1
        q = ThresholdQuery((NEG_INF,) * 2, (POS_INF,) * 2, lo, hi)
        solver = NashLassoSolver(game, bound=12)
        assert (solver.query_oracle(q) is not None) == solver.lp_feasible(q)

    def test_lp_witness_is_valid(self, example1):
        game, _, _ = example1
        witness = ne_threshold(game, query1(Fraction(1, 2), Fraction(1)), backend="lp")
        assert witness is not None
        assert Fraction(1, 2) <= witness.global_payoff <= 1
        assert is_ne_outcome(game, witness.lasso)
