"""Deciding the equilibrium threshold problem and certifying outcomes.

A lasso is an equilibrium outcome exactly when, at every step, every
player's cycle payoff matches or beats the punishment value of every state
they could unilaterally force instead (deviations reproducing the same
successor are unobservable under state-reading strategies and are ignored).
Grim-trigger profiles realize such lassos with finite memory, which makes
the threshold problem a search over lassos.

Two backends answer threshold queries:

* ``oracle`` - exhaustive over lassos with prefix plus cycle length at most
  a bound.  Cycles are explored by a layered walk over move classes with
  the per-player deviation ceiling fixed up front, so the sweep enumerates
  achievable weight-sum vectors rather than raw walks.
* ``lp`` - unbounded cycle-frequency feasibility: for every deviation
  ceiling and every strongly connected sub-arena, an exact rational LP over
  move frequencies decides whether a cycle with the requested payoffs
  exists; a frequency vertex is scaled to integers and unrolled into an
  Euler circuit to recover a concrete lasso.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .games import (
    Game,
    InvalidLassoError,
    Lasso,
    MealyStrategy,
    StrategyProfile,
    mean_payoff,
    payoffs,
)
from .simplex import Constraint, feasible_point
from .zerosum import (
    PunishmentResult,
    SolverLimitError,
    best_response_value,
    punishment_values,
    strongly_connected_components,
)

POS_INF = math.inf
NEG_INF = -math.inf

Bound = object  # Fraction or +-inf


@dataclass(frozen=True)
class ThresholdQuery:
    """Payoff window for the equilibrium threshold problem.

    ``lower``/``upper`` bound each player's payoff, the global pair bounds
    the designer value; infinities mean "no constraint".  ``fixed_player``
    requests j-fixed equilibria: that player's deviations are not checked.
    """

    lower: tuple[Bound, ...]
    upper: tuple[Bound, ...]
    global_lower: Bound = NEG_INF
    global_upper: Bound = POS_INF
    fixed_player: int | None = None

    def __post_init__(self) -> None:
        for lo, hi in zip(self.lower, self.upper):
            if lo > hi:
                raise ValueError("infeasible per-player bounds (lower > upper)")
        if self.global_lower > self.global_upper:
            raise ValueError("infeasible global bounds (lower > upper)")


def unconstrained_query(game: Game, fixed_player: int | None = None) -> ThresholdQuery:
    n = game.n_players
    return ThresholdQuery(
        lower=(NEG_INF,) * n, upper=(POS_INF,) * n, fixed_player=fixed_player
    )


@dataclass(frozen=True)
class NEWitness:
    """Certified equilibrium outcome: lasso, grim-trigger profile, payoffs."""

    lasso: Lasso
    profile: StrategyProfile
    player_payoffs: tuple[Fraction, ...]
    global_payoff: Fraction


def _punishments(game: Game, fixed: int | None) -> dict[int, PunishmentResult]:
    return {
        i: punishment_values(game, i)
        for i in range(game.n_players)
        if i != fixed
    }


def is_ne_outcome(game: Game, lasso: Lasso, fixed: int | None = None,
                  pun: Mapping[int, PunishmentResult] | None = None) -> bool:
    """Folk-theorem check: no observable unilateral deviation beats the play."""
    lasso.validate(game)
    if pun is None:
        pun = _punishments(game, fixed)
    mp = [mean_payoff(game.weights[i], lasso) for i in range(game.n_players)]
    for s, joint, _ in lasso.steps():
        for i in range(game.n_players):
            if i == fixed:
                continue
            for dev in game.deviation_successors(s, joint, i):
                if mp[i] < pun[i].values[dev]:
                    return False
    return True


def grim_trigger_profile(game: Game, lasso: Lasso, fixed: int | None = None,
                         pun: Mapping[int, PunishmentResult] | None = None,
                         ) -> StrategyProfile:
    """Finite-memory realization of an equilibrium lasso.

    Everyone follows the lasso; at the first off-path state each player
    switches permanently to the positional punishment of the player who
    could have forced it.  When several players could have, every punisher
    assumes it was the least culprit other than itself, so with two players
    the true deviator always meets its own punishment.  Divergences no
    player explains fall into an inert mode, which certified lassos never
    reach.
    """
    if pun is None:
        pun = _punishments(game, fixed)
    if not is_ne_outcome(game, lasso, fixed, pun):
        raise InvalidLassoError("grim trigger requires an equilibrium lasso")

    states_at = list(lasso.prefix_states) + list(lasso.cycle_states)
    moves_at = list(lasso.prefix_moves) + list(lasso.cycle_moves)
    n_pre = len(lasso.prefix_states)
    length = len(states_at)

    # Memory ids: follow positions 0..length-1 (position n_pre = first cycle
    # visit), one extra "wrapped cycle start" so the predecessor of every
    # follow state is unambiguous, then one punish mode per player, then an
    # inert mode.
    wrap = length
    punish_base = length + 1
    punished_players = [i for i in range(game.n_players) if i != fixed]
    inert = punish_base + len(punished_players)
    n_memory = inert + 1

    def next_follow(m: int) -> int:
        pos = n_pre if m == wrap else m
        if pos + 1 < length:
            return pos + 1
        return wrap

    def predecessor(m: int) -> int | None:
        if m == wrap:
            return length - 1
        if m == 0:
            return None
        if m == n_pre and n_pre == 0:
            return None
        return m - 1

    def culprits(m: int, observed: int) -> list[int]:
        prev = predecessor(m)
        if prev is None:
            return []
        ps, pm = states_at[prev], moves_at[prev]
        out = []
        for i in range(game.n_players):
            if i == fixed:
                continue
            for alt in game.protocol[i][ps]:
                if alt == pm[i]:
                    continue
                if game.transitions[(ps, pm[:i] + (alt,) + pm[i + 1:])] == observed:
                    out.append(i)
                    break
        return out

    def mode_for(m: int, observed: int, viewer: int) -> int:
        suspects = [i for i in culprits(m, observed) if i != viewer]
        if not suspects:
            return inert
        return punish_base + punished_players.index(suspects[0])

    strategies = []
    for p in range(game.n_players):
        step_rows = []
        act_rows = []
        for m in range(n_memory):
            step_row = []
            act_row = []
            for s in range(game.n_states):
                if m < punish_base:
                    pos = n_pre if m == wrap else m
                    if s == states_at[pos]:
                        step_row.append(next_follow(m))
                        act_row.append(moves_at[pos][p])
                        continue
                    target = mode_for(m, s, p)
                    step_row.append(target)
                    if target == inert:
                        act_row.append(game.protocol[p][s][0])
                    else:
                        victim = punished_players[target - punish_base]
                        if p == victim:
                            act_row.append(game.protocol[p][s][0])
                        else:
                            act_row.append(pun[victim].coalition[s][p])
                    continue
                step_row.append(m)
                if m == inert:
                    act_row.append(game.protocol[p][s][0])
                else:
                    victim = punished_players[m - punish_base]
                    if p == victim:
                        act_row.append(game.protocol[p][s][0])
                    else:
                        act_row.append(pun[victim].coalition[s][p])
            step_rows.append(tuple(step_row))
            act_rows.append(tuple(act_row))
        strategies.append(
            MealyStrategy(n_memory, 0, tuple(step_rows), tuple(act_rows))
        )
    profile = StrategyProfile(tuple(range(game.n_players)), tuple(strategies))
    profile.validate(game)
    return profile


# ---------------------------------------------------------------------------
# Move classes and deviation ceilings


@dataclass(frozen=True)
class _MoveClass:
    succ: int
    devmax: tuple[Fraction | None, ...]
    joint: tuple[int, ...]


def _ceil_le(a: Fraction | None, b: Fraction | None) -> bool:
    if a is None:
        return True
    if b is None:
        return False
    return a <= b


def _vec_le(a: Sequence, b: Sequence) -> bool:
    return all(_ceil_le(x, y) for x, y in zip(a, b))


def _vec_join(a: tuple, b: tuple) -> tuple:
    out = []
    for x, y in zip(a, b):
        if x is None:
            out.append(y)
        elif y is None:
            out.append(x)
        else:
            out.append(max(x, y))
    return tuple(out)


class NashLassoSolver:
    """Threshold queries over one game, one fixed player, one length bound.

    Punishment tables, move classes and the lattice of deviation ceilings
    are computed once; oracle sweeps and LP queries share them.  Instances
    are cheap to build relative to the queries they answer and are meant to
    be reused across a binary search.
    """

    def __init__(self, game: Game, fixed: int | None = None, bound: int = 12,
                 ceiling_limit: int = 4096):
        if bound < 1:
            raise ValueError("lasso length bound must be positive")
        self.game = game
        self.fixed = fixed
        self.bound = bound
        self.pun = _punishments(game, fixed)
        self._classes = self._build_classes()
        self._ceilings = self._build_ceilings(ceiling_limit)
        self._sweep_cache: list[tuple] | None = None

    # -- shared structure ---------------------------------------------------

    def _build_classes(self) -> list[list[_MoveClass]]:
        game = self.game
        per_state: list[list[_MoveClass]] = []
        for s in range(game.n_states):
            by_key: dict[tuple, tuple[int, ...]] = {}
            for joint in game.joint_actions(s):
                succ = game.transitions[(s, joint)]
                devmax: list[Fraction | None] = []
                for i in range(game.n_players):
                    if i == self.fixed:
                        devmax.append(None)
                        continue
                    devs = game.deviation_successors(s, joint, i)
                    devmax.append(
                        max(self.pun[i].values[d] for d in devs) if devs else None
                    )
                key = (succ, tuple(devmax))
                if key not in by_key or joint < by_key[key]:
                    by_key[key] = joint
            classes = [
                _MoveClass(succ, devmax, joint)
                for (succ, devmax), joint in sorted(
                    by_key.items(), key=lambda kv: (kv[0][0], kv[1])
                )
            ]
            # Drop classes dominated by a same-successor class with weaker
            # deviation ceilings.
            kept: list[_MoveClass] = []
            for c in classes:
                dominated = any(
                    d.succ == c.succ and d.devmax != c.devmax
                    and _vec_le(d.devmax, c.devmax)
                    for d in classes
                )
                if not dominated:
                    kept.append(c)
            per_state.append(kept)
        return per_state

    def _build_ceilings(self, limit: int) -> list[tuple]:
        bottom = (None,) * self.game.n_players
        seeds = {bottom}
        for classes in self._classes:
            for c in classes:
                seeds.add(c.devmax)
        closed: set[tuple] = set(seeds)
        frontier = list(seeds)
        while frontier:
            v = frontier.pop()
            for u in list(closed):
                j = _vec_join(v, u)
                if j not in closed:
                    closed.add(j)
                    frontier.append(j)
                    if len(closed) > limit:
                        raise SolverLimitError("deviation ceiling lattice too large")

        def sort_key(vec: tuple):
            return tuple(NEG_INF if x is None else x for x in vec)

        return sorted(closed, key=sort_key)

    def _allowed(self, ceiling: tuple) -> list[list[_MoveClass]]:
        return [
            [c for c in classes if _vec_le(c.devmax, ceiling)]
            for classes in self._classes
        ]

    @staticmethod
    def _dists_from(allowed: list[list[_MoveClass]], root: int) -> dict[int, int]:
        dist = {root: 0}
        frontier = [root]
        while frontier:
            nxt: list[int] = []
            for s in frontier:
                for c in allowed[s]:
                    if c.succ not in dist:
                        dist[c.succ] = dist[s] + 1
                        nxt.append(c.succ)
            frontier = nxt
        return dist

    @staticmethod
    def _dists_to(allowed: list[list[_MoveClass]], target: int,
                  members: set[int]) -> dict[int, int]:
        preds: dict[int, set[int]] = {s: set() for s in members}
        for s in members:
            for c in allowed[s]:
                if c.succ in members:
                    preds[c.succ].add(s)
        dist = {target: 0}
        frontier = [target]
        while frontier:
            nxt = []
            for s in frontier:
                for p in preds[s]:
                    if p not in dist:
                        dist[p] = dist[s] + 1
                        nxt.append(p)
            frontier = nxt
        return dist

    # -- oracle sweep ---------------------------------------------------------

    def _sweep(self) -> list[tuple]:
        """All equilibrium cycle signatures within the length bound.

        A signature is ``(ceiling index, anchor state, cycle length, weight
        sums, prefix length)``; the anchor is the least state on the cycle,
        weight sums run over all players plus the global table.  The sweep
        is exhaustive: every equilibrium lasso with prefix + cycle within
        the bound projects onto exactly one signature.
        """
        if self._sweep_cache is not None:
            return self._sweep_cache
        game = self.game
        n = game.n_players
        wvecs = [
            tuple(game.weights[i][s] for i in range(n)) + (game.global_weights[s],)
            for s in range(game.n_states)
        ]
        out: list[tuple] = []
        seen: set[tuple] = set()
        for ci, ceiling in enumerate(self._ceilings):
            allowed = self._allowed(ceiling)
            dist = self._dists_from(allowed, game.initial)
            for anchor in sorted(dist):
                budget = self.bound - dist[anchor]
                if budget < 1:
                    continue
                members = {s for s in range(game.n_states) if s >= anchor}
                back = self._dists_to(allowed, anchor, members)
                if anchor not in back:
                    continue
                closures = self._walk(allowed, anchor, budget, back, wvecs)
                for length, sums in closures:
                    if not self._cycle_is_equilibrium(ceiling, sums, length):
                        continue
                    key = (anchor, length, sums)
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append((ci, anchor, length, sums, dist[anchor]))
        out.sort(key=lambda rec: (Fraction(rec[3][-1], rec[2]), rec[2], rec[1], rec[3]))
        self._sweep_cache = out
        return out

    def _walk(self, allowed, anchor: int, budget: int, back: dict[int, int],
              wvecs) -> list[tuple[int, tuple[int, ...]]]:
        """Layered reachability of weight-sum vectors on cycles at ``anchor``."""
        zero = (0,) * (self.game.n_players + 1)
        layer: dict[int, set[tuple[int, ...]]] = {anchor: {zero}}
        closures: list[tuple[int, tuple[int, ...]]] = []
        for k in range(budget):
            nxt: dict[int, set[tuple[int, ...]]] = {}
            for s, sums_set in layer.items():
                w = wvecs[s]
                for cls in allowed[s]:
                    t = cls.succ
                    if t < anchor:
                        continue
                    if t == anchor:
                        for sums in sums_set:
                            closures.append(
                                (k + 1, tuple(a + b for a, b in zip(sums, w)))
                            )
                    rem = budget - (k + 1)
                    if t not in back or back[t] > rem:
                        continue
                    bucket = nxt.setdefault(t, set())
                    for sums in sums_set:
                        bucket.add(tuple(a + b for a, b in zip(sums, w)))
            layer = nxt
            if not layer:
                break
        return closures

    def _cycle_is_equilibrium(self, ceiling: tuple, sums: tuple[int, ...],
                              length: int) -> bool:
        for i in range(self.game.n_players):
            if i == self.fixed or ceiling[i] is None:
                continue
            if Fraction(sums[i], length) < ceiling[i]:
                return False
        return True

    @staticmethod
    def _sums_in_bounds(query: ThresholdQuery, sums: tuple[int, ...],
                        length: int) -> bool:
        for i, (lo, hi) in enumerate(zip(query.lower, query.upper)):
            v = Fraction(sums[i], length)
            if v < lo or v > hi:
                return False
        g = Fraction(sums[-1], length)
        return query.global_lower <= g <= query.global_upper

    def global_values(self) -> list[Fraction]:
        """Sorted distinct designer values over all equilibrium signatures."""
        vals = {Fraction(rec[3][-1], rec[2]) for rec in self._sweep()}
        return sorted(vals)

    def has_equilibrium(self) -> bool:
        return bool(self._sweep())

    def query_oracle(self, query: ThresholdQuery) -> tuple | None:
        """Least signature satisfying the query, or None."""
        self._check_query(query)
        for rec in self._sweep():
            if self._sums_in_bounds(query, rec[3], rec[2]):
                return rec
        return None

    def extreme_signature(self, maximize: bool = False) -> tuple | None:
        sweep = self._sweep()
        if not sweep:
            return None
        return sweep[-1] if maximize else sweep[0]

    def signatures(self) -> list[tuple]:
        return list(self._sweep())

    def _check_query(self, query: ThresholdQuery) -> None:
        if len(query.lower) != self.game.n_players:
            raise ValueError("query bounds must cover every player")
        if query.fixed_player != self.fixed:
            raise ValueError(
                "query fixed player differs from the solver's fixed player"
            )

    # -- witness extraction ----------------------------------------------------

    def realize(self, rec: tuple) -> Lasso:
        """Rebuild a concrete lasso from a sweep signature."""
        ci, anchor, length, sums, _ = rec
        allowed = self._allowed(self._ceilings[ci])
        game = self.game
        n = game.n_players
        wvecs = [
            tuple(game.weights[i][s] for i in range(n)) + (game.global_weights[s],)
            for s in range(game.n_states)
        ]
        zero = (0,) * (n + 1)
        members = {s for s in range(game.n_states) if s >= anchor}
        back = self._dists_to(allowed, anchor, members)
        layers: list[dict[int, dict[tuple, tuple]]] = [{anchor: {zero: None}}]
        for k in range(length):
            cur = layers[-1]
            nxt: dict[int, dict[tuple, tuple]] = {}
            for s, table in cur.items():
                w = wvecs[s]
                for cls in allowed[s]:
                    t = cls.succ
                    if t < anchor:
                        continue
                    if k + 1 == length:
                        if t != anchor:
                            continue
                    elif t not in back or back[t] > length - k - 1:
                        continue
                    bucket = nxt.setdefault(t, {})
                    for sums_k in table:
                        ns = tuple(a + b for a, b in zip(sums_k, w))
                        if ns not in bucket:
                            bucket[ns] = (s, sums_k, cls)
            layers.append(nxt)
        goal = layers[length].get(anchor, {})
        if sums not in goal:
            raise SolverLimitError("signature no longer realizable")
        cyc_states: list[int] = []
        cyc_moves: list[tuple[int, ...]] = []
        cur_state, cur_sums = anchor, sums
        for k in range(length, 0, -1):
            prev_s, prev_sums, cls = layers[k][cur_state][cur_sums]
            cyc_states.append(prev_s)
            cyc_moves.append(cls.joint)
            cur_state, cur_sums = prev_s, prev_sums
        cyc_states.reverse()
        cyc_moves.reverse()

        prefix_states, prefix_moves = self._shortest_prefix(allowed, anchor)
        lasso = Lasso(
            tuple(prefix_states), tuple(cyc_states),
            tuple(prefix_moves), tuple(cyc_moves),
        )
        lasso.validate(game)
        return lasso

    def _shortest_prefix(self, allowed, target: int):
        game = self.game
        parent: dict[int, tuple[int, _MoveClass] | None] = {game.initial: None}
        frontier = [game.initial]
        while frontier and target not in parent:
            nxt = []
            for s in frontier:
                for cls in allowed[s]:
                    if cls.succ not in parent:
                        parent[cls.succ] = (s, cls)
                        nxt.append(cls.succ)
            frontier = nxt
        if target not in parent:
            raise SolverLimitError("anchor unreachable while rebuilding the prefix")
        states: list[int] = []
        moves: list[tuple[int, ...]] = []
        cur = target
        while parent[cur] is not None:
            prev, cls = parent[cur]
            states.append(prev)
            moves.append(cls.joint)
            cur = prev
        states.reverse()
        moves.reverse()
        return states, moves

    def witness(self, rec: tuple) -> NEWitness:
        lasso = self.realize(rec)
        profile = grim_trigger_profile(self.game, lasso, self.fixed, self.pun)
        per, glob = payoffs(self.game, lasso)
        for i in range(self.game.n_players):
            if i == self.fixed:
                continue
            br = best_response_value(self.game, profile.without(i), i)
            if br > per[i]:
                raise SolverLimitError(
                    "grim profile failed its exact best-response certificate"
                )
        return NEWitness(lasso, profile, per, glob)

    # -- LP backend -------------------------------------------------------------

    def lp_feasible(self, query: ThresholdQuery) -> bool:
        self._check_query(query)
        return self._lp_scan(query, realize=False) is not None

    def lp_witness(self, query: ThresholdQuery) -> NEWitness | None:
        self._check_query(query)
        result = self._lp_scan(query, realize=True)
        if result is None:
            return None
        lasso = result
        if not is_ne_outcome(self.game, lasso, self.fixed, self.pun):
            raise SolverLimitError("lp realization failed the equilibrium check")
        per, glob = payoffs(self.game, lasso)
        in_bounds = all(
            lo <= v <= hi for v, lo, hi in zip(per, query.lower, query.upper)
        ) and query.global_lower <= glob <= query.global_upper
        if not in_bounds:
            raise SolverLimitError("lp realization drifted out of bounds")
        profile = grim_trigger_profile(self.game, lasso, self.fixed, self.pun)
        return NEWitness(lasso, profile, per, glob)

    def _lp_scan(self, query: ThresholdQuery, realize: bool):
        game = self.game
        feasible_seen = False
        for ceiling in self._ceilings:
            allowed = self._allowed(ceiling)
            dist = self._dists_from(allowed, game.initial)
            reach = sorted(dist)
            if not reach:
                continue
            pos = {s: k for k, s in enumerate(reach)}
            succs = [
                [pos[c.succ] for c in allowed[s] if c.succ in pos]
                for s in reach
            ]
            comps = strongly_connected_components(succs)
            for comp in sorted(comps, key=min):
                members = {reach[k] for k in comp}
                edges = [
                    (s, cls)
                    for s in sorted(members)
                    for cls in allowed[s]
                    if cls.succ in members
                ]
                if not edges:
                    continue
                point = self._lp_solve(query, ceiling, members, edges,
                                       normalized=True)
                if point is None:
                    continue
                feasible_seen = True
                if not realize:
                    return True
                lasso = self._lp_realize(query, ceiling, allowed, members,
                                         edges, point)
                if lasso is not None:
                    return lasso
        if feasible_seen and realize:
            raise SolverLimitError(
                "threshold query is feasible but no witness was realized"
            )
        return None

    def _lp_solve(self, query: ThresholdQuery, ceiling: tuple,
                  members: set[int], edges: list, normalized: bool):
        game = self.game
        n_vars = len(edges)
        cons: list[Constraint] = []
        if normalized:
            cons.append(Constraint((Fraction(1),) * n_vars, "==", Fraction(1)))
        for s in sorted(members):
            row = [Fraction(0)] * n_vars
            for k, (src, cls) in enumerate(edges):
                if src == s:
                    row[k] += 1
                if cls.succ == s:
                    row[k] -= 1
            cons.append(Constraint(tuple(row), "==", Fraction(0)))
        for i in range(game.n_players):
            targets = [Fraction(game.weights[i][src]) for src, _ in edges]
            if i != self.fixed and ceiling[i] is not None:
                cons.append(Constraint(
                    tuple(t - ceiling[i] for t in targets), ">=", Fraction(0)
                ))
            if query.lower[i] != NEG_INF:
                cons.append(Constraint(
                    tuple(t - query.lower[i] for t in targets), ">=", Fraction(0)
                ))
            if query.upper[i] != POS_INF:
                cons.append(Constraint(
                    tuple(query.upper[i] - t for t in targets), ">=", Fraction(0)
                ))
        gl = [Fraction(game.global_weights[src]) for src, _ in edges]
        if query.global_lower != NEG_INF:
            cons.append(Constraint(
                tuple(t - query.global_lower for t in gl), ">=", Fraction(0)
            ))
        if query.global_upper != POS_INF:
            cons.append(Constraint(
                tuple(query.global_upper - t for t in gl), ">=", Fraction(0)
            ))
        lbs = None if normalized else [Fraction(1)] * n_vars
        return feasible_point(n_vars, cons, lbs)

    def _lp_realize(self, query: ThresholdQuery, ceiling: tuple, allowed,
                    members: set[int], edges: list, point,
                    length_cap: int = 4096) -> Lasso | None:
        multi = self._scale_to_integers(point)
        lasso = self._euler_lasso(allowed, edges, multi, length_cap)
        if lasso is not None:
            return lasso
        # Vertex support was disconnected: force every sub-arena move to be
        # used at least once, which restores connectivity if still feasible.
        forced = self._lp_solve(query, ceiling, members, edges, normalized=False)
        if forced is not None:
            multi = self._scale_to_integers(forced)
            lasso = self._euler_lasso(allowed, edges, multi, length_cap)
            if lasso is not None:
                return lasso
        # Bounded fallback: look for any in-bounds signature of the sweep.
        rec = self.query_oracle(query)
        if rec is not None:
            return self.realize(rec)
        return None

    @staticmethod
    def _scale_to_integers(point) -> list[int]:
        denom = 1
        for x in point:
            denom = denom * x.denominator // math.gcd(denom, x.denominator)
        return [int(x * denom) for x in point]

    def _euler_lasso(self, allowed, edges: list, multi: list[int],
                     length_cap: int) -> Lasso | None:
        total = sum(multi)
        if total == 0 or total > length_cap:
            return None
        support = [(edges[k], multi[k]) for k in range(len(edges)) if multi[k] > 0]
        nodes = sorted({src for (src, _), _ in support}
                       | {cls.succ for (_, cls), _ in support})
        pos = {s: k for k, s in enumerate(nodes)}
        succs = [[] for _ in nodes]
        for (src, cls), _ in support:
            succs[pos[src]].append(pos[cls.succ])
        comps = strongly_connected_components(succs)
        if len(comps) != 1:
            return None
        # Hierholzer over the multigraph, smallest successor first.
        out_edges: dict[int, list[tuple[int, object, int]]] = {}
        for (src, cls), m in support:
            out_edges.setdefault(src, []).append((cls.succ, cls, m))
        for s in out_edges:
            out_edges[s].sort(key=lambda e: (e[0], e[1].joint))
        remaining = {
            (src, id(cls)): m for (src, cls), m in support
        }
        start = nodes[0]
        circuit: list[tuple[int, object]] = []
        stack: list[tuple[int, object | None]] = [(start, None)]
        while stack:
            s, via = stack[-1]
            advanced = False
            for succ, cls, _ in out_edges.get(s, []):
                key = (s, id(cls))
                if remaining.get(key, 0) > 0:
                    remaining[key] -= 1
                    stack.append((succ, cls))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if via is not None:
                    circuit.append((s, via))
        circuit.reverse()
        if len(circuit) != total:
            return None
        # circuit[k] = (state entered, class used to enter it): rebuild the
        # visited sequence starting from `start`.
        cyc_states = [start] + [s for s, _ in circuit[:-1]]
        cyc_moves = [cls.joint for _, cls in circuit]
        prefix_states, prefix_moves = self._shortest_prefix(allowed, start)
        if len(prefix_states) + len(cyc_states) > max(length_cap, self.bound):
            return None
        lasso = Lasso(tuple(prefix_states), tuple(cyc_states),
                      tuple(prefix_moves), tuple(cyc_moves))
        lasso.validate(self.game)
        return lasso


def ne_threshold(game: Game, query: ThresholdQuery, backend: str = "oracle",
                 bound: int = 12) -> NEWitness | None:
    """Equilibrium witness with all payoffs inside the query window, if any.

    ``backend="oracle"`` is exhaustive over lassos of length at most
    ``bound``; ``backend="lp"`` decides cycle-frequency feasibility without
    a length bound and unrolls a frequency vertex into a lasso.
    """
    solver = NashLassoSolver(game, query.fixed_player, bound)
    if backend == "oracle":
        rec = solver.query_oracle(query)
        return solver.witness(rec) if rec is not None else None
    if backend == "lp":
        return solver.lp_witness(query)
    raise ValueError(f"unknown backend {backend!r}")
