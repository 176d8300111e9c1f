"""Exact zero-sum mean-payoff machinery behind equilibrium certification.

Three layers live here:

* Karp-style maximum mean cycle, exact over ``Fraction`` weights.
* Best-response values: the supremum a single player can secure against a
  committed finite-memory coalition (positional optima make this a max
  mean cycle in the committed product).
* Punishment values: the least mean payoff a coalition can impose on one
  player.  The information order is coalition-commits-first, so the game
  collapses to a turn-based bipartite game; three backends solve it
  (exhaustive positional enumeration, Howard-style policy iteration, and a
  Zwick-Paterson iteration with rational rounding kept for cross-checks).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .games import Game, StrategyProfile

NEG_INF = float("-inf")


class SolverLimitError(RuntimeError):
    """An internal solver exceeded its configured effort budget."""


def strongly_connected_components(succs: Sequence[Iterable[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    n = len(succs)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(succs[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if index[u] == -1:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack[u] = True
                    work.append((u, iter(succs[u])))
                    advanced = True
                    break
                elif on_stack[u]:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp.append(u)
                    if u == v:
                        break
                comps.append(comp)
    return comps


def _karp_max_mean(nodes: Sequence[int], succs: Mapping[int, Sequence[int]],
                   weight: Mapping[int, Fraction | int]) -> Fraction | None:
    """Max mean cycle inside a strongly connected node set; None if acyclic.

    Weights sit on the source node of each step.
    """
    order = list(nodes)
    pos = {v: k for k, v in enumerate(order)}
    n = len(order)
    has_edge = any(u in pos for v in order for u in succs[v])
    if not has_edge:
        return None
    # F[k][v] = max weight of a k-edge walk from the pseudo-source.
    prev = [Fraction(0)] * n
    table = [list(prev)]
    for _ in range(n):
        cur: list = [NEG_INF] * n
        for vi, v in enumerate(order):
            fv = prev[vi]
            if fv is NEG_INF:
                continue
            wv = weight[v]
            for u in succs[v]:
                ui = pos.get(u)
                if ui is None:
                    continue
                cand = fv + wv
                if cur[ui] is NEG_INF or cand > cur[ui]:
                    cur[ui] = cand
        table.append(cur)
        prev = cur
    best: Fraction | None = None
    final = table[n]
    for vi in range(n):
        if final[vi] is NEG_INF:
            continue
        worst: Fraction | None = None
        for k in range(n):
            fk = table[k][vi]
            if fk is NEG_INF:
                continue
            cand = Fraction(final[vi] - fk, n - k)
            if worst is None or cand < worst:
                worst = cand
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


def max_mean_value_function(succs: Sequence[Sequence[int]],
                            weight: Sequence[Fraction | int]) -> list[Fraction]:
    """Per node, the largest mean of any cycle reachable from it.

    Every node must have out-degree >= 1 so a cycle is always reachable.
    """
    n = len(succs)
    for v in range(n):
        if not succs[v]:
            raise ValueError(f"node {v} has no successors")
    comps = strongly_connected_components(succs)
    comp_of = [0] * n
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    values: list[Fraction | None] = [None] * len(comps)
    # Tarjan emits components in reverse topological order, so successors
    # of a component are already resolved when we reach it.
    for ci, comp in enumerate(comps):
        members = set(comp)
        local = {v: [u for u in succs[v] if u in members] for v in comp}
        best = _karp_max_mean(comp, local, {v: weight[v] for v in comp})
        for v in comp:
            for u in succs[v]:
                cj = comp_of[u]
                if cj != ci:
                    cand = values[cj]
                    if cand is not None and (best is None or cand > best):
                        best = cand
        if best is None:
            raise ValueError("graph has a reachable dead end")
        values[ci] = best
    return [values[comp_of[v]] for v in range(n)]


def max_mean_cycle(graph: Mapping[object, Iterable[tuple[object, int]]],
                   source: object) -> Fraction:
    """Exact maximum cycle mean over cycles reachable from ``source``.

    ``graph`` maps a node to ``(successor, edge weight)`` pairs.  Every
    reachable node must have at least one outgoing edge.
    """
    names: list[object] = []
    ids: dict[object, int] = {}
    edge_weight: list[dict[int, int]] = []

    def intern(v: object) -> int:
        if v not in ids:
            ids[v] = len(names)
            names.append(v)
            edge_weight.append({})
        return ids[v]

    root = intern(source)
    frontier = [root]
    while frontier:
        v = frontier.pop()
        edges = list(graph.get(names[v], []))
        if not edges:
            raise ValueError(f"reachable node {names[v]!r} has no outgoing edge")
        for u_name, w in edges:
            known = u_name in ids
            u = intern(u_name)
            # Parallel edges: only the heaviest matters for a max mean cycle.
            if u not in edge_weight[v] or w > edge_weight[v][u]:
                edge_weight[v][u] = int(w)
            if not known:
                frontier.append(u)

    # Shift edge weights onto split nodes so the node-weighted solver applies:
    # edge u->v of weight w becomes u -> (u,v) -> v, doubling w on the middle
    # node because the split cycle is twice as long.
    n = len(names)
    split_succs: list[list[int]] = [[] for _ in range(n)]
    split_weight: list[int] = [0] * n
    for v in range(n):
        for u in sorted(edge_weight[v]):
            mid = len(split_succs)
            split_succs.append([u])
            split_weight.append(2 * edge_weight[v][u])
            split_succs[v].append(mid)
    vals = max_mean_value_function(split_succs, split_weight)
    return vals[root]


def best_response_value(game: Game, others: StrategyProfile, player: int,
                        start: int | None = None) -> Fraction:
    """Exact supremum of ``player``'s mean payoff against a committed profile.

    Builds the one-player arena over (state, coalition memory) pairs; since
    single-player mean-payoff optima are positional, the supremum over all
    responses (finite or infinite memory) is the best reachable cycle mean.
    """
    if player in others.players:
        raise ValueError("responding player must not appear in the committed profile")
    expected = [i for i in range(game.n_players) if i != player]
    if sorted(others.players) != expected:
        raise ValueError("committed profile must cover exactly the other players")
    for p, st in zip(others.players, others.strategies):
        st.validate(game, p)

    coalition = sorted(others.players)
    strat = {p: others.strategy_for(p) for p in coalition}
    root_state = game.initial if start is None else start
    root = (root_state, tuple(strat[p].initial for p in coalition))
    index = {root: 0}
    nodes = [root]
    succs: list[list[int]] = []
    weights: list[int] = []
    frontier = [0]
    while frontier:
        vi = frontier.pop()
        while len(succs) < len(nodes):
            succs.append([])
            weights.append(0)
        s, mems = nodes[vi]
        weights[vi] = game.weights[player][s]
        next_mems = tuple(strat[p].step[m][s] for p, m in zip(coalition, mems))
        outs = set()
        for a in game.protocol[player][s]:
            joint = [0] * game.n_players
            joint[player] = a
            for p, m in zip(coalition, mems):
                joint[p] = strat[p].act[m][s]
            succ = game.transitions[(s, tuple(joint))]
            outs.add((succ, next_mems))
        for node in sorted(outs):
            if node not in index:
                index[node] = len(nodes)
                nodes.append(node)
                frontier.append(index[node])
            succs[vi].append(index[node])
    while len(succs) < len(nodes):
        succs.append([])
        weights.append(0)
    for vi, node in enumerate(nodes):
        weights[vi] = game.weights[player][node[0]]
    return max_mean_value_function(succs, weights)[0]


@dataclass(frozen=True)
class PunishmentResult:
    """Per-state punishment values plus a positional coalition witness.

    ``coalition[s]`` maps each punishing player to the action it commits
    at ``s`` under an optimal punishment of ``player``.
    """

    player: int
    values: tuple[Fraction, ...]
    coalition: tuple[Mapping[int, int], ...]


def _response_classes(game: Game, player: int):
    """Collapse coalition action profiles by their induced response map.

    At each state, two coalition profiles that give the deviating player
    the same action-to-successor map are interchangeable; only one
    representative (lex-least) is kept.
    """
    others = [j for j in range(game.n_players) if j != player]
    per_state = []
    for s in range(game.n_states):
        dev_actions = game.protocol[player][s]
        seen: dict[tuple[int, ...], dict[int, int]] = {}
        for combo in itertools.product(*(game.protocol[j][s] for j in others)):
            joint = [0] * game.n_players
            for j, a in zip(others, combo):
                joint[j] = a
            rmap = []
            for a in dev_actions:
                joint[player] = a
                rmap.append(game.transitions[(s, tuple(joint))])
            key = tuple(rmap)
            if key not in seen:
                seen[key] = dict(zip(others, combo))
        per_state.append(sorted(seen.items()))
    return per_state


def _eval_committed(game: Game, player: int, per_state, choice: Sequence[int]):
    """Deviator's exact value per state once the coalition commits ``choice``."""
    succs = []
    for s in range(game.n_states):
        rmap, _ = per_state[s][choice[s]]
        succs.append(sorted(set(rmap)))
    weights = [game.weights[player][s] for s in range(game.n_states)]
    return max_mean_value_function(succs, weights)


def _bias_of_committed(game: Game, player: int, per_state, choice: Sequence[int],
                       gains: Sequence[Fraction]) -> list[Fraction]:
    """Relative potentials of the committed one-player arena.

    On gain-tight edges the adjusted weights w - g admit no positive
    cycle; potentials anchor at the lex-least node of each critical
    component and propagate by longest adjusted paths.
    """
    n = game.n_states
    succs = []
    for s in range(n):
        rmap, _ = per_state[s][choice[s]]
        succs.append(sorted({u for u in set(rmap) if gains[u] == gains[s]}))
    adj = [Fraction(game.weights[player][s]) - gains[s] for s in range(n)]

    comps = strongly_connected_components(succs)
    comp_of = [0] * n
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    critical_ref: dict[int, int] = {}
    for ci, comp in enumerate(comps):
        members = set(comp)
        local = {v: [u for u in succs[v] if u in members] for v in comp}
        mm = _karp_max_mean(comp, local, {v: adj[v] for v in comp})
        if mm is not None and mm == 0:
            critical_ref[ci] = min(comp)

    anchors = set(critical_ref.values())
    bias: list[Fraction | None] = [None] * n
    for v in anchors:
        bias[v] = Fraction(0)
    # Longest adjusted paths toward the anchors; no positive cycles exist on
    # the tight graph, so relaxation reaches a fixpoint within 2n rounds.
    for _ in range(2 * n + 2):
        changed = False
        for v in range(n):
            if v in anchors:
                continue
            best = bias[v]
            for u in succs[v]:
                if bias[u] is None:
                    continue
                cand = adj[v] + bias[u]
                if best is None or cand > best:
                    best = cand
            if best is not None and best != bias[v]:
                bias[v] = best
                changed = True
        if not changed:
            break
    return [b if b is not None else Fraction(0) for b in bias]


def _punish_enum(game: Game, player: int, per_state) -> tuple[list[Fraction], list[int]]:
    # Componentwise minimum over all positional commitments; an optimal
    # positional punishment achieves it at every state simultaneously, so a
    # second pass recovers one witness.
    best_vals: list[Fraction] | None = None
    for choice in itertools.product(*(range(len(cs)) for cs in per_state)):
        vals = _eval_committed(game, player, per_state, choice)
        if best_vals is None:
            best_vals = list(vals)
        else:
            for s in range(game.n_states):
                if vals[s] < best_vals[s]:
                    best_vals[s] = vals[s]
    assert best_vals is not None
    for choice in itertools.product(*(range(len(cs)) for cs in per_state)):
        if _eval_committed(game, player, per_state, choice) == best_vals:
            return best_vals, list(choice)
    raise SolverLimitError("no single positional commitment achieves the value vector")


def _punish_improve(game: Game, player: int, per_state,
                    max_rounds: int = 200) -> tuple[list[Fraction], list[int]]:
    n = game.n_states
    choice = [0] * n
    for _ in range(max_rounds):
        gains = _eval_committed(game, player, per_state, choice)
        bias = _bias_of_committed(game, player, per_state, choice, gains)

        def key_of(s: int, ci: int) -> tuple[Fraction, Fraction]:
            rmap, _ = per_state[s][ci]
            g = max(gains[u] for u in rmap)
            tight = max((bias[u] for u in rmap if gains[u] == g))
            return (g, Fraction(game.weights[player][s]) - g + tight)

        switched = False
        for s in range(n):
            cur = key_of(s, choice[s])
            best_ci, best_key = choice[s], cur
            for ci in range(len(per_state[s])):
                if ci == choice[s]:
                    continue
                k = key_of(s, ci)
                if k < best_key:
                    best_ci, best_key = ci, k
            if best_ci != choice[s]:
                choice[s] = best_ci
                switched = True
        if not switched:
            final = _eval_committed(game, player, per_state, choice)
            for s in range(n):
                attainable = [max(final[u] for u in per_state[s][ci][0])
                              for ci in range(len(per_state[s]))]
                if min(attainable) < final[s]:
                    raise SolverLimitError("policy iteration stopped off the fixpoint")
            return final, choice
    raise SolverLimitError("policy iteration exceeded its round budget")


def _punish_zwick_paterson(game: Game, player: int, per_state) -> list[Fraction]:
    """Value iteration on the bipartite game, rounded to small denominators.

    Viable only at toy scale; kept as an independent cross-check of the
    other two backends.
    """
    n = game.n_states
    n_dev = sum(len(cs) for cs in per_state)
    total = n + n_dev
    w_abs = max(1, max(abs(game.weights[player][s]) for s in range(n)))
    steps = 4 * total * total * (total - 1) * w_abs + 1

    dev_index: dict[tuple[int, int], int] = {}
    k = 0
    for s in range(n):
        for ci in range(len(per_state[s])):
            dev_index[(s, ci)] = k
            k += 1

    v_min = [0] * n
    for _ in range(steps):
        new_dev = [0] * n_dev
        for s in range(n):
            w = game.weights[player][s]
            for ci, (rmap, _) in enumerate(per_state[s]):
                new_dev[dev_index[(s, ci)]] = w + max(v_min[u] for u in rmap)
        new_min = [0] * n
        for s in range(n):
            w = game.weights[player][s]
            new_min[s] = w + min(new_dev[dev_index[(s, ci)]]
                                 for ci in range(len(per_state[s])))
        v_min = new_min
    out = []
    # Each loop pass advances two bipartite half-steps, both charging w(s).
    radius = Fraction(2 * total * w_abs, steps)
    for s in range(n):
        approx = Fraction(v_min[s], 2 * steps)
        out.append(_round_to_denominator(approx, total, radius))
    return out


def _round_to_denominator(x: Fraction, max_den: int, radius: Fraction) -> Fraction:
    """Unique rational with denominator <= max_den within ``radius`` of x."""
    lo, hi = x - radius, x + radius
    for q in range(1, max_den + 1):
        p_lo = -((-lo.numerator * q) // lo.denominator)  # ceil(lo * q)
        p_hi = (hi.numerator * q) // hi.denominator      # floor(hi * q)
        if p_lo <= p_hi:
            return Fraction(p_lo, q)
    raise SolverLimitError("no rational with a small denominator in the ball")


def punishment_values(game: Game, player: int, backend: str = "auto",
                      enum_limit: int = 20000) -> PunishmentResult:
    """Least mean payoff the rest of the players can impose on ``player``.

    The coalition commits a deterministic strategy first and the deviating
    player best-responds knowing it; positional optima on both sides make
    the resulting turn-based game finite.  ``backend`` is one of ``enum``
    (exhaustive positional commitments), ``improve`` (policy iteration),
    ``zp`` (value iteration cross-check) or ``auto``.
    """
    per_state = _response_classes(game, player)
    combos = 1
    for cs in per_state:
        combos *= len(cs)
    if backend == "auto":
        backend = "enum" if combos <= enum_limit else "improve"
    if backend == "enum":
        if combos > enum_limit:
            raise SolverLimitError(
                f"{combos} positional commitments exceed the enumeration limit"
            )
        vals, choice = _punish_enum(game, player, per_state)
    elif backend == "improve":
        vals, choice = _punish_improve(game, player, per_state)
    elif backend == "zp":
        approx = _punish_zwick_paterson(game, player, per_state)
        vals = approx
        choice = None
    else:
        raise ValueError(f"unknown punishment backend {backend!r}")

    if choice is None:
        witness: tuple[Mapping[int, int], ...] = tuple(
            dict(per_state[s][0][1]) for s in range(game.n_states)
        )
    else:
        witness = tuple(dict(per_state[s][choice[s]][1]) for s in range(game.n_states))
    return PunishmentResult(player=player, values=tuple(vals), coalition=witness)
