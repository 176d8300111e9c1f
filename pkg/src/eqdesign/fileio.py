"""Canonical JSON documents for games and reward machines.

A game document carries players, actions, states, the initial state, the
per-state protocol, the transition table (joint actions joined with
commas), per-player weight tables and the global table.  Serialization is
canonical: sorted keys, no insignificant whitespace, trailing newline -
parsing and re-serializing any accepted document is byte-stable.
"""

from __future__ import annotations

import json
from typing import Mapping

from .games import Game, GameStructureError, make_game
from .rewards import RewardMachine, RewardMachineError


class DocumentError(ValueError):
    """Malformed document; carries the offending key path or position."""


def _syntax_error(exc: json.JSONDecodeError) -> DocumentError:
    return DocumentError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}")


def _require(doc: Mapping, key: str, kind, path: str):
    if key not in doc:
        raise DocumentError(f"{path}{key}: missing")
    value = doc[key]
    if not isinstance(value, kind):
        raise DocumentError(f"{path}{key}: expected {kind.__name__}")
    return value


def parse_game(text: str) -> Game:
    """Parse and validate a game document; diagnostics name the key path."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _syntax_error(exc)
    if not isinstance(doc, dict):
        raise DocumentError("top level: expected an object")
    players = _require(doc, "players", list, "")
    actions = _require(doc, "actions", list, "")
    states = _require(doc, "states", list, "")
    initial = _require(doc, "initial", str, "")
    protocol_doc = _require(doc, "protocol", dict, "")
    transitions_doc = _require(doc, "transitions", dict, "")
    weights_doc = _require(doc, "weights", dict, "")
    global_doc = _require(doc, "global_weights", dict, "")

    for a in actions:
        if "," in a:
            raise DocumentError(f"actions.{a}: action names may not contain commas")

    transitions: dict[str, dict[tuple[str, ...], str]] = {}
    for sname, table in transitions_doc.items():
        if not isinstance(table, dict):
            raise DocumentError(f"transitions.{sname}: expected an object")
        parsed: dict[tuple[str, ...], str] = {}
        for joint, succ in table.items():
            parsed[tuple(joint.split(","))] = succ
        transitions[sname] = parsed

    try:
        return make_game(
            players=players,
            actions=actions,
            states=states,
            initial=initial,
            protocol=protocol_doc,
            transitions=transitions,
            weights=weights_doc,
            global_weights=global_doc,
            meta=doc.get("meta"),
        )
    except GameStructureError as exc:
        raise DocumentError(str(exc))


def game_to_doc(game: Game) -> dict:
    protocol = {
        game.state_names[s]: {
            game.player_names[i]: [game.action_names[a] for a in game.protocol[i][s]]
            for i in range(game.n_players)
        }
        for s in range(game.n_states)
    }
    transitions = {
        game.state_names[s]: {
            ",".join(game.joint_action_names(joint)): game.state_names[succ]
            for joint, succ in game.moves(s)
        }
        for s in range(game.n_states)
    }
    weights = {
        game.player_names[i]: {
            game.state_names[s]: game.weights[i][s] for s in range(game.n_states)
        }
        for i in range(game.n_players)
    }
    doc = {
        "players": list(game.player_names),
        "actions": list(game.action_names),
        "states": list(game.state_names),
        "initial": game.state_names[game.initial],
        "protocol": protocol,
        "transitions": transitions,
        "weights": weights,
        "global_weights": {
            game.state_names[s]: game.global_weights[s] for s in range(game.n_states)
        },
    }
    if game.meta:
        doc["meta"] = dict(game.meta)
    return doc


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def serialize_game(game: Game) -> str:
    return canonical_json(game_to_doc(game))


def canonicalize(text: str) -> str:
    """Reformat any JSON document into the canonical byte form."""
    try:
        return canonical_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise _syntax_error(exc)


def parse_rm(text: str, game: Game) -> RewardMachine:
    """Parse a reward machine document against its target game."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _syntax_error(exc)
    if not isinstance(doc, dict):
        raise DocumentError("top level: expected an object")
    states = _require(doc, "states", list, "")
    initial = _require(doc, "initial", str, "")
    transitions = _require(doc, "transitions", dict, "")
    rewards = _require(doc, "rewards", dict, "")
    qid = {q: k for k, q in enumerate(states)}
    if len(qid) != len(states):
        raise DocumentError("states: duplicate machine state names")
    if initial not in qid:
        raise DocumentError(f"initial: unknown machine state {initial!r}")

    step_rows = []
    reward_rows = []
    for q in states:
        t_table = transitions.get(q)
        if not isinstance(t_table, dict):
            raise DocumentError(f"transitions.{q}: missing or not an object")
        r_table = rewards.get(q)
        if not isinstance(r_table, dict):
            raise DocumentError(f"rewards.{q}: missing or not an object")
        step_row = []
        reward_row = []
        for sname in game.state_names:
            if sname not in t_table:
                raise DocumentError(f"transitions.{q}.{sname}: missing")
            target = t_table[sname]
            if target not in qid:
                raise DocumentError(
                    f"transitions.{q}.{sname}: unknown machine state {target!r}"
                )
            step_row.append(qid[target])
            if sname not in r_table:
                raise DocumentError(f"rewards.{q}.{sname}: missing")
            vec = r_table[sname]
            if (not isinstance(vec, list) or len(vec) != game.n_players
                    or any(not isinstance(x, int) or x < 0 for x in vec)):
                raise DocumentError(
                    f"rewards.{q}.{sname}: expected {game.n_players} naturals"
                )
            reward_row.append(tuple(vec))
        step_rows.append(tuple(step_row))
        reward_rows.append(tuple(reward_row))
    try:
        return RewardMachine(
            state_names=tuple(states),
            initial=qid[initial],
            step=tuple(step_rows),
            rewards=tuple(reward_rows),
        )
    except RewardMachineError as exc:
        raise DocumentError(str(exc))


def rm_to_doc(rm: RewardMachine, game: Game) -> dict:
    return {
        "states": list(rm.state_names),
        "initial": rm.state_names[rm.initial],
        "transitions": {
            rm.state_names[q]: {
                game.state_names[s]: rm.state_names[rm.step[q][s]]
                for s in range(game.n_states)
            }
            for q in range(rm.n_states)
        },
        "rewards": {
            rm.state_names[q]: {
                game.state_names[s]: list(rm.rewards[q][s])
                for s in range(game.n_states)
            }
            for q in range(rm.n_states)
        },
    }


def serialize_rm(rm: RewardMachine, game: Game) -> str:
    return canonical_json(rm_to_doc(rm, game))
