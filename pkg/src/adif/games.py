"""The two-phase independence game for prenex sentences: arena construction,
bucket tracking, compilation to a finite max-parity game, and solving.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .formulas import (
    Formula, NotASentence, NotPrenex, QuantifierStep, free_vars,
    prefix_subformulae, split_prenex, support_vars,
)
from .hyperteams import Assignment, asg_get, asg_restrict, asg_vars, format_assignment
from .semantics import sat_fol
from .structures import Structure

ELOISE = "Eloise"
ABELARD = "Abelard"

PHASE_DECISION = "I"
PHASE_CHALLENGE = "II"


class GameError(Exception):
    pass


class StateSpaceBudgetExceeded(GameError):
    def __init__(self, count: int):
        super().__init__(f"state expansion exceeded the budget at {count} states")
        self.count = count


# ---------------------------------------------------------------------------
# Arena
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Position:
    index: int
    sigma: Assignment
    phase: str

    def describe(self) -> str:
        return f"{self.phase} {self.index} {format_assignment(self.sigma)}"


@dataclass(frozen=True)
class Move:
    target: Position
    kind: str           # 'skip', 'decide', 'switch', 'confirm', 'challenge'
    var: str | None     # the variable whose value was (re)chosen, if any


@dataclass
class Arena:
    structure: Structure
    sentence: Formula
    prefix: tuple[QuantifierStep, ...]
    matrix: Formula
    subformulae: list[Formula]
    vacuous: list[bool]
    key_vars: list[frozenset[str]]  # per prefix index; empty for vacuous ones
    priorities: list[int]

    @property
    def matrix_index(self) -> int:
        return len(self.prefix)

    def initial(self) -> Position:
        return Position(0, (), PHASE_DECISION)

    def owner(self, position: Position) -> str | None:
        if position.index == self.matrix_index:
            if position.phase == PHASE_DECISION:
                return ELOISE
            return None  # terminal
        return ELOISE if self.prefix[position.index].kind == "E" else ABELARD

    def decided_before(self, index: int) -> list[str]:
        return [s.var for k, s in enumerate(self.prefix[:index]) if not self.vacuous[k]]

    def moves(self, position: Position) -> list[Move]:
        i, sigma, phase = position.index, position.sigma, position.phase
        if i == self.matrix_index:
            if phase == PHASE_DECISION:
                return [Move(Position(0, sigma, PHASE_CHALLENGE), "switch", None)]
            return []  # finite plays end here
        step = self.prefix[i]
        if self.vacuous[i]:
            return [Move(Position(i + 1, sigma, phase), "skip", None)]
        if phase == PHASE_DECISION:
            return [Move(Position(i + 1, _with(sigma, step.var, a), PHASE_DECISION),
                         "decide", step.var)
                    for a in self.structure.domain]
        moves = [Move(Position(i + 1, sigma, PHASE_CHALLENGE), "confirm", None)]
        current = asg_get(sigma, step.var)
        kept = asg_restrict(sigma, self.decided_before(i))
        for a in self.structure.domain:
            if a != current:
                moves.append(Move(
                    Position(i + 1, _with(kept, step.var, a), PHASE_DECISION),
                    "challenge", step.var))
        return moves


def _with(sigma: Assignment, var: str, value: str) -> Assignment:
    return tuple(sorted([p for p in sigma if p[0] != var] + [(var, value)]))


def priority_map(prefix) -> list[int]:
    """Minimal strictly increasing priorities, even exactly on universals."""
    priorities = []
    previous = 0
    for step in prefix:
        candidate = previous + 1
        wants_even = step.kind == "A"
        if (candidate % 2 == 0) != wants_even:
            candidate += 1
        priorities.append(candidate)
        previous = candidate
    return priorities


def build_arena(structure: Structure, phi: Formula) -> Arena:
    prefix, matrix, matrix_qf = split_prenex(phi)
    if not matrix_qf:
        raise NotPrenex("the matrix must be quantifier-free")
    if any(step.is_meta for step in prefix):
        raise NotPrenex("plain quantifier prefix expected")
    if not free_vars(phi).is_empty():
        raise NotASentence(f"free variables: {free_vars(phi)}")
    structure.check_formula(phi)
    subformulae = prefix_subformulae(phi)
    vacuous = []
    key_vars = []
    for k, step in enumerate(prefix):
        body_free = free_vars(subformulae[k + 1])
        is_vacuous = step.var not in body_free
        vacuous.append(is_vacuous)
        if is_vacuous:
            key_vars.append(frozenset())
        else:
            earlier = frozenset(
                s.var for j, s in enumerate(prefix[:k]) if not vacuous[j])
            key_vars.append(step.constraint.denotation_within(earlier))
    return Arena(structure, phi, prefix, matrix, subformulae, vacuous,
                 key_vars, priority_map(prefix))


# ---------------------------------------------------------------------------
# Buckets
# ---------------------------------------------------------------------------

Bucket = tuple[tuple[Assignment, str], ...]

EMPTY_BUCKET: Bucket = ()  # no recorded constraints: every uniform function fits


def constraint_of(key_vars: frozenset[str], sigma: Assignment, var: str):
    """The record a fresh value for var adds: its key restriction and value."""
    return (asg_restrict(sigma, key_vars), asg_get(sigma, var))


def bucket_update(bucket: Bucket, entry) -> tuple[Bucket, bool]:
    """Intersect with the functions compatible with entry; on conflict the
    bucket is reset to just that record and the move counts as a cheat."""
    key, value = entry
    for k, v in bucket:
        if k == key:
            if v == value:
                return bucket, False
            return ((key, value),), True
    return tuple(sorted(bucket + ((key, value),))), False


# ---------------------------------------------------------------------------
# Parity games
# ---------------------------------------------------------------------------

@dataclass
class ParityGame:
    owners: list[str]            # ELOISE or ABELARD per state
    priorities: list[int]
    successors: list[list[int]]
    labels: list                 # opaque per-state annotations
    initial: int = 0

    def __len__(self) -> int:
        return len(self.owners)


@dataclass(frozen=True)
class GameState:
    position: Position
    buckets: tuple[Bucket, ...]
    entry_priority: int


def expand_to_parity(structure: Structure, phi: Formula,
                     max_states: int = 5_000_000) -> tuple[ParityGame, Arena]:
    """Product of arena positions with bucket contents, priorities stamped on
    the states entered by cheating moves; terminal matrix positions absorb
    into self-loops whose parity encodes the Tarskian verdict."""
    arena = build_arena(structure, phi)
    n_prefix = len(arena.prefix)
    initial = GameState(arena.initial(), tuple(EMPTY_BUCKET for _ in range(n_prefix)), 0)
    index: dict[GameState, int] = {initial: 0}
    order: list[GameState] = [initial]
    successors: list[list[int]] = []
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        succ: list[int] = []
        position = state.position
        if position.index == arena.matrix_index and position.phase == PHASE_CHALLENGE:
            succ.append(index[state])  # absorbed terminal
            successors.append(succ)
            continue
        for move in arena.moves(position):
            buckets = state.buckets
            stamped = 0
            if move.kind in ("decide", "challenge"):
                i = position.index
                entry = constraint_of(arena.key_vars[i], move.target.sigma,
                                      arena.prefix[i].var)
                updated, cheated = bucket_update(buckets[i], entry)
                buckets = buckets[:i] + (updated,) + buckets[i + 1:]
                if cheated:
                    stamped = arena.priorities[i]
            new_state = GameState(move.target, buckets, stamped)
            pos = index.get(new_state)
            if pos is None:
                pos = len(order)
                if pos >= max_states:
                    raise StateSpaceBudgetExceeded(pos + 1)
                index[new_state] = pos
                order.append(new_state)
                queue.append(new_state)
            succ.append(pos)
        successors.append(succ)

    owners: list[str] = []
    priorities: list[int] = []
    for state in order:
        position = state.position
        owner = arena.owner(position)
        if owner is None:
            sigma = position.sigma
            holds = sat_fol(structure, dict(sigma), arena.matrix)
            owners.append(ELOISE)
            priorities.append(0 if holds else 1)
        else:
            owners.append(owner)
            priorities.append(state.entry_priority)
    return ParityGame(owners, priorities, successors, order), arena


# ---------------------------------------------------------------------------
# Solving (attractor-based recursion, max-parity, even favours Eloise)
# ---------------------------------------------------------------------------

def solve_parity(game: ParityGame):
    """Winning regions and positional strategies for both players.

    Ties break to the lowest-index successor, so the result is deterministic.
    """
    predecessors: list[list[int]] = [[] for _ in range(len(game))]
    for source, targets in enumerate(game.successors):
        for target in targets:
            predecessors[target].append(source)

    def attractor(player: str, base: set[int], region: set[int]):
        reached = set(base)
        strategy: dict[int, int] = {}
        queue = deque(sorted(base))
        while queue:
            state = queue.popleft()
            for pred in predecessors[state]:
                if pred not in region or pred in reached:
                    continue
                inside = [t for t in game.successors[pred] if t in region]
                if game.owners[pred] == player:
                    choice = min(t for t in inside if t in reached)
                    strategy[pred] = choice
                    reached.add(pred)
                    queue.append(pred)
                elif all(t in reached for t in inside):
                    reached.add(pred)
                    queue.append(pred)
        return reached, strategy

    def recurse(region: set[int]):
        if not region:
            return {ELOISE: set(), ABELARD: set()}, {}
        top = max(game.priorities[s] for s in region)
        player = ELOISE if top % 2 == 0 else ABELARD
        opponent = ABELARD if player == ELOISE else ELOISE
        base = {s for s in region if game.priorities[s] == top}
        attracted, attract_strategy = attractor(player, base, region)
        sub_regions, sub_strategy = recurse(region - attracted)
        if not sub_regions[opponent]:
            strategy = dict(sub_strategy)
            strategy.update(attract_strategy)
            for state in sorted(base):
                if game.owners[state] == player and state not in strategy:
                    strategy[state] = min(
                        t for t in game.successors[state] if t in region)
            return {player: set(region), opponent: set()}, strategy
        escape, escape_strategy = attractor(opponent, sub_regions[opponent], region)
        final_regions, final_strategy = recurse(region - escape)
        strategy = dict(final_strategy)
        for state, choice in sub_strategy.items():
            if state in escape and game.owners[state] == opponent and state not in strategy:
                strategy[state] = choice
        for state, choice in escape_strategy.items():
            strategy.setdefault(state, choice)
        regions = {player: final_regions[player],
                   opponent: final_regions[opponent] | escape}
        return regions, strategy

    regions, strategy = recurse(set(range(len(game))))
    winners = [ELOISE if s in regions[ELOISE] else ABELARD for s in range(len(game))]
    return winners, strategy


# ---------------------------------------------------------------------------
# Winner and traces
# ---------------------------------------------------------------------------

@dataclass
class GameOutcome:
    winner: str
    game: ParityGame
    arena: Arena
    winners: list[str]
    strategy: dict[int, int]

    def sample_trace(self, opponent_strategy: dict[int, int] | None = None,
                     max_steps: int = 10_000) -> "Trace":
        """Play the solver strategies from the initial state; stops at the
        absorbed terminal or once a state repeats (cycle found)."""
        strategy = dict(self.strategy)
        if opponent_strategy:
            strategy.update(opponent_strategy)
        steps: list[int] = []
        seen: dict[int, int] = {}
        state = self.game.initial
        while len(steps) < max_steps:
            if state in seen:
                cycle_start = seen[state]
                return Trace(self, steps, cycle_start)
            seen[state] = len(steps)
            steps.append(state)
            succ = self.game.successors[state]
            if succ == [state]:
                return Trace(self, steps, len(steps) - 1)
            chosen = strategy.get(state)
            if chosen is None:
                chosen = min(succ)
            state = chosen
        return Trace(self, steps, None)


@dataclass
class Trace:
    outcome: GameOutcome
    states: list[int]
    cycle_start: int | None

    def cycle_priorities(self) -> list[int]:
        if self.cycle_start is None:
            return []
        return [self.outcome.game.priorities[s] for s in self.states[self.cycle_start:]]

    def lines(self) -> list[str]:
        out = []
        for s in self.states:
            label: GameState = self.outcome.game.labels[s]
            out.append(f"{label.position.describe()} {self.outcome.game.priorities[s]}")
        if self.cycle_start is not None and self.states:
            last = self.states[self.cycle_start]
            label = self.outcome.game.labels[last]
            if self.cycle_start != len(self.states) - 1 or \
                    self.outcome.game.successors[self.states[-1]] != [self.states[-1]]:
                out.append(f"cycle back to step {self.cycle_start}: {label.position.describe()}")
        out.append(f"winner {self.outcome.winner}")
        return out


def game_winner(structure: Structure, phi: Formula,
                max_states: int = 5_000_000) -> GameOutcome:
    game, arena = expand_to_parity(structure, phi, max_states)
    winners, strategy = solve_parity(game)
    return GameOutcome(winners[game.initial], game, arena, winners, strategy)
