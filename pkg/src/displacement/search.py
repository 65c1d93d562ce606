"""Bounded nondeterministic search shared by all machine models.

A configuration is ``(state, position, memory)``.  Positions are processed
in increasing order; within one position the silent closure is explored
breadth first, so the silent depth recorded for a configuration is minimal
and memoization on the full configuration is exact.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Optional, Sequence


class Outcome(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        return {"accept": 0, "reject": 1, "unknown": 2}[self.value]


@dataclass(frozen=True)
class RunBudget:
    max_configurations: int = 200_000
    max_stack_height: Optional[int] = None  # None: machine-specific default
    max_silent_steps: int = 10_000

    def __post_init__(self):
        for name in ("max_configurations", "max_stack_height", "max_silent_steps"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive")

    def height_for(self, default: int) -> int:
        return self.max_stack_height if self.max_stack_height is not None else default


@dataclass
class RunResult:
    outcome: Outcome
    binding: Optional[str] = None  # budget dimension that pruned the search
    configurations: int = 0
    witness: Optional[list] = None  # [(transition, configuration), ...] on accept

    @property
    def accepted(self) -> bool:
        return self.outcome is Outcome.ACCEPT

    def __bool__(self) -> bool:
        return self.accepted


Moves = Callable[[Hashable, Hashable], Iterable[tuple]]


def layered_search(word: Sequence, initial: tuple, moves: Moves,
                   accepting: Callable[[Hashable, Hashable], bool],
                   height: Callable[[Hashable], int], max_height: int,
                   budget: RunBudget,
                   dead: Optional[Callable[[Hashable], bool]] = None,
                   visit: Optional[Callable[[tuple], None]] = None,
                   witness: bool = False) -> RunResult:
    """Decide whether some run reads ``word`` and ends in an accepting configuration.

    ``moves(state, memory)`` yields ``(symbol, transition, state', memory')``
    with ``symbol`` ``None`` for silent moves.  ``dead(memory)`` marks
    memories that can never be emptied again; those are dropped without
    counting as budget pruning.
    """
    n = len(word)
    state0, memory0 = initial
    start = (state0, 0, memory0)
    parents: dict = {start: None}
    frontier = [start]
    binding: Optional[str] = None
    count = 0

    def result(outcome, config=None):
        path = _path(parents, config) if (witness and config is not None) else None
        return RunResult(outcome, binding, count, path)

    for pos in range(n + 1):
        depth = {c: 0 for c in frontier}
        queue = deque(frontier)
        following: list = []
        while queue:
            config = queue.popleft()
            count += 1
            if count > budget.max_configurations:
                binding = "max_configurations"
                return result(Outcome.UNKNOWN)
            state, _, memory = config
            if visit is not None:
                visit(config)
            if pos == n and accepting(state, memory):
                return result(Outcome.ACCEPT, config)
            for symbol, transition, target, new_memory in moves(state, memory):
                if new_memory is None or (dead is not None and dead(new_memory)):
                    continue
                if height(new_memory) > max_height:
                    binding = binding or "max_stack_height"
                    continue
                if symbol is None:
                    nxt = (target, pos, new_memory)
                    if nxt in parents:
                        continue
                    d = depth[config] + 1
                    if d > budget.max_silent_steps:
                        binding = binding or "max_silent_steps"
                        continue
                    parents[nxt] = (config, transition)
                    depth[nxt] = d
                    queue.append(nxt)
                elif pos < n and symbol == word[pos]:
                    nxt = (target, pos + 1, new_memory)
                    if nxt in parents:
                        continue
                    parents[nxt] = (config, transition)
                    following.append(nxt)
        frontier = following
    return result(Outcome.UNKNOWN if binding else Outcome.REJECT)


def _path(parents: dict, config) -> list:
    steps = []
    while parents[config] is not None:
        prev, transition = parents[config]
        steps.append((transition, config))
        config = prev
    steps.append((None, config))
    steps.reverse()
    return steps


def explore(word: Sequence, initial: tuple, moves: Moves,
            accepting: Callable[[Hashable, Hashable], bool],
            height: Callable[[Hashable], int], max_height: int,
            budget: RunBudget, visit: Optional[Callable[[tuple], None]] = None):
    """The whole reachable configuration graph, for enumerating computations.

    Returns ``(successors, accepting_configs, binding, start)`` where
    ``successors`` maps each configuration to ``[(transition, next), ...]``.
    """
    n = len(word)
    state0, memory0 = initial
    start = (state0, 0, memory0)
    successors: dict = {}
    finals = []
    binding: Optional[str] = None
    queue = deque([(start, 0)])
    depth = {start: 0}
    while queue:
        config, d = queue.popleft()
        if len(successors) >= budget.max_configurations:
            binding = "max_configurations"
            break
        state, pos, memory = config
        if visit is not None:
            visit(config)
        if pos == n and accepting(state, memory):
            finals.append(config)
        out = successors[config] = []
        for symbol, transition, target, new_memory in moves(state, memory):
            if new_memory is None:
                continue
            if height(new_memory) > max_height:
                binding = binding or "max_stack_height"
                continue
            if symbol is None:
                nxt, nd = (target, pos, new_memory), d + 1
                if nd > budget.max_silent_steps:
                    binding = binding or "max_silent_steps"
                    continue
            elif pos < n and symbol == word[pos]:
                nxt, nd = (target, pos + 1, new_memory), 0
            else:
                continue
            out.append((transition, nxt))
            if nxt not in depth:
                depth[nxt] = nd
                queue.append((nxt, nd))
    return successors, finals, binding, start
