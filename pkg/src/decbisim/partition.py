"""Signature-based partition refinement.

Shared by DFA minimization and bisimulation checking.  Each round splits
every block by the set of (event, target block) pairs its states can reach
in one step; the loop stops when a round creates no new block.  The full
round history is kept so callers can explain *why* two states were split.
"""

from typing import Dict, Hashable, Iterable, List, Sequence, Tuple

Move = Tuple[str, Hashable]


def refine(
    states: Sequence[Hashable],
    moves: Dict[Hashable, Iterable[Move]],
    initial_key: Dict[Hashable, Hashable],
) -> List[Dict[Hashable, int]]:
    """Return the list of block assignments, one per refinement round.

    ``history[0]`` groups states by ``initial_key``; ``history[-1]`` is the
    coarsest stable partition.  Block numbers follow first appearance in
    ``states`` so results are reproducible.
    """
    moves = {s: tuple(moves.get(s, ())) for s in states}
    block = _number(states, lambda s: initial_key[s])
    history = [block]
    count = len(set(block.values()))
    while True:
        prev = block
        block = _number(
            states,
            lambda s: (prev[s], frozenset((e, prev[t]) for e, t in moves[s])),
        )
        new_count = len(set(block.values()))
        if new_count == count:
            return history
        history.append(block)
        count = new_count


def _number(states, key):
    ids = {}
    out = {}
    for s in states:
        out[s] = ids.setdefault(key(s), len(ids))
    return out


def signature(state, moves, block) -> frozenset:
    return frozenset((e, block[t]) for e, t in moves.get(state, ()))


def split_level(history: List[Dict[Hashable, int]], p, q) -> int:
    """First round index at which ``p`` and ``q`` sit in different blocks, or -1."""
    for level, block in enumerate(history):
        if block[p] != block[q]:
            return level
    return -1
