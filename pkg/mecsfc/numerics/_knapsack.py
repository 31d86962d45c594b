from __future__ import annotations
from dataclasses import dataclass
import math
from typing import Hashable, FrozenSet, List, Sequence
import warnings

import numpy as np

from ..settings import register_option, get_option, is_positive_int

register_option(
    "numerics.knapsack.max_nodes",
    2_000_000,
    "Search guard of solve_knapsack; the incumbent is returned (with a warning) when exceeded",
    validator=is_positive_int,
)


@dataclass(frozen=True)
class KnapsackItem:
    """Item of a 0/1 knapsack with real-valued size

    Parameters
    ----------
    id : Hashable
        identifier, ids of one instance must be mutually comparable
    value : float
        value gained by packing the item, >= 0
    size : float
        capacity consumed by the item (e.g. a clock speed), >= 0
    """

    id: Hashable
    value: float
    size: float

    def __post_init__(self) -> None:
        if not (self.value >= 0):
            raise ValueError(f"Knapsack item {self.id!r} must have value >= 0, got {self.value}")
        if not (self.size >= 0):
            raise ValueError(f"Knapsack item {self.id!r} must have size >= 0, got {self.size}")


def solve_knapsack(items: Sequence[KnapsackItem], capacity: float) -> FrozenSet[Hashable]:
    """Exact 0/1 knapsack by depth-first branch and bound

    Items are searched in order of decreasing value density (ties: smaller
    size, then id), including an item before excluding it, and the
    fractional (LP) relaxation bounds every node. With integral values the
    bound is rounded down. The first optimum met in this order is returned,
    so the selection is deterministic; the first leaf reached is the greedy
    solution, hence the result is never worse than greedy-by-density.
    Between interchangeable items (equal value and size) the smaller ids
    win, so ties among such items resolve lexicographically by id; a
    denser or smaller item is still preferred over a smaller id.

    Parameters
    ----------
    items : Sequence[KnapsackItem]
        candidate items
    capacity : float
        knapsack capacity, >= 0

    Returns
    -------
    FrozenSet[Hashable]
        ids of the selected items

    Examples
    --------
    >>> items = [KnapsackItem("a", 1, 2.0), KnapsackItem("b", 1, 1.5), KnapsackItem("c", 1, 1.0)]
    >>> sorted(solve_knapsack(items, 2.6))
    ['b', 'c']
    """
    if capacity < 0:
        raise ValueError(f"Knapsack capacity must be >= 0, got {capacity}")

    eps_size = 1e-12 * max(1.0, capacity)
    free = [it for it in items if it.size == 0 and it.value > 0]
    candidates = [
        it for it in items if it.size > 0 and it.value > 0 and it.size <= capacity + eps_size
    ]
    if not candidates:
        return frozenset(it.id for it in free)

    order = sorted(candidates, key=lambda it: (-it.value / it.size, it.size, it.id))
    vals = np.array([it.value for it in order], dtype=float)
    sizes = np.array([it.size for it in order], dtype=float)
    n = len(order)
    integral = bool(np.all(vals == np.round(vals)))
    eps_val = 1e-12 * max(1.0, float(vals.sum()))
    max_nodes = get_option("numerics.knapsack.max_nodes")

    best_val = -math.inf
    best: List[int] = []
    chosen: List[int] = []
    nodes = 0
    truncated = False

    def upper_bound(i: int, val: float, room: float) -> float:
        ub = val
        for j in range(i, n):
            if sizes[j] <= room:
                room -= sizes[j]
                ub += vals[j]
            else:
                ub += vals[j] * room / sizes[j]
                break
        if integral:
            ub = math.floor(ub + 1e-9)
        return ub

    def search(i: int, val: float, room: float) -> None:
        nonlocal best_val, best, nodes, truncated
        nodes += 1
        if nodes > max_nodes:
            truncated = True
            return
        if val > best_val + eps_val:
            best_val = val
            best = list(chosen)
        if i == n or truncated:
            return
        if upper_bound(i, val, room) <= best_val + eps_val:
            return
        if sizes[i] <= room + eps_size:
            chosen.append(i)
            search(i + 1, val + vals[i], max(room - sizes[i], 0.0))
            chosen.pop()
        search(i + 1, val, room)

    search(0, 0.0, float(capacity))

    if truncated:
        warnings.warn(
            f"Knapsack search stopped after {max_nodes} nodes ({n} items); "
            "returning the best selection found"
        )

    return frozenset([order[i].id for i in best] + [it.id for it in free])
