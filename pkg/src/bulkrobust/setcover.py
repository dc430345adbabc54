"""Exact weighted set cover by branch and bound.

Used wherever an exact small cover is needed: per-side rectangle covering,
spanning-tree augmentation at level 1, and the hypergraph vertex cover
reference.  Elements are 0..n-1 and coverage is tracked in bitmasks, so
instances stay fast well past the sizes this package generates.
"""

from .errors import BudgetError


def exact_min_cover(element_count, sets, node_cap=None):
    """Minimum-cost subcollection covering all elements.

    `sets` is a sequence of (cost, elements) pairs.  Returns
    (total_cost, tuple of chosen set indices).  Deterministic: branching
    always targets the uncovered element with the fewest candidates and
    children are explored by (cost, index).  Raises ValueError when some
    element is uncoverable and BudgetError when `node_cap` search nodes
    are exceeded.
    """
    full = (1 << element_count) - 1
    masks = []
    costs = []
    for cost, elements in sets:
        mask = 0
        for el in elements:
            if not 0 <= el < element_count:
                raise ValueError(f"element {el} out of range")
            mask |= 1 << el
        masks.append(mask)
        costs.append(cost)

    if element_count == 0:
        return 0, ()

    candidates = [[] for _ in range(element_count)]
    order = sorted(range(len(masks)), key=lambda i: (costs[i], i))
    for i in order:
        mask = masks[i]
        for el in range(element_count):
            if mask >> el & 1:
                candidates[el].append(i)
    for el in range(element_count):
        if not candidates[el]:
            raise ValueError(f"element {el} is uncoverable")
    cheapest = [costs[candidates[el][0]] for el in range(element_count)]

    best_cost = None
    best_pick = None
    nodes = 0

    def branch(covered, cost, picked):
        nonlocal best_cost, best_pick, nodes
        nodes += 1
        if node_cap is not None and nodes > node_cap:
            raise BudgetError(f"set-cover search exceeded {node_cap} nodes")
        if covered == full:
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_pick = tuple(picked)
            return
        if best_cost is not None and cost >= best_cost:
            return
        # branch on the uncovered element with the fewest candidate sets
        target, fanout = -1, None
        for el in range(element_count):
            if covered >> el & 1:
                continue
            size = len(candidates[el])
            if fanout is None or size < fanout:
                target, fanout = el, size
        if best_cost is not None and cost + cheapest[target] >= best_cost:
            return
        for i in candidates[target]:
            picked.append(i)
            branch(covered | masks[i], cost + costs[i], picked)
            picked.pop()

    branch(0, 0, [])
    return best_cost, best_pick
