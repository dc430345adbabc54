"""Small dense LP solving, max-flow separation oracles, and the link LP.

The covering LP is solved with lazy constraints: start without covering
rows, repeatedly ask the min-cut oracle for a violated failure set, add
its row, re-solve.  A dense two-phase simplex (Dantzig pivoting, Bland's
rule after a stall) does the re-solves; everything is deterministic.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, InvariantError
from .links import covers

EPS_FEAS = 1e-6     # constraint satisfaction tolerance
EPS_LP = 1e-7       # objective tolerance
_PIVOT_EPS = 1e-9
_STALL_LIMIT = 30
_MAX_PIVOTS = 20000
_MAX_ROUNDS = 200


@dataclass
class LinearProgram:
    """minimize c.x subject to a.x >= b per row, x >= 0."""

    objective: np.ndarray
    rows: list                      # list of (coefficients, bound)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.rows = [(np.asarray(a, dtype=float), float(b)) for a, b in self.rows]
        n = self.objective.shape[0]
        for a, b in self.rows:
            if a.shape != (n,):
                raise ValueError("constraint row has wrong width")
            if not (np.isfinite(a).all() and np.isfinite(b)):
                raise ValueError("non-finite LP entry")
        if not np.isfinite(self.objective).all():
            raise ValueError("non-finite objective entry")


@dataclass
class SimplexResult:
    status: str                     # "optimal" | "infeasible" | "unbounded"
    value: float = None
    x: np.ndarray = None


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and abs(tableau[r, col]) > 1e-14:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau, basis, ncols):
    """Minimize the objective row in place; returns 'optimal' or 'unbounded'.

    Entering columns are drawn from the first `ncols` columns only, which
    keeps artificial variables from re-entering during phase 1.
    """
    stall = 0
    last = tableau[-1, -1]
    for _ in range(_MAX_PIVOTS):
        obj = tableau[-1, :ncols]
        if stall < _STALL_LIMIT:
            col = int(np.argmin(obj))
            if obj[col] >= -_PIVOT_EPS:
                return "optimal"
        else:
            negatives = np.nonzero(obj < -_PIVOT_EPS)[0]
            if negatives.size == 0:
                return "optimal"
            col = int(negatives[0])    # Bland's rule
        column = tableau[:-1, col]
        rhs = tableau[:-1, -1]
        ratios = [(rhs[r] / column[r], basis[r], r)
                  for r in range(len(basis)) if column[r] > _PIVOT_EPS]
        if not ratios:
            return "unbounded"
        _, _, row = min(ratios)
        _pivot(tableau, basis, row, col)
        now = tableau[-1, -1]
        stall = stall + 1 if now >= last - 1e-12 else 0
        last = now
    raise InvariantError("simplex exceeded its pivot cap")


def simplex_min(lp):
    """Two-phase dense simplex for `min c.x, A x >= b, x >= 0`."""
    n = lp.objective.shape[0]
    m = len(lp.rows)
    if m == 0:
        return SimplexResult("optimal", 0.0, np.zeros(n))

    # Equality form with nonnegative right-hand sides: rows with b <= 0 get a
    # slack that can start basic; rows with b > 0 get a surplus plus an
    # artificial variable for phase 1.
    need_artificial = [b > 0 for _, b in lp.rows]
    n_art = sum(need_artificial)
    ncols = n + m + n_art
    tableau = np.zeros((m + 1, ncols + 1))
    basis = [0] * m
    art_col = n + m
    for r, (a, b) in enumerate(lp.rows):
        if b <= 0:
            tableau[r, :n] = -a
            tableau[r, n + r] = 1.0
            tableau[r, -1] = -b
            basis[r] = n + r
        else:
            tableau[r, :n] = a
            tableau[r, n + r] = -1.0
            tableau[r, art_col] = 1.0
            tableau[r, -1] = b
            basis[r] = art_col
            art_col += 1

    if n_art:
        for r in range(m):
            if basis[r] >= n + m:
                tableau[-1] -= tableau[r]
        status = _run_simplex(tableau, basis, n + m)
        if status == "unbounded":
            raise InvariantError("phase-1 objective cannot be unbounded")
        if -tableau[-1, -1] > EPS_FEAS:
            return SimplexResult("infeasible")
        for r in range(m):
            if basis[r] >= n + m:
                pivots = np.nonzero(np.abs(tableau[r, :n + m]) > _PIVOT_EPS)[0]
                if pivots.size:
                    _pivot(tableau, basis, r, int(pivots[0]))
                # else: redundant row, the artificial stays basic at zero

    tableau[-1, :] = 0.0
    tableau[-1, :n] = lp.objective
    for r in range(m):
        if basis[r] < n + m and abs(tableau[-1, basis[r]]) > 1e-14:
            tableau[-1] -= tableau[-1, basis[r]] * tableau[r]
    status = _run_simplex(tableau, basis, n + m)
    if status == "unbounded":
        return SimplexResult("unbounded")
    x = np.zeros(n)
    for r, b in enumerate(basis):
        if b < n:
            x[b] = tableau[r, -1]
    return SimplexResult("optimal", float(lp.objective @ x), x)


def lp_to_text(lp):
    """Plain-text dump: `min c.x; a_i.x >= b_i; x >= 0`, one row per line."""
    lines = ["min " + " ".join(repr(float(c)) for c in lp.objective)]
    for a, b in lp.rows:
        lines.append(" ".join(repr(float(v)) for v in a) + " >= " + repr(float(b)))
    lines.append("x >= 0")
    return "\n".join(lines) + "\n"


# -- max flow / min cut ----------------------------------------------------

def max_flow_min_cut(arc_list, source, sink):
    """Edmonds-Karp on an undirected capacitated graph.

    `arc_list` holds (u, v, capacity) undirected edges (parallel edges
    allowed).  Returns (flow value, frozenset of nodes on the source side
    of a minimum cut).  Deterministic given the arc order.
    """
    arcs = []                       # [to, residual]
    adjacency = {}
    for u, v, cap in arc_list:
        adjacency.setdefault(u, []).append(len(arcs))
        arcs.append([v, float(cap)])
        adjacency.setdefault(v, []).append(len(arcs))
        arcs.append([u, float(cap)])
    if source not in adjacency or sink not in adjacency:
        return 0.0, frozenset(adjacency) | {source}

    flow = 0.0
    while True:
        parent_arc = {source: None}
        queue = [source]
        qi = 0
        while qi < len(queue) and sink not in parent_arc:
            node = queue[qi]
            qi += 1
            for idx in adjacency[node]:
                to, residual = arcs[idx]
                if residual > 1e-12 and to not in parent_arc:
                    parent_arc[to] = idx
                    queue.append(to)
        if sink not in parent_arc:
            break
        push = float("inf")
        node = sink
        while node != source:
            idx = parent_arc[node]
            push = min(push, arcs[idx][1])
            node = arcs[idx ^ 1][0]
        node = sink
        while node != source:
            idx = parent_arc[node]
            arcs[idx][1] -= push
            arcs[idx ^ 1][1] += push
            node = arcs[idx ^ 1][0]
        flow += push

    reachable = {source}
    queue = [source]
    qi = 0
    while qi < len(queue):
        node = queue[qi]
        qi += 1
        for idx in adjacency[node]:
            to, residual = arcs[idx]
            if residual > 1e-12 and to not in reachable:
                reachable.add(to)
                queue.append(to)
    return flow, frozenset(reachable)


# -- separation oracle -------------------------------------------------------

@dataclass
class FractionalCover:
    """A fractional link-covering solution with bookkeeping."""

    links: tuple
    values: np.ndarray
    objective: float = 0.0
    tight: tuple = ()
    oracle_calls: int = 0


@dataclass
class SeparationResult:
    violating: frozenset            # None when feasible
    cut_value: float


def separation_oracle(ctx, cover, scenario_index, mode=None):
    """Find a violated failure set inside one input scenario, if any.

    Builds the capacitated graph on the solution nodes: kept solution
    edges get capacity 1 when they belong to the scenario and a large
    finite sentinel otherwise; every link contributes one edge with its
    fractional value.  A violated set exists iff the minimum cut (s-t cut
    for `st`, global cut for `global`) stays strictly below level+1; the
    scenario edges crossing that cut form the violated set.
    """
    if mode is None:
        mode = "st" if ctx.instance.problem == "st" else "global"
    level = ctx.level
    full = ctx.instance.scenario_sets[scenario_index]
    values = np.asarray(cover.values, dtype=float)
    sentinel = level + 2.0 + float(values.sum())

    arc_list = []
    for e in sorted(ctx.kept_x):
        u, v, _ = ctx.graph.edges[e]
        arc_list.append((u, v, 1.0 if e in full else sentinel))
    for link, val in zip(cover.links, values):
        u, v = (link.u, link.v) if hasattr(link, "u") else link
        arc_list.append((u, v, max(0.0, float(val))))

    if mode == "st":
        if ctx.s is None:
            raise ValueError("st separation needs terminals")
        value, side = max_flow_min_cut(arc_list, ctx.s, ctx.t)
    elif mode == "global":
        nodes = sorted(ctx.subgraph.nodes)
        anchor = nodes[0]
        value, side = float("inf"), None
        for other in nodes[1:]:
            v2, s2 = max_flow_min_cut(arc_list, anchor, other)
            if v2 < value - 1e-12:
                value, side = v2, s2
    else:
        raise ValueError(f"unknown separation mode {mode!r}")

    if value >= level + 1 - EPS_FEAS:
        return SeparationResult(None, value)

    crossing = frozenset(
        e for e in full & ctx.kept_x
        if (ctx.graph.edges[e][0] in side) != (ctx.graph.edges[e][1] in side))
    if len(crossing) != level:
        raise InvariantError(
            f"separation cut crosses {len(crossing)} scenario edges at level "
            f"{level}; the previous solution was not feasible")
    if crossing not in ctx.cuts:
        raise InvariantError(
            f"separated set {sorted(crossing)} is not among the enumerated "
            "relevant failure sets")
    return SeparationResult(crossing, value)


def solve_link_lp(ctx, links):
    """Cutting-plane solve of the link-covering LP over typed links.

    Alternates the per-scenario min-cut oracle with dense simplex re-solves
    until no scenario yields a violated failure set, then re-checks every
    enumerated failure set explicitly.
    """
    links = tuple(links)
    costs = np.array([link.cost for link in links], dtype=float)
    if not ctx.omega:
        return FractionalCover(links, np.zeros(len(links)))
    if not links:
        raise InfeasibleError(
            "augmentation impossible: no candidate links at this level")

    scenario_count = len(ctx.instance.scenario_sets)
    rows = []
    row_set = set()
    x = np.zeros(len(links))
    calls = 0
    for _ in range(_MAX_ROUNDS):
        cover = FractionalCover(links, x)
        fresh = []
        stalled_violation = False
        for j in range(scenario_count):
            result = separation_oracle(ctx, cover, j)
            calls += 1
            if result.violating is None:
                continue
            cut = ctx.cuts[result.violating]
            row = frozenset(i for i, link in enumerate(links) if covers(link, cut))
            if not row:
                raise InfeasibleError(
                    f"augmentation impossible: failure set "
                    f"{sorted(result.violating)} has no covering link")
            if row in row_set:
                stalled_violation = True
            else:
                row_set.add(row)
                fresh.append(row)
        if not fresh:
            if stalled_violation:
                raise InvariantError("separation keeps violating an added row")
            break
        rows.extend(fresh)
        lp_rows = []
        for row in rows:
            a = np.zeros(len(links))
            a[sorted(row)] = 1.0
            lp_rows.append((a, 1.0))
        for i in range(len(links)):
            a = np.zeros(len(links))
            a[i] = -1.0
            lp_rows.append((a, -1.0))
        result = simplex_min(LinearProgram(costs, lp_rows))
        if result.status == "infeasible":
            raise InfeasibleError("augmentation impossible: covering LP infeasible")
        if result.status == "unbounded":
            raise InvariantError("covering LP cannot be unbounded")
        x = np.clip(result.x, 0.0, 1.0)
    else:
        raise InvariantError("cutting-plane loop exceeded its round cap")

    tight = []
    for f_set in ctx.omega:
        mass = float(sum(x[i] for i, link in enumerate(links)
                         if covers(link, ctx.cuts[f_set])))
        if mass < 1 - EPS_FEAS:
            raise InvariantError(
                f"final LP solution leaves failure set {sorted(f_set)} uncovered "
                f"(mass {mass:.9f})")
        if mass <= 1 + EPS_FEAS:
            tight.append(f_set)
    return FractionalCover(links, x, float(costs @ x), tuple(tight), calls)
