"""Per-augmentation-level preprocessing and typed-link enumeration.

A level-i step receives the current solution X (feasible when at most i-1
edges of any one scenario fail) and prepares everything the LP and the
rounding stage need: the relevant failure sets, the contracted embedded
subgraph, the two-sided cuts, and the per-face shortest-path links.
"""

import heapq
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .errors import BudgetError, InvariantError
from .instance import UnionFind, induced_faces, same_component

OMEGA_CAP = 10 ** 5


# -- deterministic shortest paths -----------------------------------------

def dijkstra(adj, source):
    """Distance map from source; adj maps node -> ((edge_id, other, w), ...)."""
    dist = {source: 0}
    heap = [(0, source)]
    while heap:
        d, node = heapq.heappop(heap)
        if d > dist.get(node, float("inf")):
            continue
        for _, other, w in adj.get(node, ()):
            nd = d + w
            if nd < dist.get(other, float("inf")):
                dist[other] = nd
                heapq.heappush(heap, (nd, other))
    return dist


def lex_shortest_path(adj, src, dst):
    """Minimum-cost simple src-dst path; ties broken by the lexicographically
    smallest edge-id sequence.  Returns (cost, edge id tuple) or None.

    Runs a depth-first search in increasing edge-id order, pruned with exact
    distances to the target, and stops at the first optimum it completes;
    that path is the lexicographic minimum.
    """
    if src == dst:
        return 0, ()
    dist = dijkstra(adj, dst)
    if src not in dist:
        return None
    best = dist[src]
    path = []
    visited = {src}

    def walk(node, cost):
        if node == dst:
            return True
        for eid, other, w in adj.get(node, ()):
            if other in visited:
                continue
            rest = dist.get(other)
            if rest is None or cost + w + rest > best:
                continue
            visited.add(other)
            path.append(eid)
            if walk(other, cost + w):
                return True
            path.pop()
            visited.remove(other)
        return False

    if not walk(src, 0):
        raise InvariantError("pruned path search missed a reachable target")
    return best, tuple(path)


# -- step data -------------------------------------------------------------

@dataclass(frozen=True)
class TypedLink:
    """A shortest path between two boundary nodes, confined to one induced face."""

    u: int
    v: int
    face: int
    path: tuple      # edge ids, all assigned to `face`
    cost: int


@dataclass(frozen=True)
class FailureCut:
    """The two components a relevant failure set leaves behind."""

    scenario: frozenset
    side_s: frozenset
    side_t: frozenset


@dataclass
class StepContext:
    """Everything one augmentation level needs; immutable after creation."""

    instance: object
    level: int
    x_edges: frozenset
    omega: tuple                    # relevant failure sets, deterministic order
    graph: object = None            # contracted PlaneGraph
    node_map: dict = field(default_factory=dict)   # original node -> contracted node
    kept_x: frozenset = frozenset()
    e_rest: dict = field(default_factory=dict)     # candidate edge ids -> (u, v, w)
    subgraph: object = None         # EmbeddedSubgraph of (graph, kept_x)
    contracted: tuple = ()          # X edges contracted away
    dropped_loops: tuple = ()       # candidate edges lost as loops
    cuts: dict = field(default_factory=dict)       # failure set -> FailureCut
    scenario_faces: dict = field(default_factory=dict)  # failure set -> face indices
    s: int = None
    t: int = None
    cut_face_checks: int = 0        # validated (failure set, face) pairs


def _subset_requirement_ok(instance, x, removed):
    return instance.requirement_holds(x - removed)


def preprocess_step(instance, x_edges, level):
    """Build the StepContext for augmentation level `level`.

    Enumerates the relevant failure sets (size-`level` subsets of input
    scenarios that disconnect the requirement in (V, X)), contracts every
    X edge that appears in none of them, and validates the structural
    guarantees the later stages rely on.
    """
    x = frozenset(x_edges)
    if not x <= instance.edge_ids:
        raise ValueError("X contains unknown edge ids")
    if not 1 <= level:
        raise ValueError("level must be >= 1")

    # X must survive every failure of fewer than `level` edges.
    for jdx, full in enumerate(instance.scenario_sets):
        size = min(level - 1, len(full))
        for sub in combinations(sorted(full), size):
            if not _subset_requirement_ok(instance, x, frozenset(sub)):
                raise ValueError(
                    f"X is not feasible for level {level - 1}: removing "
                    f"{sorted(sub)} from scenario {jdx} disconnects it")

    total = sum(comb(len(f), level) for f in instance.scenario_sets if len(f) >= level)
    if total > OMEGA_CAP:
        raise BudgetError(
            f"failure-set enumeration needs {total} subsets (cap {OMEGA_CAP})")

    relevant = set()
    for full in instance.scenario_sets:
        if len(full) < level:
            continue
        for sub in combinations(sorted(full), level):
            fs = frozenset(sub)
            if not fs <= x:
                continue  # removal reduces to a smaller subset, never disconnects
            if fs in relevant:
                continue
            if not _subset_requirement_ok(instance, x, fs):
                relevant.add(fs)
    omega = tuple(sorted(relevant, key=lambda f: tuple(sorted(f))))

    ctx = StepContext(instance=instance, level=level, x_edges=x, omega=omega)
    if not omega:
        return ctx

    union_omega = frozenset().union(*omega)
    if not union_omega <= x:
        raise InvariantError("a relevant failure set contains a non-X edge")

    graph = instance.graph
    node_map = {v: v for v in graph.nodes}
    dropped = []
    contracted = []
    for e in sorted(x - union_omega):
        if e not in graph.edges:
            continue  # already lost as a parallel loop
        graph, nm, loops = graph.contract(e)
        contracted.append(e)
        node_map = {orig: nm[cur] for orig, cur in node_map.items()}
        dropped.extend(loops)
    if set(dropped) & union_omega:
        raise InvariantError("contraction deleted an edge of a relevant failure set")
    if graph.euler_defect() != 0:
        raise InvariantError("contracted graph lost its planar embedding")

    kept = union_omega
    sub_nodes = frozenset(n for e in kept for n in graph.endpoints(e))
    if level >= 2:
        for e in sorted(kept):
            u, v, _ = graph.edges[e]
            others = [graph.endpoints(e2) for e2 in kept if e2 != e]
            if not same_component(u, v, others, nodes=sub_nodes):
                raise InvariantError(
                    f"edge {e} is a bridge of the contracted solution at level {level}")

    subgraph = induced_faces(graph, kept)
    e_rest = {e: graph.edges[e] for e in sorted(graph.edges) if e not in kept}

    cuts = {}
    for f_set in omega:
        uf = UnionFind(sub_nodes)
        for e in kept:
            if e not in f_set:
                uf.union(*graph.endpoints(e))
        comps = uf.components()
        if len(comps) != 2:
            raise InvariantError(
                f"failure set {sorted(f_set)} leaves {len(comps)} components, "
                "expected exactly 2")
        if instance.problem == "st":
            s_c = node_map[instance.s]
            first = comps[0] if s_c in comps[0] else comps[1]
        else:
            first = comps[0] if min(sub_nodes) in comps[0] else comps[1]
        second = comps[1] if first is comps[0] else comps[0]
        for e in f_set:
            u, v, _ = graph.edges[e]
            if (u in first) == (v in first):
                raise InvariantError(
                    f"edge {e} of failure set {sorted(f_set)} does not cross its cut")
        cuts[f_set] = FailureCut(f_set, frozenset(first), frozenset(second))

    scenario_faces = {}
    checks = 0
    if level >= 2:
        face_edges = subgraph.face_edge_sets
        for f_set in omega:
            two_sided = []
            for idx, edges_on_face in enumerate(face_edges):
                cnt = len(f_set & edges_on_face)
                checks += 1
                if cnt not in (0, 2):
                    raise InvariantError(
                        f"face {idx} carries {cnt} edges of failure set "
                        f"{sorted(f_set)}; expected 0 or 2")
                if cnt == 2:
                    two_sided.append(idx)
            if len(two_sided) != level:
                raise InvariantError(
                    f"failure set {sorted(f_set)} lies on {len(two_sided)} faces, "
                    f"expected exactly {level}")
            scenario_faces[f_set] = tuple(two_sided)

    ctx.graph = graph
    ctx.node_map = node_map
    ctx.kept_x = kept
    ctx.e_rest = e_rest
    ctx.subgraph = subgraph
    ctx.contracted = tuple(contracted)
    ctx.dropped_loops = tuple(sorted(dropped))
    ctx.cuts = cuts
    ctx.scenario_faces = scenario_faces
    ctx.cut_face_checks = checks
    if instance.problem == "st":
        ctx.s = node_map[instance.s]
        ctx.t = node_map[instance.t]
    return ctx


def failure_components(ctx, f_set):
    """The two-sided cut of a relevant failure set."""
    cut = ctx.cuts.get(frozenset(f_set))
    if cut is None:
        raise ValueError(f"{sorted(f_set)} is not a relevant failure set of this step")
    return cut


def covers(link_or_pair, cut):
    """True iff the link's endpoints lie on different sides of the cut.

    Depends only on the endpoints, never on the representative path.
    """
    if isinstance(link_or_pair, TypedLink):
        u, v = link_or_pair.u, link_or_pair.v
    else:
        u, v = link_or_pair
    for node in (u, v):
        if node not in cut.side_s and node not in cut.side_t:
            raise ValueError(f"node {node} is not incident to the current solution")
    return (u in cut.side_s) != (v in cut.side_s)


def enumerate_typed_links(ctx):
    """All face-confined shortest-path links between boundary node pairs.

    For each induced face and each unordered pair of distinct boundary
    nodes, the cheapest path through the candidate edges assigned to that
    face (omitted when none exists).  Tie-breaking is deterministic.
    """
    links = []
    face_edge_lists = {}
    for e, f in ctx.subgraph.edge_face.items():
        face_edge_lists.setdefault(f, []).append(e)
    for face_idx in range(len(ctx.subgraph.faces)):
        pool = sorted(face_edge_lists.get(face_idx, ()))
        if not pool:
            continue
        adj = {}
        for e in pool:
            u, v, w = ctx.e_rest[e]
            adj.setdefault(u, []).append((e, v, w))
            adj.setdefault(v, []).append((e, u, w))
        adj = {n: tuple(sorted(lst)) for n, lst in adj.items()}
        boundary = sorted(ctx.subgraph.face_nodes[face_idx])
        for u, v in combinations(boundary, 2):
            if u not in adj or v not in adj:
                continue
            found = lex_shortest_path(adj, u, v)
            if found is None:
                continue
            cost, path = found
            links.append(TypedLink(u, v, face_idx, path, cost))
    return tuple(links)
