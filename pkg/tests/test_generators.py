"""Generators: structure, determinism, and the vertex-cover reduction."""

import pytest

from bulkrobust import (Hypergraph, InstanceError, brute_force_opt,
                        brute_force_vc, gen_grid, gen_hypergraph_vc,
                        gen_series_parallel, parse_hypergraph, parse_instance,
                        random_hypergraph, reduce_hypergraph_vc,
                        serialize_hypergraph, serialize_instance, trace_faces)


def test_grid_basic():
    inst = gen_grid(2, 3, 1, 1, 1, seed=7)
    assert inst.node_count == 6
    assert len(inst.edges) == 7
    assert len(trace_faces(inst)) == 3
    assert inst.problem == "st" and inst.s == 0 and inst.t == 5


def test_grid_determinism():
    a = serialize_instance(gen_grid(3, 3, 2, 2, 5, seed=1))
    b = serialize_instance(gen_grid(3, 3, 2, 2, 5, seed=1))
    assert a == b
    c = serialize_instance(gen_grid(3, 3, 2, 2, 5, seed=2))
    assert a != c


def test_grid_small_diameter_cap():
    # on a 2x2 grid no feasible failure set can reach size 4: removing all
    # four edges (or any three) disconnects the corner terminals
    inst = gen_grid(2, 2, 1, 4, 1, seed=3)
    assert all(len(sc) <= 3 for sc in inst.scenarios)


def test_grid_roundtrip_and_feasibility():
    for seed in range(8):
        inst = gen_grid(2 + seed % 3, 3, 1 + seed % 4, 1 + seed % 4, 3,
                        seed=seed, problem="st" if seed % 2 else "mst")
        assert serialize_instance(parse_instance(serialize_instance(inst))) \
            == serialize_instance(inst)


def _series_parallel_reducible(inst):
    """Recognizer: merge parallel edges and splice interior degree-2 nodes
    until only a single s-t edge remains."""
    edges = {e: (u, v) for e, (u, v, _) in inst.edge_map.items()}
    s, t = inst.s, inst.t
    changed = True
    while changed:
        changed = False
        seen = {}
        for e, (u, v) in sorted(edges.items()):
            key = (min(u, v), max(u, v))
            if key in seen:
                del edges[e]
                changed = True
                break
            seen[key] = e
        if changed:
            continue
        degree = {}
        incident = {}
        for e, (u, v) in edges.items():
            for n in (u, v):
                degree[n] = degree.get(n, 0) + 1
                incident.setdefault(n, []).append(e)
        for n, d in sorted(degree.items()):
            if d == 2 and n not in (s, t):
                e1, e2 = incident[n]
                a = edges[e1][0] if edges[e1][1] == n else edges[e1][1]
                b = edges[e2][0] if edges[e2][1] == n else edges[e2][1]
                if a == b and a != n:
                    # would create a self-loop; treat as parallel merge
                    del edges[e2]
                else:
                    edges[e1] = (a, b)
                    del edges[e2]
                changed = True
                break
    return len(edges) == 1 and set(next(iter(edges.values()))) == {s, t}


def test_sp_depth0():
    inst = gen_series_parallel(0, 0, 1, 1, seed=0)
    assert inst.node_count == 2 and len(inst.edges) == 1
    assert len(trace_faces(inst)) == 1


def test_sp_depth1_parallel_root():
    inst = gen_series_parallel(1, 1, 1, 1, seed=9)
    assert inst.node_count == 2 and len(inst.edges) == 2
    assert len(trace_faces(inst)) == 2


def test_sp_structure_and_recognizer():
    for seed in range(10):
        inst = gen_series_parallel(3, 1, 2, 4, seed=seed)
        assert inst.graph.euler_defect() == 0
        assert _series_parallel_reducible(inst), seed


def test_sp_determinism():
    a = serialize_instance(gen_series_parallel(3, 2, 2, 5, seed=9))
    b = serialize_instance(gen_series_parallel(3, 2, 2, 5, seed=9))
    assert a == b


def test_hypergraph_validation():
    with pytest.raises(InstanceError, match="two parts"):
        Hypergraph(((0, 1), (1,)), ())
    with pytest.raises(InstanceError, match="exactly one node"):
        Hypergraph(((0,), (1,)), ((0,),))
    h = Hypergraph(((0, 1), (2,)), ((0, 2), (1, 2)))
    assert h.k == 2
    assert parse_hypergraph(serialize_hypergraph(h)).hyperedges == h.hyperedges


def test_reduction_single_hyperedge():
    h = Hypergraph(((0,), (1,)), ((0, 1),))
    inst = reduce_hypergraph_vc(h)
    assert inst.node_count == 2
    zero = [e for e, u, v, w in inst.edges if w == 0]
    unit = [e for e, u, v, w in inst.edges if w == 1]
    assert len(zero) == 2 and len(unit) == 2
    assert len(inst.scenarios) == 1 and len(inst.scenarios[0]) == 2
    opt, _ = brute_force_opt(inst)
    vc, _ = brute_force_vc(h)
    assert opt == vc == 1


def test_reduction_two_hyperedges_shared_node():
    h = Hypergraph(((0, 1), (2,)), ((0, 2), (1, 2)))
    vc, witness = brute_force_vc(h)
    assert vc == 1 and witness == frozenset({2})
    opt, _ = brute_force_opt(reduce_hypergraph_vc(h))
    assert opt == 1


def test_reduction_scenario_shape():
    for seed in range(12):
        k = 2 + seed % 3
        edges = min(2 + seed % 4, 2 ** k)
        h, inst = gen_hypergraph_vc(k, 2, edges, seed)
        assert len(inst.scenarios) == len(h.hyperedges)
        assert all(len(sc) == k for sc in inst.scenarios)
        assert inst.graph.euler_defect() == 0
        assert serialize_instance(parse_instance(serialize_instance(inst))) \
            == serialize_instance(inst)


def test_random_hypergraph_determinism():
    a = random_hypergraph(3, 2, 4, seed=5)
    b = random_hypergraph(3, 2, 4, seed=5)
    assert a == b
