"""Step preprocessing, cuts, the cover relation, typed links."""

import pytest

from bulkrobust import (covers, enumerate_typed_links, failure_components,
                        gen_grid, preprocess_step)
from bulkrobust.driver import minimum_spanning_tree as mst
from bulkrobust.links import dijkstra, lex_shortest_path
from conftest import square_with_chords, triangle_instance


def test_preprocess_triangle_level1():
    tri = triangle_instance()
    ctx = preprocess_step(tri, {0}, 1)
    assert ctx.omega == (frozenset({0}),)
    assert ctx.contracted == ()
    cut = failure_components(ctx, {0})
    assert cut.side_s == frozenset({0}) and cut.side_t == frozenset({1})
    assert covers((0, 1), cut)


def test_preprocess_square_level2():
    sq = square_with_chords(inner=True, outer=False)
    ctx = preprocess_step(sq, {0, 1, 2, 3}, 2)
    assert ctx.omega == (frozenset({0, 2}),)
    # the two cycle edges outside the failure set contract away, leaving a
    # two-edge cycle between the merged s-side and the merged a/t-side
    assert set(ctx.contracted) == {1, 3}
    assert ctx.kept_x == frozenset({0, 2})
    cut = failure_components(ctx, {0, 2})
    s_side = ctx.node_map[0]
    a_side = ctx.node_map[1]
    assert ctx.node_map[3] == s_side and ctx.node_map[2] == a_side
    assert cut.side_s == frozenset({s_side})
    assert cut.side_t == frozenset({a_side})
    assert covers((s_side, a_side), cut) is True


def test_covers_square_cut_by_hand():
    # cut sides {s, b} vs {a, t}: s-a crosses, s-b does not, s-t crosses
    from bulkrobust import FailureCut
    cut = FailureCut(frozenset({0, 2}), frozenset({0, 3}), frozenset({1, 2}))
    assert covers((0, 1), cut) is True
    assert covers((0, 3), cut) is False
    assert covers((0, 2), cut) is True


def test_preprocess_irrelevant_scenario():
    g = gen_grid(2, 3, 1, 1, 1, seed=7)
    tree = mst(g)
    non_tree = sorted(set(g.edge_map) - tree)
    inst = type(g)(g.node_count, g.edges, g.rotation, g.problem, g.s, g.t,
                   scenarios=[(non_tree[0],)])
    ctx = preprocess_step(inst, tree, 1)
    assert ctx.omega == ()


def test_preprocess_rejects_infeasible_x():
    sq = square_with_chords(inner=True, outer=False)
    with pytest.raises(ValueError, match="not feasible"):
        preprocess_step(sq, {0, 1}, 2)  # a bare path cannot survive level 1


def test_preprocess_contracts_unprotected_edges():
    # X is the path s-a-t; only e0 is threatened, so e1 contracts away
    sq = square_with_chords(inner=True, outer=False, scenarios=((0,),))
    ctx = preprocess_step(sq, {0, 1}, 1)
    assert ctx.omega == (frozenset({0}),)
    assert ctx.contracted == (1,)
    assert ctx.kept_x == frozenset({0})


def test_preprocess_cycle_ignores_single_failures():
    # removing one edge of a cycle never disconnects it
    sq = square_with_chords(inner=True, outer=False, scenarios=((0,),))
    ctx = preprocess_step(sq, {0, 1, 2, 3}, 1)
    assert ctx.omega == ()


def test_failure_components_tree_edge():
    g = gen_grid(2, 3, 1, 1, 1, seed=7)
    tree = sorted(mst(g))
    inst = type(g)(g.node_count, g.edges, g.rotation, g.problem, g.s, g.t,
                   scenarios=[(tree[0],)])
    ctx = preprocess_step(inst, frozenset(tree), 1)
    cut = failure_components(ctx, {tree[0]})
    assert len(cut.side_s) + len(cut.side_t) == len(ctx.subgraph.nodes)


def test_covers_is_endpoint_only_and_symmetric():
    sq = square_with_chords(inner=True, outer=False)
    ctx = preprocess_step(sq, {0, 1, 2, 3}, 2)
    cut = failure_components(ctx, {0, 2})
    assert covers((0, 1), cut) == covers((1, 0), cut)
    with pytest.raises(ValueError, match="not incident"):
        covers((0, 99), cut)


def test_typed_links_triangle():
    tri = triangle_instance()
    ctx = preprocess_step(tri, {0}, 1)
    links = enumerate_typed_links(ctx)
    assert len(links) == 1
    link = links[0]
    assert (link.u, link.v) == (0, 1)
    assert link.path == (1, 2)
    assert link.cost == 2


def test_typed_links_empty_interior():
    # chord-free square cycle: no candidate edges, so no links (the bare
    # instance is infeasible as a whole, which is fine for a step test)
    from conftest import square_cycle
    sq = square_cycle(scenarios=((0, 2),), precheck=False)
    ctx = preprocess_step(sq, {0, 1, 2, 3}, 2)
    assert ctx.omega == (frozenset({0, 2}),)
    assert enumerate_typed_links(ctx) == ()


def test_typed_links_grid_outer_cycle():
    # X = the grid's outer cycle; a two-edge failure splits it and the
    # middle edge is the only candidate, living in the merged inner face
    g = gen_grid(2, 3, 1, 1, 1, seed=7)
    mid = next(e for e, (u, v, _) in g.edge_map.items() if {u, v} == {1, 4})
    outer = frozenset(g.edge_map) - {mid}
    e_a = next(e for e, (u, v, _) in g.edge_map.items() if {u, v} == {0, 1})
    e_b = next(e for e, (u, v, _) in g.edge_map.items() if {u, v} == {4, 5})
    inst = type(g)(g.node_count, g.edges, g.rotation, g.problem, g.s, g.t,
                   scenarios=[(e_a, e_b)])
    ctx = preprocess_step(inst, outer, 2)
    links = enumerate_typed_links(ctx)
    assert len(links) == 1
    assert links[0].path == (mid,)
    assert {links[0].u, links[0].v} == {ctx.node_map[1], ctx.node_map[4]}
    assert links[0].cost == g.edge_map[mid][2]


def test_typed_link_costs_match_face_dijkstra():
    for seed in range(6):
        g = gen_grid(3, 3, 2, 2, 3, seed=seed)
        x0 = frozenset(mst(g))
        ctx = preprocess_step(g, x0, 1)
        if not ctx.omega:
            continue
        links = enumerate_typed_links(ctx)
        face_edges = {}
        for e, f in ctx.subgraph.edge_face.items():
            face_edges.setdefault(f, []).append(e)
        for link in links:
            adj = {}
            for e in face_edges[link.face]:
                u, v, w = ctx.e_rest[e]
                adj.setdefault(u, []).append((e, v, w))
                adj.setdefault(v, []).append((e, u, w))
            dist = dijkstra(adj, link.u)
            assert dist[link.v] == link.cost
            assert sum(ctx.e_rest[e][2] for e in link.path) == link.cost


def test_face_cut_structure_validated():
    # level-2 contexts run the zero-or-two check on every face
    sq = square_with_chords(inner=True, outer=True)
    ctx = preprocess_step(sq, {0, 1, 2, 3}, 2)
    assert ctx.cut_face_checks > 0
    assert ctx.scenario_faces[frozenset({0, 2})] == (0, 1)


def test_enumeration_cap(monkeypatch):
    import bulkrobust.links as links_mod
    from bulkrobust import BudgetError
    monkeypatch.setattr(links_mod, "OMEGA_CAP", 1)
    tri = triangle_instance(scenarios=((0,), (1,)))
    with pytest.raises(BudgetError, match="cap"):
        preprocess_step(tri, {0}, 1)


def test_lex_shortest_path_tie_break():
    # two equal-cost routes; the lexicographically smaller edge sequence wins
    adj = {
        0: ((0, 1, 1), (1, 2, 1)),
        1: ((0, 0, 1), (2, 3, 1)),
        2: ((1, 0, 1), (3, 3, 1)),
        3: ((2, 1, 1), (3, 2, 1)),
    }
    cost, path = lex_shortest_path(adj, 0, 3)
    assert cost == 2
    assert path == (0, 2)
