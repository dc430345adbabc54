"""Shared fixtures and instance builders."""

import pytest

from bulkrobust import Instance, gen_grid, gen_series_parallel


def triangle_instance(problem="st", scenarios=((0,),)):
    """3 nodes, edges e0={0,1}, e1={0,2}, e2={2,1}, unit weights."""
    s, t = (0, 1) if problem == "st" else (None, None)
    return Instance(3, [(0, 0, 1, 1), (1, 0, 2, 1), (2, 2, 1, 1)],
                    {0: [0, 1], 1: [0, 2], 2: [1, 2]}, problem, s, t, scenarios)


def square_cycle(scenarios=((0,),), weights=(1, 1, 1, 1), precheck=True):
    """4-cycle s=0, a=1, t=2, b=3 with edges e0=sa, e1=at, e2=tb, e3=bs."""
    w = weights
    return Instance(4, [(0, 0, 1, w[0]), (1, 1, 2, w[1]),
                        (2, 2, 3, w[2]), (3, 3, 0, w[3])],
                    {0: [0, 3], 1: [1, 0], 2: [2, 1], 3: [3, 2]},
                    "st", 0, 2, scenarios, precheck=precheck)


def square_with_chords(inner=True, outer=True, chord_weight=5,
                       scenarios=((0, 2),)):
    """The square cycle plus an s-t chord inside and/or outside."""
    edges = [(0, 0, 1, 1), (1, 1, 2, 1), (2, 2, 3, 1), (3, 3, 0, 1)]
    rot = {0: [0, 3], 1: [1, 0], 2: [2, 1], 3: [3, 2]}
    if inner:
        edges.append((4, 0, 2, chord_weight))
        rot[0] = [0, 4, 3]
        rot[2] = [2, 4, 1]
    if outer:
        eid = 5 if inner else 4
        edges.append((eid, 0, 2, chord_weight))
        rot[0] = rot[0] + [eid]
        rot[2] = [eid] + rot[2]
    return Instance(4, edges, rot, "st", 0, 2, scenarios)


def grid_2x3():
    return gen_grid(2, 3, 1, 1, 1, seed=7)


SUITE_DIMS = ((2, 3), (3, 3), (2, 4), (3, 4), (2, 5), (3, 5), (4, 4), (2, 6))


def suite_schedule(count=200):
    """Deterministic acceptance-suite schedule: grid and series-parallel,
    both problems, n <= 30, scenario count <= 6, diameter <= 4."""
    schedule = []
    for idx in range(count):
        family = "grid" if idx % 2 == 0 else "sp"
        problem = "st" if (idx // 2) % 2 == 0 else "mst"
        params = {
            "family": family,
            "problem": problem,
            "m": 1 + idx % 6,
            "k": 1 + idx % 4,
            "wmax": (1, 2, 3, 5)[idx % 4],
            "seed": 1000 + idx,
        }
        if family == "grid":
            params["dims"] = SUITE_DIMS[(idx // 2) % len(SUITE_DIMS)]
        else:
            params["depth"] = 1 + (idx // 2) % 4
        schedule.append(params)
    return schedule


def build_suite_instance(params):
    if params["family"] == "grid":
        rows, cols = params["dims"]
        return gen_grid(rows, cols, params["m"], params["k"], params["wmax"],
                        params["seed"], problem=params["problem"])
    return gen_series_parallel(params["depth"], params["m"], params["k"],
                               params["wmax"], params["seed"],
                               problem=params["problem"])


@pytest.fixture
def triangle():
    return triangle_instance()


@pytest.fixture
def square():
    return square_cycle()
