#!/usr/bin/env python3
"""Regenerates the bundled scenario files in data/.

Usage: python3 scripts/make_datasets.py [output_dir]
"""

import copy
import json
import pathlib
import sys

FORMAT_VERSION = 1


def node(i, kind="centroid"):
    return {"id": i, "kind": kind}


def group(gid, o, d, demand, utility, optout=None):
    g = {"id": gid, "origin": o, "destination": d, "demand": demand, "trip_utility": utility}
    if optout is not None:
        g["optout_disutility"] = optout
    return g


def line(walking_13=20.0, name="line"):
    return {
        "format_version": FORMAT_VERSION,
        "name": name,
        "nodes": [node(1), node(2), node(3)],
        "walking_links": [
            {"tail": 1, "head": 3, "travel_cost": walking_13},
            {"tail": 2, "head": 3, "travel_cost": 6.0},
        ],
        "transfer_links": [],
        "fixed_route_operators": [
            {
                "id": 1,
                "name": "line 1-2",
                # Operating cost 480 follows from the quoted fare floor 2.4 on 200 users.
                "links": [{"tail": 1, "head": 2, "options": [{"travel_cost": 12.0, "operating_cost": 480.0}]}],
            }
        ],
        "mod_operators": [],
        "traveler_groups": [group(1, 1, 3, 100.0, 25.0), group(2, 1, 2, 100.0, 25.0)],
    }


def toy():
    # Structure follows the illustrative network description; link costs
    # are not published in text form, so these values are placeholders.
    def fixed(oid, name, links):
        return {
            "id": oid,
            "name": name,
            "links": [
                {"tail": t, "head": h, "options": [{"travel_cost": tc, "operating_cost": c, "capacity": w}]}
                for t, h, tc, c, w in links
            ],
        }

    def mod(oid, name, zones, q):
        return {
            "id": oid,
            "name": name,
            "zones": zones,
            "fleet_sizes": [1, 2, 3],
            "access": {"a1": 0.5, "b1": 1.0, "b2": -2.0},
            "operating": {"a2": 1.0, "b3": 2.0},
            "opening_cost": q,
            "link_travel_cost": {"rule": "shortest_path_factor", "factor": 0.75},
        }

    return {
        "format_version": FORMAT_VERSION,
        "name": "toy",
        "unverified": "link costs are placeholders, not read from the published figure",
        "nodes": [node(1), node(3), node(4), node(21), node(22), node(23), node(11, "station"), node(12, "station")],
        "walking_links": [
            {"tail": 1, "head": 3, "travel_cost": 9.0},
            {"tail": 1, "head": 4, "travel_cost": 9.5},
        ],
        "transfer_links": [
            {"tail": 21, "head": 22, "travel_cost": 0.5},
            {"tail": 21, "head": 23, "travel_cost": 0.5},
        ],
        "fixed_route_operators": [
            fixed(1, "red", [(1, 21, 2.0, 800.0, 1500.0)]),
            fixed(2, "purple", [(1, 22, 3.0, 900.0, 1000.0)]),
            fixed(3, "orange", [(23, 4, 2.0, 200.0, 800.0)]),
            fixed(4, "grey", [(21, 3, 4.5, 700.0, 1500.0)]),
            fixed(5, "teal", [(22, 3, 3.0, 400.0, 1500.0)]),
            fixed(6, "olive", [(21, 11, 1.0, 150.0, 600.0), (11, 12, 1.0, 150.0, 600.0), (12, 4, 2.0, 200.0, 600.0)]),
        ],
        "mod_operators": [
            mod(7, "blue", [1, 21, 3], [3.0, 3.0, 2.0]),
            mod(8, "green", [21, 3], [2.0, 1.0]),
            mod(9, "brown", [21, 4], [1.0, 3.0]),
        ],
        "traveler_groups": [group(1, 1, 3, 1000.0, 9.5), group(2, 1, 4, 500.0, 9.5)],
    }


# Sioux Falls line links: (tail, head, travel cost, operating cost, capacity).
SIOUX_LINKS = [
    (1, 2, 6, 0, 25900), (2, 1, 6, 0, 25900), (3, 4, 4, 0, 17111), (4, 3, 4, 0, 17111),
    (4, 5, 2, 0, 17783), (5, 4, 2, 0, 17783), (5, 6, 4, 0, 4948), (6, 5, 4, 0, 4948),
    (7, 8, 3, 0, 7842), (8, 7, 3, 0, 7842), (8, 9, 10, 0, 5050), (9, 8, 10, 0, 5050),
    (10, 11, 5, 0, 10000), (10, 16, 4, 0, 4855), (10, 17, 8, 0, 4994), (11, 10, 5, 0, 10000),
    (11, 12, 6, 0, 4909), (12, 11, 6, 0, 4909), (13, 24, 4, 0, 5091), (14, 15, 5, 0, 5128),
    (15, 14, 5, 0, 5128), (15, 19, 3, 0, 14565), (16, 10, 4, 0, 4855), (16, 18, 3, 0, 19680),
    (17, 10, 8, 0, 4994),
    (18, 16, 3, 0, 19680), (18, 20, 4, 0, 23403), (19, 15, 3, 0, 14565), (20, 18, 4, 0, 23403),
    (20, 21, 6, 0, 5060), (20, 22, 5, 0, 5076), (21, 20, 6, 0, 5060), (21, 24, 3, 0, 4885),
    (22, 20, 5, 0, 5076), (22, 23, 4, 0, 5000), (23, 22, 4, 0, 5000), (24, 13, 4, 0, 5091),
    (24, 21, 3, 0, 4885), (1, 3, 4, 400, 23403), (2, 6, 5, 400, 4958), (3, 1, 4, 400, 23403),
    (3, 12, 4, 400, 23403), (4, 11, 6, 400, 4909), (5, 9, 5, 400, 10000), (6, 2, 5, 400, 4958),
    (6, 8, 2, 400, 4899), (8, 6, 2, 400, 4899), (8, 16, 5, 400, 5046), (9, 5, 5, 400, 10000),
    (9, 10, 3, 400, 13916),
    (10, 9, 3, 400, 13916), (10, 15, 6, 400, 13512), (11, 4, 6, 400, 4909), (11, 14, 4, 400, 4877),
    (12, 3, 4, 400, 23403), (12, 13, 3, 400, 25900), (13, 12, 3, 400, 25900), (14, 11, 4, 400, 4877),
    (14, 23, 4, 400, 4925), (15, 10, 6, 400, 13512), (15, 22, 3, 400, 9599), (16, 8, 5, 400, 5046),
    (16, 17, 2, 400, 5230), (17, 16, 2, 400, 5230), (17, 19, 2, 400, 4824), (19, 17, 2, 400, 4824),
    (19, 20, 4, 400, 5003), (20, 19, 4, 400, 5003), (21, 22, 2, 400, 5230), (22, 15, 3, 400, 9599),
    (22, 21, 2, 400, 5230), (23, 14, 4, 400, 4925), (23, 24, 2, 400, 5079), (24, 23, 2, 400, 5079),
]

# Sioux Falls demand: (OD id, origin, destination, demand).
SIOUX_OD = [
    (1, 2, 1, 100), (2, 12, 1, 200), (3, 18, 1, 100), (4, 13, 1, 500), (5, 20, 1, 300),
    (6, 1, 2, 100), (7, 12, 2, 100), (8, 18, 2, 100), (9, 13, 2, 300), (10, 20, 2, 100),
    (11, 1, 12, 200), (12, 2, 12, 100), (13, 18, 12, 200), (14, 13, 12, 1300), (15, 20, 12, 500),
    (16, 1, 18, 100), (17, 2, 18, 100), (18, 12, 18, 200), (19, 13, 18, 100), (20, 20, 18, 400),
    (21, 1, 13, 500), (22, 2, 13, 300), (23, 12, 13, 1300), (24, 18, 13, 100), (25, 20, 13, 600),
    (26, 1, 20, 300), (27, 2, 20, 100), (28, 12, 20, 400), (29, 18, 20, 400), (30, 13, 20, 600),
]

# Transit lines as station chains; each consecutive pair is served both ways.
SIOUX_LINES = [
    (1, "blue line", [1, 3, 12, 13]),
    (2, "pink line", [2, 6, 8, 16, 17, 19, 20]),
    (3, "yellow line", [4, 11, 14, 23, 24]),
    (4, "green line", [5, 9, 10, 15, 22, 21]),
]

# Candidate MOD regions. Operator 5 covers the zones it serves in the
# reduced-cost case and operator 6 covers nodes 20 and 24; the rest of each
# region is a best guess.
SIOUX_MOD = [
    (5, "purple MOD", [1, 2, 3, 8, 10, 11, 12, 16], 10.0),
    (6, "light blue MOD", [13, 14, 15, 18, 19, 20, 21, 22, 23, 24], 5.0),
    (7, "orange MOD", [4, 5, 6, 7, 9, 10, 14, 15, 17, 18, 19], 15.0),
]


def sioux_falls():
    params = {(t, h): (tc, c, w) for t, h, tc, c, w in SIOUX_LINKS}
    operators = []
    used = set()
    for oid, name, chain in SIOUX_LINES:
        links = []
        for a, b in zip(chain, chain[1:]):
            for t, h in ((a, b), (b, a)):
                tc, c, w = params[(t, h)]
                assert c == 400, (t, h)
                used.add((t, h))
                links.append({"tail": t, "head": h,
                              "options": [{"travel_cost": float(tc), "operating_cost": float(c), "capacity": float(w)}]})
        operators.append({"id": oid, "name": name, "links": links})
    assert used == {(t, h) for t, h, _, c, _ in SIOUX_LINKS if c == 400}
    walking = [{"tail": t, "head": h, "travel_cost": float(tc)} for t, h, tc, c, _ in SIOUX_LINKS if c == 0]
    mods = [
        {
            "id": oid,
            "name": name,
            "zones": zones,
            "fleet_sizes": [1, 2],
            "access": {"a1": 2.0, "b1": 1.0, "b2": -2.0},
            "operating": {"a2": 4.0, "b3": 2.0},
            "opening_cost": [q] * len(zones),
            "link_travel_cost": {"rule": "shortest_path_factor", "factor": 0.75},
        }
        for oid, name, zones, q in SIOUX_MOD
    ]
    assert sum(d for *_, d in SIOUX_OD) == 9700
    return {
        "format_version": FORMAT_VERSION,
        "name": "sioux_falls",
        "nodes": [node(i) for i in range(1, 25)],
        "walking_links": walking,
        "transfer_links": [],
        "fixed_route_operators": operators,
        "mod_operators": mods,
        "traveler_groups": [group(g, o, d, float(q), 20.0) for g, o, d, q in SIOUX_OD],
    }


def reduced_cost(base, a1, name):
    s = copy.deepcopy(base)
    s["name"] = name
    for op in s["mod_operators"]:
        if op["id"] == 5:
            op["access"]["a1"] = a1
            op["operating"]["a2"] = 2.0
    return s


def heterogeneous(base):
    s = copy.deepcopy(base)
    s["name"] = "sioux_falls_heterogeneous"
    groups = []
    for g in base["traveler_groups"]:
        half = g["demand"] / 2.0
        groups.append(group(2 * g["id"] - 1, g["origin"], g["destination"], half, 24.0))
        groups.append(group(2 * g["id"], g["origin"], g["destination"], half, 16.0))
    s["traveler_groups"] = groups
    return s


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "data")
    out.mkdir(parents=True, exist_ok=True)
    base = sioux_falls()
    files = {
        "line.json": line(),
        "line_walk19.json": line(19.0, "line_walk19"),
        "line_walk18_5.json": line(18.5, "line_walk18_5"),
        "toy.json": toy(),
        "sioux_falls.json": base,
        "sioux_falls_reduced_cost.json": reduced_cost(base, 2.0, "sioux_falls_reduced_cost"),
        "sioux_falls_reduced_cost_half_access.json": reduced_cost(base, 1.0, "sioux_falls_reduced_cost_half_access"),
        "sioux_falls_heterogeneous.json": heterogeneous(base),
    }
    for name, doc in files.items():
        (out / name).write_text(json.dumps(doc, indent=2) + "\n")
        print(out / name)


if __name__ == "__main__":
    main()
