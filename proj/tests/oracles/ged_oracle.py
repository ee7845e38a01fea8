"""Exact unit-cost GED for small hand-written graphs via networkx.

Node label = element, edge label = bond order; every insertion, deletion and
label change costs 1. Output is frozen into tests/test_ged.cpp.
"""

import networkx as nx


def graph(atoms, bonds):
    g = nx.Graph()
    for i, a in enumerate(atoms):
        g.add_node(i, el=a)
    for i, j, o in bonds:
        g.add_edge(i, j, order=o)
    return g


def ged(a, b):
    return nx.graph_edit_distance(
        a,
        b,
        node_match=lambda x, y: x["el"] == y["el"],
        edge_match=lambda x, y: x["order"] == y["order"],
    )


def chain(atoms, order=1):
    return graph(atoms, [(i, i + 1, order) for i in range(len(atoms) - 1)])


PAIRS = {
    ("C", "CC"): (chain("C"), chain("CC")),
    ("CCO", "CCN"): (chain("CCO"), chain("CCN")),
    ("CCO", "OCC"): (chain("CCO"), chain("OCC")),
    ("C1CC1", "CCC"): (graph("CCC", [(0, 1, 1), (1, 2, 1), (2, 0, 1)]), chain("CCC")),
    ("CC=O", "CCO"): (graph("CCO", [(0, 1, 1), (1, 2, 2)]), chain("CCO")),
    ("CC(C)C", "CCCC"): (graph("CCCC", [(0, 1, 1), (1, 2, 1), (1, 3, 1)]), chain("CCCC")),
    ("c1ccccc1", "C1CCCCC1"): (
        graph("CCCCCC", [(i, (i + 1) % 6, 4) for i in range(6)]),
        graph("CCCCCC", [(i, (i + 1) % 6, 1) for i in range(6)]),
    ),
    ("CCN", "NCCO"): (chain("CCN"), chain("NCCO")),
    ("O", "CCC"): (chain("O"), chain("CCC")),
}

if __name__ == "__main__":
    for (s1, s2), (a, b) in PAIRS.items():
        print('    {"%s", "%s", %d},' % (s1, s2, ged(a, b)))
